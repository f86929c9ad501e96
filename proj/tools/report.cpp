#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "diracbound/errors.hpp"

namespace dbtool {

const char* const kToolVersion = "1.0.0";

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string render_json(const Report& r, const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["kind"] = r.kind;
  j["version"] = kToolVersion;
  j["tolerance"] = num(r.tolerance);
  nlohmann::ordered_json c = nlohmann::ordered_json::object();
  for (const auto& [k, v] : echo(cfg)) c[k] = v;
  j["config"] = c;
  j["results"] = r.results;
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string render_csv(const Report& r) {
  std::string out;
  auto row = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_field(cells[i]);
    out += "\n";
  };
  row(r.csvHeader);
  for (const auto& cells : r.csvRows) row(cells);
  return out;
}

void write_report(const Report& r, const RunConfig& cfg) {
  const std::string text = cfg.format == "csv" ? render_csv(r) : render_json(r, cfg);
  if (cfg.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(cfg.out);
  if (!f) throw db::Error(db::ErrorKind::Config, "cannot write '" + cfg.out + "'");
  f << text;
}

}  // namespace dbtool

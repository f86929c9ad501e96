#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"

namespace dbtool {

extern const char* const kToolVersion;

// Decimal string with 17 significant digits ("nan", "inf", "-inf" for non-finite values).
std::string num(double x);

struct Report {
  std::string kind;
  double tolerance = 0.0;
  nlohmann::ordered_json results = nlohmann::ordered_json::array();
  std::vector<std::string> notes;
  std::vector<std::string> csvHeader;
  std::vector<std::vector<std::string>> csvRows;
};

// JSON: {"kind", "version", "tolerance", "config", "results", "notes"}. CSV: header and rows.
// Written to cfg.out, or standard output when it is empty.
void write_report(const Report& report, const RunConfig& cfg);

std::string render_json(const Report& report, const RunConfig& cfg);
std::string render_csv(const Report& report);

}  // namespace dbtool

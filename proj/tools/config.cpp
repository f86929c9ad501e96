#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "diracbound/errors.hpp"

namespace dbtool {

using db::Error;
using db::ErrorKind;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::Config, "'" + key + "' expects a number, got '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::Config, "'" + key + "' expects an integer, got '" + v + "'");
}

std::string one_of(const std::string& key, const std::string& v, const std::set<std::string>& allowed) {
  if (allowed.count(v)) return v;
  std::string list;
  for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
  throw Error(ErrorKind::Config, "'" + key + "' must be one of {" + list + "}, got '" + v + "'");
}

// Section-qualified names of the configuration file mapped to flat keys.
const std::map<std::string, std::map<std::string, std::string>>& sections() {
  static const std::map<std::string, std::map<std::string, std::string>> s{
      {"geometry",
       {{"kind", "geometry"},
        {"L1", "L1"},
        {"L2", "L2"},
        {"spin", "spin"},
        {"radius", "radius"},
        {"n", "n"},
        {"rho_in", "rho_in"},
        {"rho_out", "rho_out"},
        {"length", "length"},
        {"circumference", "circumference"},
        {"scale", "scale"}}},
      {"bundle", {{"twist", "twist"}}},
      {"bc", {{"kind", "bc"}, {"b", "b"}, {"sign", "sign"}}},
      {"solver", {{"k", "k"}, {"resolution", "resolution"}, {"modes", "modes"}, {"tol", "tol"}, {"method", "method"}}},
      {"output", {{"path", "out"}, {"format", "format"}}},
      {"run",
       {{"seed", "seed"},
        {"theorem", "theorem"},
        {"gamma", "gamma"},
        {"suite", "suite"},
        {"sigma", "sigma"},
        {"refinements", "refinements"},
        {"quantity", "quantity"},
        {"instances", "instances"}}},
  };
  return s;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "geometry") {
    c.geometry = one_of(key, v, {"torus", "sphere", "disk", "ball", "annulus", "cylinder"});
    c.geometryGiven = true;
  } else if (key == "L1") c.L1 = to_double(key, v);
  else if (key == "L2") c.L2 = to_double(key, v);
  else if (key == "spin") {
    const auto comma = v.find(',');
    if (comma == std::string::npos) {
      c.spin = {static_cast<int>(to_int(key, v)), 0};
    } else {
      c.spin = {static_cast<int>(to_int(key, trim(v.substr(0, comma)))),
                static_cast<int>(to_int(key, trim(v.substr(comma + 1))))};
    }
  } else if (key == "radius") c.radius = to_double(key, v);
  else if (key == "n") c.n = static_cast<int>(to_int(key, v));
  else if (key == "rho_in") c.rho_in = to_double(key, v);
  else if (key == "rho_out") c.rho_out = to_double(key, v);
  else if (key == "length") c.length = to_double(key, v);
  else if (key == "circumference") c.circumference = to_double(key, v);
  else if (key == "scale") c.scale = to_double(key, v);
  else if (key == "twist") c.twist = to_double(key, v);
  else if (key == "bc") c.bc = one_of(key, v, {"none", "mit", "local", "aps", "maps"});
  else if (key == "b") c.b = to_double(key, v);
  else if (key == "sign") {
    const long long s = to_int(key, v);
    if (s != 1 && s != -1) throw Error(ErrorKind::Config, "'sign' must be 1 or -1");
    c.sign = static_cast<int>(s);
  } else if (key == "k") c.k = static_cast<int>(to_int(key, v));
  else if (key == "resolution") c.resolution = static_cast<int>(to_int(key, v));
  else if (key == "modes") c.modes = static_cast<int>(to_int(key, v));
  else if (key == "tol") c.tol = to_double(key, v);
  else if (key == "method") c.method = one_of(key, v, {"auto", "staggered", "shooting"});
  else if (key == "seed") {
    const long long s = to_int(key, v);
    if (s < 0) throw Error(ErrorKind::Config, "'seed' must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "out") c.out = v;
  else if (key == "format") c.format = one_of(key, v, {"json", "csv"});
  else if (key == "theorem") c.theorem = one_of(key, v, {"t1", "thm2", "aps", "maps", "volaps", "volmaps"});
  else if (key == "gamma") c.gamma = to_double(key, v);
  else if (key == "suite") c.suite = one_of(key, v, {"identities", "boundary", "scaling", "all"});
  else if (key == "sigma") c.sigma = to_double(key, v);
  else if (key == "refinements") c.refinements = static_cast<int>(to_int(key, v));
  else if (key == "quantity") c.quantity = one_of(key, v, {"lambda", "bochner", "b1", "DD", "D"});
  else if (key == "instances") c.instances = static_cast<int>(to_int(key, v));
  else throw Error(ErrorKind::Config, "unknown key '" + key + "'");
}

void load_config_text(RunConfig& cfg, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line, section;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineNo) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorKind::Config, where + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!sections().count(section)) throw Error(ErrorKind::Config, where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Config, where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (section.empty()) throw Error(ErrorKind::Config, where + "key '" + key + "' outside a section");
    const auto& keys = sections().at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) throw Error(ErrorKind::Config, where + "unknown key '" + key + "' in [" + section + "]");
    try {
      apply_setting(cfg, it->second, line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorKind::Config, where + e.what());
    }
  }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Config, "cannot read configuration file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  load_config_text(cfg, ss.str(), path);
}

db::DiracBundleSpec make_bundle(const RunConfig& c) {
  db::GeometrySpec g;
  if (c.geometry == "torus") g = db::make_torus(c.L1, c.L2, c.spin);
  else if (c.geometry == "sphere") g = db::make_sphere(c.n, c.radius);
  else if (c.geometry == "disk") g = db::make_disk(c.radius, c.n);
  else if (c.geometry == "ball") g = db::make_disk(c.radius, 3);
  else if (c.geometry == "annulus") g = db::make_annulus(c.rho_in, c.rho_out);
  else g = db::make_cylinder(c.length, c.circumference, c.spin[0], c.n);
  g.scale = c.scale;
  db::validate(g);
  const db::DiracBundleSpec b{g, c.twist};
  db::validate(b);
  return b;
}

db::BoundaryCondition make_bc(const RunConfig& c) {
  db::BoundaryCondition bc;
  if (c.bc == "mit") bc = db::BoundaryCondition::mit(c.sign);
  else if (c.bc == "local") bc = db::BoundaryCondition::local(c.sign);
  else if (c.bc == "aps") bc = db::BoundaryCondition::aps(c.b);
  else if (c.bc == "maps") bc = db::BoundaryCondition::maps(c.b, c.sign);
  else {
    bc = db::BoundaryCondition::none();
    bc.b = c.b;
    bc.sign = c.sign;
  }
  return bc;
}

int effective_resolution(const RunConfig& c) {
  if (c.resolution) return *c.resolution;
  return c.geometry == "torus" ? 16 : 256;
}

std::vector<std::pair<std::string, std::string>> echo(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> e{{"geometry", c.geometry}};
  if (c.geometry == "torus") {
    e.push_back({"L1", fmt(c.L1)});
    e.push_back({"L2", fmt(c.L2)});
    e.push_back({"spin", std::to_string(c.spin[0]) + "," + std::to_string(c.spin[1])});
  } else if (c.geometry == "sphere" || c.geometry == "disk" || c.geometry == "ball") {
    e.push_back({"radius", fmt(c.radius)});
    e.push_back({"n", std::to_string(c.geometry == "ball" ? 3 : c.n)});
  } else if (c.geometry == "annulus") {
    e.push_back({"rho_in", fmt(c.rho_in)});
    e.push_back({"rho_out", fmt(c.rho_out)});
  } else {
    e.push_back({"length", fmt(c.length)});
    e.push_back({"circumference", fmt(c.circumference)});
    e.push_back({"spin", std::to_string(c.spin[0])});
    e.push_back({"n", std::to_string(c.n)});
  }
  e.push_back({"scale", fmt(c.scale)});
  e.push_back({"twist", fmt(c.twist)});
  e.push_back({"bc", c.bc});
  e.push_back({"b", fmt(c.b)});
  e.push_back({"sign", std::to_string(c.sign)});
  e.push_back({"k", std::to_string(c.k)});
  e.push_back({"resolution", std::to_string(effective_resolution(c))});
  e.push_back({"modes", std::to_string(c.modes)});
  e.push_back({"tol", fmt(c.tol)});
  e.push_back({"method", c.method});
  e.push_back({"seed", std::to_string(c.seed)});
  return e;
}

}  // namespace dbtool

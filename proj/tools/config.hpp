#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "diracbound/boundary_condition.hpp"
#include "diracbound/geometry.hpp"

namespace dbtool {

// Every setting of a run. Keys of the configuration file and command-line flags share names.
struct RunConfig {
  std::string geometry = "disk";  // torus, sphere, disk, ball, annulus, cylinder
  double L1 = 1.0, L2 = 1.0;
  std::array<int, 2> spin{0, 0};
  double radius = 1.0;
  int n = 2;
  double rho_in = 0.5, rho_out = 1.0;
  double length = 1.0, circumference = 1.0;
  double scale = 1.0;
  double twist = 0.0;
  std::string bc = "none";  // none, mit, local, aps, maps
  double b = 0.0;
  int sign = +1;
  int k = 6;
  std::optional<int> resolution;
  int modes = 4;
  double tol = 1e-8;
  std::string method = "auto";
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  std::string theorem = "t1";
  std::optional<double> gamma;
  std::string suite = "all";
  double sigma = 2.0;
  int refinements = 4;
  std::string quantity = "lambda";
  int instances = 100;
  bool geometryGiven = false;
};

// Sets one value by its flat key (as used on the command line). Unknown keys and malformed
// values raise a configuration error.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

// Reads `key = value` lines grouped under [geometry], [bundle], [bc], [solver], [output] and
// [run] headers. '#' starts a comment.
void load_config_file(RunConfig& cfg, const std::string& path);
void load_config_text(RunConfig& cfg, const std::string& text, const std::string& origin = "<text>");

db::DiracBundleSpec make_bundle(const RunConfig& cfg);
db::BoundaryCondition make_bc(const RunConfig& cfg);
// Default resolution: 16 Fourier modes per side on the torus, 256 cells elsewhere.
int effective_resolution(const RunConfig& cfg);

// Ordered (key, value) echo of the configuration.
std::vector<std::pair<std::string, std::string>> echo(const RunConfig& cfg);

}  // namespace dbtool

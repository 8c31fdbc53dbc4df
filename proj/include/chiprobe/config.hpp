#pragma once

// Run configuration: a flat key = value text format with '#' comments.
// Later occurrences of a key override earlier ones, and override lines
// (command-line --set) are applied after the file.

#include <cstdint>
#include <string>
#include <vector>

#include "chiprobe/core_model.hpp"
#include "chiprobe/reconstruction.hpp"

namespace chiprobe {

enum class Command { kScan, kReconstruct, kMoments, kCat, kOracleCheck, kBudget };

const char* to_string(Command command);

enum class GridShape { kSquare, kDisk };

struct RunConfig {
  Command command = Command::kScan;
  std::string state = "vacuum:";

  double r0 = 0.0;
  double r_max = 0.5;
  int n_max = 10;

  // Angular frequencies in rad/s. Defaults are the laboratory-scale values
  // Omega = 2pi 100 MHz, kappa = 2pi 50 kHz, Gamma1 = Gamma2 = 2pi 0.4 MHz,
  // N_m = 19.5 (Delta = 20), giving gamma = kappa Delta = 2pi 1 MHz.
  double omega = kTwoPi * 100e6;
  double kappa = kTwoPi * 50e3;
  double gamma1 = kTwoPi * 0.4e6;
  double gamma2 = kTwoPi * 0.4e6;
  double n_m = 19.5;
  double n_q = 0.0;

  double grid_extent = 3.5;
  int grid_resolution = 41;
  GridShape grid_shape = GridShape::kSquare;

  ShotPolicy shots{};
  std::uint64_t seed = 1;
  std::string output = "chiprobe-out";
  Engine engine = Engine::kAnalytic;
  DampingMode f_mode = DampingMode::kExact;
  int dim = 30;
  unsigned threads = 0;

  std::vector<double> moment_thetas{0.0};
  int moment_order = 4;
  double moment_r_max = 0.5;
  int moment_radii = 16;

  double cat_r = 0.5;
  double cat_phi = kPi / 2;
  int cat_n = 4;
  double cat_varphi = 0.0;
  int cat_sign = 1;

  std::vector<double> budget_f{};
  double budget_epsilon = 0.2;

  int oracle_points = 25;

  DecoherenceParams params() const { return {kappa, gamma1, gamma2, n_m, n_q}; }
};

struct ConfigIssue {
  std::string where;  // "line 7" or "--set 2"
  std::string field;
  std::string message;
};

struct ConfigParseResult {
  RunConfig config;
  std::vector<ConfigIssue> issues;  // empty when config is valid

  bool ok() const { return issues.empty(); }
  /// One issue per line: "<where>: <field>: <message>".
  std::string describe() const;
};

/// Parses text, then applies each override ("key=value"). Collects every
/// issue instead of stopping at the first.
ConfigParseResult parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

/// Angular frequency from "<number> <unit>" with unit Hz, kHz, MHz, GHz
/// (cyclic, converted with 2pi), rad/s, or omega (multiples of omega, which
/// must be given). Hz-family values may carry an explicit "*2pi" suffix or
/// "2pi*" prefix; it marks the same cyclic convention and is not applied twice.
/// Throws kConfig on bare numbers or unknown units.
double parse_rate(const std::string& text, double omega);

/// Canonical key = value listing that parses back to the same config.
std::string to_text(const RunConfig& config);

}  // namespace chiprobe

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "modcrit/core.hpp"

namespace modcrit::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

/// Bad flag combination or unparseable value; exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;

  // point selection
  bool b1 = false;
  std::string curve;   // burnside, d6, z5, d3x, klein
  std::string point;   // a named critical representative
  std::string matrix;  // comma-separated upper triangle, e.g. "a+bi, c+di, e+fi"
  std::string in;      // report to read the first result's matrix from

  // genus-one and strata coordinates
  bool genus1 = false, z2 = false, d2 = false, d3 = false;
  std::string sigma, x, y;
  std::string group = "gamma";

  int resolution = 0;  // 0: command default
  double ymax = 2.0;
  std::string trunc = "adaptive";
  double tail_tol = 1e-16;
  double tol = 0.0;  // 0: module default
  int workers = 0;
  std::string format = "json";
  std::string out;
  std::string family;
  std::string space = "full";
  std::string figure = "omega";
  std::vector<double> steps{1e-3, 1e-4, 1e-5};
  bool seed_boxes = false;
  int box_points = 5;
  double box_half = 0.05;
  int max_candidates = 0;

  TruncationPolicy policy() const;
  /// Throws UsageError on non-positive numeric parameters or an unknown format.
  void validate() const;
  json to_json() const;
};

/// "a+bi" with optional spaces; also "a", "bi", "i", "-i". Rejects inf and nan.
cplx parse_complex(const std::string& text);
std::string format_double(double v);
std::string format_complex(cplx z);

/// Runs one subcommand and returns its results array.
json run_command(const RunConfig& config);

/// The full report object {"command", "config", "results", "version"}.
json make_report(const RunConfig& config, const json& results);

/// CSV rendering: a '#' header comment with the config, a column line, one row per result.
/// Nested objects flatten to dotted names and arrays join with ';'.
std::string to_csv(const RunConfig& config, const json& results);

/// Exit code for a module error kind: 4 for numerical failures, 3 otherwise.
int exit_code_for(ErrorKind kind);

}  // namespace modcrit::cli

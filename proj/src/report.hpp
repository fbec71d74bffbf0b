#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bessel.hpp"
#include "discretize.hpp"
#include "eigensolve.hpp"
#include "verify.hpp"

namespace hodge::app {

enum class Command { ball, box, verify, constants, converge };
enum class Format { json, csv };

std::string_view to_string(Command c);
std::optional<Command> parse_command(std::string_view text);
std::string_view to_string(Format f);
std::optional<Format> parse_format(std::string_view text);

struct RunConfig {
  Command command = Command::box;
  int dim = 2;
  std::vector<double> extent;    // empty: 1 on every axis
  std::vector<int> cells;        // empty: 63 on every axis
  std::vector<int> resolutions;  // empty: {15, 31, 63}
  std::vector<int> degrees;      // empty: 0..dim
  std::optional<int> degree;     // box/converge default 0; constants default every 1..n/2
  ProblemKind problem = ProblemKind::dirichlet_laplace;
  int count = 1;
  double tol = 1e-9;
  double radius = 1.0;
  double gamma = 1.0;
  unsigned threads = 1;
  std::string output;  // empty: stdout
  Format format = Format::json;
};

/// Fills defaults and re-checks every downstream constraint; throws
/// invalid_argument.
RunConfig validate(RunConfig config);

struct Report {
  RunConfig config;
  bool partial = false;  // numerical failure; the sections hold what was computed
  std::string error;
  std::optional<ErrorCode> error_code;
  std::vector<Spectrum> spectra;
  std::vector<verify::Check> checks;
  std::vector<verify::ConstantsBundle> constants;
  std::optional<bessel::BallSpectrum> ball;
  std::vector<verify::ConvergenceStudy> studies;
};

/// Validation errors propagate; numerical failures give a partial report.
Report run(const RunConfig& config);

std::string to_json(const Report& report);
std::string to_csv(const Report& report);
std::string serialize(const Report& report, Format format);

/// Writes to `path`, or stdout when empty. Throws io_failure.
void write_report(const Report& report, Format format, const std::string& path);

RunConfig config_from_json(const std::string& text);
std::string config_to_json(const RunConfig& config);

/// Inverse of to_json.
Report report_from_json(const std::string& text);

}  // namespace hodge::app

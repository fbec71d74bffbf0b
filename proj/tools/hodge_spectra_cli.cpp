#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hodge_spectra/hodge_spectra.h"
#include "json.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kFailure = 2;

struct Flags {
  int dim = 2;
  double radius = 1.0;
  std::vector<double> extent;
  std::vector<int> cells;
  std::vector<int> resolutions;
  std::vector<int> degrees;
  int degree = 0;
  std::string problem;
  int count = 1;
  double tol = 1e-9;
  double gamma = 1.0;
  std::string output;
  std::string format = "json";
};

// Returns 0 when unset, -1 when malformed.
long threads_from_env() {
  const char* text = std::getenv("HODGE_SPECTRA_THREADS");
  if (!text) return 0;
  const std::string s(text);
  long value = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size() || value < 1) return -1;
  return value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalue lab for clamped-plate, buckling and Hodge Laplacian problems on forms"};
  app.set_version_flag("--version", hs_version());
  app.require_subcommand(1);

  Flags f;
  app.add_option("--dim", f.dim, "Dimension n");
  app.add_option("--radius", f.radius, "Ball radius");
  app.add_option("--extent", f.extent, "Box side lengths, comma separated")->delimiter(',');
  app.add_option("--cells", f.cells, "Interior cells per axis, comma separated")->delimiter(',');
  app.add_option("--resolutions", f.resolutions, "Cells per axis for each convergence level")
      ->delimiter(',');
  app.add_option("--degrees", f.degrees, "Form degrees for the battery")->delimiter(',');
  app.add_option("--degree", f.degree, "Form degree p");
  app.add_option("--problem", f.problem,
                 "clamped_plate | buckling | dirichlet_laplace | absolute_laplace");
  app.add_option("--count", f.count, "Number of eigenvalues");
  app.add_option("--tol", f.tol, "Relative residual tolerance");
  app.add_option("--gamma", f.gamma, "Curvature lower-bound parameter");
  app.add_option("--output", f.output, "Report path (stdout when omitted)");
  app.add_option("--format", f.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"ball", "Closed-form first eigenvalues of the ball and their chain"},
      {"box", "Lowest eigenvalues of one problem on a box"},
      {"verify", "Convergence studies and the inequality battery on a box"},
      {"constants", "Curvature-bound and sphere constants"},
      {"converge", "Richardson study of one problem"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  const long threads = threads_from_env();
  if (threads < 0) {
    std::fprintf(stderr, "error: HODGE_SPECTRA_THREADS must be an integer >= 1\n");
    return kUsage;
  }

  nlohmann::ordered_json config;
  config["command"] = app.get_subcommands().front()->get_name();
  const auto set = [&](const char* flag, const char* key, auto value) {
    if (app.count(flag) > 0) config[key] = value;
  };
  set("--dim", "dim", f.dim);
  set("--radius", "radius", f.radius);
  set("--extent", "extent", f.extent);
  set("--cells", "cells", f.cells);
  set("--resolutions", "resolutions", f.resolutions);
  set("--degrees", "degrees", f.degrees);
  set("--degree", "degree", f.degree);
  set("--problem", "problem", f.problem);
  set("--count", "count", f.count);
  set("--tol", "tol", f.tol);
  set("--gamma", "gamma", f.gamma);
  config["output"] = f.output;
  config["format"] = f.format;
  if (threads > 0) config["threads"] = threads;

  hs_report* report = nullptr;
  const hs_status status = hs_run(config.dump().c_str(), &report);
  if (status == HS_INVALID_ARGUMENT) {
    std::fprintf(stderr, "error: %s\n", hs_last_error());
    hs_report_destroy(report);
    return kUsage;
  }
  if (!report) {
    std::fprintf(stderr, "error: %s: %s\n", hs_status_string(status), hs_last_error());
    return kFailure;
  }
  const std::string message = hs_last_error();
  const hs_status written = hs_report_write(report, nullptr, nullptr);
  hs_report_destroy(report);
  if (written != HS_OK) {
    std::fprintf(stderr, "error: %s\n", hs_last_error());
    return kFailure;
  }
  if (status != HS_OK) {
    std::fprintf(stderr, "error: %s: %s (partial report written)\n", hs_status_string(status),
                 message.c_str());
    return kFailure;
  }
  return 0;
}

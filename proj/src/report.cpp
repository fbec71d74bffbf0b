#include "report.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>

#include "json.hpp"

namespace hodge::app {
namespace {

using json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kVersion = "1.0.0";

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

std::vector<double> numbers(const json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(number(x));
  return v;
}

bool is_numerical(ErrorCode c) {
  return c == ErrorCode::no_convergence || c == ErrorCode::factorization_failure ||
         c == ErrorCode::numerical_failure;
}

verify::Relation parse_relation(const std::string& s) {
  if (s == "<") return verify::Relation::less;
  if (s == "<=") return verify::Relation::less_equal;
  if (s == "=") return verify::Relation::equal;
  fail(ErrorCode::invalid_argument, "unknown relation '" + s + "'");
}

verify::Status parse_status(const std::string& s) {
  for (auto st : {verify::Status::pass, verify::Status::fail, verify::Status::skipped,
                  verify::Status::constants_only}) {
    if (s == verify::to_string(st)) return st;
  }
  fail(ErrorCode::invalid_argument, "unknown status '" + s + "'");
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json spectrum_json(const Spectrum& s) {
  json j;
  j["label"] = s.label;
  j["degree"] = s.degree;
  j["kind"] = s.kind ? json(std::string(to_string(*s.kind))) : json(nullptr);
  j["values"] = numbers(s.values);
  j["residuals"] = numbers(s.residuals);
  j["multiplicities"] = multiplicities(s.values);
  j["deflated_kernel_dim"] = s.deflated_kernel_dim;
  j["iterations"] = s.iterations;
  return j;
}

Spectrum spectrum_from(const json& j) {
  Spectrum s;
  s.label = j.at("label").get<std::string>();
  s.degree = j.at("degree").get<int>();
  if (!j.at("kind").is_null()) s.kind = parse_problem_kind(j.at("kind").get<std::string>());
  s.values = numbers(j.at("values"));
  s.residuals = numbers(j.at("residuals"));
  s.deflated_kernel_dim = j.value("deflated_kernel_dim", 0);
  s.iterations = j.value("iterations", 0);
  return s;
}

json check_json(const verify::Check& c) {
  json j;
  j["name"] = c.name;
  j["lhs"] = number(c.lhs);
  j["rhs"] = number(c.rhs);
  j["relation"] = verify::to_string(c.relation);
  j["margin"] = number(c.margin);
  j["status"] = verify::to_string(c.status);
  j["tolerance"] = number(c.tolerance);
  j["source"] = c.source;
  j["note"] = c.note;
  return j;
}

verify::Check check_from(const json& j) {
  verify::Check c;
  c.name = j.at("name").get<std::string>();
  c.lhs = number(j.at("lhs"));
  c.rhs = number(j.at("rhs"));
  c.relation = parse_relation(j.at("relation").get<std::string>());
  c.margin = number(j.at("margin"));
  c.status = parse_status(j.at("status").get<std::string>());
  c.tolerance = number(j.value("tolerance", json(0.0)));
  c.source = j.value("source", "");
  c.note = j.value("note", "");
  return c;
}

json config_json(const RunConfig& c) {
  json j;
  j["command"] = std::string(to_string(c.command));
  j["dim"] = c.dim;
  j["extent"] = c.extent;
  j["cells"] = c.cells;
  j["resolutions"] = c.resolutions;
  j["degrees"] = c.degrees;
  j["degree"] = c.degree ? json(*c.degree) : json(nullptr);
  j["problem"] = std::string(to_string(c.problem));
  j["count"] = c.count;
  j["tol"] = c.tol;
  j["radius"] = c.radius;
  j["gamma"] = c.gamma;
  j["threads"] = c.threads;
  j["output"] = c.output;
  j["format"] = std::string(to_string(c.format));
  return j;
}

RunConfig config_from(const json& j) {
  require(j.is_object(), "config must be a JSON object");
  RunConfig c;
  if (j.contains("command")) {
    const auto cmd = parse_command(j.at("command").get<std::string>());
    require(cmd.has_value(), "unknown command '" + j.at("command").get<std::string>() + "'");
    c.command = *cmd;
  }
  c.dim = j.value("dim", c.dim);
  c.extent = j.value("extent", c.extent);
  c.cells = j.value("cells", c.cells);
  c.resolutions = j.value("resolutions", c.resolutions);
  c.degrees = j.value("degrees", c.degrees);
  if (j.contains("degree") && !j.at("degree").is_null()) c.degree = j.at("degree").get<int>();
  if (j.contains("problem")) {
    const auto text = j.at("problem").get<std::string>();
    const auto kind = parse_problem_kind(text);
    require(kind.has_value(), "unknown problem kind '" + text + "'");
    c.problem = *kind;
  }
  c.count = j.value("count", c.count);
  c.tol = j.value("tol", c.tol);
  c.radius = j.value("radius", c.radius);
  c.gamma = j.value("gamma", c.gamma);
  const int threads = j.value("threads", 1);
  require(threads >= 1, "threads must be >= 1");
  c.threads = static_cast<unsigned>(threads);
  c.output = j.value("output", c.output);
  if (j.contains("format")) {
    const auto f = parse_format(j.at("format").get<std::string>());
    require(f.has_value(), "unknown format '" + j.at("format").get<std::string>() + "'");
    c.format = *f;
  }
  return c;
}

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("malformed JSON: ") + e.what());
  }
}

std::vector<Spectrum> without_vectors(std::vector<Spectrum> v) {
  for (auto& s : v) s.vectors.clear();
  return v;
}

void run_converge(const RunConfig& c, const SolverOptions& opts, Report& r) {
  std::vector<std::vector<double>> levels(static_cast<std::size_t>(c.count));
  std::vector<double> spacings;
  Spectrum finest;
  for (int res : c.resolutions) {
    const std::vector<int> cells(static_cast<std::size_t>(c.dim), res);
    const BoxDomain d = build_domain(c.dim, c.extent, cells);
    finest = solve(assemble(d, *c.degree, c.problem), c.count, opts);
    for (int i = 0; i < c.count; ++i) levels[i].push_back(finest.values[i]);
    spacings.push_back(d.spacing[0]);
  }
  finest.vectors.clear();
  r.spectra.push_back(std::move(finest));
  for (int i = 0; i < c.count; ++i) {
    r.studies.push_back(verify::richardson(
        std::string(to_string(c.problem)) + "[p=" + std::to_string(*c.degree) + "]#" +
            std::to_string(i + 1),
        c.resolutions, spacings, levels[i]));
  }
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::ball: return "ball";
    case Command::box: return "box";
    case Command::verify: return "verify";
    case Command::constants: return "constants";
    case Command::converge: return "converge";
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view text) {
  for (auto c : {Command::ball, Command::box, Command::verify, Command::constants, Command::converge}) {
    if (text == to_string(c)) return c;
  }
  return std::nullopt;
}

std::string_view to_string(Format f) { return f == Format::json ? "json" : "csv"; }

std::optional<Format> parse_format(std::string_view text) {
  if (text == "json") return Format::json;
  if (text == "csv") return Format::csv;
  return std::nullopt;
}

RunConfig validate(RunConfig c) {
  const bool grid = c.command == Command::box || c.command == Command::verify ||
                    c.command == Command::converge;
  if (grid) {
    require(c.dim >= 1 && c.dim <= 3, "--dim must be 1, 2 or 3 for box problems");
  } else {
    require(c.dim >= 2 && c.dim <= 64, "--dim must be in [2, 64]");
  }
  const auto n = static_cast<std::size_t>(c.dim);
  if (grid) {
    if (c.extent.empty()) c.extent.assign(n, 1.0);
    require(c.extent.size() == n, "--extent needs one value per axis");
    for (double e : c.extent) require(e > 0.0 && std::isfinite(e), "--extent values must be positive");
    if (c.command == Command::box) {
      if (c.cells.empty()) c.cells.assign(n, 63);
      require(c.cells.size() == n, "--cells needs one value per axis");
      for (int k : c.cells) require(k >= 3, "--cells values must be >= 3");
    }
    if (c.command != Command::box) {
      if (c.resolutions.empty()) c.resolutions = {15, 31, 63};
      require(c.resolutions.size() >= 3, "--resolutions needs at least 3 levels");
      for (std::size_t i = 0; i < c.resolutions.size(); ++i) {
        require(c.resolutions[i] >= 3, "--resolutions values must be >= 3");
        require(i == 0 || c.resolutions[i] > c.resolutions[i - 1], "--resolutions must increase");
      }
    }
    if (c.command == Command::verify) {
      if (c.degrees.empty()) {
        for (int p = 0; p <= c.dim; ++p) c.degrees.push_back(p);
      }
      for (int p : c.degrees) require(p >= 0 && p <= c.dim, "--degrees values must lie in [0, dim]");
      const std::set<int> unique(c.degrees.begin(), c.degrees.end());
      require(unique.size() == c.degrees.size(), "--degrees must not repeat");
      c.degrees.assign(unique.begin(), unique.end());
    }
    if (c.command != Command::verify) {
      if (!c.degree) c.degree = 0;
      require(*c.degree >= 0 && *c.degree <= c.dim, "--degree must lie in [0, dim]");
    }
  }
  if (c.command == Command::constants && c.degree) {
    require(*c.degree >= 1 && *c.degree <= c.dim / 2, "--degree must satisfy 1 <= p <= floor(dim/2)");
  }
  require(c.count >= 1, "--count must be >= 1");
  require(c.tol > 0.0 && c.tol < 1.0, "--tol must lie in (0, 1)");
  require(c.radius > 0.0 && std::isfinite(c.radius), "--radius must be positive");
  require(c.gamma > 0.0 && std::isfinite(c.gamma), "--gamma must be positive");
  require(c.threads >= 1, "threads must be >= 1");
  return c;
}

Report run(const RunConfig& config) {
  Report r;
  r.config = validate(config);
  const RunConfig& c = r.config;
  SolverOptions opts;
  opts.tol = c.tol;
  opts.threads = c.threads;
  try {
    switch (c.command) {
      case Command::ball: {
        r.ball = bessel::ball_spectrum(c.dim, c.radius);
        verify::SpectrumSet set(c.dim);
        set.add_ball(*r.ball);
        for (auto& check : verify::check_inequalities(set, c.gamma).checks) {
          if (check.name.starts_with("ball.")) r.checks.push_back(std::move(check));
        }
        break;
      }
      case Command::box: {
        const BoxDomain d = build_domain(c.dim, c.extent, c.cells);
        Spectrum s = solve(assemble(d, *c.degree, c.problem), c.count, opts);
        s.vectors.clear();
        r.spectra.push_back(std::move(s));
        break;
      }
      case Command::verify: {
        auto battery = verify::run_box_battery(c.dim, c.extent, c.resolutions, c.degrees, opts, c.gamma);
        r.spectra = without_vectors(std::move(battery.finest));
        r.studies = std::move(battery.studies);
        r.checks = std::move(battery.report.checks);
        for (int p = 1; p <= c.dim / 2; ++p) r.constants.push_back(verify::evaluate_constants(c.dim, p, c.gamma));
        break;
      }
      case Command::constants: {
        for (int p = 1; p <= c.dim / 2; ++p) {
          if (!c.degree || *c.degree == p) r.constants.push_back(verify::evaluate_constants(c.dim, p, c.gamma));
        }
        const std::string tag = c.degree ? "[p=" + std::to_string(*c.degree) + "]" : "";
        for (auto& check : verify::check_inequalities(verify::SpectrumSet(c.dim), c.gamma).checks) {
          const bool keep = check.status != verify::Status::skipped &&
                            (tag.empty() || check.name.ends_with(tag) || check.name.ends_with("[n=2p]"));
          if (keep) r.checks.push_back(std::move(check));
        }
        break;
      }
      case Command::converge:
        run_converge(c, opts, r);
        break;
    }
  } catch (const ConvergenceError& e) {
    r.partial = true;
    r.error = e.what();
    r.error_code = e.code();
    Spectrum s = e.partial();
    s.vectors.clear();
    r.spectra.push_back(std::move(s));
  } catch (const Error& e) {
    if (!is_numerical(e.code())) throw;
    r.partial = true;
    r.error = e.what();
    r.error_code = e.code();
  }
  return r;
}

std::string to_json(const Report& r) {
  json j;
  json meta;
  meta["command"] = std::string(to_string(r.config.command));
  meta["config"] = config_json(r.config);
  meta["versions"] = {
      {"hodge_spectra", kVersion},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  meta["status"] = r.partial ? "partial" : "ok";
  meta["error"] = r.error.empty() ? json(nullptr) : json(r.error);
  meta["error_code"] = r.error_code ? json(static_cast<int>(*r.error_code)) : json(nullptr);
  j["meta"] = std::move(meta);

  j["spectra"] = json::array();
  for (const auto& s : r.spectra) j["spectra"].push_back(spectrum_json(s));
  j["checks"] = json::array();
  for (const auto& c : r.checks) j["checks"].push_back(check_json(c));

  json constants = json::object();
  if (!r.constants.empty()) {
    constants["dim"] = r.constants.front().dim;
    constants["gamma"] = r.constants.front().gamma;
    json list = json::array();
    for (const auto& b : r.constants) {
      list.push_back({{"degree", b.degree},
                      {"c_np", b.c_np},
                      {"dirichlet_bound", b.dirichlet_bound},
                      {"buckling_bound", b.buckling_bound},
                      {"clamped_bound", b.clamped_bound}});
    }
    constants["by_degree"] = std::move(list);
  }
  j["constants"] = std::move(constants);

  if (r.ball) {
    j["ball"] = {{"dim", r.ball->dim},
                 {"radius", r.ball->radius},
                 {"lambda1", r.ball->lambda1},
                 {"big_lambda1", r.ball->big_lambda1},
                 {"big_gamma1", r.ball->big_gamma1}};
  }
  if (!r.studies.empty()) {
    json list = json::array();
    for (const auto& s : r.studies) {
      list.push_back({{"label", s.label},
                      {"resolutions", s.resolutions},
                      {"values", numbers(s.values)},
                      {"extrapolated", number(s.extrapolated)},
                      {"observed_order", number(s.observed_order)},
                      {"error_estimate", number(s.error_estimate())}});
    }
    j["convergence"] = std::move(list);
  }
  return j.dump(2) + "\n";
}

std::string to_csv(const Report& r) {
  std::string out = "name,lhs,rhs,relation,margin,status\n";
  for (const auto& c : r.checks) {
    out += csv_field(c.name) + "," + csv_number(c.lhs) + "," + csv_number(c.rhs) + "," +
           verify::to_string(c.relation) + "," + csv_number(c.margin) + "," +
           verify::to_string(c.status) + "\n";
  }
  return out;
}

std::string serialize(const Report& report, Format format) {
  return format == Format::json ? to_json(report) : to_csv(report);
}

void write_report(const Report& report, Format format, const std::string& path) {
  const std::string text = serialize(report, format);
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) fail(ErrorCode::io_failure, "cannot write report to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io_failure, "cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) fail(ErrorCode::io_failure, "failed writing '" + path + "'");
}

RunConfig config_from_json(const std::string& text) {
  return guarded([&] { return config_from(json::parse(text)); });
}

std::string config_to_json(const RunConfig& config) { return config_json(config).dump(); }

Report report_from_json(const std::string& text) {
  return guarded([&] {
    const json j = json::parse(text);
    Report r;
    const json& meta = j.at("meta");
    r.config = config_from(meta.at("config"));
    r.partial = meta.at("status").get<std::string>() == "partial";
    if (!meta.at("error").is_null()) r.error = meta.at("error").get<std::string>();
    if (meta.contains("error_code") && !meta.at("error_code").is_null()) {
      r.error_code = static_cast<ErrorCode>(meta.at("error_code").get<int>());
    }
    for (const auto& s : j.at("spectra")) r.spectra.push_back(spectrum_from(s));
    for (const auto& c : j.at("checks")) r.checks.push_back(check_from(c));
    const json& constants = j.at("constants");
    if (constants.contains("by_degree")) {
      for (const auto& b : constants.at("by_degree")) {
        verify::ConstantsBundle cb;
        cb.dim = constants.at("dim").get<int>();
        cb.gamma = constants.at("gamma").get<double>();
        cb.degree = b.at("degree").get<int>();
        cb.c_np = b.at("c_np").get<double>();
        cb.dirichlet_bound = b.at("dirichlet_bound").get<double>();
        cb.buckling_bound = b.at("buckling_bound").get<double>();
        cb.clamped_bound = b.at("clamped_bound").get<double>();
        r.constants.push_back(cb);
      }
    }
    if (j.contains("ball")) {
      const json& b = j.at("ball");
      r.ball = bessel::BallSpectrum{b.at("dim").get<int>(), b.at("radius").get<double>(),
                                    b.at("lambda1").get<double>(), b.at("big_lambda1").get<double>(),
                                    b.at("big_gamma1").get<double>()};
    }
    if (j.contains("convergence")) {
      for (const auto& s : j.at("convergence")) {
        verify::ConvergenceStudy st;
        st.label = s.at("label").get<std::string>();
        st.resolutions = s.at("resolutions").get<std::vector<int>>();
        st.values = numbers(s.at("values"));
        st.extrapolated = number(s.at("extrapolated"));
        st.observed_order = number(s.at("observed_order"));
        r.studies.push_back(std::move(st));
      }
    }
    return r;
  });
}

}  // namespace hodge::app

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "report.hpp"

using namespace hodge;
using namespace hodge::app;

namespace {

bool has_code(ErrorCode code, auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

RunConfig make(Command c) {
  RunConfig cfg;
  cfg.command = c;
  return cfg;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("empty check list") {
  Report r;
  r.config = validate(make(Command::ball));
  const auto j = nlohmann::json::parse(to_json(r));
  CHECK(j.at("checks").is_array());
  CHECK(j.at("checks").empty());
  CHECK(j.at("meta").at("status") == "ok");
  CHECK(to_csv(r) == "name,lhs,rhs,relation,margin,status\n");
}

TEST_CASE("one passing check in CSV") {
  Report r;
  verify::Check c;
  c.name = "BuckCP[p=0]";
  c.lhs = 1.5;
  c.rhs = 2.25;
  c.margin = 0.75;
  c.status = verify::Status::pass;
  r.checks.push_back(c);
  const std::string csv = to_csv(r);
  CHECK(csv == "name,lhs,rhs,relation,margin,status\nBuckCP[p=0],1.5,2.25,<,0.75,pass\n");
}

TEST_CASE("names with commas are quoted") {
  Report r;
  verify::Check c;
  c.name = "duality[p=0,n-p=2]";
  c.relation = verify::Relation::equal;
  c.status = verify::Status::pass;
  r.checks.push_back(c);
  CHECK(to_csv(r).find("\"duality[p=0,n-p=2]\",0,0,=,0,pass\n") != std::string::npos);
}

TEST_CASE("JSON round trip is exact") {
  RunConfig cfg = make(Command::verify);
  cfg.resolutions = {7, 11, 15};
  cfg.extent = {1.0, 1.1};
  const Report r = run(cfg);
  const std::string text = to_json(r);
  const Report back = report_from_json(text);
  CHECK(to_json(back) == text);
  REQUIRE(back.spectra.size() == r.spectra.size());
  for (std::size_t i = 0; i < r.spectra.size(); ++i) {
    CHECK(back.spectra[i].values == r.spectra[i].values);
    CHECK(back.spectra[i].residuals == r.spectra[i].residuals);
  }
  REQUIRE(back.checks.size() == r.checks.size());
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    const auto& a = r.checks[i];
    const auto& b = back.checks[i];
    CHECK(a.name == b.name);
    CHECK(a.status == b.status);
    CHECK(((a.lhs == b.lhs) || (std::isnan(a.lhs) && std::isnan(b.lhs))));
    CHECK(((a.margin == b.margin) || (std::isnan(a.margin) && std::isnan(b.margin))));
  }
  CHECK(back.studies.size() == r.studies.size());
  CHECK(back.constants.size() == 1);
}

TEST_CASE("identical configurations give identical bytes") {
  RunConfig cfg = make(Command::box);
  cfg.cells = {31, 31};
  cfg.problem = ProblemKind::buckling;
  cfg.degree = 1;
  cfg.count = 3;
  CHECK(to_json(run(cfg)) == to_json(run(cfg)));
}

TEST_CASE("numbers keep full precision") {
  RunConfig cfg = make(Command::ball);
  const Report r = run(cfg);
  const auto j = nlohmann::json::parse(to_json(r));
  CHECK(j.at("ball").at("lambda1").get<double>() == r.ball->lambda1);
  CHECK(j.at("ball").at("big_gamma1").get<double>() == r.ball->big_gamma1);
}

TEST_CASE("constants command") {
  RunConfig cfg = make(Command::constants);
  cfg.dim = 4;
  cfg.degree = 2;
  const Report r = run(cfg);
  REQUIRE(r.constants.size() == 1);
  CHECK(r.constants[0].c_np == 14.0 / 3.0);
  const auto j = nlohmann::json::parse(to_json(r));
  CHECK(j.at("constants").at("by_degree")[0].at("c_np").get<double>() == doctest::Approx(4.666667));
  bool identity = false;
  for (const auto& c : r.checks) {
    CHECK(c.status != verify::Status::fail);
    identity = identity || c.name == "Sphere.identity[n=2p]";
  }
  CHECK(identity);
}

TEST_CASE("converge command") {
  RunConfig cfg = make(Command::converge);
  cfg.dim = 1;
  cfg.problem = ProblemKind::buckling;
  cfg.resolutions = {31, 63, 127};
  const Report r = run(cfg);
  REQUIRE(r.studies.size() == 1);
  CHECK(r.studies[0].extrapolated == doctest::Approx(4 * M_PI * M_PI).epsilon(1e-3));
}

TEST_CASE("validation") {
  auto bad = [](auto edit) {
    RunConfig cfg = make(Command::box);
    edit(cfg);
    return has_code(ErrorCode::invalid_argument, [&] { validate(cfg); });
  };
  CHECK(bad([](RunConfig& c) { c.dim = 4; }));
  CHECK(bad([](RunConfig& c) { c.extent = {1.0}; }));
  CHECK(bad([](RunConfig& c) { c.cells = {63, 2}; }));
  CHECK(bad([](RunConfig& c) { c.degree = 3; }));
  CHECK(bad([](RunConfig& c) { c.count = 0; }));
  CHECK(bad([](RunConfig& c) { c.tol = 0.0; }));
  CHECK(bad([](RunConfig& c) { c.tol = NAN; }));
  CHECK(bad([](RunConfig& c) {
    c.command = Command::converge;
    c.resolutions = {31, 15, 63};
  }));
  CHECK(bad([](RunConfig& c) {
    c.command = Command::constants;
    c.dim = 4;
    c.degree = 3;
  }));
  CHECK(bad([](RunConfig& c) {
    c.command = Command::ball;
    c.radius = -1.0;
  }));
  CHECK(bad([](RunConfig& c) {
    c.command = Command::verify;
    c.degrees = {0, 0};
  }));
  const RunConfig ok = validate(make(Command::box));
  CHECK(ok.cells == std::vector<int>{63, 63});
  CHECK(ok.extent == std::vector<double>{1.0, 1.0});
  CHECK(*ok.degree == 0);
}

TEST_CASE("count beyond the unknowns is a usage error") {
  RunConfig cfg = make(Command::box);
  cfg.dim = 1;
  cfg.cells = {5};
  cfg.count = 6;
  CHECK(has_code(ErrorCode::invalid_argument, [&] { run(cfg); }));
}

TEST_CASE("unreachable tolerance gives a partial report") {
  RunConfig cfg = make(Command::box);
  cfg.dim = 1;
  cfg.cells = {300};
  cfg.problem = ProblemKind::clamped_plate;
  cfg.tol = 1e-20;
  const Report r = run(cfg);
  CHECK(r.partial);
  CHECK(r.error_code == ErrorCode::no_convergence);
  CHECK(r.spectra.size() == 1);
  CHECK(nlohmann::json::parse(to_json(r)).at("meta").at("status") == "partial");
}

TEST_CASE("config JSON") {
  const RunConfig c = config_from_json(R"({"command":"box","dim":3,"problem":"buckling","degree":2})");
  CHECK(c.command == Command::box);
  CHECK(c.dim == 3);
  CHECK(c.problem == ProblemKind::buckling);
  CHECK(config_from_json(config_to_json(c)).dim == 3);
  CHECK(has_code(ErrorCode::invalid_argument, [] { config_from_json("{"); }));
  CHECK(has_code(ErrorCode::invalid_argument, [] { config_from_json(R"({"dim":"two"})"); }));
  CHECK(has_code(ErrorCode::invalid_argument, [] { config_from_json(R"({"command":"plot"})"); }));
  CHECK(has_code(ErrorCode::invalid_argument, [] { config_from_json(R"({"problem":"robin"})"); }));
  CHECK(has_code(ErrorCode::invalid_argument, [] { config_from_json("[]"); }));
}

TEST_CASE("writing") {
  Report r;
  r.config = validate(make(Command::ball));
  const auto path = std::filesystem::temp_directory_path() / "hodge_report_test.csv";
  write_report(r, Format::csv, path.string());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == to_csv(r));
  std::filesystem::remove(path);
  CHECK(has_code(ErrorCode::io_failure, [&] { write_report(r, Format::json, "/nonexistent/dir/r.json"); }));
}

}  // TEST_SUITE

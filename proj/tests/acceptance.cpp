// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bessel.hpp"
#include "discretize.hpp"
#include "eigensolve.hpp"
#include "oracles.hpp"
#include "report.hpp"
#include "verify.hpp"

using namespace hodge;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Worst residual over every eigenpair solved in this run.
double worst_residual = 0.0;

Spectrum tracked(const FormProblem& p, int count, const SolverOptions& opts = {}) {
  Spectrum s = solve(p, count, opts);
  for (double r : s.residuals) worst_residual = std::max(worst_residual, r);
  return s;
}

BoxDomain cube(int dim, int cells) {
  const std::vector<double> extent(static_cast<std::size_t>(dim), 1.0);
  const std::vector<int> c(static_cast<std::size_t>(dim), cells);
  return build_domain(dim, extent, c);
}

double extrapolated(ProblemKind kind) {
  std::vector<double> values;
  std::vector<double> spacings;
  const std::vector<int> res{31, 63, 127};
  for (int r : res) {
    const BoxDomain d = cube(1, r);
    values.push_back(tracked(assemble(d, 0, kind), 1).values[0]);
    spacings.push_back(d.spacing[0]);
  }
  return verify::richardson("", res, spacings, values).extrapolated;
}

Outcome bessel_zeros() {
  Outcome o;
  using bessel::BesselOrder;
  const double j0 = bessel::first_zero_j(BesselOrder(0));
  const double j1 = bessel::first_zero_j(BesselOrder(2));
  const double jh = bessel::first_zero_j(BesselOrder(1));
  const double k0 = bessel::first_zero_cross(BesselOrder(0));
  const double kh = bessel::first_zero_cross(BesselOrder(1));
  o.expect(std::abs(j0 - 2.4048255577) < 1e-9, fmt("j0 = %.12f", j0));
  o.expect(std::abs(j1 - 3.8317059702) < 1e-9, fmt("j1 = %.12f", j1));
  o.expect(std::abs(jh - pi) < 1e-9, fmt("j1/2 = %.12f", jh));
  o.expect(std::abs(k0 - 3.196221) < 1e-5, fmt("k0 = %.8f", k0));
  o.expect(std::abs(kh - 3.926602) < 1e-5, fmt("k1/2 = %.8f", kh));
  o.expect(std::abs(j0 - oracle::zero_j0()) < 1e-9, "j0 disagrees with its oracle");
  o.expect(std::abs(j1 - oracle::zero_j1()) < 1e-9, "j1 disagrees with its oracle");
  o.expect(std::abs(jh - oracle::zero_j_half()) < 1e-9, "j1/2 disagrees with its oracle");
  o.expect(std::abs(k0 - oracle::zero_cross0()) < 1e-9, "k0 disagrees with its oracle");
  o.expect(std::abs(kh - oracle::zero_cross_half()) < 1e-9, "k1/2 disagrees with its oracle");
  if (o.ok) o.detail = fmt("j0=%.10f j1=%.10f k0=%.6f k1/2=%.6f", j0, j1, k0, kh);
  return o;
}

Outcome ball_chain() {
  Outcome o;
  double smallest = INFINITY;
  for (int n = 2; n <= 8; ++n) {
    for (double r : {0.5, 1.0, 2.0}) {
      const auto s = bessel::ball_spectrum(n, r);
      const double links[][2] = {{s.big_gamma1, s.big_lambda1 * s.big_lambda1},
                                 {s.big_lambda1 * s.lambda1, s.big_gamma1},
                                 {s.lambda1 * s.lambda1, s.big_lambda1 * s.lambda1}};
      for (const auto& l : links) {
        const double margin = (l[1] - l[0]) / l[1];
        smallest = std::min(smallest, margin);
        o.expect(margin > 1e-3, fmt("n=%d R=%g margin %.3e", n, r, margin));
      }
    }
  }
  if (o.ok) o.detail = fmt("smallest relative margin %.4f", smallest);
  return o;
}

Outcome interval_targets() {
  Outcome o;
  const double m = oracle::clamped_beam_root();
  const double gamma_target = m * m * m * m;
  const double gamma = extrapolated(ProblemKind::clamped_plate);
  const double lambda = extrapolated(ProblemKind::buckling);
  const double eg = std::abs(gamma - gamma_target) / gamma_target;
  const double el = std::abs(lambda - 4 * pi * pi) / (4 * pi * pi);
  o.expect(std::abs(gamma_target - 500.5639) < 1e-3, fmt("oracle %.6f", gamma_target));
  o.expect(eg < 1e-3, fmt("clamped %.6f rel err %.2e", gamma, eg));
  o.expect(el < 1e-3, fmt("buckling %.6f rel err %.2e", lambda, el));
  if (o.ok) o.detail = fmt("Gamma1=%.5f (err %.1e) Lambda1=%.5f (err %.1e)", gamma, eg, lambda, el);
  return o;
}

Outcome square_targets() {
  Outcome o;
  const BoxDomain d = cube(2, 63);
  const double lambda = tracked(assemble(d, 0, ProblemKind::dirichlet_laplace), 1).values[0];
  const double mu = tracked(assemble(d, 0, ProblemKind::absolute_laplace), 1).values[0];
  const double el = std::abs(lambda - 2 * pi * pi) / (2 * pi * pi);
  const double em = std::abs(mu - pi * pi) / (pi * pi);
  o.expect(el < 5e-3, fmt("lambda1 %.6f rel err %.2e", lambda, el));
  o.expect(em < 5e-3, fmt("mu1 %.6f rel err %.2e", mu, em));
  if (o.ok) o.detail = fmt("lambda1=%.6f (err %.1e) mu1=%.6f (err %.1e)", lambda, el, mu, em);
  return o;
}

Outcome p_independence() {
  Outcome o;
  const BoxDomain d = cube(2, 63);
  for (auto kind : {ProblemKind::buckling, ProblemKind::clamped_plate}) {
    const auto s0 = tracked(assemble(d, 0, kind), 3);
    const auto s1 = tracked(assemble(d, 1, kind), 5);
    const std::string name(to_string(kind));
    o.expect(s0.values[0] == s1.values[0], name + fmt(" first values differ: %.17g vs %.17g", s0.values[0], s1.values[0]));
    const auto m0 = multiplicities(s0.values);
    const auto m1 = multiplicities(s1.values);
    o.expect(m1[0] == 2 * m0[0], name + fmt(" multiplicity %d vs %d", m1[0], m0[0]));
    // Every p = 0 value appears twice at p = 1.
    for (int i = 0; i < 2; ++i) {
      o.expect(s1.values[2 * i] == s0.values[i] && s1.values[2 * i + 1] == s0.values[i],
               name + fmt(" value %d is not doubled", i + 1));
    }
  }
  if (o.ok) o.detail = "Lambda1 and Gamma1 bitwise equal, multiplicity 1 -> 2";
  return o;
}

Outcome inequality_battery() {
  Outcome o;
  const std::vector<double> extent{1.0, 1.0};
  const std::vector<int> res{15, 31, 63};
  const std::vector<int> degrees{0, 1, 2};
  const auto b = verify::run_box_battery(2, extent, res, degrees);
  for (const auto& s : b.finest) {
    for (double r : s.residuals) worst_residual = std::max(worst_residual, r);
  }
  std::vector<std::string> names{"Payne", "Polya"};
  for (int p = 0; p <= 2; ++p) {
    const std::string t = "[p=" + std::to_string(p) + "]";
    for (const char* base : {"BuckCP", "BCP_Dirichlet.1", "DBCP.lower", "DBCP.upper", "BuckAbs"}) {
      names.push_back(base + t);
    }
  }
  double tightest = INFINITY;
  for (const auto& n : names) {
    const auto* c = b.report.find(n);
    if (!c) {
      o.expect(false, n + " missing");
      continue;
    }
    o.expect(c->status == verify::Status::pass,
             fmt("%s %s margin %.3e tol %.3e", n.c_str(), verify::to_string(c->status), c->margin, c->tolerance));
    tightest = std::min(tightest, c->margin / c->tolerance);
  }
  o.expect(b.report.all_passed(), fmt("%d checks failed", b.report.count(verify::Status::fail)));
  if (o.ok) {
    o.detail = fmt("%zu named checks pass, smallest margin/tolerance %.1f, %d battery checks pass",
                   names.size(), tightest, b.report.count(verify::Status::pass));
  }
  return o;
}

Outcome duality() {
  Outcome o;
  const BoxDomain d = cube(3, 15);
  const int count = 6;
  int compared = 0;
  for (int p : {0, 1}) {
    const int q = 3 - p;
    for (auto kind : {ProblemKind::clamped_plate, ProblemKind::buckling, ProblemKind::dirichlet_laplace}) {
      const auto a = tracked(assemble(d, p, kind), count);
      const auto b = tracked(assemble(d, q, kind), count);
      o.expect(a.values == b.values, fmt("%s p=%d vs %d differ", std::string(to_string(kind)).c_str(), p, q));
      ++compared;
    }
    const auto a = tracked(assemble(d, p, ProblemKind::absolute_laplace), count);
    const auto b = tracked(assemble(d, q, ProblemKind::relative_laplace), count);
    o.expect(a.values == b.values, fmt("absolute p=%d vs relative p=%d differ", p, q));
    ++compared;
    const auto lit = tracked(assemble(d, q, ProblemKind::absolute_laplace), count);
    std::printf("info: absolute p=%d gives %.10g, absolute p=%d gives %.10g; the star pairs absolute with relative\n",
                p, a.values[0], q, lit.values[0]);
  }
  if (o.ok) o.detail = fmt("%d pairs bitwise equal over %d values each", compared, count);
  return o;
}

Outcome constants() {
  Outcome o;
  const auto c21 = verify::evaluate_constants(2, 1, 1.0);
  const auto c42 = verify::evaluate_constants(4, 2, 1.0);
  o.expect(c21.c_np == 4.0, fmt("C21 = %.17g", c21.c_np));
  o.expect(c42.c_np == 14.0 / 3.0, fmt("C42 = %.17g", c42.c_np));
  double worst = 0.0;
  for (int n = 2; n <= 16; n += 2) {
    const double lhs = verify::c_np(n, n / 2) / n;
    const double rhs = 1.0 + 16.0 / (static_cast<double>(n) * n * (n + 2));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  o.expect(worst <= 1e-14, fmt("identity off by %.2e", worst));
  if (o.ok) o.detail = fmt("C21=4 C42=14/3 exact, identity error %.1e", worst);
  return o;
}

Outcome properties() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  double worst_ibp = 0.0;
  int problems = 0;
  const std::vector<BoxDomain> domains{cube(1, 31), cube(2, 15), cube(3, 7)};
  for (const auto& d : domains) {
    for (auto kind : {ProblemKind::clamped_plate, ProblemKind::buckling}) {
      for (int p = 0; p <= d.dim; ++p) {
        const auto prob = assemble(d, p, kind);
        const auto& L = prob.laplacian;
        const auto& w = prob.node_weights;
        ++problems;
        for (int t = 0; t < 100; ++t) {
          Vector x(prob.dof_count());
          Vector y(prob.dof_count());
          for (Index i = 0; i < x.size(); ++i) {
            x[i] = normal(rng);
            y[i] = normal(rng);
          }
          const Vector lx = L * x;
          const Vector ly = L * y;
          const double lhs = x.dot(prob.A * y);
          const double rhs = lx.dot(w.asDiagonal() * ly);
          const double scale = lx.cwiseAbs().dot(w.asDiagonal() * ly.cwiseAbs());
          worst_ibp = std::max(worst_ibp, std::abs(lhs - rhs) / scale);
        }
      }
    }
  }
  o.expect(worst_ibp < 1e-13, fmt("summation by parts off by %.2e", worst_ibp));
  o.expect(worst_residual <= 1e-9, fmt("residual %.2e", worst_residual));

  app::RunConfig box;
  box.command = app::Command::box;
  box.cells = {63, 63};
  box.problem = ProblemKind::buckling;
  box.degree = 1;
  box.count = 3;
  app::RunConfig ver;
  ver.command = app::Command::verify;
  ver.resolutions = {7, 11, 15};
  bool same = true;
  for (const auto& cfg : {box, ver}) {
    same = same && app::to_json(app::run(cfg)) == app::to_json(app::run(cfg));
  }
  o.expect(same, "reports differ between runs");
  if (o.ok) {
    o.detail = fmt("%d problems x 100 trials, max rel defect %.1e; max residual %.1e; reports identical",
                   problems, worst_ibp, worst_residual);
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit;  // seconds, 0 for none
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const std::vector<Criterion> criteria{
      {1, "Bessel zeros", 1.0, bessel_zeros},
      {2, "ball chain", 1.0, ball_chain},
      {3, "interval continuum targets", 5.0, interval_targets},
      {4, "square targets", 30.0, square_targets},
      {5, "p-independence", 0.0, p_independence},
      {6, "inequality battery", 120.0, inequality_battery},
      {7, "Hodge duality", 0.0, duality},
      {8, "constants", 0.0, constants},
      {9, "property suites", 0.0, properties},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit > 0.0 && secs >= c.limit) {
      o.ok = false;
      o.detail += fmt("; took %.2f s, limit %.0f s", secs, c.limit);
    }
    std::printf("%s %d %s (%.2f s): %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    if (!o.ok) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace hodge::verify {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Estimate product(Estimate a, Estimate b) {
  return {a.value * b.value, std::abs(a.value) * b.error + std::abs(b.value) * a.error};
}

Estimate square(Estimate a) { return product(a, a); }

Estimate root(Estimate a) {
  const double r = std::sqrt(a.value);
  return {r, r > 0.0 ? a.error / (2.0 * r) : INFINITY};
}

Estimate larger(Estimate a, Estimate b) { return a.value >= b.value ? a : b; }
Estimate smaller(Estimate a, Estimate b) { return a.value <= b.value ? a : b; }

std::string tag(int p) { return "[p=" + std::to_string(p) + "]"; }

class Battery {
 public:
  explicit Battery(InequalityReport& report) : report_(report) {}

  void compare(std::string name, std::optional<Estimate> lhs, Relation rel,
               std::optional<Estimate> rhs, std::string source, std::string missing = {}) {
    Check c;
    c.name = std::move(name);
    c.relation = rel;
    c.source = std::move(source);
    if (!lhs || !rhs) {
      c.status = Status::skipped;
      c.lhs = lhs ? lhs->value : kNaN;
      c.rhs = rhs ? rhs->value : kNaN;
      c.margin = kNaN;
      c.note = missing.empty() ? "missing input spectra" : "missing " + missing;
      report_.checks.push_back(std::move(c));
      return;
    }
    c.lhs = lhs->value;
    c.rhs = rhs->value;
    c.margin = rhs->value - lhs->value;
    c.tolerance = lhs->error + rhs->error;
    bool ok = false;
    if (rel == Relation::equal) {
      ok = std::abs(c.margin) <= c.tolerance;
    } else {
      ok = c.margin > c.tolerance;
    }
    c.status = ok ? Status::pass : Status::fail;
    report_.checks.push_back(std::move(c));
  }

  void skip(std::string name, Relation rel, std::string note) {
    Check c;
    c.name = std::move(name);
    c.relation = rel;
    c.lhs = c.rhs = c.margin = kNaN;
    c.status = Status::skipped;
    c.note = std::move(note);
    report_.checks.push_back(std::move(c));
  }

  void constants_only(std::string name, Relation rel, double bound, std::optional<double> observed,
                      std::string note) {
    Check c;
    c.name = std::move(name);
    c.relation = rel;
    c.lhs = bound;
    c.rhs = observed.value_or(kNaN);
    c.margin = observed ? *observed - bound : kNaN;
    c.status = Status::constants_only;
    c.note = std::move(note);
    report_.checks.push_back(std::move(c));
  }

  void bitwise(std::string name, const Spectrum* a, const Spectrum* b, std::string source,
               std::string missing) {
    if (!a || !b) {
      compare(std::move(name), std::nullopt, Relation::equal, std::nullopt, std::move(source),
              std::move(missing));
      return;
    }
    Check c;
    c.name = std::move(name);
    c.relation = Relation::equal;
    c.source = std::move(source);
    c.lhs = a->values.empty() ? kNaN : a->values.front();
    c.rhs = b->values.empty() ? kNaN : b->values.front();
    c.margin = c.rhs - c.lhs;
    const std::size_t n = std::min(a->values.size(), b->values.size());
    const bool same = n > 0 && std::equal(a->values.begin(), a->values.begin() + static_cast<long>(n),
                                          b->values.begin());
    c.status = same ? Status::pass : Status::fail;
    c.note = "bitwise over " + std::to_string(n) + " values";
    report_.checks.push_back(std::move(c));
  }

 private:
  InequalityReport& report_;
};

}  // namespace

double c_np(int n, int p) {
  const double nn = n;
  const double q = p * (n - p + 1);
  const double d = n - 2 * p;
  return nn + (4.0 + 2.0 * d * d) / q + nn * d * d / (q * q);
}

ConstantsBundle evaluate_constants(int n, int p, double gamma) {
  require(n >= 2, "evaluate_constants: dimension must be >= 2");
  require(p >= 1 && p <= n / 2, "evaluate_constants: degree must satisfy 1 <= p <= floor(n/2)");
  require(gamma > 0.0 && std::isfinite(gamma), "evaluate_constants: gamma must be > 0");
  ConstantsBundle c;
  c.dim = n;
  c.degree = p;
  c.gamma = gamma;
  c.c_np = c_np(n, p);
  const double weight = static_cast<double>(p) * (n - p + 1);
  c.dirichlet_bound = gamma * weight;
  c.buckling_bound = gamma * weight;
  c.clamped_bound = gamma * gamma * weight * weight;
  return c;
}

const char* to_string(Relation r) {
  switch (r) {
    case Relation::less: return "<";
    case Relation::less_equal: return "<=";
    case Relation::equal: return "=";
  }
  return "?";
}

const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::skipped: return "skipped";
    case Status::constants_only: return "constants-only";
  }
  return "?";
}

bool InequalityReport::all_passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const Check& c) { return c.status == Status::fail; });
}

int InequalityReport::count(Status s) const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(),
                                        [s](const Check& c) { return c.status == s; }));
}

const Check* InequalityReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

SpectrumSet::SpectrumSet(int dim) : dim_(dim) {
  require(dim >= 1, "SpectrumSet: dimension must be >= 1");
}

void SpectrumSet::add(const Spectrum& spectrum, std::vector<double> convergence_errors) {
  require(spectrum.kind.has_value(), "SpectrumSet: spectrum '" + spectrum.label + "' has no problem kind");
  require(spectrum.degree >= 0 && spectrum.degree <= dim_,
          "SpectrumSet: degree " + std::to_string(spectrum.degree) + " outside [0, n]");
  require(spectrum.residuals.size() == spectrum.values.size(),
          "SpectrumSet: residual count does not match value count");
  require(std::is_sorted(spectrum.values.begin(), spectrum.values.end()),
          "SpectrumSet: values must be sorted");
  const auto key = std::make_pair(*spectrum.kind, spectrum.degree);
  require(!entries_.contains(key), "SpectrumSet: duplicate spectrum for " + spectrum.label);
  convergence_errors.resize(spectrum.values.size(), 0.0);
  entries_.emplace(key, Entry{spectrum, std::move(convergence_errors)});
}

void SpectrumSet::add_ball(const bessel::BallSpectrum& ball) {
  require(ball.dim == dim_, "SpectrumSet: ball dimension does not match");
  ball_ = ball;
}

const Spectrum* SpectrumSet::find(ProblemKind kind, int degree) const {
  const auto it = entries_.find({kind, degree});
  return it == entries_.end() ? nullptr : &it->second.spectrum;
}

std::optional<Estimate> SpectrumSet::value(ProblemKind kind, int degree, int index) const {
  const auto it = entries_.find({kind, degree});
  if (it == entries_.end()) return std::nullopt;
  const auto& e = it->second;
  if (index < 0 || index >= static_cast<int>(e.spectrum.values.size())) return std::nullopt;
  const double v = e.spectrum.values[index];
  return Estimate{v, e.spectrum.residuals[index] * std::abs(v) + e.convergence_errors[index]};
}

InequalityReport check_inequalities(const SpectrumSet& set, double gamma) {
  InequalityReport report;
  Battery battery(report);
  const int n = set.dim();

  if (const auto& ball = set.ball()) {
    // Zeros are located to 1e-10 absolute; 1e-9 relative covers the squares.
    auto exact = [](double v) { return Estimate{v, 1e-9 * std::abs(v)}; };
    const Estimate lam = exact(ball->lambda1);
    const Estimate big_lam = exact(ball->big_lambda1);
    const Estimate gam = exact(ball->big_gamma1);
    const std::string src = "ball closed form";
    battery.compare("ball.AL.Gamma<=Lambda^2", gam, Relation::less_equal, square(big_lam), src);
    battery.compare("ball.AL.Lambda*lambda<=Gamma", product(big_lam, lam), Relation::less_equal, gam, src);
    battery.compare("ball.AL.lambda^2<Lambda*lambda", square(lam), Relation::less, product(big_lam, lam), src);
    battery.compare("ball.DBCP.lower", lam, Relation::less, root(gam), src);
    battery.compare("ball.DBCP.upper", root(gam), Relation::less, big_lam, src);
  }

  const auto lam = [&](int p, int i = 0) { return set.value(ProblemKind::dirichlet_laplace, p, i); };
  const auto big_lam = [&](int p) { return set.value(ProblemKind::buckling, p); };
  const auto gam = [&](int p) { return set.value(ProblemKind::clamped_plate, p); };
  const auto mu = [&](int p) { return set.value(ProblemKind::absolute_laplace, p); };
  const auto both = [](std::optional<Estimate> a, std::optional<Estimate> b,
                       auto op) -> std::optional<Estimate> {
    if (!a || !b) return std::nullopt;
    return op(*a, *b);
  };
  const auto map1 = [](std::optional<Estimate> a, auto op) -> std::optional<Estimate> {
    if (!a) return std::nullopt;
    return op(*a);
  };

  for (int p = 0; p <= n; ++p) {
    const std::string t = tag(p);
    const std::string src = "discrete spectra" + t;
    battery.compare("BuckCP" + t, gam(p), Relation::less, map1(big_lam(p), square), src,
                    "clamped_plate/buckling" + t);
    battery.compare("BCP_Dirichlet.1" + t, both(big_lam(p), lam(p), product), Relation::less, gam(p),
                    src, "buckling/dirichlet/clamped_plate" + t);
    battery.compare("DBCP.lower" + t, lam(p), Relation::less, map1(gam(p), root), src,
                    "dirichlet/clamped_plate" + t);
    battery.compare("DBCP.upper" + t, map1(gam(p), root), Relation::less, big_lam(p), src,
                    "clamped_plate/buckling" + t);
    battery.compare("AL.lambda<Lambda" + t, map1(lam(p), square), Relation::less,
                    both(big_lam(p), lam(p), product), src, "dirichlet/buckling" + t);
    battery.compare("BuckAbs" + t, both(mu(p), mu(n - p), larger), Relation::less_equal, big_lam(p),
                    src, "absolute" + t + "/absolute" + tag(n - p) + "/buckling" + t);

    if (p >= 1) {
      std::optional<Estimate> neighbours = lam(p - 1);
      if (p + 1 <= n) {
        neighbours = neighbours && lam(p + 1) ? std::optional(smaller(*neighbours, *lam(p + 1)))
                                              : std::optional<Estimate>();
      }
      battery.compare("BCP_Dirichlet.2" + t, neighbours, Relation::less_equal, big_lam(p), src,
                      "dirichlet neighbours/buckling" + t);
      for (auto [kind, name] : {std::pair{ProblemKind::buckling, "buckling"},
                                std::pair{ProblemKind::clamped_plate, "clamped_plate"},
                                std::pair{ProblemKind::dirichlet_laplace, "dirichlet"}}) {
        battery.compare(std::string("p-independence.") + name + t, set.value(kind, p), Relation::equal,
                        set.value(kind, 0), "Euclidean domain", std::string(name) + t + " or [p=0]");
      }
    }
  }

  battery.compare("BCP_Dirichlet.3", lam(1), Relation::less_equal, big_lam(0), "discrete spectra",
                  "dirichlet[p=1]/buckling[p=0]");
  battery.compare("IS", mu(0), Relation::less, big_lam(0), "discrete spectra",
                  "absolute/buckling[p=0]");
  battery.compare("Polya", mu(0), Relation::less, lam(0), "discrete spectra",
                  "absolute/dirichlet[p=0]");
  if (n == 2) {
    battery.compare("Payne", lam(0, 1), Relation::less_equal, big_lam(0), "discrete spectra",
                    "second dirichlet value/buckling[p=0]");
  } else {
    battery.skip("Payne", Relation::less_equal, "planar domains only (n = 2)");
  }

  for (int p = 0; 2 * p <= n; ++p) {
    const int q = n - p;
    const std::string t = "[p=" + std::to_string(p) + ",n-p=" + std::to_string(q) + "]";
    for (auto kind : {ProblemKind::clamped_plate, ProblemKind::buckling, ProblemKind::dirichlet_laplace}) {
      if (p == q) break;
      battery.bitwise(std::string("duality.") + std::string(to_string(kind)) + t, set.find(kind, p),
                      set.find(kind, q), "Hodge star", std::string(to_string(kind)) + t);
    }
    battery.bitwise("duality.absolute_relative" + t, set.find(ProblemKind::absolute_laplace, p),
                    set.find(ProblemKind::relative_laplace, q), "Hodge star",
                    "absolute[p]/relative[n-p]");
  }

  const std::string flat = "Weitzenboeck bound needs curvature; flat boxes have W = 0";
  const std::string sphere = "sphere-cap eigenvalues are not computed";
  for (int p = 1; p <= n / 2; ++p) {
    const ConstantsBundle c = evaluate_constants(n, p, gamma);
    const std::string t = tag(p);
    const auto observed = [](std::optional<Estimate> e) {
      return e ? std::optional<double>(e->value) : std::nullopt;
    };
    battery.constants_only("GM_Dirichlet" + t, Relation::less, c.dirichlet_bound, observed(lam(p)), flat);
    battery.constants_only("BCDL.buckling" + t, Relation::less, c.buckling_bound, observed(big_lam(p)), flat);
    battery.constants_only("BCDL.clamped" + t, Relation::less, c.clamped_bound, observed(gam(p)), flat);
    battery.constants_only("Sphere.clamped" + t, Relation::less, c.c_np, std::nullopt,
                           "C_{n,p}; " + sphere);
    battery.constants_only("Sphere.buckling" + t, Relation::less, 0.5 * c.c_np, std::nullopt,
                           "C_{n,p}/2; " + sphere);
  }
  if (n % 2 == 0 && n >= 2) {
    const double lhs = c_np(n, n / 2) / n;
    const double rhs = 1.0 + 16.0 / (static_cast<double>(n) * n * (n + 2));
    battery.compare("Sphere.identity[n=2p]", Estimate{lhs, 0.0}, Relation::equal,
                    Estimate{rhs, 1e-14 * rhs}, "constants");
    battery.constants_only("Sphere.buckling[n=2p]", Relation::less, rhs, std::nullopt, sphere);
  }
  return report;
}

double ConvergenceStudy::error_estimate() const {
  return values.empty() ? 0.0 : std::abs(extrapolated - values.back());
}

ConvergenceStudy richardson(std::string label, std::vector<int> resolutions,
                            std::span<const double> spacings, std::vector<double> values) {
  require(resolutions.size() >= 3, "convergence study needs at least 3 resolutions");
  require(values.size() == resolutions.size() && spacings.size() == resolutions.size(),
          "convergence study: sizes do not match");
  for (std::size_t i = 1; i < resolutions.size(); ++i) {
    require(resolutions[i] > resolutions[i - 1], "convergence study: resolutions must increase");
  }
  ConvergenceStudy s;
  s.label = std::move(label);
  const std::size_t f = values.size() - 1;
  const double coarse = values[f - 2];
  const double mid = values[f - 1];
  const double fine = values[f];
  const double ratio = spacings[f - 1] / spacings[f];
  const double q = (coarse - mid) / (mid - fine);
  if (q > 0.0 && std::isfinite(q) && ratio > 1.0) {
    s.observed_order = std::log(q) / std::log(ratio);
    s.extrapolated = fine + (fine - mid) / (std::pow(ratio, s.observed_order) - 1.0);
  } else {
    s.observed_order = kNaN;
    s.extrapolated = fine + std::abs(fine - mid);
  }
  s.resolutions = std::move(resolutions);
  s.values = std::move(values);
  return s;
}

ConvergenceStudy convergence_study(int dim, std::span<const double> extent, ProblemKind kind,
                                   int degree, std::span<const int> resolutions,
                                   const SolverOptions& options, int index) {
  require(index >= 0, "convergence study: index must be >= 0");
  std::vector<double> values;
  std::vector<double> spacings;
  for (int r : resolutions) {
    const std::vector<int> cells(static_cast<std::size_t>(dim), r);
    const BoxDomain d = build_domain(dim, extent, cells);
    const Spectrum s = solve(assemble(d, degree, kind), index + 1, options);
    values.push_back(s.values[index]);
    spacings.push_back(d.spacing[0]);
  }
  return richardson(std::string(to_string(kind)) + tag(degree), {resolutions.begin(), resolutions.end()},
                    spacings, std::move(values));
}

BoxBattery run_box_battery(int dim, std::span<const double> extent,
                           std::span<const int> resolutions, std::span<const int> degrees,
                           const SolverOptions& options, double gamma) {
  require(resolutions.size() >= 3, "battery needs at least 3 resolutions");
  BoxBattery out{SpectrumSet(dim), {}, {}, {}};
  const int count = 2;
  for (int p : degrees) {
    require(p >= 0 && p <= dim, "battery: degree outside [0, n]");
    for (auto kind : {ProblemKind::clamped_plate, ProblemKind::buckling,
                      ProblemKind::dirichlet_laplace, ProblemKind::absolute_laplace}) {
      std::vector<std::vector<double>> levels(count);
      std::vector<double> spacings;
      Spectrum finest;
      for (int r : resolutions) {
        const std::vector<int> cells(static_cast<std::size_t>(dim), r);
        const BoxDomain d = build_domain(dim, extent, cells);
        finest = solve(assemble(d, p, kind), count, options);
        for (int i = 0; i < count; ++i) levels[i].push_back(finest.values[i]);
        spacings.push_back(d.spacing[0]);
      }
      std::vector<double> errors;
      for (int i = 0; i < count; ++i) {
        auto study = richardson(std::string(to_string(kind)) + tag(p) + "#" + std::to_string(i + 1),
                                {resolutions.begin(), resolutions.end()}, spacings, levels[i]);
        errors.push_back(study.error_estimate());
        out.studies.push_back(std::move(study));
      }
      finest.vectors.clear();
      out.set.add(finest, errors);
      out.finest.push_back(std::move(finest));
    }
  }
  // Relative spectra for the absolute/relative duality, finest grid only.
  for (int p : degrees) {
    const int q = dim - p;
    if (2 * q < dim || out.set.find(ProblemKind::relative_laplace, q)) continue;
    const std::vector<int> cells(static_cast<std::size_t>(dim), resolutions.back());
    const BoxDomain d = build_domain(dim, extent, cells);
    Spectrum s = solve(assemble(d, q, ProblemKind::relative_laplace), count, options);
    s.vectors.clear();
    out.set.add(s);
    out.finest.push_back(std::move(s));
  }
  out.report = check_inequalities(out.set, gamma);
  return out;
}

}  // namespace hodge::verify

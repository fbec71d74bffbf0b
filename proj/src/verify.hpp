#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bessel.hpp"
#include "discretize.hpp"
#include "eigensolve.hpp"

namespace hodge::verify {

/// Curvature-bound constants for degree p in dimension n.
struct ConstantsBundle {
  int dim = 0;
  int degree = 0;
  double gamma = 0.0;
  double c_np = 0.0;
  double dirichlet_bound = 0.0;  // gamma p (n-p+1)
  double buckling_bound = 0.0;   // gamma p (n-p+1)
  double clamped_bound = 0.0;    // gamma^2 p^2 (n-p+1)^2
};

/// C_{n,p} = n + (4 + 2(n-2p)^2) / (p(n-p+1)) + n(n-2p)^2 / (p^2(n-p+1)^2).
double c_np(int n, int p);

/// Requires 1 <= p <= floor(n/2) and gamma > 0.
ConstantsBundle evaluate_constants(int n, int p, double gamma);

/// A value with an absolute uncertainty.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

enum class Relation { less, less_equal, equal };
enum class Status { pass, fail, skipped, constants_only };

const char* to_string(Relation r);
const char* to_string(Status s);

struct Check {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  Relation relation = Relation::less;
  double margin = 0.0;     // rhs - lhs
  double tolerance = 0.0;  // combined uncertainty of both sides
  Status status = Status::skipped;
  std::string source;
  std::string note;
};

struct InequalityReport {
  std::vector<Check> checks;

  bool all_passed() const;  // no check failed
  int count(Status s) const;
  const Check* find(const std::string& name) const;
};

/// Labeled first eigenvalues feeding the inequality battery.
class SpectrumSet {
 public:
  explicit SpectrumSet(int dim);

  int dim() const { return dim_; }

  /// `convergence_errors[i]` is added to the uncertainty of value i.
  void add(const Spectrum& spectrum, std::vector<double> convergence_errors = {});
  void add_ball(const bessel::BallSpectrum& ball);

  const Spectrum* find(ProblemKind kind, int degree) const;
  std::optional<Estimate> value(ProblemKind kind, int degree, int index = 0) const;
  const std::optional<bessel::BallSpectrum>& ball() const { return ball_; }

 private:
  struct Entry {
    Spectrum spectrum;
    std::vector<double> convergence_errors;
  };
  int dim_;
  std::map<std::pair<ProblemKind, int>, Entry> entries_;
  std::optional<bessel::BallSpectrum> ball_;
};

/// Runs every inequality that applies to the data; missing inputs are
/// reported as skipped, curvature and sphere results as constants-only.
InequalityReport check_inequalities(const SpectrumSet& set, double gamma = 1.0);

struct ConvergenceStudy {
  std::string label;
  std::vector<int> resolutions;
  std::vector<double> values;
  double extrapolated = 0.0;
  double observed_order = 0.0;

  /// |extrapolated - finest|
  double error_estimate() const;
};

/// Richardson limit from the last three levels; `spacings` are the grid
/// steps of each level (their ratio need not be exactly 2).
ConvergenceStudy richardson(std::string label, std::vector<int> resolutions,
                            std::span<const double> spacings, std::vector<double> values);

/// Solves `kind` on boxes with `r` cells on every axis for each resolution r and
/// extrapolates eigenvalue number `index` (0-based).
ConvergenceStudy convergence_study(int dim, std::span<const double> extent, ProblemKind kind,
                                   int degree, std::span<const int> resolutions,
                                   const SolverOptions& options = {}, int index = 0);

struct BoxBattery {
  SpectrumSet set;
  std::vector<Spectrum> finest;
  std::vector<ConvergenceStudy> studies;
  InequalityReport report;
};

/// Convergence studies for every kind and degree, then the inequality battery
/// on the finest grid with uncertainties from both solver and discretization.
BoxBattery run_box_battery(int dim, std::span<const double> extent,
                           std::span<const int> resolutions, std::span<const int> degrees,
                           const SolverOptions& options = {}, double gamma = 1.0);

}  // namespace hodge::verify

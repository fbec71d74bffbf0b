#include "hodge_spectra/hodge_spectra.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "bessel.hpp"
#include "discretize.hpp"
#include "eigensolve.hpp"
#include "report.hpp"
#include "verify.hpp"

struct hs_domain {
  hodge::BoxDomain domain;
};

struct hs_problem {
  hodge::FormProblem problem;
};

struct hs_spectrum {
  hodge::Spectrum spectrum;
};

struct hs_report {
  hodge::app::Report report;
};

namespace {

thread_local std::string last_error;

hs_status status_of(hodge::ErrorCode code) {
  switch (code) {
    case hodge::ErrorCode::invalid_argument: return HS_INVALID_ARGUMENT;
    case hodge::ErrorCode::factorization_failure: return HS_FACTORIZATION_FAILURE;
    case hodge::ErrorCode::no_convergence: return HS_NO_CONVERGENCE;
    case hodge::ErrorCode::io_failure: return HS_IO_FAILURE;
    case hodge::ErrorCode::numerical_failure: return HS_NUMERICAL_FAILURE;
  }
  return HS_INTERNAL_ERROR;
}

hs_status set_error(hs_status s, const char* what) {
  last_error = what;
  return s;
}

template <class F>
hs_status guarded(F&& f) {
  try {
    last_error.clear();
    f();
    return HS_OK;
  } catch (const hodge::Error& e) {
    return set_error(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(HS_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return set_error(HS_INTERNAL_ERROR, e.what());
  } catch (...) {
    return set_error(HS_INTERNAL_ERROR, "unknown error");
  }
}

hs_status null_argument(const char* name) {
  return set_error(HS_INVALID_ARGUMENT, (std::string(name) + " must not be NULL").c_str());
}

hodge::ProblemKind kind_of(hs_problem_kind k) {
  switch (k) {
    case HS_CLAMPED_PLATE: return hodge::ProblemKind::clamped_plate;
    case HS_BUCKLING: return hodge::ProblemKind::buckling;
    case HS_DIRICHLET_LAPLACE: return hodge::ProblemKind::dirichlet_laplace;
    case HS_ABSOLUTE_LAPLACE: return hodge::ProblemKind::absolute_laplace;
    case HS_RELATIVE_LAPLACE: return hodge::ProblemKind::relative_laplace;
  }
  hodge::fail(hodge::ErrorCode::invalid_argument, "unknown problem kind");
}

hodge::app::Format format_of(const char* format, hodge::app::Format fallback) {
  if (!format) return fallback;
  const auto f = hodge::app::parse_format(format);
  hodge::require(f.has_value(), std::string("unknown format '") + format + "'");
  return *f;
}

}  // namespace

extern "C" {

const char* hs_version(void) { return "1.0.0"; }

const char* hs_status_string(hs_status status) {
  switch (status) {
    case HS_OK: return "ok";
    case HS_INVALID_ARGUMENT: return "invalid argument";
    case HS_FACTORIZATION_FAILURE: return "factorization failure";
    case HS_NO_CONVERGENCE: return "no convergence";
    case HS_IO_FAILURE: return "I/O failure";
    case HS_NUMERICAL_FAILURE: return "numerical failure";
    case HS_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

const char* hs_last_error(void) { return last_error.c_str(); }

hs_status hs_bessel_j(unsigned twice_order, double x, double* out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = hodge::bessel::bessel_j(hodge::bessel::BesselOrder(twice_order), x); });
}

hs_status hs_bessel_i(unsigned twice_order, double x, double* out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = hodge::bessel::bessel_i(hodge::bessel::BesselOrder(twice_order), x); });
}

hs_status hs_first_zero_j(unsigned twice_order, double* out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = hodge::bessel::first_zero_j(hodge::bessel::BesselOrder(twice_order)); });
}

hs_status hs_first_zero_cross(unsigned twice_order, double* out) {
  if (!out) return null_argument("out");
  return guarded(
      [&] { *out = hodge::bessel::first_zero_cross(hodge::bessel::BesselOrder(twice_order)); });
}

hs_status hs_ball_spectrum_compute(int dim, double radius, hs_ball_spectrum* out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto b = hodge::bessel::ball_spectrum(dim, radius);
    *out = {b.dim, b.radius, b.lambda1, b.big_lambda1, b.big_gamma1};
  });
}

hs_status hs_evaluate_constants(int dim, int degree, double gamma, hs_constants* out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto c = hodge::verify::evaluate_constants(dim, degree, gamma);
    *out = {c.dim, c.degree, c.gamma, c.c_np, c.dirichlet_bound, c.buckling_bound, c.clamped_bound};
  });
}

hs_status hs_domain_create(int dim, const double* extent, const int* cells, hs_domain** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  if (!extent) return null_argument("extent");
  if (!cells) return null_argument("cells");
  if (dim < 1 || dim > 3) return set_error(HS_INVALID_ARGUMENT, "dimension must be 1, 2 or 3");
  return guarded([&] {
    const auto n = static_cast<std::size_t>(dim);
    *out = new hs_domain{hodge::build_domain(dim, {extent, n}, {cells, n})};
  });
}

void hs_domain_destroy(hs_domain* domain) { delete domain; }

hs_status hs_problem_assemble(const hs_domain* domain, int degree, hs_problem_kind kind,
                              hs_problem** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  if (!domain) return null_argument("domain");
  return guarded([&] { *out = new hs_problem{hodge::assemble(domain->domain, degree, kind_of(kind))}; });
}

hs_status hs_problem_dof_count(const hs_problem* problem, size_t* out) {
  if (!problem) return null_argument("problem");
  if (!out) return null_argument("out");
  return guarded([&] { *out = static_cast<size_t>(problem->problem.dof_count()); });
}

void hs_problem_destroy(hs_problem* problem) { delete problem; }

hs_status hs_problem_solve(const hs_problem* problem, int count, double tol, unsigned threads,
                           hs_spectrum** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  if (!problem) return null_argument("problem");
  hodge::SolverOptions opts;
  opts.tol = tol;
  opts.threads = threads == 0 ? 1 : threads;
  if (!(tol > 0.0 && tol < 1.0)) return set_error(HS_INVALID_ARGUMENT, "tol must lie in (0, 1)");
  try {
    last_error.clear();
    *out = new hs_spectrum{hodge::solve(problem->problem, count, opts)};
    return HS_OK;
  } catch (const hodge::ConvergenceError& e) {
    *out = new (std::nothrow) hs_spectrum{e.partial()};
    return set_error(HS_NO_CONVERGENCE, e.what());
  } catch (...) {
    return guarded([] { throw; });
  }
}

size_t hs_spectrum_size(const hs_spectrum* spectrum) {
  return spectrum ? spectrum->spectrum.values.size() : 0;
}

const char* hs_spectrum_label(const hs_spectrum* spectrum) {
  return spectrum ? spectrum->spectrum.label.c_str() : "";
}

hs_status hs_spectrum_value(const hs_spectrum* spectrum, size_t index, double* value,
                            double* residual) {
  if (!spectrum) return null_argument("spectrum");
  if (index >= spectrum->spectrum.values.size()) {
    return set_error(HS_INVALID_ARGUMENT, "index out of range");
  }
  if (value) *value = spectrum->spectrum.values[index];
  if (residual) *residual = spectrum->spectrum.residuals[index];
  last_error.clear();
  return HS_OK;
}

void hs_spectrum_destroy(hs_spectrum* spectrum) { delete spectrum; }

hs_status hs_run(const char* config_json, hs_report** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  if (!config_json) return null_argument("config_json");
  hs_status s = guarded([&] {
    *out = new hs_report{hodge::app::run(hodge::app::config_from_json(config_json))};
  });
  if (s == HS_OK && (*out)->report.partial) {
    const auto& r = (*out)->report;
    s = set_error(r.error_code ? status_of(*r.error_code) : HS_NUMERICAL_FAILURE, r.error.c_str());
  }
  return s;
}

int hs_report_is_partial(const hs_report* report) { return report && report->report.partial ? 1 : 0; }

int hs_report_all_passed(const hs_report* report) {
  if (!report) return 0;
  hodge::verify::InequalityReport checks{report->report.checks};
  return checks.all_passed() ? 1 : 0;
}

hs_status hs_report_serialize(const hs_report* report, const char* format, char** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  if (!report) return null_argument("report");
  return guarded([&] {
    const std::string text =
        hodge::app::serialize(report->report, format_of(format, report->report.config.format));
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

hs_status hs_report_write(const hs_report* report, const char* format, const char* path) {
  if (!report) return null_argument("report");
  return guarded([&] {
    const auto& r = report->report;
    hodge::app::write_report(r, format_of(format, r.config.format), path ? path : r.config.output);
  });
}

void hs_report_destroy(hs_report* report) { delete report; }

void hs_string_free(char* text) { std::free(text); }

}  // extern "C"

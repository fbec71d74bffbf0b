#ifndef HODGE_SPECTRA_H
#define HODGE_SPECTRA_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(HODGE_SPECTRA_BUILDING)
#    define HS_API __declspec(dllexport)
#  else
#    define HS_API __declspec(dllimport)
#  endif
#else
#  define HS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hs_status {
  HS_OK = 0,
  HS_INVALID_ARGUMENT = 1,
  HS_FACTORIZATION_FAILURE = 2,
  HS_NO_CONVERGENCE = 3,
  HS_IO_FAILURE = 4,
  HS_NUMERICAL_FAILURE = 5,
  HS_INTERNAL_ERROR = 6
} hs_status;

typedef enum hs_problem_kind {
  HS_CLAMPED_PLATE = 0,
  HS_BUCKLING = 1,
  HS_DIRICHLET_LAPLACE = 2,
  HS_ABSOLUTE_LAPLACE = 3,
  HS_RELATIVE_LAPLACE = 4
} hs_problem_kind;

typedef struct hs_domain hs_domain;
typedef struct hs_problem hs_problem;
typedef struct hs_spectrum hs_spectrum;
typedef struct hs_report hs_report;

typedef struct hs_ball_spectrum {
  int dim;
  double radius;
  double lambda1;      /* Dirichlet */
  double big_lambda1;  /* buckling */
  double big_gamma1;   /* clamped plate */
} hs_ball_spectrum;

typedef struct hs_constants {
  int dim;
  int degree;
  double gamma;
  double c_np;
  double dirichlet_bound;
  double buckling_bound;
  double clamped_bound;
} hs_constants;

HS_API const char* hs_version(void);
HS_API const char* hs_status_string(hs_status status);

/* Message of the last failure on the calling thread; "" after success. */
HS_API const char* hs_last_error(void);

/* Bessel orders are passed doubled: twice_order = 1 means nu = 1/2. */
HS_API hs_status hs_bessel_j(unsigned twice_order, double x, double* out);
HS_API hs_status hs_bessel_i(unsigned twice_order, double x, double* out);
HS_API hs_status hs_first_zero_j(unsigned twice_order, double* out);
HS_API hs_status hs_first_zero_cross(unsigned twice_order, double* out);
HS_API hs_status hs_ball_spectrum_compute(int dim, double radius, hs_ball_spectrum* out);
HS_API hs_status hs_evaluate_constants(int dim, int degree, double gamma, hs_constants* out);

/* Box [0, extent_k] per axis with cells[k] interior intervals; dim in {1,2,3}. */
HS_API hs_status hs_domain_create(int dim, const double* extent, const int* cells, hs_domain** out);
HS_API void hs_domain_destroy(hs_domain* domain);

HS_API hs_status hs_problem_assemble(const hs_domain* domain, int degree, hs_problem_kind kind,
                                     hs_problem** out);
HS_API hs_status hs_problem_dof_count(const hs_problem* problem, size_t* out);
HS_API void hs_problem_destroy(hs_problem* problem);

/* On HS_NO_CONVERGENCE *out still receives the partial spectrum. threads = 0 means 1. */
HS_API hs_status hs_problem_solve(const hs_problem* problem, int count, double tol, unsigned threads,
                                  hs_spectrum** out);
HS_API size_t hs_spectrum_size(const hs_spectrum* spectrum);
HS_API const char* hs_spectrum_label(const hs_spectrum* spectrum);
HS_API hs_status hs_spectrum_value(const hs_spectrum* spectrum, size_t index, double* value,
                                   double* residual);
HS_API void hs_spectrum_destroy(hs_spectrum* spectrum);

/* Runs a JSON run configuration (the CLI's schema). Numerical failures return their
   status and still hand back a report flagged partial. */
HS_API hs_status hs_run(const char* config_json, hs_report** out);
HS_API int hs_report_is_partial(const hs_report* report);
HS_API int hs_report_all_passed(const hs_report* report);

/* format: "json", "csv" or NULL for the configured one. Free the result with hs_string_free. */
HS_API hs_status hs_report_serialize(const hs_report* report, const char* format, char** out);

/* NULL format or path fall back to the configuration; an empty path means stdout. */
HS_API hs_status hs_report_write(const hs_report* report, const char* format, const char* path);
HS_API void hs_report_destroy(hs_report* report);

HS_API void hs_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif

/* C interface to the chiprobe library. All functions return a cp_status;
 * on failure cp_last_error() describes the most recent error of the calling
 * thread. Handles are opaque and must be released with the matching _free. */
#ifndef CHIPROBE_H
#define CHIPROBE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CP_API __declspec(dllexport)
#else
#define CP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cp_status {
  CP_OK = 0,
  CP_ERR_INVALID_ARGUMENT = 1,
  CP_ERR_OUT_OF_RANGE = 2,
  CP_ERR_NON_CONVERGENCE = 3,
  CP_ERR_TRUNCATION = 4,
  CP_ERR_NULL_OUTCOME = 5,
  CP_ERR_CONFIG = 6,
  CP_ERR_IO = 7,
  CP_ERR_COMPUTATION = 8,
  CP_ERR_INTERNAL = 9
} cp_status;

typedef struct cp_config cp_config;
typedef struct cp_state cp_state;

/* Decoherence parameters; rates in angular units consistent with omega. */
typedef struct cp_rates {
  double kappa;
  double gamma1;
  double gamma2;
  double n_m;
  double n_q;
} cp_rates;

typedef struct cp_functionals {
  double xi_re, xi_im;
  double mu_re, mu_im;
  double lambda_re, lambda_im;
  double nu;
  double f;
} cp_functionals;

typedef struct cp_point {
  double r;
  double phi;
  int n;
  double t;
  double f;
  uint64_t budget;
} cp_point;

CP_API const char* cp_version(void);
CP_API const char* cp_last_error(void);
CP_API const char* cp_status_string(cp_status status);

/* gamma = Gamma1 (N_q + 1/2) + 2 Gamma2 and Delta = N_m + 1/2. */
CP_API cp_status cp_derive_rates(const cp_rates* rates, double* gamma, double* delta);

/* Functionals of the harmonic coupling
 * g(t) = (omega / 2pi) e^{kappa t / 2} (r0 + r sin(phi - omega t))
 * after n whole periods. */
CP_API cp_status cp_harmonic_functionals(double r0, double r, double phi, int n, double omega,
                                         const cp_rates* rates, cp_functionals* out);

/* Shots per Pauli axis for relative error eps at damping exponent f. */
CP_API cp_status cp_run_budget(double f, double eps, uint64_t* budget);

/* Protocol parameters for a target point. */
CP_API cp_status cp_plan_point(double beta_re, double beta_im, double r_max, int n_max, double omega,
                               const cp_rates* rates, cp_point* out);

/* States: "vacuum:", "fock:<n>", "coherent:<a>", "thermal:<nbar>",
 * "cat:<alpha>,<varphi>,<+|->". */
CP_API cp_status cp_state_parse(const char* spec, cp_state** out);
CP_API cp_status cp_state_chi(const cp_state* state, double beta_re, double beta_im, double* chi_re,
                              double* chi_im);
CP_API void cp_state_free(cp_state* state);

/* Parses configuration text and then "key=value" overrides. On CP_ERR_CONFIG
 * cp_last_error() lists every issue, one per line. */
CP_API cp_status cp_config_parse(const char* text, const char* const* overrides, size_t n_overrides,
                                 cp_config** out);
/* Canonical listing; returns the full length, writes at most capacity bytes
 * including the terminator. */
CP_API size_t cp_config_text(const cp_config* config, char* buffer, size_t capacity);
/* Runs the configured command. exit_code receives 0 ok, 1 config, 2
 * computation, 3 I/O; summary (may be NULL) receives a one-line report. */
CP_API cp_status cp_config_execute(const cp_config* config, int* exit_code, char* summary, size_t capacity);
CP_API void cp_config_free(cp_config* config);

#ifdef __cplusplus
}
#endif

#endif

#include "chiprobe/chiprobe.h"

#include <cstring>
#include <string>

#include "chiprobe/config.hpp"
#include "chiprobe/error.hpp"
#include "chiprobe/functionals.hpp"
#include "chiprobe/reconstruction.hpp"
#include "chiprobe/runner.hpp"
#include "chiprobe/states.hpp"

struct cp_config {
  chiprobe::RunConfig config;
};

struct cp_state {
  chiprobe::OscillatorState state;
};

namespace {

thread_local std::string last_error;

cp_status status_for(chiprobe::ErrorCode code) {
  using chiprobe::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return CP_ERR_INVALID_ARGUMENT;
    case ErrorCode::kOutOfRange:
      return CP_ERR_OUT_OF_RANGE;
    case ErrorCode::kNonConvergence:
      return CP_ERR_NON_CONVERGENCE;
    case ErrorCode::kTruncation:
      return CP_ERR_TRUNCATION;
    case ErrorCode::kNullOutcome:
      return CP_ERR_NULL_OUTCOME;
    case ErrorCode::kConfig:
      return CP_ERR_CONFIG;
    case ErrorCode::kIo:
      return CP_ERR_IO;
    case ErrorCode::kComputation:
      return CP_ERR_COMPUTATION;
  }
  return CP_ERR_INTERNAL;
}

template <typename F>
cp_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return CP_OK;
  } catch (const chiprobe::Error& e) {
    last_error = e.what();
    return status_for(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return CP_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return CP_ERR_INTERNAL;
  }
}

void need(const void* p, const char* name) {
  if (p == nullptr) chiprobe::fail(chiprobe::ErrorCode::kInvalidArgument, std::string(name) + " must not be NULL");
}

chiprobe::DecoherenceParams params_of(const cp_rates* r) {
  need(r, "rates");
  return {r->kappa, r->gamma1, r->gamma2, r->n_m, r->n_q};
}

size_t copy_out(const std::string& text, char* buffer, size_t capacity) {
  if (buffer != nullptr && capacity > 0) {
    const size_t n = std::min(text.size(), capacity - 1);
    std::memcpy(buffer, text.data(), n);
    buffer[n] = '\0';
  }
  return text.size();
}

}  // namespace

extern "C" {

const char* cp_version(void) { return chiprobe::library_version(); }

const char* cp_last_error(void) { return last_error.c_str(); }

const char* cp_status_string(cp_status status) {
  switch (status) {
    case CP_OK:
      return "ok";
    case CP_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case CP_ERR_OUT_OF_RANGE:
      return "out of range";
    case CP_ERR_NON_CONVERGENCE:
      return "non-convergence";
    case CP_ERR_TRUNCATION:
      return "truncation";
    case CP_ERR_NULL_OUTCOME:
      return "null outcome";
    case CP_ERR_CONFIG:
      return "configuration error";
    case CP_ERR_IO:
      return "i/o error";
    case CP_ERR_COMPUTATION:
      return "computation error";
    case CP_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

cp_status cp_derive_rates(const cp_rates* rates, double* gamma, double* delta) {
  return guarded([&] {
    need(gamma, "gamma");
    need(delta, "delta");
    const auto d = chiprobe::derive_rates(params_of(rates));
    *gamma = d.gamma;
    *delta = d.delta;
  });
}

cp_status cp_harmonic_functionals(double r0, double r, double phi, int n, double omega, const cp_rates* rates,
                                  cp_functionals* out) {
  return guarded([&] {
    need(out, "out");
    chiprobe::require(n >= 0, "n must be >= 0");
    chiprobe::require(omega > 0.0, "omega must be > 0");
    const auto p = params_of(rates);
    const auto g = chiprobe::CouplingProfile::harmonic(r0, r, phi, omega, p.kappa());
    const auto fr = chiprobe::evaluate_functionals(g, n * chiprobe::kTwoPi / omega, p, omega);
    *out = {fr.xi.real(), fr.xi.imag(), fr.mu.real(), fr.mu.imag(), fr.lambda.real(), fr.lambda.imag(), fr.nu, fr.f};
  });
}

cp_status cp_run_budget(double f, double eps, uint64_t* budget) {
  return guarded([&] {
    need(budget, "budget");
    *budget = chiprobe::run_budget(f, eps);
  });
}

cp_status cp_plan_point(double beta_re, double beta_im, double r_max, int n_max, double omega, const cp_rates* rates,
                        cp_point* out) {
  return guarded([&] {
    need(out, "out");
    chiprobe::PlanOptions opts;
    opts.n_max = n_max;
    const auto p = chiprobe::plan_point({beta_re, beta_im}, r_max, params_of(rates), omega, opts);
    *out = {p.r, p.phi, p.n, p.t, p.f, p.budget};
  });
}

cp_status cp_state_parse(const char* spec, cp_state** out) {
  return guarded([&] {
    need(spec, "spec");
    need(out, "out");
    *out = new cp_state{chiprobe::OscillatorState::parse(spec)};
  });
}

cp_status cp_state_chi(const cp_state* state, double beta_re, double beta_im, double* chi_re, double* chi_im) {
  return guarded([&] {
    need(state, "state");
    need(chi_re, "chi_re");
    need(chi_im, "chi_im");
    const auto chi = chiprobe::characteristic(state->state, {beta_re, beta_im});
    *chi_re = chi.real();
    *chi_im = chi.imag();
  });
}

void cp_state_free(cp_state* state) { delete state; }

cp_status cp_config_parse(const char* text, const char* const* overrides, size_t n_overrides, cp_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    if (n_overrides > 0) need(overrides, "overrides");
    std::vector<std::string> extra;
    for (size_t i = 0; i < n_overrides; ++i) {
      need(overrides[i], "override");
      extra.emplace_back(overrides[i]);
    }
    auto result = chiprobe::parse_config(text, extra);
    if (!result.ok()) chiprobe::fail(chiprobe::ErrorCode::kConfig, result.describe());
    *out = new cp_config{std::move(result.config)};
  });
}

size_t cp_config_text(const cp_config* config, char* buffer, size_t capacity) {
  if (config == nullptr) return 0;
  return copy_out(chiprobe::to_text(config->config), buffer, capacity);
}

cp_status cp_config_execute(const cp_config* config, int* exit_code, char* summary, size_t capacity) {
  return guarded([&] {
    need(config, "config");
    need(exit_code, "exit_code");
    const auto outcome = chiprobe::execute(config->config);
    *exit_code = outcome.exit_code;
    copy_out(outcome.summary, summary, capacity);
  });
}

void cp_config_free(cp_config* config) { delete config; }

}  // extern "C"

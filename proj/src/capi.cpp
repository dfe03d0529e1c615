#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "experiment/experiment.hpp"
#include "iikit/bound.hpp"
#include "iikit/iikit.h"

namespace ex = iikit::experiment;

struct iikit_config {
  ex::Config config;
  std::string experiment;
};

struct iikit_report {
  ex::Report report;
};

struct iikit_family {
  iikit::PolyFamily family;
};

namespace {

thread_local std::string last_error;

iikit_status status_of(iikit::ErrorCode code) {
  using iikit::ErrorCode;
  switch (code) {
    case ErrorCode::domain: return IIKIT_ERR_DOMAIN;
    case ErrorCode::parameter: return IIKIT_ERR_PARAMETER;
    case ErrorCode::rank: return IIKIT_ERR_RANK;
    case ErrorCode::singular_gram: return IIKIT_ERR_SINGULAR_GRAM;
    case ErrorCode::not_positive_definite: return IIKIT_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::shape: return IIKIT_ERR_SHAPE;
    case ErrorCode::nonconvergence: return IIKIT_ERR_NONCONVERGENCE;
    case ErrorCode::unsupported_weight: return IIKIT_ERR_UNSUPPORTED_WEIGHT;
    case ErrorCode::consistency: return IIKIT_ERR_CONSISTENCY;
    case ErrorCode::schema: return IIKIT_ERR_SCHEMA;
  }
  return IIKIT_ERR_INTERNAL;
}

iikit_status set_error(iikit_status status, const std::string& msg) {
  last_error = msg;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
iikit_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return IIKIT_OK;
  } catch (const ex::ConfigError& e) {
    std::string msg;
    for (const auto& v : e.violations()) msg += v + "\n";
    if (!msg.empty()) msg.pop_back();
    return set_error(IIKIT_ERR_SCHEMA, msg);
  } catch (const iikit::Error& e) {
    return set_error(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(IIKIT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(IIKIT_ERR_INTERNAL, e.what());
  }
}

iikit_status copy_out(const std::string& s, char** out, size_t* len) {
  if (!out) return set_error(IIKIT_ERR_INVALID_ARGUMENT, "null output pointer");
  char* buf = static_cast<char*>(std::malloc(s.size() + 1));
  if (!buf) return set_error(IIKIT_ERR_INTERNAL, "out of memory");
  std::memcpy(buf, s.data(), s.size());
  buf[s.size()] = '\0';
  *out = buf;
  if (len) *len = s.size();
  return IIKIT_OK;
}

#define IIKIT_REQUIRE(cond, what) \
  if (!(cond)) return set_error(IIKIT_ERR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* iikit_version(void) { return "1.0.0"; }

const char* iikit_status_string(iikit_status status) {
  switch (status) {
    case IIKIT_OK: return "ok";
    case IIKIT_ERR_DOMAIN: return "domain error";
    case IIKIT_ERR_PARAMETER: return "parameter error";
    case IIKIT_ERR_RANK: return "rank error";
    case IIKIT_ERR_SINGULAR_GRAM: return "singular Gram matrix";
    case IIKIT_ERR_NOT_POSITIVE_DEFINITE: return "not positive definite";
    case IIKIT_ERR_SHAPE: return "shape error";
    case IIKIT_ERR_NONCONVERGENCE: return "quadrature did not converge";
    case IIKIT_ERR_UNSUPPORTED_WEIGHT: return "unsupported weight";
    case IIKIT_ERR_CONSISTENCY: return "consistency error";
    case IIKIT_ERR_SCHEMA: return "config schema error";
    case IIKIT_ERR_IO: return "i/o error";
    case IIKIT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case IIKIT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* iikit_last_error(void) { return last_error.c_str(); }

void iikit_string_free(char* s) { std::free(s); }

iikit_status iikit_config_parse(const char* text, size_t len, iikit_config** out) {
  IIKIT_REQUIRE(out, "null output pointer");
  IIKIT_REQUIRE(text || len == 0, "null text");
  *out = nullptr;
  return guarded([&] {
    auto cfg = std::make_unique<iikit_config>();
    cfg->config = ex::parse_config(std::string(text ? text : "", len));
    cfg->experiment = ex::to_string(cfg->config.kind);
    *out = cfg.release();
  });
}

iikit_status iikit_config_load(const char* path, iikit_config** out) {
  IIKIT_REQUIRE(path && out, "null argument");
  *out = nullptr;
  std::ifstream in(path, std::ios::binary);
  if (!in) return set_error(IIKIT_ERR_IO, std::string("cannot open ") + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  return iikit_config_parse(text.data(), text.size(), out);
}

void iikit_config_free(iikit_config* config) { delete config; }

iikit_status iikit_config_set_seed(iikit_config* config, uint64_t seed) {
  IIKIT_REQUIRE(config, "null config");
  return guarded([&] { config->config = ex::with_seed(config->config, seed); });
}

iikit_status iikit_config_set_tolerance(iikit_config* config, const char* key, double value) {
  IIKIT_REQUIRE(config && key, "null argument");
  return guarded([&] { config->config = ex::with_tolerance(config->config, key, value); });
}

iikit_status iikit_config_resolved(const iikit_config* config, char** json, size_t* len) {
  IIKIT_REQUIRE(config, "null config");
  return copy_out(config->config.resolved.dump(2), json, len);
}

const char* iikit_config_experiment(const iikit_config* config) {
  return config ? config->experiment.c_str() : "";
}

const char* iikit_config_output_path(const iikit_config* config) {
  return config ? config->config.output_path.c_str() : "";
}

const char* iikit_config_output_format(const iikit_config* config) {
  return config ? config->config.output_format.c_str() : "";
}

iikit_status iikit_run(const iikit_config* config, iikit_report** out) {
  IIKIT_REQUIRE(config && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto rep = std::make_unique<iikit_report>();
    rep->report = ex::run(config->config);
    *out = rep.release();
  });
}

void iikit_report_free(iikit_report* report) { delete report; }

int iikit_report_exit_status(const iikit_report* report) { return report ? report->report.exit_status() : 1; }

size_t iikit_report_row_count(const iikit_report* report) { return report ? report->report.rows.size() : 0; }

size_t iikit_report_failure_count(const iikit_report* report) {
  return report ? static_cast<size_t>(report->report.failures()) : 0;
}

size_t iikit_report_warning_count(const iikit_report* report) {
  return report ? static_cast<size_t>(report->report.warnings()) : 0;
}

iikit_status iikit_report_emit(const iikit_report* report, iikit_format format, int include_timing, char** out,
                               size_t* len) {
  IIKIT_REQUIRE(report && out, "null argument");
  IIKIT_REQUIRE(format == IIKIT_FORMAT_JSON || format == IIKIT_FORMAT_CSV, "unknown format");
  std::string text;
  const iikit_status st = guarded([&] {
    text = ex::emit_table(report->report, format == IIKIT_FORMAT_JSON ? ex::Format::json : ex::Format::csv,
                          include_timing != 0);
  });
  return st == IIKIT_OK ? copy_out(text, out, len) : st;
}

iikit_status iikit_report_table(const iikit_report* report, char** out, size_t* len) {
  IIKIT_REQUIRE(report && out, "null argument");
  return copy_out(ex::render_text(report->report), out, len);
}

size_t iikit_preset_count(void) { return ex::presets().size(); }

const char* iikit_preset_name(size_t index) {
  return index < ex::presets().size() ? ex::presets()[index].name.c_str() : nullptr;
}

const char* iikit_preset_description(size_t index) {
  return index < ex::presets().size() ? ex::presets()[index].description.c_str() : nullptr;
}

iikit_status iikit_preset_config(size_t index, char** json, size_t* len) {
  IIKIT_REQUIRE(index < ex::presets().size(), "preset index out of range");
  return copy_out(ex::presets()[index].config.dump(2), json, len);
}

iikit_status iikit_family_legendre(int dmax, double a, double b, iikit_family** out) {
  IIKIT_REQUIRE(out, "null output pointer");
  *out = nullptr;
  return guarded([&] { *out = new iikit_family{iikit::legendre_family(dmax, a, b)}; });
}

iikit_status iikit_family_jacobi(int dmax, double alpha, double beta, double a, double b, iikit_family** out) {
  IIKIT_REQUIRE(out, "null output pointer");
  *out = nullptr;
  return guarded([&] { *out = new iikit_family{iikit::jacobi_family(dmax, alpha, beta, a, b)}; });
}

void iikit_family_free(iikit_family* family) { delete family; }

int iikit_family_size(const iikit_family* family) { return family ? family->family.size() : 0; }

iikit_status iikit_family_gram(const iikit_family* family, double* out, size_t capacity) {
  IIKIT_REQUIRE(family && out, "null argument");
  const int d = family->family.size();
  IIKIT_REQUIRE(capacity >= static_cast<size_t>(d) * d, "output buffer too small");
  return guarded([&] {
    const Eigen::MatrixXd G = iikit::gram_matrix(family->family).gram;
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) out[i * d + k] = G(i, k);
  });
}

iikit_status iikit_lower_bound_poly(const iikit_family* family, const double* coeffs, int n, int degree,
                                    const double* cost, double* upper, double* lower) {
  IIKIT_REQUIRE(family && coeffs && cost, "null argument");
  IIKIT_REQUIRE(n >= 1 && degree >= 0, "n must be >= 1 and degree >= 0");
  return guarded([&] {
    Eigen::MatrixXd C(n, degree + 1);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k <= degree; ++k) C(i, k) = coeffs[i * (degree + 1) + k];
    Eigen::MatrixXd U(n, n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) U(i, k) = cost[i * n + k];
    const iikit::Signal x = iikit::Signal::polynomial(C, family->family.domain());
    const iikit::BoundReport rep = iikit::lower_bound(family->family, x, iikit::CostMatrix(U));
    if (upper) *upper = rep.upper;
    if (lower) *lower = rep.lower;
  });
}

}  // extern "C"

#pragma once

// Batch experiment layer: declarative configs, dispatch to the bound/fmt
// engines, report rows and their serialization. Internal to the library; the
// public surface is the C API in iikit/iikit.h.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "iikit/bound.hpp"
#include "iikit/fmt_bound.hpp"

namespace iikit::experiment {

using nlohmann::json;

/// Schema violations, each prefixed with its field path ("weight.alpha: ...").
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

enum class Kind { bound, sweep, converge, invariance, cauchy, fmt_probe, reduction };

const char* to_string(Kind kind);

struct KernelSpec {
  enum class Family { legendre, jacobi, laguerre, hermite, monomial };
  Family family = Family::legendre;
  int count = 1;  // number of kernel functions (degree count - 1)
  double alpha = 0.0;
  double beta = 0.0;
};

struct Tolerances {
  double quad = kDefaultQuadTol;
  double pd = kDefaultPdTol;
  double sound = 1e-9;
  double monotone = 1e-10;
  double gap_identity = 1e-8;
  double orthogonality = 1e-9;
  double invariance = 1e-9;
  double cauchy = 1e-8;
  double reduction = 1e-9;
  double dominance = 1e-8;
  double warn_ratio = 0.99;
  double convergence = 1e-3;
};

/// Names accepted by --tol and the "tolerances" section, in documentation order.
const std::vector<std::string>& tolerance_keys();

struct Params {
  int d_min = 1;
  int d_max = 0;  // 0: kernel.d
  int samples = 200;
  double condition_max = 1e6;
  int p = 1;
  std::string side = "both";
  int degree = -1;  // reduction; -1: kernel.d - 1
  int rho = 0;
  int budget = 8;
  int iterations = 200;
  double noise = 0.3;
  double eps = kSlackEpsilon;
  int draws = 0;
};

struct Config {
  json resolved;  // defaults filled in; echoed into every report
  Kind kind = Kind::bound;
  std::optional<Domain> domain;
  std::optional<WeightSpec> weight;  // explicit weight; empty: the kernel's own
  std::optional<KernelSpec> kernel;
  std::optional<Signal> signal;
  Eigen::MatrixXd cost;
  Tolerances tol;
  std::uint64_t seed = 0;
  Params params;
  std::string output_path;
  std::string output_format = "json";

  /// Kernel family with `count` functions paired with the configured weight.
  PolyFamily family(int count) const;
  BoundOptions bound_options() const;
};

/// Parses and validates a JSON config document (a "preset" key pulls in a
/// named preset as the base). Throws ConfigError.
Config parse_config(const std::string& text);

/// Re-validates after mutating `resolved` (seed and tolerance overrides).
Config reparse(const json& resolved);

Config with_seed(const Config& config, std::uint64_t seed);
Config with_tolerance(const Config& config, const std::string& key, double value);

// ---------------------------------------------------------------------------
// Reports

using Cell = std::variant<std::monostate, double, long long, bool, std::string>;

struct Row {
  std::vector<Cell> cells;  // aligned with Report::columns
  bool pass = true;
  bool warning = false;
  std::string error;
  double wall_time = 0.0;
};

struct Report {
  Kind kind = Kind::bound;
  json config;
  std::vector<std::string> columns;
  std::vector<Row> rows;

  int failures() const;
  int warnings() const;
  /// 0 iff every row passes; warnings never change it.
  int exit_status() const { return failures() == 0 ? 0 : 1; }
};

/// Runs the experiment. Module errors become failed rows, never exceptions.
Report run(const Config& config);

enum class Format { json, csv };

Format parse_format(const std::string& name);

/// Serialized report. JSON mirrors the row fields and embeds the resolved
/// config; CSV uses the report's fixed column order. Wall time is included
/// only when `timing` is set so that default output is reproducible.
std::string emit_table(const Report& report, Format format, bool timing = false);

/// Fixed-width text table for terminals.
std::string render_text(const Report& report);

// ---------------------------------------------------------------------------
// Presets

struct Preset {
  std::string name;
  std::string description;
  json config;
};

const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);

}  // namespace iikit::experiment

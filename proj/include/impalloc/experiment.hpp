#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "impalloc/allocator.hpp"
#include "impalloc/importance.hpp"
#include "impalloc/model.hpp"

namespace impalloc {

inline constexpr const char* kToolVersion = "1.0.0";

/// Malformed or invalid experiment configuration; `field` names the offending
/// JSON member.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct ExplicitWeights {
  std::vector<double> values;
};
using WeightSpec = std::variant<MimRule, NmimRule, ExplicitWeights>;

/// JSON experiment configuration:
///   { "system": "general" | "ideal" | "quantification",
///     "radix": 2,
///     "original_length": 16 | [8, 16, ...] | "unbounded",
///     "budget": 4.0,
///     "distribution": [0.2, 0.8],
///     "weights": {"kind": "mim", "varpi": 5} | {"kind": "nmim"} |
///                {"kind": "explicit", "values": [...]},
///     "seed": 42 }
struct ExperimentConfig {
  SystemKind system = SystemKind::Ideal;
  int radix = 2;
  LengthSpec lengths = UniformLength{0};
  double budget = 0.0;
  std::vector<double> distribution;
  WeightSpec weights = MimRule{0.0};
  std::optional<std::uint64_t> seed;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

/// 64-bit FNV-1a of the text as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

/// fnv1a_hex of the canonical (sorted-key) JSON form.
std::string config_hash(const ExperimentConfig& config);

/// Validated model objects built from a configuration.
struct Instance {
  ClassDistribution dist;
  ImportanceWeights weights;
  StorageConfig config;
};

/// Throws ConfigError when the configuration does not validate.
Instance build_instance(const ExperimentConfig& config);

/// Seed resolution: explicit flag, then IMPALLOC_SEED, then the config, then 0.
std::uint64_t resolve_seed(const ExperimentConfig& config,
                           std::optional<std::uint64_t> flag = std::nullopt);

/// Plan and its errors as a JSON report.
nlohmann::json plan_report(const Instance& instance, const AllocationPlan& plan);

enum class SweepParam { Budget, Varpi };

struct SweepRow {
  double value = 0.0;
  double rwre = 0.0;
  double rwre_rounded = 0.0;
  double achieved_budget = 0.0;
  double multiplier = 0.0;
  double water_level = 0.0;
  std::size_t interior = 0;
  std::size_t saturated = 0;
  std::size_t zero = 0;
  std::vector<double> lengths;
  std::string note;
};

struct SweepResult {
  SweepParam param = SweepParam::Budget;
  std::size_t classes = 0;
  std::vector<SweepRow> rows;
};

/// `steps` evenly spaced values from `from` to `to` inclusive. Per-row solver
/// failures become NaN rows with a note. Throws ConfigError for steps < 2,
/// from >= to, or a varpi sweep on non-MIM weights.
SweepResult run_sweep(const ExperimentConfig& config, SweepParam param,
                      double from, double to, int steps);

/// "%.9g"; NaN prints as "nan".
std::string format_number(double v);

/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

/// Leading comment line of every CSV written by the tool.
std::string csv_comment(const std::string& hash, std::uint64_t seed);

void write_sweep_csv(std::ostream& out, const SweepResult& result,
                     const std::string& hash, std::uint64_t seed);

struct ReproCheck {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct ReproResult {
  std::string experiment;
  std::vector<ReproCheck> checks;
  std::vector<std::filesystem::path> files;

  bool passed() const;
  /// First failing check, if any.
  const ReproCheck* first_failure() const;
};

/// Names accepted by reproduce(): fig1..fig5, table1, table2.
const std::vector<std::string>& experiment_names();

/// Recomputes one of the numerical-results experiments (radix 2), writes
/// `<name>.csv` (fig4 also `fig4_max_compressed.csv`) and
/// `<name>_summary.json` into out_dir. Throws ConfigError for an unknown
/// name.
ReproResult reproduce(const std::string& experiment,
                      const std::filesystem::path& out_dir);

}  // namespace impalloc

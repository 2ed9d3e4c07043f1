#include "impalloc/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "impalloc/distortion.hpp"

namespace impalloc {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ConfigError(key, "missing required field");
  return *it;
}

double number_field(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(field, "expected a finite number");
  return x;
}

std::uint32_t length_field(const json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0 ||
      v.get<std::int64_t>() > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigError(field, "expected a non-negative integer");
  }
  return static_cast<std::uint32_t>(v.get<std::int64_t>());
}

std::vector<double> number_array(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(number_field(v[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

SystemKind parse_system(const json& v) {
  if (v == "general") return SystemKind::General;
  if (v == "ideal") return SystemKind::Ideal;
  if (v == "quantification") return SystemKind::Quantification;
  throw ConfigError("system", "expected general, ideal or quantification");
}

const char* system_name(SystemKind kind) {
  switch (kind) {
    case SystemKind::General: return "general";
    case SystemKind::Ideal: return "ideal";
    case SystemKind::Quantification: return "quantification";
  }
  return "ideal";
}

LengthSpec parse_lengths(const json& v) {
  if (v.is_string()) {
    if (v == "unbounded") return UnboundedLength{};
    throw ConfigError("original_length", "expected an integer, array or \"unbounded\"");
  }
  if (v.is_array()) {
    PerClassLength out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.lengths.push_back(
          length_field(v[i], "original_length[" + std::to_string(i) + "]"));
    }
    return out;
  }
  return UniformLength{length_field(v, "original_length")};
}

WeightSpec parse_weights(const json& v) {
  if (!v.is_object()) throw ConfigError("weights", "expected an object");
  const auto kind_it = v.find("kind");
  if (kind_it == v.end() || !kind_it->is_string()) {
    throw ConfigError("weights.kind", "expected mim, nmim or explicit");
  }
  const auto kind = kind_it->get<std::string>();
  for (const auto& [key, value] : v.items()) {
    const bool known = key == "kind" || (kind == "mim" && key == "varpi") ||
                       (kind == "explicit" && key == "values");
    if (!known) throw ConfigError("weights." + key, "unknown field");
  }
  if (kind == "mim") {
    const auto it = v.find("varpi");
    if (it == v.end()) throw ConfigError("weights.varpi", "missing required field");
    return MimRule{number_field(*it, "weights.varpi")};
  }
  if (kind == "nmim") return NmimRule{};
  if (kind == "explicit") {
    const auto it = v.find("values");
    if (it == v.end()) throw ConfigError("weights.values", "missing required field");
    return ExplicitWeights{number_array(*it, "weights.values")};
  }
  throw ConfigError("weights.kind", "expected mim, nmim or explicit");
}

std::uint64_t parse_seed(std::string_view text, const std::string& field) {
  std::uint64_t out = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ConfigError(field, "expected an unsigned 64-bit integer");
  }
  return out;
}

std::string field_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Empty:
    case ErrorCode::NonPositiveProbability:
    case ErrorCode::NotNormalized: return "distribution";
    case ErrorCode::RadixTooSmall: return "radix";
    case ErrorCode::NegativeBudget:
    case ErrorCode::BudgetExceedsCapacity: return "budget";
    case ErrorCode::KindLengthMismatch:
    case ErrorCode::LengthCountMismatch: return "original_length";
    case ErrorCode::InvalidWeights:
    case ErrorCode::InvalidArgument: return "weights";
    default: return "$";
  }
}

ImportanceWeights make_weights(const WeightSpec& spec,
                               const ClassDistribution& dist) {
  if (const auto* m = std::get_if<MimRule>(&spec)) return mim_weights(dist, m->varpi);
  if (std::holds_alternative<NmimRule>(spec)) return nmim_weights(dist);
  const auto& values = std::get<ExplicitWeights>(spec).values;
  if (values.size() != dist.size()) {
    throw ConfigError("weights.values", "expected one weight per class");
  }
  return ImportanceWeights::explicit_values(values);
}

SweepRow failed_row(double value, std::size_t n, std::string note) {
  SweepRow row;
  row.value = value;
  row.rwre = row.rwre_rounded = row.achieved_budget = kNaN;
  row.multiplier = row.water_level = kNaN;
  row.lengths.assign(n, kNaN);
  row.note = std::move(note);
  return row;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("$", "expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    static const char* known[] = {"system", "radix", "original_length", "budget",
                                  "distribution", "weights", "seed"};
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw ConfigError(key, "unknown field");
    }
  }
  ExperimentConfig out;
  out.system = parse_system(require(doc, "system"));
  const auto& radix = require(doc, "radix");
  if (!radix.is_number_integer()) throw ConfigError("radix", "expected an integer");
  if (radix.get<std::int64_t>() < 2 ||
      radix.get<std::int64_t>() > std::numeric_limits<int>::max()) {
    throw ConfigError("radix", "must be at least 2");
  }
  out.radix = radix.get<int>();
  out.lengths = parse_lengths(require(doc, "original_length"));
  out.budget = number_field(require(doc, "budget"), "budget");
  out.distribution = number_array(require(doc, "distribution"), "distribution");
  out.weights = parse_weights(require(doc, "weights"));
  if (auto it = doc.find("seed"); it != doc.end()) {
    const bool non_negative =
        it->is_number_unsigned() ||
        (it->is_number_integer() && it->get<std::int64_t>() >= 0);
    if (!non_negative) {
      throw ConfigError("seed", "expected an unsigned 64-bit integer");
    }
    out.seed = it->get<std::uint64_t>();
  }
  return out;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("$", "cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& config) {
  json out;
  out["system"] = system_name(config.system);
  out["radix"] = config.radix;
  std::visit(
      [&](const auto& spec) {
        using S = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<S, UniformLength>) {
          out["original_length"] = spec.length;
        } else if constexpr (std::is_same_v<S, PerClassLength>) {
          out["original_length"] = spec.lengths;
        } else {
          out["original_length"] = "unbounded";
        }
      },
      config.lengths);
  out["budget"] = config.budget;
  out["distribution"] = config.distribution;
  if (const auto* m = std::get_if<MimRule>(&config.weights)) {
    out["weights"] = {{"kind", "mim"}, {"varpi", m->varpi}};
  } else if (std::holds_alternative<NmimRule>(config.weights)) {
    out["weights"] = {{"kind", "nmim"}};
  } else {
    out["weights"] = {{"kind", "explicit"},
                      {"values", std::get<ExplicitWeights>(config.weights).values}};
  }
  if (config.seed) out["seed"] = *config.seed;
  return out;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const ExperimentConfig& config) {
  return fnv1a_hex(to_json(config).dump());
}

Instance build_instance(const ExperimentConfig& config) {
  try {
    auto dist = validate_distribution(config.distribution);
    auto storage = make_config(config.radix, config.lengths, config.budget,
                               config.system);
    check_compatible(dist, storage);
    auto weights = make_weights(config.weights, dist);
    return {std::move(dist), std::move(weights), std::move(storage)};
  } catch (const Error& e) {
    throw ConfigError(field_for(e.code()), e.what());
  }
}

std::uint64_t resolve_seed(const ExperimentConfig& config,
                           std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("IMPALLOC_SEED"); env && *env) {
    return parse_seed(env, "IMPALLOC_SEED");
  }
  return config.seed.value_or(0);
}

json plan_report(const Instance& instance, const AllocationPlan& plan) {
  const auto cont = rwre(instance.dist, instance.weights, instance.config, plan);
  json out;
  out["lengths"] = plan.continuous_lengths;
  out["integer_lengths"] = plan.integer_lengths;
  out["multiplier"] = plan.multiplier;
  out["water_level"] = plan.water_level;
  out["interior_set"] = plan.interior_set;
  out["saturated_set"] = plan.saturated_set;
  out["zero_set"] = plan.zero_set;
  out["budget"] = plan.budget;
  out["achieved_budget"] = plan.achieved_budget;
  out["weights"] = std::vector<double>(instance.weights.values().begin(),
                                       instance.weights.values().end());
  out["weighted_error"] = cont.weighted_error;
  out["rwre"] = cont.rwre;
  out["per_class_distortion"] = cont.per_class_distortion;
  if (!plan.integer_lengths.empty()) {
    const auto rounded =
        rwre_rounded(instance.dist, instance.weights, instance.config, plan);
    out["rounded_budget"] = plan.rounded_budget;
    out["rwre_rounded"] = rounded.rwre;
  }
  return out;
}

SweepResult run_sweep(const ExperimentConfig& config, SweepParam param,
                      double from, double to, int steps) {
  if (steps < 2) throw ConfigError("steps", "must be at least 2");
  if (!std::isfinite(from) || !std::isfinite(to) || !(from < to)) {
    throw ConfigError("from", "expected finite from < to");
  }
  if (param == SweepParam::Varpi &&
      !std::holds_alternative<MimRule>(config.weights)) {
    throw ConfigError("weights.kind", "a varpi sweep needs mim weights");
  }
  const Instance base = build_instance(config);
  const std::size_t n = base.dist.size();
  SweepResult out;
  out.param = param;
  out.classes = n;
  for (int k = 0; k < steps; ++k) {
    const double v =
        k == steps - 1 ? to : from + (to - from) * k / static_cast<double>(steps - 1);
    try {
      auto storage = param == SweepParam::Budget ? base.config.with_budget(v)
                                                 : base.config;
      check_compatible(base.dist, storage);
      auto weights = param == SweepParam::Varpi ? mim_weights(base.dist, v)
                                                : base.weights;
      auto plan = round_plan(solve(base.dist, weights, storage), base.dist, storage);
      SweepRow row;
      row.value = v;
      row.rwre = rwre(base.dist, weights, storage, plan).rwre;
      row.rwre_rounded = rwre_rounded(base.dist, weights, storage, plan).rwre;
      row.achieved_budget = plan.achieved_budget;
      row.multiplier = plan.multiplier;
      row.water_level = plan.water_level;
      row.interior = plan.interior_set.size();
      row.saturated = plan.saturated_set.size();
      row.zero = plan.zero_set.size();
      row.lengths = plan.continuous_lengths;
      out.rows.push_back(std::move(row));
    } catch (const Error& e) {
      out.rows.push_back(failed_row(v, n, e.what()));
    }
  }
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_comment(const std::string& hash, std::uint64_t seed) {
  return std::string("# impalloc ") + kToolVersion + " config=" + hash +
         " seed=" + std::to_string(seed);
}

void write_sweep_csv(std::ostream& out, const SweepResult& result,
                     const std::string& hash, std::uint64_t seed) {
  out << csv_comment(hash, seed) << '\n';
  out << (result.param == SweepParam::Budget ? "budget" : "varpi")
      << ",rwre,rwre_rounded,achieved_budget,lambda,beta,n_interior,"
         "n_saturated,n_zero";
  for (std::size_t i = 1; i <= result.classes; ++i) out << ",l_" << i;
  out << ",note\n";
  for (const auto& row : result.rows) {
    out << format_number(row.value) << ',' << format_number(row.rwre) << ','
        << format_number(row.rwre_rounded) << ','
        << format_number(row.achieved_budget) << ','
        << format_number(row.multiplier) << ','
        << format_number(row.water_level) << ',' << row.interior << ','
        << row.saturated << ',' << row.zero;
    for (double l : row.lengths) out << ',' << format_number(l);
    out << ',' << csv_field(row.note) << '\n';
  }
}

}  // namespace impalloc

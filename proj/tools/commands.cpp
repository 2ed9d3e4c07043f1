#include "commands.hpp"

#include <fstream>

#include "impalloc/allocator.hpp"
#include "impalloc/distortion.hpp"
#include "impalloc/experiment.hpp"
#include "impalloc/oracle.hpp"

namespace impalloc::cli {

namespace {

using nlohmann::json;

constexpr double kTol = 1e-9;

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("out", "cannot write " + path.string());
  return out;
}

// Runs a command body, mapping failures onto exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "solver error: " << e.what() << '\n';
    return e.code() == ErrorCode::SearchSpaceTooLarge ? kExitConfig : kExitSolver;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

void write_allocate_csv(std::ostream& out, const Instance& instance,
                        const AllocationPlan& plan, const std::string& hash,
                        std::uint64_t seed) {
  const auto cont = rwre(instance.dist, instance.weights, instance.config, plan);
  const auto rounded =
      rwre_rounded(instance.dist, instance.weights, instance.config, plan);
  const std::size_t n = plan.size();
  out << csv_comment(hash, seed) << '\n';
  out << "rwre,rwre_rounded,weighted_error,achieved_budget,rounded_budget,lambda,"
         "beta,n_interior,n_saturated,n_zero";
  for (std::size_t i = 1; i <= n; ++i) out << ",l_" << i;
  for (std::size_t i = 1; i <= n; ++i) out << ",lstar_" << i;
  out << '\n'
      << format_number(cont.rwre) << ',' << format_number(rounded.rwre) << ','
      << format_number(cont.weighted_error) << ','
      << format_number(plan.achieved_budget) << ','
      << format_number(plan.rounded_budget) << ','
      << format_number(plan.multiplier) << ',' << format_number(plan.water_level)
      << ',' << plan.interior_set.size() << ',' << plan.saturated_set.size() << ','
      << plan.zero_set.size();
  for (double l : plan.continuous_lengths) out << ',' << format_number(l);
  for (auto l : plan.integer_lengths) out << ',' << l;
  out << '\n';
}

json oracle_json(const OracleReport& r) {
  return {{"optimum_value", r.optimum_value},
          {"optimum_plan", r.optimum_plan},
          {"gap_vs_candidate", r.gap_vs_candidate},
          {"trials", r.trials},
          {"seed", r.seed}};
}

}  // namespace

int cmd_allocate(const AllocateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.format != "json" && args.format != "csv") {
      throw ConfigError("format", "expected json or csv");
    }
    const auto config = load_config(args.config);
    const auto instance = build_instance(config);
    const auto seed = resolve_seed(config);
    const auto hash = config_hash(config);
    const auto plan = round_plan(
        solve(instance.dist, instance.weights, instance.config), instance.dist,
        instance.config);
    auto file = open_output(args.out);
    if (args.format == "csv") {
      write_allocate_csv(file, instance, plan, hash, seed);
    } else {
      auto doc = plan_report(instance, plan);
      doc["tool_version"] = kToolVersion;
      doc["config_hash"] = hash;
      doc["seed"] = seed;
      file << doc.dump(2) << '\n';
    }
    out << "wrote " << args.out.string() << '\n';
    return int(kExitOk);
  });
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SweepParam param;
    if (args.param == "budget") {
      param = SweepParam::Budget;
    } else if (args.param == "varpi") {
      param = SweepParam::Varpi;
    } else {
      throw ConfigError("param", "expected budget or varpi");
    }
    if (args.steps < 2) throw ConfigError("steps", "must be at least 2");
    const auto config = load_config(args.config);
    const auto result = run_sweep(config, param, args.from, args.to, args.steps);
    auto file = open_output(args.out);
    write_sweep_csv(file, result, config_hash(config), resolve_seed(config));
    std::size_t failed = 0;
    for (const auto& row : result.rows) failed += !row.note.empty();
    out << "wrote " << result.rows.size() << " rows to " << args.out.string();
    if (failed) out << " (" << failed << " failed)";
    out << '\n';
    return int(kExitOk);
  });
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.oracle != "brute" && args.oracle != "perturb" && args.oracle != "kkt") {
      throw ConfigError("oracle", "expected brute, perturb or kkt");
    }
    if (args.trials < 1) throw ConfigError("trials", "must be at least 1");
    const auto config = load_config(args.config);
    const auto inst = build_instance(config);
    const auto seed = resolve_seed(config, args.seed);
    const auto plan =
        round_plan(solve(inst.dist, inst.weights, inst.config), inst.dist, inst.config);
    const double cont = rwre(inst.dist, inst.weights, inst.config, plan).rwre;
    json doc;
    bool passed = false;
    if (args.oracle == "brute") {
      auto report =
          brute_force_integer(inst.dist, inst.weights, inst.config, plan.integer_lengths);
      report.seed = seed;
      const double rounded = rwre_rounded(inst.dist, inst.weights, inst.config, plan).rwre;
      passed = cont <= report.optimum_value + kTol &&
               report.optimum_value <= rounded + kTol;
      doc = oracle_json(report);
      doc["continuous_rwre"] = cont;
      doc["rounded_rwre"] = rounded;
    } else if (args.oracle == "perturb") {
      passed = perturbation_check(plan.continuous_lengths, inst.dist, inst.weights,
                                  inst.config, args.trials, 1e-3, seed);
      doc = oracle_json({cont, plan.continuous_lengths, 0.0, args.trials, seed});
    } else {
      const auto kkt =
          kkt_certify(plan.continuous_lengths, inst.dist, inst.weights, inst.config);
      passed = kkt.passed;
      doc = oracle_json({cont, plan.continuous_lengths, 0.0, 0, seed});
      doc["multiplier"] = kkt.multiplier;
      doc["mu"] = kkt.mu;
      doc["nu"] = kkt.nu;
      doc["stationarity_spread"] = kkt.stationarity_spread;
      doc["worst_dual_violation"] = kkt.worst_dual_violation;
      doc["worst_slackness"] = kkt.worst_slackness;
      doc["interior"] = kkt.interior;
    }
    doc["oracle"] = args.oracle;
    doc["passed"] = passed;
    out << doc.dump(2) << '\n';
    if (!passed) {
      err << "verification failed: " << args.oracle << '\n';
      return int(kExitVerify);
    }
    return int(kExitOk);
  });
}

int cmd_reproduce(const ReproduceArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto result = reproduce(args.experiment, args.out);
    for (const auto& c : result.checks) {
      out << (c.passed ? "PASS " : "FAIL ") << args.experiment << ' ' << c.name
          << " expected=" << format_number(c.expected)
          << " actual=" << format_number(c.actual)
          << " tolerance=" << format_number(c.tolerance) << '\n';
    }
    if (const auto* bad = result.first_failure()) {
      err << "reproduction check failed: " << args.experiment << ": " << bad->name
          << '\n';
      return int(kExitReproduce);
    }
    return int(kExitOk);
  });
}

}  // namespace impalloc::cli

// Command-line front end: solve | qsim | sweep | validate.
//
// Exit codes: 0 ok, 2 parse/usage error, 3 capacity exceeded,
// 4 post-selection impossible, 5 retry budget exhausted, 1 anything else.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qtwt/errors.hpp"
#include "qtwt/instance_io.hpp"
#include "qtwt/pipeline.hpp"

namespace {

using namespace qtwt;

struct QsimFlags {
  std::string rounds = "auto";
  std::string norm = "minmax";
  std::string alpha = "midrandom";
  std::string beta = "auto";
  std::string bounds = "exact";
  std::string mode = "exact";
  bool clamp = false;
  std::uint64_t seed = 1;
  int retry_budget = 1000;
  int phase_rounds = 1;
};

int max_qubits_from_env() {
  const char* env = std::getenv("QTWT_MAX_QUBITS");
  if (env == nullptr || *env == '\0') return kDefaultMaxQubits;
  try {
    std::size_t used = 0;
    const int value = std::stoi(env, &used);
    if (used != std::string(env).size() || value < 1) throw std::invalid_argument(env);
    return value;
  } catch (const std::exception&) {
    throw ParseError(std::string("QTWT_MAX_QUBITS must be a positive integer, got '") + env +
                     "'");
  }
}

PipelineConfig config_from_flags(const QsimFlags& flags) {
  PipelineConfig cfg;
  if (flags.rounds != "auto") {
    try {
      cfg.rounds = std::stoi(flags.rounds);
    } catch (const std::exception&) {
      throw ParseError("--rounds expects 'auto' or an integer, got '" + flags.rounds + "'");
    }
    if (*cfg.rounds < 0) throw ParseError("--rounds must be >= 0");
  }

  if (flags.norm == "minmax") {
    cfg.normalization = NormalizationSpec::Kind::kMinMax;
  } else if (flags.norm == "sigmoid") {
    cfg.normalization = NormalizationSpec::Kind::kSigmoid;
  } else {
    throw ParseError("--norm expects minmax or sigmoid, got '" + flags.norm + "'");
  }

  if (flags.alpha == "midrandom") {
    cfg.alpha_mode = AlphaMode::kMidpointRandom;
  } else if (flags.alpha == "best2") {
    cfg.alpha_mode = AlphaMode::kMidpointBestSecond;
  } else {
    try {
      cfg.alpha_fixed = std::stod(flags.alpha);
      cfg.alpha_mode = AlphaMode::kFixed;
    } catch (const std::exception&) {
      throw ParseError("--alpha expects midrandom, best2, or a number, got '" + flags.alpha +
                       "'");
    }
  }

  if (flags.beta != "auto") {
    try {
      cfg.beta = std::stod(flags.beta);
    } catch (const std::exception&) {
      throw ParseError("--beta expects 'auto' or a number, got '" + flags.beta + "'");
    }
    if (!(*cfg.beta > 0)) throw ParseError("--beta must be > 0");
  }

  if (flags.bounds == "exact") {
    cfg.bounds_mode = BoundsMode::kExact;
  } else if (flags.bounds == "conservative") {
    cfg.bounds_mode = BoundsMode::kConservative;
  } else {
    throw ParseError("--bounds expects exact or conservative, got '" + flags.bounds + "'");
  }

  if (flags.mode == "exact") {
    cfg.mode = RunMode::kExact;
  } else if (flags.mode.rfind("shots:", 0) == 0) {
    cfg.mode = RunMode::kSampled;
    try {
      cfg.shots = std::stoll(flags.mode.substr(6));
    } catch (const std::exception&) {
      throw ParseError("--mode shots:N needs an integer N, got '" + flags.mode + "'");
    }
    if (cfg.shots < 1) throw ParseError("--mode shots:N needs N >= 1");
  } else {
    throw ParseError("--mode expects exact or shots:N, got '" + flags.mode + "'");
  }

  cfg.clamp_lateness = flags.clamp;
  cfg.seed = flags.seed;
  cfg.retry_budget = flags.retry_budget;
  cfg.phase_rounds = flags.phase_rounds;
  cfg.max_qubits = max_qubits_from_env();
  return cfg;
}

void add_qsim_flags(CLI::App* cmd, QsimFlags& flags) {
  cmd->add_option("--rounds", flags.rounds, "amplification rounds: auto or an integer");
  cmd->add_option("--norm", flags.norm, "cost normalization: minmax or sigmoid");
  cmd->add_option("--alpha", flags.alpha, "sigmoid center: midrandom, best2, or a number");
  cmd->add_option("--beta", flags.beta, "sigmoid steepness: auto or a number");
  cmd->add_option("--bounds", flags.bounds, "min-max bounds: exact or conservative");
  cmd->add_flag("--clamp", flags.clamp, "clamp lateness at zero (classical tardiness)");
  cmd->add_option("--mode", flags.mode, "exact or shots:N");
  cmd->add_option("--seed", flags.seed, "random seed");
  cmd->add_option("--retry-budget", flags.retry_budget, "restart budget in sampled mode");
  cmd->add_option("--phase-rounds", flags.phase_rounds,
                  "experimental: extra cost-phase rounds (default 1)");
}

NamedInstance load_padded(const std::string& path) {
  NamedInstance named = parse_instance_file(path);
  const int original = named.instance.size();
  Instance padded = pad_instance(named.instance);
  if (padded.size() != original) {
    const int added = padded.size() - original;
    std::cerr << "note: padded " << named.name << " from " << original << " to "
              << padded.size() << " tasks with " << added
              << (added == 1 ? " zero-weight dummy\n" : " zero-weight dummies\n");
  }
  return NamedInstance{named.name, std::move(padded)};
}

int cmd_solve(const std::string& path, bool clamp) {
  const NamedInstance named = parse_instance_file(path);
  const CostSpec spec{clamp, MinMaxBounds{0, 1}};
  const BruteForceResult result = brute_force_optimum(named.instance, spec);
  for (const Schedule& s : result.optima) {
    std::cout << "optimal: " << format_schedule(s) << " cost " << result.cost.to_decimal()
              << "\n";
  }
  return 0;
}

int cmd_qsim(const std::string& path, const QsimFlags& flags, const std::string& out_dir) {
  const NamedInstance named = load_padded(path);
  const PipelineConfig cfg = config_from_flags(flags);
  const PipelineResult result = run_pipeline(named.instance, cfg);

  for (const std::string& warning : result.report.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  atomic_write_stream(dir / "distribution.csv", [&](std::ostream& out) {
    write_distribution_csv(out, result, named.instance, cfg);
  });
  atomic_write_file(dir / "summary.json", summary_json(result, named, cfg));

  const RunReport& report = result.report;
  std::cout << "instance: " << named.name << " (" << named.instance.original_count()
            << " tasks, padded to " << report.task_count << ", " << report.qubits
            << " qubits)\n";
  std::cout << "rounds: " << report.rounds_used << (flags.rounds == "auto" ? " (auto)" : "")
            << "\n";
  std::cout << "p0: " << format_double(report.p0) << "\n";
  if (report.argmax_schedule.has_value()) {
    std::cout << "argmax: " << format_schedule(*report.argmax_schedule) << " cost "
              << report.argmax_cost.to_decimal() << "\n";
  } else {
    std::cout << "argmax: basis " << report.argmax_basis << " (infeasible)\n";
  }
  std::cout << "oracle: optimal cost " << report.optimal_cost.to_decimal() << ", agreement "
            << (report.oracle_optimal ? "yes" : "no") << "\n";
  std::cout << "wrote: " << (dir / "distribution.csv").string() << ", "
            << (dir / "summary.json").string() << "\n";
  return 0;
}

int cmd_sweep(const std::string& path, const QsimFlags& flags, const std::string& param,
              const std::string& grid_spec, const std::string& out_file) {
  const NamedInstance named = load_padded(path);
  const PipelineConfig cfg = config_from_flags(flags);

  SweepParameter parameter;
  if (param == "rounds") {
    parameter = SweepParameter::kRounds;
  } else if (param == "beta") {
    parameter = SweepParameter::kBeta;
  } else if (param == "alpha") {
    parameter = SweepParameter::kAlpha;
  } else {
    throw ParseError("--param expects rounds, beta, or alpha, got '" + param + "'");
  }

  const std::vector<double> grid = parse_grid(grid_spec);
  const std::vector<SweepRow> rows = sweep(named.instance, cfg, parameter, grid);
  atomic_write_stream(out_file,
                      [&](std::ostream& out) { write_sweep_csv(out, parameter, rows); });
  std::cout << "wrote " << rows.size() << " grid points to " << out_file << "\n";
  return 0;
}

int cmd_validate(int task_count, int count, bool unique, const QsimFlags& flags) {
  ValidationConfig cfg;
  cfg.task_count = task_count;
  cfg.instance_count = count;
  cfg.seed = flags.seed;
  cfg.require_unique_optimum = unique;
  cfg.pipeline = config_from_flags(flags);

  const ValidationSummary summary = validate(cfg);
  std::cout << "agreement " << summary.agreement_count << "/" << summary.cases.size() << " ("
            << format_double(summary.agreement_rate()) << ")\n";
  std::cout << "mean p0 " << format_double(summary.mean_p0) << "\n";
  std::cout << "mean P(optimum) " << format_double(summary.mean_optimum_probability) << "\n";
  bool any_failed = false;
  for (const ValidationCase& vcase : summary.cases) {
    if (vcase.agreed) continue;
    any_failed = true;
    std::cout << "failed: instance " << vcase.index << " (seed " << vcase.sub_seed
              << ", argmax basis " << vcase.argmax_basis << ", optimal cost "
              << vcase.optimal_cost.to_decimal() << ")\n";
  }
  if (!any_failed) std::cout << "failures: none\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact simulator for feasibility-amplified, cost-phase post-selected "
               "single-machine scheduling"};
  app.require_subcommand(1);

  std::string instance_path;
  std::string out_dir = "qtwt-out";
  std::string out_file = "sweep.csv";
  std::string param = "rounds";
  std::string grid_spec;
  bool solve_clamp = false;
  int validate_m = 4;
  int validate_count = 50;
  bool validate_unique = false;
  QsimFlags qsim_flags;
  QsimFlags sweep_flags;
  QsimFlags validate_flags;

  CLI::App* solve = app.add_subcommand("solve", "brute-force optimum of an instance file");
  solve->add_option("instance", instance_path, "instance JSON file")->required();
  solve->add_flag("--clamp", solve_clamp, "clamp lateness at zero");

  CLI::App* qsim = app.add_subcommand("qsim", "run the quantum pipeline on an instance file");
  qsim->add_option("instance", instance_path, "instance JSON file")->required();
  add_qsim_flags(qsim, qsim_flags);
  qsim->add_option("--out", out_dir, "output directory");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run the pipeline over a parameter grid");
  sweep_cmd->add_option("instance", instance_path, "instance JSON file")->required();
  sweep_cmd->add_option("--param", param, "rounds, beta, or alpha")->required();
  sweep_cmd->add_option("--grid", grid_spec, "start:stop:step or comma list")->required();
  sweep_cmd->add_option("--out", out_file, "output CSV file");
  add_qsim_flags(sweep_cmd, sweep_flags);

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "score seeded random instances against brute force");
  validate_cmd->add_option("--m", validate_m, "task count (a power of two)");
  validate_cmd->add_option("--count", validate_count, "number of instances");
  validate_cmd->add_flag("--unique", validate_unique,
                         "redraw instances until the optimum is unique");
  add_qsim_flags(validate_cmd, validate_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(instance_path, solve_clamp);
    if (qsim->parsed()) return cmd_qsim(instance_path, qsim_flags, out_dir);
    if (sweep_cmd->parsed()) {
      return cmd_sweep(instance_path, sweep_flags, param, grid_spec, out_file);
    }
    return cmd_validate(validate_m, validate_count, validate_unique, validate_flags);
  } catch (const qtwt::ParseError& e) {
    std::cerr << "error: " << e.what();
    if (e.line() > 0) std::cerr << " (line " << e.line() << ", column " << e.column() << ")";
    std::cerr << "\n";
    return 2;
  } catch (const qtwt::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const qtwt::PostSelectionImpossibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const qtwt::RetriesExhaustedError& e) {
    std::cerr << "error: " << e.what() << " (per-attempt success probability "
              << qtwt::format_double(e.success_probability()) << ")\n";
    return 5;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

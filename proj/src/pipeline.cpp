#include "qtwt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "qtwt/errors.hpp"

namespace qtwt {

namespace {

// Sub-streams of the run seed. Every random draw in a pipeline run comes from
// one of these, so a seed pins the whole run.
constexpr std::uint64_t kAlphaStream = 0;
constexpr std::uint64_t kMeasureStream = 1;

// Largest exp() argument we allow the sigmoid to see when autoscaling beta.
constexpr double kMaxSigmoidExponent = 700.0;

Eigen::ArrayXd basis_cost_table(const Instance& inst, const CostSpec& spec,
                                std::uint64_t states) {
  Eigen::ArrayXd costs(static_cast<Eigen::Index>(states));
  for (std::uint64_t v = 0; v < states; ++v) {
    costs[static_cast<Eigen::Index>(v)] = cost_of_basis(v, inst, spec).to_double();
  }
  return costs;
}

// Resolves the normalization to concrete numbers: min-max bounds from the
// instance, or sigmoid alpha/beta per config. Returns the normalized table;
// a degenerate (all-equal) cost range degrades to the zero table.
Eigen::ArrayXd resolve_normalization(const Instance& inst, const PipelineConfig& cfg,
                                     const CostSpec& spec, const Eigen::ArrayXd& costs,
                                     NormalizationSpec& resolved,
                                     std::vector<std::string>& warnings) {
  if (cfg.normalization == NormalizationSpec::Kind::kMinMax) {
    MinMaxBounds bounds = cost_bounds(inst, spec, cfg.bounds_mode);
    if (bounds.lower == bounds.upper) {
      warnings.push_back(
          "all basis states cost the same; cost phase disabled (every feasible "
          "schedule is optimal)");
      resolved = NormalizationSpec::minmax(bounds.lower.to_double(), bounds.upper.to_double());
      return Eigen::ArrayXd::Zero(costs.size());
    }
    resolved = NormalizationSpec::minmax(bounds.lower.to_double(), bounds.upper.to_double());
    return normalize_cost_table(costs, resolved);
  }

  Rng alpha_rng = stream_rng(cfg.seed, kAlphaStream);
  double alpha = 0.0;
  Rational spread(0);
  switch (cfg.alpha_mode) {
    case AlphaMode::kMidpointRandom: {
      auto [a, b] = sample_two_costs(inst, spec, alpha_rng);
      alpha = ((a + b) / Rational(2)).to_double();
      spread = abs(a - b);
      break;
    }
    case AlphaMode::kMidpointBestSecond: {
      auto [best, second] = best_two_costs(inst, spec);
      alpha = ((best + second) / Rational(2)).to_double();
      spread = second - best;
      break;
    }
    case AlphaMode::kFixed: {
      alpha = cfg.alpha_fixed;
      auto [a, b] = sample_two_costs(inst, spec, alpha_rng);
      spread = abs(a - b);
      break;
    }
  }

  double beta;
  if (cfg.beta.has_value()) {
    beta = *cfg.beta;
  } else {
    if (spread.is_zero()) {
      warnings.push_back("sampled schedules cost the same; beta autoscale fell back to 1");
      beta = 1.0;
    } else {
      beta = 10.0 / spread.to_double();
    }
    // Keep the exponent representable over the whole cost range.
    const double reach =
        std::max(std::abs(costs.minCoeff() - alpha), std::abs(costs.maxCoeff() - alpha));
    if (reach > 0.0 && beta * reach > kMaxSigmoidExponent) {
      beta = kMaxSigmoidExponent / reach;
    }
  }

  resolved = NormalizationSpec::sigmoid(alpha, beta);
  return normalize_cost_table(costs, resolved);
}

}  // namespace

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

PipelineResult run_pipeline(const Instance& inst, const PipelineConfig& cfg) {
  const int m = inst.size();
  if (m < 2 || !inst.has_power_of_two_size()) {
    throw std::invalid_argument("run_pipeline: instance must be padded to a power of two");
  }
  const int bits = slot_bits(m);
  const int qubits = qubit_count(m);
  const std::uint64_t states = basis_state_count(qubits);
  const CostSpec spec = cfg.cost_spec();

  RunReport report;
  report.task_count = m;
  report.qubits = qubits;

  // Stage 1: uniform register, then feasibility amplification.
  StateVector state = uniform_state(qubits, cfg.max_qubits);
  const GroverPlan plan = plan_grover(qubits, factorial(m), cfg.rounds);
  report.rounds_used = plan.rounds;
  report.rounds_clamped = plan.clamped_to_one;
  if (plan.clamped_to_one) {
    report.warnings.push_back("auto round formula returned 0; running one round instead");
  }
  const auto feasible = [m, bits](std::uint64_t v) { return is_feasible(v, m, bits); };
  run_grover(state, feasible, plan.rounds);

  {
    const Eigen::ArrayXd probs = probabilities(state);
    double mass = 0.0;
    for (std::uint64_t v = 0; v < states; ++v) {
      if (feasible(v)) mass += probs[static_cast<Eigen::Index>(v)];
    }
    report.feasible_mass_after_grover = mass;
  }

  // Stage 2: cost phase on every basis state, post-selected on control = 0.
  const Eigen::ArrayXd costs = basis_cost_table(inst, spec, states);
  const Eigen::ArrayXd normalized =
      resolve_normalization(inst, cfg, spec, costs, report.normalization_used, report.warnings);
  const bool clamp_saturated = cfg.normalization == NormalizationSpec::Kind::kSigmoid;

  if (cfg.phase_rounds < 1) throw std::invalid_argument("run_pipeline: phase_rounds must be >= 1");
  double p0 = 1.0;
  for (int round = 0; round < cfg.phase_rounds; ++round) {
    PhaseRoundResult phase = run_phase_round(state, normalized, clamp_saturated);
    p0 *= phase.p0;
    state = std::move(phase.state);
  }
  report.p0 = p0;

  // Stage 3: outcome. The exact conditional distribution always exists;
  // sampled mode additionally simulates the restart-and-measure loop.
  const Eigen::ArrayXd conditional = probabilities(state);
  if (cfg.mode == RunMode::kExact) {
    Eigen::Index argmax = 0;
    for (Eigen::Index i = 1; i < conditional.size(); ++i) {
      if (conditional[i] > conditional[argmax]) argmax = i;
    }
    report.argmax_basis = static_cast<std::uint64_t>(argmax);
  } else {
    if (cfg.shots < 1) throw std::invalid_argument("run_pipeline: sampled mode needs shots >= 1");
    if (cfg.retry_budget < 1) throw std::invalid_argument("run_pipeline: retry budget must be >= 1");
    Rng measure_rng = stream_rng(cfg.seed, kMeasureStream);
    const DiscreteSampler outcome_sampler(conditional);
    std::int64_t retries = 0;
    for (std::int64_t shot = 0; shot < cfg.shots; ++shot) {
      int attempt = 0;
      while (true) {
        if (attempt >= cfg.retry_budget) {
          throw RetriesExhaustedError(
              "control qubit never measured 0 in " + std::to_string(cfg.retry_budget) +
                  " preparations",
              p0);
        }
        ++attempt;
        if (uniform_unit(measure_rng) < p0) break;
        ++retries;
      }
      ++report.counts[outcome_sampler.draw(measure_rng)];
    }
    report.retries_used = retries;
    std::uint64_t best = 0;
    std::uint64_t best_count = 0;
    for (const auto& [basis, count] : report.counts) {
      if (count > best_count) {
        best = basis;
        best_count = count;
      }
    }
    report.argmax_basis = best;
  }

  report.argmax_conditional = conditional[static_cast<Eigen::Index>(report.argmax_basis)];
  report.argmax_joint = report.argmax_conditional * p0;
  report.argmax_cost = cost_of_basis(report.argmax_basis, inst, spec);
  if (is_feasible(report.argmax_basis, m, bits)) {
    report.argmax_schedule = Schedule{decode_basis(BasisIndex{report.argmax_basis, m})};
  }

  const BruteForceResult oracle = brute_force_optimum(inst, spec);
  report.optimal_cost = oracle.cost;
  report.oracle_optimal = report.argmax_schedule.has_value() &&
                          report.argmax_cost == oracle.cost;

  return PipelineResult{std::move(report), std::move(state)};
}

std::vector<DistributionRow> build_distribution(const PipelineResult& result,
                                                const Instance& inst,
                                                const PipelineConfig& cfg) {
  const int m = inst.size();
  const int bits = slot_bits(m);
  if (result.report.qubits > kMaxMaterializedQubits) {
    throw CapacityError("build_distribution: materialization capped at 2^" +
                        std::to_string(kMaxMaterializedQubits) + " rows; stream instead");
  }
  const CostSpec spec = cfg.cost_spec();
  const auto dim = result.state.dimension();
  const double p0 = result.report.p0;

  std::vector<DistributionRow> rows(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) {
    DistributionRow& row = rows[static_cast<std::size_t>(i)];
    row.basis = static_cast<std::uint64_t>(i);
    row.slots = decode_basis(BasisIndex{row.basis, m});
    row.feasible = is_feasible(row.basis, m, bits);
    row.cost = cost_of_basis(row.basis, inst, spec);
    row.amplitude = result.state.amplitude(row.basis);
    row.conditional = std::norm(row.amplitude);
    row.joint = row.conditional * p0;
  }
  std::sort(rows.begin(), rows.end(), [](const DistributionRow& a, const DistributionRow& b) {
    if (a.conditional != b.conditional) return a.conditional > b.conditional;
    return a.basis < b.basis;
  });
  return rows;
}

std::vector<DistributionRow> exact_distribution(const Instance& inst, const PipelineConfig& cfg) {
  PipelineConfig exact_cfg = cfg;
  exact_cfg.mode = RunMode::kExact;
  const PipelineResult result = run_pipeline(inst, exact_cfg);
  return build_distribution(result, inst, exact_cfg);
}

namespace {

// Rank data of the best-placed cost-optimal encoding in the sorted order used
// by build_distribution.
struct OptimumPlacement {
  std::uint64_t basis = 0;
  double conditional = 0.0;
  std::uint64_t rank = 0;
};

OptimumPlacement locate_optimum(const PipelineResult& result, const Instance& inst,
                                const CostSpec& spec) {
  const BruteForceResult oracle = brute_force_optimum(inst, spec);
  OptimumPlacement best;
  bool first = true;
  for (const Schedule& s : oracle.optima) {
    const std::uint64_t basis = encode_schedule(s).value;
    const double cond = std::norm(result.state.amplitude(basis));
    if (first || cond > best.conditional || (cond == best.conditional && basis < best.basis)) {
      best.basis = basis;
      best.conditional = cond;
      first = false;
    }
  }
  const Eigen::ArrayXd conditional = probabilities(result.state);
  std::uint64_t rank = 1;
  for (Eigen::Index i = 0; i < conditional.size(); ++i) {
    const auto basis = static_cast<std::uint64_t>(i);
    if (conditional[i] > best.conditional ||
        (conditional[i] == best.conditional && basis < best.basis)) {
      ++rank;
    }
  }
  best.rank = rank;
  return best;
}

}  // namespace

std::vector<SweepRow> sweep(const Instance& inst, const PipelineConfig& cfg,
                            SweepParameter parameter, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (double value : grid) {
    PipelineConfig point = cfg;
    point.mode = RunMode::kExact;
    switch (parameter) {
      case SweepParameter::kRounds: {
        const int r = static_cast<int>(value);
        if (r < 0 || static_cast<double>(r) != value) {
          throw std::invalid_argument("sweep: rounds grid must hold nonnegative integers");
        }
        point.rounds = r;
        break;
      }
      case SweepParameter::kBeta:
        point.normalization = NormalizationSpec::Kind::kSigmoid;
        if (!(value > 0)) throw std::invalid_argument("sweep: beta grid must be positive");
        point.beta = value;
        break;
      case SweepParameter::kAlpha:
        point.normalization = NormalizationSpec::Kind::kSigmoid;
        point.alpha_mode = AlphaMode::kFixed;
        point.alpha_fixed = value;
        break;
    }
    const PipelineResult result = run_pipeline(inst, point);
    const OptimumPlacement opt = locate_optimum(result, inst, point.cost_spec());
    rows.push_back(SweepRow{value, result.report.p0, opt.conditional,
                            opt.conditional * result.report.p0, opt.rank,
                            result.report.feasible_mass_after_grover});
  }
  return rows;
}

Instance random_instance(int task_count, Rng& rng) {
  std::vector<Task> tasks(static_cast<std::size_t>(task_count));
  long long total_length = 0;
  for (auto& task : tasks) {
    const long long t = 1 + static_cast<long long>(uniform_index(rng, 9));
    task.length = Rational(t);
    total_length += t;
  }
  for (auto& task : tasks) {
    task.deadline = Rational(static_cast<long long>(
        uniform_index(rng, static_cast<std::uint64_t>(total_length) + 1)));
  }
  for (auto& task : tasks) {
    task.weight = Rational(1 + static_cast<long long>(uniform_index(rng, 9)));
  }
  return Instance(std::move(tasks), task_count);
}

Instance random_instance_unique_optimum(int task_count, const CostSpec& spec, Rng& rng) {
  while (true) {
    Instance inst = random_instance(task_count, rng);
    if (brute_force_optimum(inst, spec).optima.size() == 1) return inst;
  }
}

ValidationSummary validate(const ValidationConfig& cfg) {
  if (cfg.instance_count < 1) throw std::invalid_argument("validate: need at least one instance");
  ValidationSummary summary;
  summary.cases.reserve(static_cast<std::size_t>(cfg.instance_count));

  double p0_sum = 0.0;
  double opt_prob_sum = 0.0;
  const CostSpec spec = cfg.pipeline.cost_spec();

  for (int i = 0; i < cfg.instance_count; ++i) {
    ValidationCase vcase;
    vcase.index = i;
    vcase.sub_seed = derive_subseed(cfg.seed, static_cast<std::uint64_t>(i));

    Rng instance_rng = seeded_rng(vcase.sub_seed);
    const Instance inst =
        cfg.require_unique_optimum
            ? random_instance_unique_optimum(cfg.task_count, spec, instance_rng)
            : random_instance(cfg.task_count, instance_rng);

    PipelineConfig run_cfg = cfg.pipeline;
    run_cfg.mode = RunMode::kExact;
    run_cfg.seed = derive_subseed(cfg.seed, 0x10000u + static_cast<std::uint64_t>(i));

    const PipelineResult result = run_pipeline(inst, run_cfg);
    const OptimumPlacement opt = locate_optimum(result, inst, spec);

    vcase.agreed = result.report.oracle_optimal;
    vcase.p0 = result.report.p0;
    vcase.optimum_probability = opt.conditional;
    vcase.optimal_cost = result.report.optimal_cost;
    vcase.argmax_basis = result.report.argmax_basis;

    summary.agreement_count += vcase.agreed ? 1 : 0;
    p0_sum += vcase.p0;
    opt_prob_sum += vcase.optimum_probability;
    summary.cases.push_back(std::move(vcase));
  }

  summary.mean_p0 = p0_sum / static_cast<double>(cfg.instance_count);
  summary.mean_optimum_probability = opt_prob_sum / static_cast<double>(cfg.instance_count);
  return summary;
}

}  // namespace qtwt

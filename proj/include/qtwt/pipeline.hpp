#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qtwt/grover.hpp"
#include "qtwt/phase_select.hpp"
#include "qtwt/scheduling.hpp"
#include "qtwt/state_vector.hpp"

namespace qtwt {

/// Everything that controls one end-to-end run: amplification rounds,
/// normalization choice and parameters, cost variant, execution mode, seed.
struct PipelineConfig {
  std::optional<int> rounds;  // nullopt = auto round formula
  NormalizationSpec::Kind normalization = NormalizationSpec::Kind::kMinMax;
  BoundsMode bounds_mode = BoundsMode::kExact;
  AlphaMode alpha_mode = AlphaMode::kMidpointRandom;
  double alpha_fixed = 0.0;
  std::optional<double> beta;  // nullopt = autoscale from a sampled cost spread
  bool clamp_lateness = false;
  RunMode mode = RunMode::kExact;
  std::int64_t shots = 0;  // sampled mode only
  std::uint64_t seed = 1;
  int retry_budget = 1000;
  int phase_rounds = 1;  // experimental: extra cost-phase rounds sharpen selection
  int max_qubits = kDefaultMaxQubits;

  CostSpec cost_spec() const { return CostSpec{clamp_lateness, MinMaxBounds{0, 1}}; }
};

/// One basis state of the final (control-0, renormalized) register.
struct DistributionRow {
  std::uint64_t basis = 0;
  std::vector<int> slots;  // decoded assignment, 0-based
  bool feasible = false;
  Rational cost;
  Amplitude amplitude;         // renormalized control-0 amplitude
  double joint = 0.0;          // P(outcome and control = 0)
  double conditional = 0.0;    // P(outcome | control = 0)
};

struct RunReport {
  int task_count = 0;
  int qubits = 0;
  std::uint64_t argmax_basis = 0;
  std::optional<Schedule> argmax_schedule;  // empty when the argmax is infeasible
  Rational argmax_cost;
  double argmax_conditional = 0.0;
  double argmax_joint = 0.0;
  double p0 = 0.0;
  int rounds_used = 0;
  bool rounds_clamped = false;
  std::int64_t retries_used = 0;
  bool oracle_optimal = false;
  Rational optimal_cost;
  double feasible_mass_after_grover = 0.0;
  NormalizationSpec normalization_used;  // resolved bounds / alpha / beta
  std::vector<std::string> warnings;
  std::map<std::uint64_t, std::uint64_t> counts;  // sampled mode measurement tallies
};

struct PipelineResult {
  RunReport report;
  StateVector state;  // final post-selected register, exact in both modes
};

/// Runs amplification, the cost phase, and post-selection on a padded
/// (power-of-two) instance. Throws std::invalid_argument for unpadded
/// instances, CapacityError beyond the qubit cap, and the post-selection /
/// retry errors of the phase stage.
PipelineResult run_pipeline(const Instance& inst, const PipelineConfig& cfg);

inline constexpr int kMaxMaterializedQubits = 20;

/// Rows for every basis state, sorted by conditional probability descending,
/// then basis value ascending. Materialization is capped at 2^20 rows; larger
/// registers must stream (see instance_io).
std::vector<DistributionRow> build_distribution(const PipelineResult& result,
                                                const Instance& inst,
                                                const PipelineConfig& cfg);

/// Convenience: run_pipeline in exact mode, then build_distribution.
std::vector<DistributionRow> exact_distribution(const Instance& inst, const PipelineConfig& cfg);

// ---------------------------------------------------------------------------
// Experiment harness
// ---------------------------------------------------------------------------

enum class SweepParameter { kRounds, kBeta, kAlpha };

struct SweepRow {
  double parameter = 0.0;
  double p0 = 0.0;
  double optimum_conditional = 0.0;
  double optimum_joint = 0.0;
  std::uint64_t optimum_rank = 0;  // 1-based position in the sorted distribution
  double feasible_mass_after_grover = 0.0;
};

/// Exact pipeline per grid value, tracking how visible the true optimum is.
/// Beta and alpha sweeps force sigmoid normalization (alpha in fixed mode).
std::vector<SweepRow> sweep(const Instance& inst, const PipelineConfig& cfg,
                            SweepParameter parameter, const std::vector<double>& grid);

/// Random integer instance with lengths and weights in [1, 9] and deadlines in
/// [0, sum of lengths]. Drawn lengths-first, then deadlines, then weights.
Instance random_instance(int task_count, Rng& rng);

/// Same, redrawing until the brute-force optimum is a single schedule.
Instance random_instance_unique_optimum(int task_count, const CostSpec& spec, Rng& rng);

/// Deterministic per-instance seed derivation for validation and sweeps.
inline std::uint64_t derive_subseed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct ValidationConfig {
  int task_count = 4;
  int instance_count = 50;
  std::uint64_t seed = 1;
  bool require_unique_optimum = false;
  PipelineConfig pipeline;  // mode is forced to exact per instance
};

struct ValidationCase {
  int index = 0;
  std::uint64_t sub_seed = 0;
  bool agreed = false;
  double p0 = 0.0;
  double optimum_probability = 0.0;  // conditional mass on the best optimal encoding
  Rational optimal_cost;
  std::uint64_t argmax_basis = 0;
};

struct ValidationSummary {
  std::vector<ValidationCase> cases;
  int agreement_count = 0;
  double mean_p0 = 0.0;
  double mean_optimum_probability = 0.0;

  double agreement_rate() const {
    return cases.empty() ? 0.0 : static_cast<double>(agreement_count) /
                                     static_cast<double>(cases.size());
  }
};

/// Draws seeded instances, runs the exact pipeline on each, and scores the
/// conditional argmax against the brute-force oracle (any cost-optimal
/// schedule counts as agreement).
ValidationSummary validate(const ValidationConfig& cfg);

std::uint64_t factorial(int n);

}  // namespace qtwt

#include "qtwt/phase_select.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qtwt/errors.hpp"

namespace qtwt {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kSaturationMargin = 1e-12;

int variable_qubits_of(const Eigen::ArrayXd& table) {
  const auto size = static_cast<std::uint64_t>(table.size());
  if (size < 2 || !std::has_single_bit(size)) {
    throw std::invalid_argument("cost table length must be a power of two >= 2");
  }
  return std::countr_zero(size);
}

void check_joint_capacity(int variable_qubits, int control_qubits) {
  if (control_qubits < 1 || control_qubits > 8) {
    throw std::invalid_argument("control register width must lie in [1, 8]");
  }
  if (variable_qubits + control_qubits > kMaxJointQubits) {
    throw CapacityError("joint register capped at " + std::to_string(kMaxJointQubits) +
                        " qubits");
  }
}

}  // namespace

NormalizationSpec NormalizationSpec::minmax(double lower, double upper) {
  NormalizationSpec spec;
  spec.kind = Kind::kMinMax;
  spec.lower = lower;
  spec.upper = upper;
  return spec;
}

NormalizationSpec NormalizationSpec::minmax_from(const Eigen::ArrayXd& costs) {
  return minmax(costs.minCoeff(), costs.maxCoeff());
}

NormalizationSpec NormalizationSpec::sigmoid(double alpha, double beta) {
  NormalizationSpec spec;
  spec.kind = Kind::kSigmoid;
  spec.alpha = alpha;
  spec.beta = beta;
  return spec;
}

Eigen::ArrayXd normalize_cost_table(const Eigen::ArrayXd& costs, const NormalizationSpec& spec) {
  if (spec.kind == NormalizationSpec::Kind::kMinMax) {
    if (spec.lower == spec.upper) {
      throw DegenerateBoundsError("normalize_cost_table: zero-width min-max range");
    }
    if (spec.lower > spec.upper) {
      throw std::invalid_argument("normalize_cost_table: lower bound exceeds upper bound");
    }
    if (costs.minCoeff() < spec.lower || costs.maxCoeff() > spec.upper) {
      throw std::invalid_argument("normalize_cost_table: cost outside min-max bounds");
    }
    return (costs - spec.lower) / (spec.upper - spec.lower);
  }
  if (!(spec.beta > 0)) throw std::invalid_argument("normalize_cost_table: beta must be > 0");
  return 1.0 / (1.0 + (-spec.beta * (costs - spec.alpha)).exp());
}

Eigen::ArrayXd phase_angles(const Eigen::ArrayXd& normalized_costs, bool clamp_saturated) {
  if ((normalized_costs < 0.0).any() || (normalized_costs > 1.0).any()) {
    throw std::invalid_argument("phase_angles: normalized costs must lie in [0, 1]");
  }
  Eigen::ArrayXd delta = kHalfPi * normalized_costs;
  if (clamp_saturated) {
    delta = delta.min(kHalfPi - kSaturationMargin);
  }
  return delta;
}

PhaseRoundResult run_phase_round(const StateVector& state,
                                 const Eigen::ArrayXd& normalized_costs, bool clamp_saturated) {
  if (normalized_costs.size() != state.dimension()) {
    throw std::invalid_argument("run_phase_round: need one cost per basis state");
  }
  const ControlSplit split =
      split_by_control(state, phase_angles(normalized_costs, clamp_saturated));
  return PhaseRoundResult{postselect_branch0(split), split.p0};
}

JointState simulate_joint_registers(const Eigen::ArrayXd& normalized_costs, int control_qubits) {
  const int n = variable_qubits_of(normalized_costs);
  check_joint_capacity(n, control_qubits);
  const Eigen::ArrayXd delta = phase_angles(normalized_costs);

  const auto rows = static_cast<Eigen::Index>(normalized_costs.size());
  const auto cols = static_cast<Eigen::Index>(std::uint64_t{1} << control_qubits);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

  // Variable register through H-gates, control register still all |0>.
  JointState joint{Eigen::MatrixXcd::Zero(rows, cols), n, control_qubits};
  joint.amplitudes.col(0).setConstant(Amplitude(1.0 / std::sqrt(static_cast<double>(rows)), 0));

  const Eigen::ArrayXcd phase_plus =
      delta.cos().cast<Amplitude>() + Amplitude(0, 1) * delta.sin().cast<Amplitude>();
  const Eigen::ArrayXcd phase_minus = phase_plus.conjugate();

  for (int k = 0; k < control_qubits; ++k) {
    const auto bit = std::uint64_t{1} << k;
    // H on control qubit k.
    for (std::uint64_t y = 0; y < static_cast<std::uint64_t>(cols); ++y) {
      if (y & bit) continue;
      const auto y0 = static_cast<Eigen::Index>(y);
      const auto y1 = static_cast<Eigen::Index>(y | bit);
      const Eigen::VectorXcd low = joint.amplitudes.col(y0);
      joint.amplitudes.col(y0) = inv_sqrt2 * (low + joint.amplitudes.col(y1));
      joint.amplitudes.col(y1) = inv_sqrt2 * (low - joint.amplitudes.col(y1));
    }
    // Controlled phase: +delta where control qubit k reads 0, -delta where 1.
    for (std::uint64_t y = 0; y < static_cast<std::uint64_t>(cols); ++y) {
      const auto col = static_cast<Eigen::Index>(y);
      joint.amplitudes.col(col).array() *= (y & bit) ? phase_minus : phase_plus;
    }
    // H on control qubit k again.
    for (std::uint64_t y = 0; y < static_cast<std::uint64_t>(cols); ++y) {
      if (y & bit) continue;
      const auto y0 = static_cast<Eigen::Index>(y);
      const auto y1 = static_cast<Eigen::Index>(y | bit);
      const Eigen::VectorXcd low = joint.amplitudes.col(y0);
      joint.amplitudes.col(y0) = inv_sqrt2 * (low + joint.amplitudes.col(y1));
      joint.amplitudes.col(y1) = inv_sqrt2 * (low - joint.amplitudes.col(y1));
    }
  }

  if (std::abs(joint.amplitudes.squaredNorm() - 1.0) > kNormTolerance) {
    throw std::logic_error("simulate_joint_registers: joint norm drifted");
  }
  return joint;
}

JointState joint_state_closed_form(const Eigen::ArrayXd& normalized_costs, int control_qubits) {
  const int n = variable_qubits_of(normalized_costs);
  check_joint_capacity(n, control_qubits);
  const Eigen::ArrayXd delta = phase_angles(normalized_costs);
  const Eigen::ArrayXd cos_delta = delta.cos();
  const Eigen::ArrayXd sin_delta = delta.sin();

  const auto rows = static_cast<Eigen::Index>(normalized_costs.size());
  const auto cols = static_cast<Eigen::Index>(std::uint64_t{1} << control_qubits);
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
  const Amplitude j_unit(0.0, 1.0);

  JointState joint{Eigen::MatrixXcd(rows, cols), n, control_qubits};
  for (std::uint64_t y = 0; y < static_cast<std::uint64_t>(cols); ++y) {
    const int ones = std::popcount(y);
    Amplitude j_power(1.0, 0.0);
    for (int p = 0; p < ones; ++p) j_power *= j_unit;
    const Eigen::ArrayXd magnitude =
        cos_delta.pow(control_qubits - ones) * sin_delta.pow(ones);
    joint.amplitudes.col(static_cast<Eigen::Index>(y)) =
        (scale * j_power * magnitude.cast<Amplitude>()).matrix();
  }
  return joint;
}

TrugenbergerOutcome run_trugenberger(const Eigen::ArrayXd& costs, const PhaseConfig& config,
                                     const NormalizationSpec& normalization,
                                     SelectBranch branch, Rng& rng) {
  if (config.retry_budget < 1) throw std::invalid_argument("retry budget must be >= 1");
  const Eigen::ArrayXd normalized = normalize_cost_table(costs, normalization);
  const JointState joint = simulate_joint_registers(normalized, config.control_qubits);

  const auto cols = joint.amplitudes.cols();
  const auto target = static_cast<Eigen::Index>(
      branch == SelectBranch::kAllZeros ? 0 : static_cast<std::uint64_t>(cols) - 1);

  const Eigen::ArrayXd target_mass = joint.amplitudes.col(target).array().abs2();
  const double select_probability = target_mass.sum();

  TrugenbergerOutcome outcome;
  outcome.select_probability = select_probability;

  if (config.mode == RunMode::kExact) {
    if (select_probability == 0.0) {
      throw PostSelectionImpossibleError(
          "post-selection impossible: chosen control outcome has zero probability");
    }
    outcome.conditional = target_mass / select_probability;
    return outcome;
  }

  // Sampled mode: re-prepare and re-measure the control register until the
  // selected outcome shows up.
  Eigen::ArrayXd control_marginal(cols);
  for (Eigen::Index y = 0; y < cols; ++y) {
    control_marginal[y] = joint.amplitudes.col(y).squaredNorm();
  }
  const DiscreteSampler control_sampler(control_marginal);
  for (int attempt = 0; attempt < config.retry_budget; ++attempt) {
    if (static_cast<Eigen::Index>(control_sampler.draw(rng)) == target) {
      const DiscreteSampler variable_sampler(target_mass);
      outcome.solution = variable_sampler.draw(rng);
      outcome.retries_used = attempt;
      return outcome;
    }
  }
  throw RetriesExhaustedError("control register never produced the selected outcome in " +
                                  std::to_string(config.retry_budget) + " attempts",
                              select_probability);
}

}  // namespace qtwt

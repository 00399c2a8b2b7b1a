#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "qtwt/state_vector.hpp"

namespace qtwt {

enum class RunMode { kExact, kSampled };

/// Configuration of the cost-phase selection stage.
struct PhaseConfig {
  int control_qubits = 1;  // c; 1 on the standard pipeline path
  int retry_budget = 1000;
  RunMode mode = RunMode::kExact;
};

/// Which control-register outcome keeps the register: all-zeros selects the
/// cosine (cost-suppressed, minimizing) branch, all-ones the sine branch.
enum class SelectBranch { kAllZeros, kAllOnes };

/// How a raw cost table is squashed into [0, 1] before phase application.
struct NormalizationSpec {
  enum class Kind { kMinMax, kSigmoid };

  Kind kind = Kind::kMinMax;
  double lower = 0.0;
  double upper = 1.0;
  double alpha = 0.0;
  double beta = 1.0;

  static NormalizationSpec minmax(double lower, double upper);
  static NormalizationSpec minmax_from(const Eigen::ArrayXd& costs);
  static NormalizationSpec sigmoid(double alpha, double beta);
};

/// Applies the normalization elementwise. Min-max throws DegenerateBoundsError
/// on a zero-width range and std::invalid_argument when a value falls outside.
Eigen::ArrayXd normalize_cost_table(const Eigen::ArrayXd& costs, const NormalizationSpec& spec);

/// Phase angles delta_i = (pi/2) * Fn_i. With clamp_saturated, angles are kept
/// strictly below pi/2 (by 1e-12) so states whose normalization merely
/// saturated in floating point survive post-selection with negligible mass.
Eigen::ArrayXd phase_angles(const Eigen::ArrayXd& normalized_costs, bool clamp_saturated = false);

struct PhaseRoundResult {
  StateVector state;  // control-0 branch, renormalized
  double p0 = 0.0;
};

/// One cost-phase round with a single control qubit: applies the phase table,
/// post-selects control = 0, renormalizes. Throws PostSelectionImpossibleError
/// when the surviving branch has zero mass.
PhaseRoundResult run_phase_round(const StateVector& state,
                                 const Eigen::ArrayXd& normalized_costs,
                                 bool clamp_saturated = false);

/// Joint amplitudes of the variable register (rows, 2^n) and a c-qubit control
/// register (columns, 2^c).
struct JointState {
  Eigen::MatrixXcd amplitudes;
  int variable_qubits = 0;
  int control_qubits = 0;
};

inline constexpr int kMaxJointQubits = 22;

/// Literal gate-level simulation of the c control rounds (H on control k,
/// controlled phase exp(+-j * delta) on the variable register, H again) from a
/// uniform variable register. Capacity: n + c <= kMaxJointQubits.
JointState simulate_joint_registers(const Eigen::ArrayXd& normalized_costs, int control_qubits);

/// Product-form amplitudes (1/sqrt(2^n)) * j^|y| * cos^(c-|y|)(delta) *
/// sin^|y|(delta). Verification oracle for simulate_joint_registers; not used
/// by any simulation path.
JointState joint_state_closed_form(const Eigen::ArrayXd& normalized_costs, int control_qubits);

struct TrugenbergerOutcome {
  double select_probability = 0.0;        // P(control register all-0 / all-1)
  Eigen::ArrayXd conditional;             // exact mode: variable distribution
  std::optional<std::uint64_t> solution;  // sampled mode: measured variable state
  int retries_used = 0;
};

/// The generic cost-phase optimizer over an arbitrary cost table (length 2^n):
/// uniform variable register, c control rounds, post-selection on the chosen
/// control outcome. Exact mode post-selects analytically; sampled mode redraws
/// the control register up to retry_budget times before giving up with
/// RetriesExhaustedError.
TrugenbergerOutcome run_trugenberger(const Eigen::ArrayXd& costs, const PhaseConfig& config,
                                     const NormalizationSpec& normalization,
                                     SelectBranch branch, Rng& rng);

}  // namespace qtwt

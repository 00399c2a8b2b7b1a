#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "qtwt/rng.hpp"

namespace qtwt {

using Amplitude = std::complex<double>;

inline constexpr int kDefaultMaxQubits = 24;
inline constexpr double kNormTolerance = 1e-9;

/// Dense register state: one complex amplitude per computational basis state.
/// Construction and every transform check that the squared norm stays within
/// kNormTolerance of one.
class StateVector {
 public:
  /// Takes ownership of a unit-norm amplitude vector whose length is a power
  /// of two. Throws std::invalid_argument otherwise.
  static StateVector from_amplitudes(Eigen::VectorXcd amplitudes);

  int qubits() const { return qubits_; }
  Eigen::Index dimension() const { return amplitudes_.size(); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  Amplitude amplitude(std::uint64_t basis) const {
    return amplitudes_[static_cast<Eigen::Index>(basis)];
  }

  /// In-place access for transform kernels. Callers must restore the norm
  /// invariant before the next check.
  Eigen::VectorXcd& mutable_amplitudes() { return amplitudes_; }

  /// Throws std::logic_error when the squared norm strays from 1.
  void check_normalized(const char* where) const;

 private:
  StateVector(int qubits, Eigen::VectorXcd amplitudes)
      : amplitudes_(std::move(amplitudes)), qubits_(qubits) {}

  Eigen::VectorXcd amplitudes_;
  int qubits_;
};

/// Equal-superposition state: every amplitude 1/sqrt(2^N). Throws
/// CapacityError when qubits exceeds max_qubits.
StateVector uniform_state(int qubits, int max_qubits = kDefaultMaxQubits);

/// Negates the amplitude of every basis state the predicate marks.
/// The predicate must be total over [0, 2^N).
template <class Pred>
void phase_flip_where(StateVector& state, Pred&& marked) {
  Eigen::VectorXcd& a = state.mutable_amplitudes();
  const auto n = static_cast<std::uint64_t>(a.size());
  for (std::uint64_t i = 0; i < n; ++i) {
    if (marked(i)) a[static_cast<Eigen::Index>(i)] = -a[static_cast<Eigen::Index>(i)];
  }
  state.check_normalized("phase_flip_where");
}

/// Reflects every amplitude about the mean: a -> 2*mean(a) - a. Equivalent to
/// the dense matrix with diagonal 2/2^N - 1 and off-diagonal 2/2^N, applied in
/// O(2^N).
void invert_about_mean(StateVector& state);

/// Joint state with one analytically tracked control qubit: branch0 carries
/// cos(delta_i) * a_i (control measured 0), branch1 carries
/// j * sin(delta_i) * a_i (control measured 1). p0 is the probability of the
/// control-0 outcome. Branches are unnormalized.
struct ControlSplit {
  Eigen::VectorXcd branch0;
  Eigen::VectorXcd branch1;
  double p0 = 0.0;
};

/// Splits a state by the control qubit of one cost-phase round. delta must
/// have one entry per basis state, each in [0, pi/2]. cos(pi/2) is evaluated
/// to exactly zero so a saturated phase annihilates its state exactly.
ControlSplit split_by_control(const StateVector& state, const Eigen::ArrayXd& delta);

/// Renormalized control-0 branch. Throws PostSelectionImpossibleError when
/// p0 == 0.
StateVector postselect_branch0(const ControlSplit& split);

/// Measurement distribution |a_i|^2.
Eigen::ArrayXd probabilities(const StateVector& state);

/// Draws `shots` i.i.d. basis states from the measurement distribution.
/// Returns outcome -> count, keyed in increasing basis order.
std::map<std::uint64_t, std::uint64_t> sample(const StateVector& state, std::int64_t shots,
                                              Rng& rng);

/// Inverse-CDF sampler over a fixed weight table (weights need not be
/// normalized); shared by sample() and the restart loops.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const Eigen::ArrayXd& weights);

  std::uint64_t draw(Rng& rng) const;
  double total() const { return cumulative_.back(); }

 private:
  std::vector<double> cumulative_;
};

}  // namespace qtwt

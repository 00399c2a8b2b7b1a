#include "qtwt/state_vector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtwt/errors.hpp"

namespace qtwt {

StateVector StateVector::from_amplitudes(Eigen::VectorXcd amplitudes) {
  const auto size = static_cast<std::uint64_t>(amplitudes.size());
  if (size == 0 || !std::has_single_bit(size)) {
    throw std::invalid_argument("state vector length must be a power of two");
  }
  StateVector state(std::countr_zero(size), std::move(amplitudes));
  state.check_normalized("from_amplitudes");
  return state;
}

void StateVector::check_normalized(const char* where) const {
  const double err = std::abs(amplitudes_.squaredNorm() - 1.0);
  if (err > kNormTolerance) {
    throw std::logic_error(std::string(where) + ": state norm drifted by " +
                           std::to_string(err));
  }
}

StateVector uniform_state(int qubits, int max_qubits) {
  if (qubits < 1) throw std::invalid_argument("uniform_state: need at least one qubit");
  if (qubits > max_qubits) {
    throw CapacityError("uniform_state: " + std::to_string(qubits) +
                        " qubits exceeds the cap of " + std::to_string(max_qubits));
  }
  const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << qubits);
  const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
  return StateVector::from_amplitudes(Eigen::VectorXcd::Constant(dim, Amplitude(amp, 0.0)));
}

void invert_about_mean(StateVector& state) {
  Eigen::VectorXcd& a = state.mutable_amplitudes();
  const Amplitude mean = a.mean();
  a = (2.0 * mean - a.array()).matrix();
  state.check_normalized("invert_about_mean");
}

ControlSplit split_by_control(const StateVector& state, const Eigen::ArrayXd& delta) {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  if (delta.size() != state.dimension()) {
    throw std::invalid_argument("split_by_control: need one phase angle per basis state");
  }
  if ((delta < -1e-12).any() || (delta > kHalfPi + 1e-12).any()) {
    throw std::invalid_argument("split_by_control: phase angles must lie in [0, pi/2]");
  }

  // cos(delta) as sin(pi/2 - delta): exact 0 at delta == pi/2 and exact 1 at
  // delta == 0, so saturated phases annihilate their states exactly.
  const Eigen::ArrayXd cos_delta = (kHalfPi - delta).sin();
  const Eigen::ArrayXd sin_delta = delta.sin();

  ControlSplit split;
  split.branch0 = (state.amplitudes().array() * cos_delta).matrix();
  split.branch1 = (state.amplitudes().array() * sin_delta * Amplitude(0.0, 1.0)).matrix();
  split.p0 = split.branch0.squaredNorm();

  const double p1 = split.branch1.squaredNorm();
  if (std::abs(split.p0 + p1 - 1.0) > kNormTolerance) {
    throw std::logic_error("split_by_control: branch masses do not sum to one");
  }
  return split;
}

StateVector postselect_branch0(const ControlSplit& split) {
  if (split.p0 == 0.0) {
    throw PostSelectionImpossibleError(
        "post-selection impossible: the control-0 branch has zero probability");
  }
  return StateVector::from_amplitudes(split.branch0 / std::sqrt(split.p0));
}

Eigen::ArrayXd probabilities(const StateVector& state) {
  return state.amplitudes().array().abs2();
}

DiscreteSampler::DiscreteSampler(const Eigen::ArrayXd& weights)
    : cumulative_(static_cast<std::size_t>(weights.size())) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (w < 0.0 || !std::isfinite(w)) {
      throw std::invalid_argument("DiscreteSampler: weights must be finite and nonnegative");
    }
    acc += w;
    cumulative_[static_cast<std::size_t>(i)] = acc;
  }
  if (acc <= 0.0) throw std::invalid_argument("DiscreteSampler: total weight must be positive");
}

std::uint64_t DiscreteSampler::draw(Rng& rng) const {
  const double target = uniform_unit(rng) * total();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) --it;  // guards the u ~ 1 rounding edge
  return static_cast<std::uint64_t>(it - cumulative_.begin());
}

std::map<std::uint64_t, std::uint64_t> sample(const StateVector& state, std::int64_t shots,
                                              Rng& rng) {
  if (shots < 1) throw std::invalid_argument("sample: need at least one shot");
  const DiscreteSampler sampler(probabilities(state));
  std::map<std::uint64_t, std::uint64_t> counts;
  for (std::int64_t s = 0; s < shots; ++s) {
    ++counts[sampler.draw(rng)];
  }
  return counts;
}

}  // namespace qtwt

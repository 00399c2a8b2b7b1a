#include "qtwt/grover.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qtwt {

namespace {

void check_marked_count(int qubits, std::uint64_t marked_count) {
  if (qubits < 1 || qubits > 63) throw std::invalid_argument("qubit count out of range");
  const std::uint64_t states = std::uint64_t{1} << qubits;
  if (marked_count == 0 || marked_count > states) {
    throw std::invalid_argument("marked-state count must lie in [1, 2^N]");
  }
}

}  // namespace

int grover_rounds_auto(int qubits, std::uint64_t marked_count) {
  check_marked_count(qubits, marked_count);
  const double states = std::exp2(qubits);
  return static_cast<int>(std::floor(std::numbers::pi / 4.0 *
                                     std::sqrt(states / static_cast<double>(marked_count))));
}

GroverPlan plan_grover(int qubits, std::uint64_t marked_count, std::optional<int> fixed_rounds) {
  check_marked_count(qubits, marked_count);
  GroverPlan plan;
  plan.qubits = qubits;
  plan.marked_count = marked_count;
  if (fixed_rounds.has_value()) {
    if (*fixed_rounds < 0) throw std::invalid_argument("round count must be >= 0");
    plan.rounds = *fixed_rounds;
    return plan;
  }
  plan.rounds = grover_rounds_auto(qubits, marked_count);
  // Zero rounds would skip amplification entirely while unmarked states exist.
  if (plan.rounds == 0 && marked_count < (std::uint64_t{1} << qubits)) {
    plan.rounds = 1;
    plan.clamped_to_one = true;
  }
  return plan;
}

RoundOneAmplitudes closed_form_round1(int qubits, std::uint64_t marked_count) {
  check_marked_count(qubits, marked_count);
  const double base = 1.0 / std::sqrt(std::exp2(qubits));
  const double shift = 2.0 * static_cast<double>(marked_count) /
                       std::sqrt(std::exp2(3 * qubits - 2));
  return RoundOneAmplitudes{base - shift, 3.0 * base - shift};
}

double closed_form_success(int qubits, std::uint64_t marked_count, int rounds) {
  check_marked_count(qubits, marked_count);
  if (rounds < 0) throw std::invalid_argument("round count must be >= 0");
  const double theta =
      std::asin(std::sqrt(static_cast<double>(marked_count) / std::exp2(qubits)));
  const double s = std::sin(static_cast<double>(2 * rounds + 1) * theta);
  return s * s;
}

}  // namespace qtwt

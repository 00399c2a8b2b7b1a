#pragma once

#include <cstdint>
#include <optional>

#include "qtwt/state_vector.hpp"

namespace qtwt {

/// Round plan for amplitude amplification over K marked states of an N-qubit
/// register.
struct GroverPlan {
  int qubits = 0;
  std::uint64_t marked_count = 0;
  int rounds = 0;
  bool clamped_to_one = false;  // auto formula yielded 0 and was raised to 1
};

/// floor((pi/4) * sqrt(2^N / K)). Requires 1 <= K <= 2^N.
int grover_rounds_auto(int qubits, std::uint64_t marked_count);

/// Resolves the round count: the fixed value when given, otherwise the auto
/// formula, raised to 1 when it returns 0 while unmarked states remain.
GroverPlan plan_grover(int qubits, std::uint64_t marked_count,
                       std::optional<int> fixed_rounds = std::nullopt);

/// `rounds` iterations of (phase flip on marked states; inversion about the
/// mean). Starting from the uniform state this leaves exactly two amplitude
/// values, one per class, both real.
template <class Pred>
void run_grover(StateVector& state, Pred&& marked, int rounds) {
  for (int r = 0; r < rounds; ++r) {
    phase_flip_where(state, marked);
    invert_about_mean(state);
  }
}

/// The two amplitude values after one round from uniform, in closed form:
/// unmarked 1/sqrt(2^N) - 2K/sqrt(2^(3N-2)), marked that plus 2/sqrt(2^N).
struct RoundOneAmplitudes {
  double unmarked = 0.0;
  double marked = 0.0;
};

RoundOneAmplitudes closed_form_round1(int qubits, std::uint64_t marked_count);

/// Marked-class probability mass after `rounds` rounds from uniform:
/// sin^2((2r+1) * theta) with sin(theta) = sqrt(K / 2^N). Used as the
/// independent oracle for run_grover; never called by the simulation path.
double closed_form_success(int qubits, std::uint64_t marked_count, int rounds);

}  // namespace qtwt

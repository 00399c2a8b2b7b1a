#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "qtwt/rational.hpp"
#include "qtwt/rng.hpp"

namespace qtwt {

/// One job: processing time, due time, tardiness weight. Dummy tasks are
/// zero-length zero-weight padding used to round the task count up to a
/// power of two without changing any schedule cost.
struct Task {
  Rational length;
  Rational deadline;
  Rational weight;
  bool is_dummy = false;
};

/// A task set for a single machine. The first original_count() tasks are the
/// real problem; anything after them is dummy padding.
class Instance {
 public:
  Instance(std::vector<Task> tasks, int original_count);

  int size() const { return static_cast<int>(tasks_.size()); }
  int original_count() const { return original_count_; }
  const Task& task(int i) const { return tasks_[static_cast<std::size_t>(i)]; }
  const std::vector<Task>& tasks() const { return tasks_; }

  /// True when size() is a power of two, i.e. the instance can be mapped onto
  /// a qubit register directly.
  bool has_power_of_two_size() const {
    return std::has_single_bit(static_cast<unsigned>(size()));
  }

 private:
  std::vector<Task> tasks_;
  int original_count_;
};

/// A permutation of task indices: slots[m] is the task run m-th (0-based
/// internally; all user-facing I/O is 1-based).
struct Schedule {
  std::vector<int> slots;

  friend bool operator==(const Schedule& a, const Schedule& b) { return a.slots == b.slots; }
};

bool is_permutation(const Schedule& s);

/// Min-max normalization: strict bounds on the cost over all basis states.
struct MinMaxBounds {
  Rational lower;
  Rational upper;
};

/// Logistic normalization 1 / (1 + exp(-beta * (F - alpha))).
struct SigmoidParams {
  double alpha = 0.0;
  double beta = 1.0;
};

/// Cost variant and normalization choice.
///  - clamp = false: signed lateness C - d (the literal objective),
///  - clamp = true:  classical tardiness max(0, C - d).
struct CostSpec {
  bool clamp = false;
  std::variant<MinMaxBounds, SigmoidParams> normalization = MinMaxBounds{0, 1};
};

// ---------------------------------------------------------------------------
// Compact basis encoding: M slot fields of log2(M) bits each, slot 0 in the
// least significant field. 2^(M log2 M) = M^M basis states, M! of them
// permutations.
// ---------------------------------------------------------------------------

/// Bits per slot field. Requires a power-of-two task count.
int slot_bits(int task_count);

/// Register width N = M * log2(M).
int qubit_count(int task_count);

inline std::uint64_t basis_state_count(int qubits) { return std::uint64_t{1} << qubits; }

/// A computational basis state of the scheduling register.
struct BasisIndex {
  std::uint64_t value = 0;
  int task_count = 0;
};

/// Task index occupying slot m of basis value v. Hot path; bits = slot_bits(M).
inline int decoded_slot(std::uint64_t value, int m, int bits) {
  return static_cast<int>((value >> (m * bits)) & ((std::uint64_t{1} << bits) - 1));
}

std::vector<int> decode_basis(const BasisIndex& b);

/// Inverse of decode_basis on permutations. Throws std::invalid_argument when
/// the schedule is not a permutation or its length is not a power of two.
BasisIndex encode_schedule(const Schedule& s);

/// The M^2-bit one-hot representation: M blocks of M bits, block m carrying a
/// single 1 at the position of the task scheduled m-th.
std::vector<std::uint8_t> to_onehot_vector(const Schedule& s);

/// True iff the decoded slots form a permutation. Defined for every basis
/// value; exactly M! of the 2^N values qualify.
inline bool is_feasible(std::uint64_t value, int task_count, int bits) {
  std::uint32_t seen = 0;
  for (int m = 0; m < task_count; ++m) {
    seen |= std::uint32_t{1} << decoded_slot(value, m, bits);
  }
  return seen == (std::uint32_t{1} << task_count) - 1;
}

bool is_feasible(const BasisIndex& b);

// ---------------------------------------------------------------------------
// Costs
// ---------------------------------------------------------------------------

/// C_m = sum of the lengths of the first m scheduled tasks.
std::vector<Rational> completion_times(const Schedule& s, const Instance& inst);

/// Sum over slots of w_task * g(C_m - d_task), with g either the identity
/// (clamp = false) or max(0, .). Weight and deadline follow the task assigned
/// to the slot.
Rational twt_cost(const Schedule& s, const Instance& inst, const CostSpec& spec);

/// Slot-wise cost of an arbitrary basis state. Repeated task assignments are
/// allowed; on permutations this agrees exactly with twt_cost of the decoding.
Rational cost_of_basis(std::uint64_t value, const Instance& inst, const CostSpec& spec);

/// Rounds the task count up to the next power of two (at least 2) by appending
/// dummy tasks with zero length, zero weight, zero deadline. Dummies contribute
/// exactly zero cost, so any padded schedule costs the same as its restriction
/// to real tasks.
Instance pad_instance(const Instance& inst);

struct BruteForceResult {
  std::vector<Schedule> optima;  // every minimizer, lexicographically ordered
  Rational cost;
};

inline constexpr int kDefaultEnumerationLimit = 8;

/// Exhaustive ground truth over all M! schedules. Throws CapacityError above
/// the enumeration limit.
BruteForceResult brute_force_optimum(const Instance& inst, const CostSpec& spec,
                                     int enumeration_limit = kDefaultEnumerationLimit);

// ---------------------------------------------------------------------------
// Normalization to [0, 1]
// ---------------------------------------------------------------------------

/// (F - lower) / (upper - lower). Throws DegenerateBoundsError when
/// lower == upper, std::invalid_argument when F lies outside the bounds.
double normalize_minmax(const Rational& f, const MinMaxBounds& bounds);

/// 1 / (1 + exp(-beta * (f - alpha))), beta > 0. Strictly increasing in f.
double normalize_sigmoid(double f, const SigmoidParams& params);
double normalize_sigmoid(const Rational& f, const SigmoidParams& params);

enum class AlphaMode {
  kMidpointRandom,      // midpoint of the costs of two distinct random schedules
  kMidpointBestSecond,  // midpoint of the two best distinct costs (oracle-assisted)
  kFixed,
};

/// Picks the sigmoid center. kMidpointRandom draws from rng; kFixed returns
/// fixed_value. Throws std::invalid_argument for single-task instances in the
/// midpoint modes (no two distinct schedules exist).
double choose_alpha(const Instance& inst, const CostSpec& spec, AlphaMode mode,
                    double fixed_value, Rng& rng);

/// Costs of two distinct random schedules; the raw material for the midpoint
/// alpha rule and for autoscaling beta.
std::pair<Rational, Rational> sample_two_costs(const Instance& inst, const CostSpec& spec,
                                               Rng& rng);

/// The optimal cost and the second-smallest distinct schedule cost (both equal
/// when every schedule costs the same). Exhaustive; same capacity rules as
/// brute_force_optimum.
std::pair<Rational, Rational> best_two_costs(const Instance& inst, const CostSpec& spec);

enum class BoundsMode {
  kExact,         // enumerate all basis states (requires 2^N <= 2^20)
  kConservative,  // closed-form envelope valid for nonnegative task data
};

inline constexpr int kExactBoundsMaxQubits = 20;

/// Bounds on cost_of_basis over every basis state of a power-of-two instance.
MinMaxBounds cost_bounds(const Instance& inst, const CostSpec& spec, BoundsMode mode);

}  // namespace qtwt

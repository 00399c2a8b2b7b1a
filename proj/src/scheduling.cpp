#include "qtwt/scheduling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qtwt/errors.hpp"

namespace qtwt {

namespace {

Rational slot_term(const Task& task, const Rational& completion, bool clamp) {
  Rational lateness = completion - task.deadline;
  if (clamp && lateness.is_negative()) return Rational(0);
  return task.weight * lateness;
}

}  // namespace

Instance::Instance(std::vector<Task> tasks, int original_count)
    : tasks_(std::move(tasks)), original_count_(original_count) {
  if (tasks_.empty()) throw std::invalid_argument("instance: needs at least one task");
  if (original_count_ < 1 || original_count_ > size()) {
    throw std::invalid_argument("instance: original_count out of range");
  }
  for (int i = 0; i < size(); ++i) {
    const Task& t = tasks_[static_cast<std::size_t>(i)];
    if (t.length.is_negative() || t.deadline.is_negative() || t.weight.is_negative()) {
      throw std::invalid_argument("instance: task values must be nonnegative");
    }
    if (t.is_dummy && (!t.length.is_zero() || !t.weight.is_zero())) {
      throw std::invalid_argument("instance: dummy tasks must have zero length and weight");
    }
    if (i >= original_count_ && !t.is_dummy) {
      throw std::invalid_argument("instance: padding region contains a non-dummy task");
    }
  }
}

bool is_permutation(const Schedule& s) {
  const int m = static_cast<int>(s.slots.size());
  std::vector<bool> seen(static_cast<std::size_t>(m), false);
  for (int v : s.slots) {
    if (v < 0 || v >= m || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

int slot_bits(int task_count) {
  if (task_count < 2 || !std::has_single_bit(static_cast<unsigned>(task_count))) {
    throw std::invalid_argument("task count must be a power of two >= 2");
  }
  return std::countr_zero(static_cast<unsigned>(task_count));
}

int qubit_count(int task_count) { return task_count * slot_bits(task_count); }

std::vector<int> decode_basis(const BasisIndex& b) {
  const int bits = slot_bits(b.task_count);
  std::vector<int> slots(static_cast<std::size_t>(b.task_count));
  for (int m = 0; m < b.task_count; ++m) {
    slots[static_cast<std::size_t>(m)] = decoded_slot(b.value, m, bits);
  }
  return slots;
}

BasisIndex encode_schedule(const Schedule& s) {
  if (!is_permutation(s)) {
    throw std::invalid_argument("encode_schedule: schedule is not a permutation");
  }
  const int m = static_cast<int>(s.slots.size());
  const int bits = slot_bits(m);
  std::uint64_t value = 0;
  for (int i = 0; i < m; ++i) {
    value |= static_cast<std::uint64_t>(s.slots[static_cast<std::size_t>(i)]) << (i * bits);
  }
  return BasisIndex{value, m};
}

std::vector<std::uint8_t> to_onehot_vector(const Schedule& s) {
  if (!is_permutation(s)) {
    throw std::invalid_argument("to_onehot_vector: schedule is not a permutation");
  }
  const auto m = s.slots.size();
  std::vector<std::uint8_t> bits(m * m, 0);
  for (std::size_t slot = 0; slot < m; ++slot) {
    bits[slot * m + static_cast<std::size_t>(s.slots[slot])] = 1;
  }
  return bits;
}

bool is_feasible(const BasisIndex& b) {
  return is_feasible(b.value, b.task_count, slot_bits(b.task_count));
}

std::vector<Rational> completion_times(const Schedule& s, const Instance& inst) {
  if (static_cast<int>(s.slots.size()) != inst.size()) {
    throw std::invalid_argument("completion_times: schedule/instance size mismatch");
  }
  std::vector<Rational> times(s.slots.size());
  Rational acc(0);
  for (std::size_t m = 0; m < s.slots.size(); ++m) {
    acc += inst.task(s.slots[m]).length;
    times[m] = acc;
  }
  return times;
}

Rational twt_cost(const Schedule& s, const Instance& inst, const CostSpec& spec) {
  if (static_cast<int>(s.slots.size()) != inst.size()) {
    throw std::invalid_argument("twt_cost: schedule/instance size mismatch");
  }
  Rational completion(0);
  Rational total(0);
  for (int task_index : s.slots) {
    const Task& task = inst.task(task_index);
    completion += task.length;
    total += slot_term(task, completion, spec.clamp);
  }
  return total;
}

Rational cost_of_basis(std::uint64_t value, const Instance& inst, const CostSpec& spec) {
  const int m = inst.size();
  const int bits = slot_bits(m);
  Rational completion(0);
  Rational total(0);
  for (int slot = 0; slot < m; ++slot) {
    const Task& task = inst.task(decoded_slot(value, slot, bits));
    completion += task.length;
    total += slot_term(task, completion, spec.clamp);
  }
  return total;
}

Instance pad_instance(const Instance& inst) {
  const auto original = static_cast<unsigned>(inst.size());
  // A register needs at least one qubit per slot, hence the floor of 2.
  const unsigned padded = std::max(2u, std::bit_ceil(original));
  std::vector<Task> tasks = inst.tasks();
  for (unsigned i = original; i < padded; ++i) {
    tasks.push_back(Task{Rational(0), Rational(0), Rational(0), true});
  }
  return Instance(std::move(tasks), inst.original_count());
}

BruteForceResult brute_force_optimum(const Instance& inst, const CostSpec& spec,
                                     int enumeration_limit) {
  if (inst.size() > enumeration_limit) {
    throw CapacityError("brute_force_optimum: instance exceeds enumeration limit of " +
                        std::to_string(enumeration_limit) + " tasks");
  }
  std::vector<int> perm(static_cast<std::size_t>(inst.size()));
  for (int i = 0; i < inst.size(); ++i) perm[static_cast<std::size_t>(i)] = i;

  BruteForceResult result;
  bool first = true;
  do {
    Schedule s{perm};
    Rational cost = twt_cost(s, inst, spec);
    if (first || cost < result.cost) {
      result.cost = cost;
      result.optima.clear();
      result.optima.push_back(std::move(s));
      first = false;
    } else if (cost == result.cost) {
      result.optima.push_back(std::move(s));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return result;
}

double normalize_minmax(const Rational& f, const MinMaxBounds& bounds) {
  if (bounds.lower == bounds.upper) {
    throw DegenerateBoundsError("normalize_minmax: lower bound equals upper bound");
  }
  if (bounds.lower > bounds.upper) {
    throw std::invalid_argument("normalize_minmax: lower bound exceeds upper bound");
  }
  if (f < bounds.lower || f > bounds.upper) {
    throw std::invalid_argument("normalize_minmax: value outside bounds");
  }
  return ((f - bounds.lower) / (bounds.upper - bounds.lower)).to_double();
}

double normalize_sigmoid(double f, const SigmoidParams& params) {
  if (!(params.beta > 0)) throw std::invalid_argument("normalize_sigmoid: beta must be > 0");
  if (!std::isfinite(params.alpha)) {
    throw std::invalid_argument("normalize_sigmoid: alpha must be finite");
  }
  return 1.0 / (1.0 + std::exp(-params.beta * (f - params.alpha)));
}

double normalize_sigmoid(const Rational& f, const SigmoidParams& params) {
  return normalize_sigmoid(f.to_double(), params);
}

std::pair<Rational, Rational> sample_two_costs(const Instance& inst, const CostSpec& spec,
                                               Rng& rng) {
  if (inst.size() < 2) {
    throw std::invalid_argument("sample_two_costs: need at least two tasks for distinct schedules");
  }
  Schedule first{random_permutation(rng, inst.size())};
  Schedule second{random_permutation(rng, inst.size())};
  while (second == first) {
    second.slots = random_permutation(rng, inst.size());
  }
  return {twt_cost(first, inst, spec), twt_cost(second, inst, spec)};
}

double choose_alpha(const Instance& inst, const CostSpec& spec, AlphaMode mode,
                    double fixed_value, Rng& rng) {
  switch (mode) {
    case AlphaMode::kFixed:
      return fixed_value;
    case AlphaMode::kMidpointRandom: {
      auto [a, b] = sample_two_costs(inst, spec, rng);
      return ((a + b) / Rational(2)).to_double();
    }
    case AlphaMode::kMidpointBestSecond: {
      auto [best, second] = best_two_costs(inst, spec);
      return ((best + second) / Rational(2)).to_double();
    }
  }
  throw std::logic_error("choose_alpha: unknown mode");
}

std::pair<Rational, Rational> best_two_costs(const Instance& inst, const CostSpec& spec) {
  if (inst.size() < 2) {
    throw std::invalid_argument("best_two_costs: need at least two tasks");
  }
  BruteForceResult best = brute_force_optimum(inst, spec);
  // Second-smallest distinct cost; falls back to the optimum when every
  // schedule costs the same.
  std::optional<Rational> second;
  std::vector<int> perm(static_cast<std::size_t>(inst.size()));
  for (int i = 0; i < inst.size(); ++i) perm[static_cast<std::size_t>(i)] = i;
  do {
    Rational cost = twt_cost(Schedule{perm}, inst, spec);
    if (cost > best.cost && (!second.has_value() || cost < *second)) second = cost;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best.cost, second.value_or(best.cost)};
}

MinMaxBounds cost_bounds(const Instance& inst, const CostSpec& spec, BoundsMode mode) {
  const int m = inst.size();
  if (mode == BoundsMode::kConservative) {
    Rational t_max(0), d_max(0), w_max(0);
    for (const Task& task : inst.tasks()) {
      t_max = std::max(t_max, task.length);
      d_max = std::max(d_max, task.deadline);
      w_max = std::max(w_max, task.weight);
    }
    // 0 <= C_m <= M * t_max for nonnegative data, so every slot term lies in
    // [-w_max * d_max, w_max * M * t_max].
    Rational lower = spec.clamp ? Rational(0) : -(Rational(m) * w_max * d_max);
    Rational upper = Rational(m) * Rational(m) * w_max * t_max;
    return MinMaxBounds{lower, upper};
  }

  const int qubits = qubit_count(m);
  if (qubits > kExactBoundsMaxQubits) {
    throw CapacityError("cost_bounds: exact enumeration capped at 2^" +
                        std::to_string(kExactBoundsMaxQubits) + " basis states");
  }
  const std::uint64_t states = basis_state_count(qubits);
  Rational lower, upper;
  for (std::uint64_t v = 0; v < states; ++v) {
    Rational cost = cost_of_basis(v, inst, spec);
    if (v == 0 || cost < lower) lower = cost;
    if (v == 0 || cost > upper) upper = cost;
  }
  return MinMaxBounds{lower, upper};
}

}  // namespace qtwt

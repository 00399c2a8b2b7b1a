#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qtwt/errors.hpp"
#include "qtwt/state_vector.hpp"
#include "testutil.hpp"

using namespace qtwt;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

StateVector make_state(std::initializer_list<double> reals) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(reals.size()));
  Eigen::Index i = 0;
  for (double r : reals) v[i++] = Amplitude(r, 0.0);
  return StateVector::from_amplitudes(std::move(v));
}

}  // namespace

TEST_SUITE("state_vector") {
  TEST_CASE("uniform state") {
    const StateVector one = uniform_state(1);
    CHECK(one.amplitude(0).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(one.amplitude(1).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

    const StateVector two = uniform_state(2);
    for (std::uint64_t i = 0; i < 4; ++i) {
      CHECK(two.amplitude(i) == Amplitude(0.5, 0.0));
    }
    CHECK(std::abs(two.amplitudes().squaredNorm() - 1.0) <= 1e-15);

    CHECK_THROWS_AS(uniform_state(0), std::invalid_argument);
    CHECK_THROWS_AS(uniform_state(25), CapacityError);
    CHECK_THROWS_AS(uniform_state(5, 4), CapacityError);
  }

  TEST_CASE("construction rejects bad vectors") {
    Eigen::VectorXcd three(3);
    three << 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(StateVector::from_amplitudes(three), std::invalid_argument);

    Eigen::VectorXcd unnormalized = Eigen::VectorXcd::Constant(4, Amplitude(0.7, 0.0));
    CHECK_THROWS_AS(StateVector::from_amplitudes(unnormalized), std::logic_error);
  }

  TEST_CASE("phase flip negates marked amplitudes") {
    StateVector s = uniform_state(2);
    phase_flip_where(s, [](std::uint64_t v) { return v == 1 || v == 2; });
    CHECK(s.amplitude(0) == Amplitude(0.5, 0.0));
    CHECK(s.amplitude(1) == Amplitude(-0.5, 0.0));
    CHECK(s.amplitude(2) == Amplitude(-0.5, 0.0));
    CHECK(s.amplitude(3) == Amplitude(0.5, 0.0));

    StateVector untouched = uniform_state(2);
    phase_flip_where(untouched, [](std::uint64_t) { return false; });
    CHECK(untouched.amplitudes() == uniform_state(2).amplitudes());

    // Involution.
    phase_flip_where(s, [](std::uint64_t v) { return v == 1 || v == 2; });
    CHECK((s.amplitudes() - uniform_state(2).amplitudes()).norm() == 0.0);
  }

  TEST_CASE("inversion about the mean") {
    StateVector basis = make_state({1.0, 0.0, 0.0, 0.0});
    invert_about_mean(basis);
    CHECK(basis.amplitude(0).real() == doctest::Approx(-0.5).epsilon(1e-15));
    for (std::uint64_t i = 1; i < 4; ++i) {
      CHECK(basis.amplitude(i).real() == doctest::Approx(0.5).epsilon(1e-15));
    }

    StateVector uniform = uniform_state(3);
    invert_about_mean(uniform);
    CHECK((uniform.amplitudes() - uniform_state(3).amplitudes()).norm() <= 1e-15);

    StateVector balanced = make_state({0.5, -0.5, -0.5, 0.5});
    invert_about_mean(balanced);
    CHECK(balanced.amplitude(0).real() == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(balanced.amplitude(1).real() == doctest::Approx(0.5).epsilon(1e-15));
  }

  TEST_CASE("inversion matches the dense reference and is an involution") {
    Rng rng = seeded_rng(17);
    for (int qubits = 1; qubits <= 6; ++qubits) {
      const auto dim = static_cast<Eigen::Index>(1) << qubits;
      for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXcd amps = testutil::random_state(dim, rng);
        StateVector s = StateVector::from_amplitudes(amps);
        invert_about_mean(s);
        const Eigen::VectorXcd expected = testutil::dense_diffusion_reference(amps);
        CHECK((s.amplitudes() - expected).cwiseAbs().maxCoeff() <= 1e-12);

        invert_about_mean(s);
        CHECK((s.amplitudes() - amps).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }

  TEST_CASE("norm preservation under random gate sequences") {
    Rng rng = seeded_rng(23);
    for (int trial = 0; trial < 100; ++trial) {
      const int qubits = 1 + static_cast<int>(uniform_index(rng, 10));
      const auto dim = static_cast<Eigen::Index>(1) << qubits;
      StateVector s = StateVector::from_amplitudes(testutil::random_state(dim, rng));
      const std::uint64_t mask = rng();
      phase_flip_where(s, [mask](std::uint64_t v) { return (mask >> (v % 64)) & 1; });
      CHECK(std::abs(s.amplitudes().squaredNorm() - 1.0) <= 1e-12);
      invert_about_mean(s);
      CHECK(std::abs(s.amplitudes().squaredNorm() - 1.0) <= 1e-12);
    }
  }

  TEST_CASE("control split") {
    SUBCASE("zero phases keep the state on branch0") {
      const StateVector s = uniform_state(2);
      const ControlSplit split = split_by_control(s, Eigen::ArrayXd::Zero(4));
      CHECK(split.p0 == 1.0);
      CHECK((split.branch0 - s.amplitudes()).norm() == 0.0);
      CHECK(split.branch1.norm() == 0.0);
    }

    SUBCASE("saturated phases annihilate branch0 exactly") {
      const StateVector s = uniform_state(2);
      const ControlSplit split = split_by_control(s, Eigen::ArrayXd::Constant(4, kHalfPi));
      CHECK(split.p0 == 0.0);
      CHECK_THROWS_AS(postselect_branch0(split), PostSelectionImpossibleError);
    }

    SUBCASE("mixed phases") {
      const StateVector s = make_state({-0.5, 0.5, 0.5, -0.5});
      Eigen::ArrayXd delta(4);
      delta << 0.0, kHalfPi, 0.0, kHalfPi;
      const ControlSplit split = split_by_control(s, delta);
      CHECK(split.branch0[0] == Amplitude(-0.5, 0.0));
      CHECK(split.branch0[1] == Amplitude(0.0, 0.0));
      CHECK(split.branch0[2] == Amplitude(0.5, 0.0));
      CHECK(split.branch0[3] == Amplitude(0.0, 0.0));
      CHECK(split.p0 == doctest::Approx(0.5).epsilon(1e-15));

      const StateVector kept = postselect_branch0(split);
      CHECK(kept.amplitude(0).real() == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
      CHECK(kept.amplitude(2).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    }

    SUBCASE("branch magnitudes decompose pointwise") {
      Rng rng = seeded_rng(31);
      const auto dim = Eigen::Index{64};
      const Eigen::VectorXcd amps = testutil::random_state(dim, rng);
      Eigen::ArrayXd delta(dim);
      for (Eigen::Index i = 0; i < dim; ++i) delta[i] = kHalfPi * uniform_unit(rng);
      const ControlSplit split = split_by_control(StateVector::from_amplitudes(amps), delta);
      for (Eigen::Index i = 0; i < dim; ++i) {
        const double lhs = std::norm(split.branch0[i]) + std::norm(split.branch1[i]);
        CHECK(lhs == doctest::Approx(std::norm(amps[i])).epsilon(1e-12));
      }
      CHECK(split.p0 + split.branch1.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("angle domain is validated") {
      const StateVector s = uniform_state(1);
      Eigen::ArrayXd bad(2);
      bad << -0.5, 0.0;
      CHECK_THROWS_AS(split_by_control(s, bad), std::invalid_argument);
      bad << 0.0, 2.0;
      CHECK_THROWS_AS(split_by_control(s, bad), std::invalid_argument);
      CHECK_THROWS_AS(split_by_control(s, Eigen::ArrayXd::Zero(3)), std::invalid_argument);
    }
  }

  TEST_CASE("probabilities") {
    CHECK((probabilities(uniform_state(2)) - Eigen::ArrayXd::Constant(4, 0.25)).abs().maxCoeff() <=
          1e-15);
    const StateVector point = make_state({0.0, 1.0, 0.0, 0.0});
    CHECK(probabilities(point)[1] == 1.0);
    CHECK(probabilities(point).sum() == 1.0);
  }

  TEST_CASE("sampling tracks the distribution") {
    const StateVector s = uniform_state(2);
    Rng rng = seeded_rng(101);
    const auto counts = sample(s, 100000, rng);
    // Binomial sigma for p = 1/4 over 1e5 draws.
    const double sigma = std::sqrt(100000 * 0.25 * 0.75);
    for (std::uint64_t v = 0; v < 4; ++v) {
      REQUIRE(counts.count(v) == 1);
      CHECK(std::abs(static_cast<double>(counts.at(v)) - 25000.0) <= 3.0 * sigma);
    }

    const StateVector point = make_state({0.0, 0.0, 1.0, 0.0});
    Rng rng2 = seeded_rng(5);
    const auto collapsed = sample(point, 1000, rng2);
    REQUIRE(collapsed.size() == 1);
    CHECK(collapsed.at(2) == 1000);
  }

  TEST_CASE("sampling is deterministic per seed") {
    const StateVector s = uniform_state(3);
    Rng a = seeded_rng(42);
    Rng b = seeded_rng(42);
    CHECK(sample(s, 5000, a) == sample(s, 5000, b));
    CHECK_THROWS_AS(sample(s, 0, a), std::invalid_argument);
  }

  TEST_CASE("sampled frequencies pass a chi-square test") {
    // 64-outcome nonuniform distribution, 1e5 shots, significance 0.001.
    Rng rng = seeded_rng(77);
    const Eigen::VectorXcd amps = testutil::random_state(64, rng);
    const StateVector s = StateVector::from_amplitudes(amps);
    const Eigen::ArrayXd p = probabilities(s);

    const std::int64_t shots = 100000;
    const auto counts = sample(s, shots, rng);
    std::vector<double> expected(64), observed(64, 0.0);
    for (int i = 0; i < 64; ++i) expected[static_cast<std::size_t>(i)] = p[i] * shots;
    for (const auto& [v, c] : counts) observed[v] = static_cast<double>(c);

    const auto gof = testutil::chi_square_goodness_of_fit(expected, observed);
    CHECK(gof.statistic <= testutil::chi_square_critical(gof.dof, 0.001));
  }
}

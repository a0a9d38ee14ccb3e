#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <set>

#include "merw/model.hpp"
#include "merw/rng.hpp"

using namespace merw;

TEST_CASE("critical memory value") {
  CHECK(critical_memory(1) == 0.75);
  CHECK(critical_memory(2) == 0.625);
  CHECK(critical_memory(3) == doctest::Approx(7.0 / 12.0).epsilon(1e-15));
  CHECK_THROWS_AS(critical_memory(0), std::invalid_argument);
}

TEST_CASE("memory parameter to a") {
  CHECK(memory_to_a(1, 1.0) == 1.0);
  for (const int d : {1, 2, 5}) CHECK(memory_to_a(d, 1.0 / (2 * d)) == doctest::Approx(0.0));
  CHECK(memory_to_a(2, 0.625) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(memory_to_a(2, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(memory_to_a(2, -0.1), std::invalid_argument);
}

TEST_CASE("regime classification") {
  CHECK(classify_regime(2, 0.625).kind == RegimeKind::Critical);
  CHECK(classify_regime(3, 0.0).kind == RegimeKind::Diffusive);
  const Regime super = classify_regime(2, 0.9);
  CHECK(super.kind == RegimeKind::Superdiffusive);
  CHECK(super.a == doctest::Approx(13.0 / 15.0).epsilon(1e-15));

  for (int d = 1; d <= 64; ++d) {
    CHECK(classify_regime(d, critical_memory(d)).kind == RegimeKind::Critical);
    CHECK(std::fabs(memory_to_a(d, critical_memory(d)) - 0.5) <= 1e-15);
  }
}

TEST_CASE("parameter ranges") {
  for (const int d : {1, 2, 3, 8}) {
    CHECK(memory_to_a(d, 0.0) == doctest::Approx(-1.0 / (2 * d - 1)).epsilon(1e-15));
    CHECK(memory_to_a(d, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    const double pd = critical_memory(d);
    CHECK(pd > 0.5);
    CHECK(pd <= 0.75);
  }
}

TEST_CASE("signed permutation action") {
  const SignedDirection e1{1, +1};
  CHECK(apply_matrix(0, +1, e1, 2) == SignedDirection{1, +1});
  CHECK(apply_matrix(0, -1, e1, 2) == SignedDirection{1, -1});

  // The 2d (power, sign) pairs applied to a fixed direction enumerate all
  // 2d signed directions exactly once.
  for (const int d : {1, 2, 3, 5}) {
    for (int start_code = 0; start_code < 2 * d; ++start_code) {
      const SignedDirection start = SignedDirection::from_code(start_code);
      std::set<int> seen;
      for (int power = 0; power < d; ++power)
        for (const int sign : {+1, -1}) seen.insert(apply_matrix(power, sign, start, d).code());
      CHECK(seen.size() == static_cast<std::size_t>(2 * d));
    }
  }
  CHECK_THROWS_AS(apply_matrix(2, +1, e1, 2), std::invalid_argument);
  CHECK_THROWS_AS(apply_matrix(-1, +1, e1, 2), std::invalid_argument);
}

TEST_CASE("step distribution") {
  SUBCASE("one prior step, d=1") {
    DirectionCounts counts = DirectionCounts::zero(1);
    counts.add(SignedDirection{1, +1});
    for (const double p : {0.0, 0.3, 0.75, 1.0}) {
      const auto probs = step_distribution(counts, p);
      CHECK(probs[0] == doctest::Approx(p).epsilon(1e-15));
      CHECK(probs[1] == doctest::Approx(1.0 - p).epsilon(1e-15));
    }
  }
  SUBCASE("symmetric counts, d=2") {
    DirectionCounts counts = DirectionCounts::zero(2);
    counts.counts = {3, 3, 3, 3};
    counts.n = 12;
    const auto probs = step_distribution(counts, 0.7);
    for (const double v : probs) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("worked example d=2, p=1/2, counts (2,1,1,0)") {
    DirectionCounts counts = DirectionCounts::zero(2);
    counts.counts = {2, 1, 1, 0};
    counts.n = 4;
    const auto probs = step_distribution(counts, 0.5);
    CHECK(probs[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    double sum = 0.0;
    for (const double v : probs) sum += v;
    CHECK(std::fabs(sum - 1.0) <= 1e-15);
  }
  SUBCASE("undefined before the first step") {
    DirectionCounts counts = DirectionCounts::zero(2);
    CHECK_THROWS_AS(step_distribution(counts, 0.5), std::invalid_argument);
  }
  SUBCASE("random counts sum to one") {
    RngStream rng(7, 0);
    for (int trial = 0; trial < 200; ++trial) {
      const int d = 1 + static_cast<int>(rng.uniform_below(3));
      DirectionCounts counts = DirectionCounts::zero(d);
      const int steps = 1 + static_cast<int>(rng.uniform_below(50));
      for (int s = 0; s < steps; ++s)
        counts.add(SignedDirection::from_code(static_cast<int>(rng.uniform_below(2 * d))));
      const double p = rng.uniform01();
      const auto probs = step_distribution(counts, p);
      double sum = 0.0;
      for (const double v : probs) {
        CHECK(v >= 0.0);
        sum += v;
      }
      CHECK(std::fabs(sum - 1.0) <= 1e-15);
    }
  }
}

TEST_CASE("config validation") {
  WalkConfig config;
  config.d = 2;
  config.p = 0.5;
  config.horizon = 10;
  CHECK_NOTHROW(config.validate());
  config.p = 1.5;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.p = 0.5;
  config.d = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.d = 1;
  config.horizon = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.horizon = 1;
  config.first_step = FirstStepLaw::biased(1.25);
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

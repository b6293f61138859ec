#include <cmath>
#include <vector>

#include "betadim/errors.hpp"
#include "betadim/parallel.hpp"
#include "betadim/pressure.hpp"
#include "betadim/symbolic.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace betadim;

namespace {
const Potential kIdentity = Potential::polynomial({0.0, 1.0});
}

TEST_CASE("partition sum examples") {
  BetaSystem two(2.0);
  for (int n : {1, 5, 12}) {
    double c = 0.37;
    double z = partition_sum(two, Potential::constant(c), n, SumMode::LeftEndpoint);
    CHECK(z == doctest::Approx(std::ldexp(1.0, n) * std::exp(n * c)).epsilon(1e-13));
  }
  BetaSystem gold = BetaSystem::parse("golden");
  CHECK(partition_sum(gold, Potential::constant(0.0), 10, SumMode::LeftEndpoint) ==
        doctest::Approx(144.0).epsilon(1e-14));
  // Frozen from brute-force enumeration of the 21 words with extended-precision sums.
  CHECK(partition_sum(gold, kIdentity, 6, SumMode::LeftEndpoint) ==
        doctest::Approx(277.99853958684252).epsilon(1e-13));
  CHECK(partition_sum(gold, kIdentity, 6, SumMode::UpperBound) >
        partition_sum(gold, kIdentity, 6, SumMode::LeftEndpoint));
  CHECK_THROWS_AS(partition_sum(two, kIdentity, 30, SumMode::LeftEndpoint, 1e6), BudgetExceeded);
}

TEST_CASE("upper-bound mode sums the clipped brackets") {
  BetaSystem gold = BetaSystem::parse("golden");
  double z = 0.0;
  for (auto& w : enumerate_words(gold, 7)) z += std::exp(ergodic_sum_bounds(gold, kIdentity, w).hi);
  CHECK(partition_sum(gold, kIdentity, 7, SumMode::UpperBound) == doctest::Approx(z).epsilon(1e-13));
}

TEST_CASE("pressure estimate examples") {
  BetaSystem two(2.0);
  PressureEstimate e = pressure_estimate(two, Potential::constant(0.8), 15);
  CHECK(std::fabs(e.value - (std::log(2.0) + 0.8)) <= 1e-12);
  for (int n : {1, 4, 9}) {
    PressureEstimate z = pressure_estimate(two, Potential::constant(0.0), n);
    CHECK(z.lower <= std::log(2.0));
    CHECK(std::log(2.0) <= z.upper);
  }
  BetaSystem gold = BetaSystem::parse("golden");
  PressureEstimate g = pressure_estimate(gold, Potential::constant(0.0), 20);
  double logphi = std::log(oracle::golden());
  CHECK(std::fabs(g.value - std::log(17711.0) / 20) <= 1e-12);
  CHECK(std::fabs(g.value - logphi) <= 0.02);
  CHECK(g.lower <= logphi);
  CHECK(logphi <= g.upper);
}

TEST_CASE("default pressure n from the budget") {
  CHECK(default_pressure_n(BetaSystem(2.0)) == 23);
  CHECK(default_pressure_n(BetaSystem::parse("golden")) == 33);
}

TEST_CASE("log_sum_exp") {
  CHECK(log_sum_exp({0.0, 0.0}) == doctest::Approx(std::log(2.0)));
  CHECK(log_sum_exp({1000.0, 1000.0}) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(std::isinf(log_sum_exp({})));
}

TEST_CASE("property: constant potentials reduce to counting") {
  oracle::Gen gen(31);
  for (int t = 0; t < 30; ++t) {
    BetaSystem sys(gen.uniform(1.1, 4.0));
    int n = gen.integer(1, std::min(16, default_pressure_n(sys, 2e5)));
    double a = gen.uniform(-3, 3);
    PressureEstimate e = pressure_estimate(sys, Potential::constant(a), n);
    CHECK(std::fabs(e.value - (std::log(static_cast<double>(count_words(sys, n))) / n + a)) <= 1e-12);
    CHECK(e.lower <= e.value);
    CHECK(e.value <= e.upper);
  }
}

TEST_CASE("property: shift additivity") {
  oracle::Gen gen(32);
  for (double beta : {2.0, oracle::golden(), 1.5}) {
    BetaSystem sys(beta);
    ErgodicSpectrum spec(sys, Potential::polynomial({0.2, -1.0, 0.7}), 12);
    for (int t = 0; t < 20; ++t) {
      double c = gen.uniform(-5, 5);
      PressureEstimate p0 = spec.estimate(1.0, 0.0), p1 = spec.estimate(1.0, c);
      CHECK(p1.value == doctest::Approx(p0.value + c).epsilon(1e-13));
      PressureEstimate q = pressure_estimate(sys, Potential::polynomial({0.2 + c, -1.0, 0.7}), 12);
      CHECK(q.value == doctest::Approx(p0.value + c).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: bracket ordering and shrinkage") {
  for (double beta : {2.0, oracle::golden(), 2.7}) {
    BetaSystem sys(beta);
    double prev_width = 1e300;
    for (int n = 4; n <= 14; n += 2) {
      PressureEstimate e = pressure_estimate(sys, kIdentity, n);
      CHECK(e.lower <= e.value);
      CHECK(e.value <= e.upper);
      double width = e.upper - e.lower;
      CHECK(width < prev_width);
      CHECK(width * n < 6.0);  // O(1/n)
      prev_width = width;
    }
  }
}

TEST_CASE("property: brackets nest the true pressure across n") {
  // The limit lies in every bracket, so brackets at different n must overlap.
  BetaSystem sys(1.5);
  std::vector<PressureEstimate> es;
  for (int n = 6; n <= 24; n += 3) es.push_back(pressure_estimate(sys, kIdentity, n));
  for (auto& a : es) {
    for (auto& b : es) CHECK(a.lower <= b.upper);
  }
}

TEST_CASE("property: phi midpoints decrease in s") {
  for (const char* b : {"2", "golden", "1.7"}) {
    BetaSystem sys = BetaSystem::parse(b);
    TargetSpec spec{sys, Potential::polynomial({1.0, 0.5}), Potential::piecewise_linear({{0, 0.2}, {0.5, 0.6}, {1, 0.3}}),
                    0.5, 0.5};
    PhiEvaluator phi(spec, 12);
    double prev1 = 1e300, prev2 = 1e300;
    for (int i = 0; i < 50; ++i) {
      double s = 2.5 * i / 49.0;
      Bracketed a = phi.phi1(s), c = phi.phi2(s);
      CHECK(a.value < prev1);
      CHECK(c.value < prev2);
      CHECK(a.lower <= a.value);
      CHECK(a.value <= a.upper);
      prev1 = a.value;
      prev2 = c.value;
    }
  }
}

TEST_CASE("property: results do not depend on the thread cap") {
  BetaSystem sys(2.0);
  std::vector<double> got;
  for (unsigned threads : {1u, 2u, 5u}) {
    set_thread_cap(threads);
    PressureEstimate e = pressure_estimate(sys, Potential::polynomial({0.3, 1.0, -0.5}), 18);
    got.push_back(e.value);
    got.push_back(e.lower);
    got.push_back(e.upper);
  }
  set_thread_cap(0);
  for (std::size_t i = 3; i < got.size(); ++i) CHECK(got[i] == got[i % 3]);
}

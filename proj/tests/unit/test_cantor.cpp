#include <cmath>
#include <sstream>

#include "betadim/cantor.hpp"
#include "betadim/errors.hpp"
#include "betadim/pressure.hpp"
#include "betadim/symbolic.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace betadim;

namespace {

const double kL2 = std::log(2.0);

TargetSpec constants(const BetaSystem& sys, double a, double b, double x0 = 0.5, double y0 = 0.5) {
  return {sys, Potential::constant(a), Potential::constant(b), x0, y0};
}

// β=2, f=g=log 2, ε=0.3, N=1, depth 2, m=(8, auto)
const CantorBuild& balanced() {
  static const CantorBuild b = [] {
    CantorConfig cfg;
    cfg.m_schedule = {8};
    CantorBuild out = build_levels(constants(BetaSystem(2.0), kL2, kL2), cfg);
    assign_mass(out);
    return out;
  }();
  return b;
}

double level_total(const Level& L) {
  std::vector<double> terms;
  for (const LevelElement& e : L.elements) terms.push_back(e.log_weight + e.log_mass);
  return std::exp(log_sum_exp(terms));
}

}  // namespace

TEST_CASE("balanced build: invariants") {
  const CantorBuild& b = balanced();
  REQUIRE(b.levels.size() == 2);
  CHECK(b.mass_case == MassCase::CaseII);
  CHECK_FALSE(b.strengthened_gap);
  CHECK(b.levels[0].m == 8);
  CHECK(b.levels[1].auto_m);
  CHECK(b.levels[1].gap_lhs >= b.levels[1].gap_rhs);
  CHECK(b.levels[1].gap_lhs - b.levels[1].gap_rhs < 3 * 0.3 / 1.3 * kL2);
  for (const Level& L : b.levels) CHECK_FALSE(L.elements.empty());

  CantorAudit a = audit_levels(b);
  CHECK(a.elements == b.levels[0].elements.size() + b.levels[1].elements.size());
  CHECK(a.sandwich_violations == 0);
  CHECK(a.ball_violations == 0);
  CHECK(a.order_violations == 0);
  CHECK(a.remark_violations == 0);
  CHECK(a.max_conservation_error <= 1e-12);
  for (const Level& L : b.levels) CHECK(level_total(L) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("level words are full, and chosen cylinders sit inside their balls") {
  const CantorBuild& b = balanced();
  const BetaSystem& sys = b.spec.sys;
  const Level& L1 = b.levels[0];
  for (std::size_t j = 0; j < L1.elements.size(); j += 97) {
    const LevelElement& e = L1.elements[j];
    CHECK(is_full(sys, e.gamma));
    CHECK(is_full(sys, e.upsilon));
    CHECK(e.gamma.size() == static_cast<std::size_t>(e.order()));
    CHECK(e.upsilon.size() == static_cast<std::size_t>(e.order()));
    CHECK(e.sf_n == doctest::Approx(e.n * kL2).epsilon(1e-13));
    // K's own cylinder, measured directly against B(1/2, e^{-S})
    Word K(e.gamma.begin() + e.n, e.gamma.end());
    Cylinder c = cylinder_of(sys, K);
    const double r = std::exp(-e.sf_n);
    CHECK(c.full);
    CHECK(c.left > 0.5 - r);
    CHECK(c.left + c.length <= 0.5 + r);
  }
}

TEST_CASE("depth 1: K1 satisfies the sandwich with n1 = m1") {
  CantorConfig cfg;
  cfg.depth = 1;
  cfg.m_schedule = {6};
  const double c = 0.9;
  CantorBuild b = build_levels(constants(BetaSystem(2.0), c, 0.4, 0.3, 0.7), cfg);
  REQUIRE(b.levels.size() == 1);
  for (const LevelElement& e : b.levels[0].elements) {
    CHECK(e.n == 6);
    const double side = std::pow(2.0, -e.k);
    CHECK(side < std::exp(-e.n * c));
    CHECK(side > std::exp(-(1.3) * e.n * c));
    CHECK(e.k >= e.l);
  }
}

TEST_CASE("f below g is a hypothesis violation") {
  CantorConfig cfg;
  CHECK_THROWS_AS(build_levels(constants(BetaSystem(2.0), 0.1, 0.2), cfg), HypothesisViolation);
}

TEST_CASE("explicit m below the gap condition is rejected") {
  CantorConfig cfg;
  cfg.m_schedule = {8, 10};
  CHECK_THROWS_AS(build_levels(constants(BetaSystem(2.0), kL2, kL2), cfg), PreconditionError);
}

TEST_CASE("mass versus length and its negative control") {
  const CantorBuild& b = balanced();
  const double s0 = 1.0;  // 2 log 2 / (log 2 + log 2)
  MassLengthReport ok = mass_vs_length_check(b, s0 - 0.1, 0.3);
  CHECK(ok.passed());
  CHECK(ok.checked == b.levels[0].elements.size() + b.levels[1].elements.size());
  MassLengthReport bad = mass_vs_length_check(b, s0 + 0.5, 0.3);
  CHECK_FALSE(bad.passed());
  CHECK(bad.max_log_ratio > 0.0);

  // depth-1 ratios by hand: mass 4^{-(m-1)}, side 2^{-(m+k)}
  for (const LevelElement& e : b.levels[0].elements) {
    CHECK(e.log_mass == doctest::Approx(-2.0 * 7 * kL2).epsilon(1e-12));
  }
}

TEST_CASE("Case II constants: s1 closed form and even split over H") {
  CantorConfig cfg;
  cfg.depth = 1;
  cfg.m_schedule = {7};
  cfg.case_override = MassCase::CaseII;
  const double f = 1.2, g = 0.8;
  CantorBuild b = build_levels(constants(BetaSystem(2.0), f, g), cfg);
  assign_mass(b);
  const Level& L = b.levels[0];
  const int m = 7;
  const double C = std::pow(2.0, m - 1);  // full words of length m ending in 0
  CHECK(L.candidates == C);
  const double s1 = 2 * std::log(C) / (m * (kL2 + g));
  CHECK(L.s == doctest::Approx(s1).epsilon(1e-12));
  bool split = false;
  for (const LevelElement& e : L.elements) {
    const double rect = -s1 * m * (kL2 + g);
    CHECK(e.log_mass == doctest::Approx(rect - (e.k - e.l) * kL2).epsilon(1e-10));
    split = split || e.k > e.l;
  }
  CHECK(split);
  CHECK(level_total(L) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Case I constants: uniform masses over (U, W, H) triples") {
  CantorConfig cfg;
  cfg.depth = 1;
  cfg.m_schedule = {6};
  const double f = 2.0, g = 0.5;
  CantorBuild b = build_levels(constants(BetaSystem(2.0), f, g), cfg);
  CHECK(b.mass_case == MassCase::CaseI);
  assign_mass(b);
  const Level& L = b.levels[0];
  const double C = std::pow(2.0, 5);
  for (const LevelElement& e : L.elements) {
    const double triples = 2 * std::log(C) + (e.k - e.l) * kL2;
    CHECK(e.log_mass == doctest::Approx(-triples).epsilon(1e-10));
  }
  // s1 solves C·e^{(1-s)6f - 6s log 2}·C·e^{-6g} = 1
  const double s1 = (2 * std::log(C) + 6 * f - 6 * g) / (6 * f + 6 * kL2);
  CHECK(L.s == doctest::Approx(s1).epsilon(1e-12));
}

TEST_CASE("sample points hit every constructed level") {
  const CantorBuild& b = balanced();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SamplePoint p = sample_point(b, seed);
    REQUIRE(p.witnesses.size() == 2);
    CHECK(p.all_hit());
    for (const HitWitness& w : p.witnesses) {
      CHECK(w.log_dist_x < w.log_radius_x);
      CHECK(w.log_dist_y < w.log_radius_y);
    }
    // level 1 directly: |T^{n1} x - 1/2| < e^{-S}
    const HitWitness& w1 = p.witnesses[0];
    double tx = p.x;
    for (int j = 0; j < w1.n; ++j) tx = t_map(b.spec.sys, tx);
    CHECK(std::fabs(tx - 0.5) < std::exp(w1.log_radius_x));
  }
  SamplePoint a = sample_point(b, 7), c = sample_point(b, 7);
  CHECK(a.x == c.x);
  CHECK(a.y == c.y);
  CHECK(a.path == c.path);
}

TEST_CASE("depth 0 gives an unconstrained point") {
  CantorConfig cfg;
  cfg.depth = 0;
  CantorBuild b = build_levels(constants(BetaSystem(2.0), kL2, kL2), cfg);
  SamplePoint p = sample_point(b, 3);
  CHECK(p.witnesses.empty());
  CHECK(p.x >= 0.0);
  CHECK(p.x < 1.0);
}

TEST_CASE("builds are reproducible and respect the seed") {
  CantorConfig cfg;
  cfg.m_schedule = {6};
  cfg.level_budget = 256;
  TargetSpec spec = constants(BetaSystem(2.0), 1.0, 0.6);
  auto dump = [&](std::uint64_t seed) {
    CantorConfig c = cfg;
    c.seed = seed;
    CantorBuild b = build_levels(spec, c);
    assign_mass(b);
    std::ostringstream os;
    dump_levels(b, os);
    return os.str();
  };
  const std::string a = dump(11);
  CHECK(a == dump(11));
  CHECK(a != dump(12));
}

TEST_CASE("golden and non-simple bases, targets at 1") {
  struct Case {
    double beta;
    double x0, y0;
  };
  const double phi = oracle::golden();
  for (Case cs : {Case{phi, 1.0, 0.3}, Case{1.5, 0.4, 1.0}, Case{2.7, 0.61, 0.2}}) {
    CAPTURE(cs.beta);
    CantorConfig cfg;
    cfg.level_budget = 2048;
    TargetSpec spec{BetaSystem(cs.beta), Potential::polynomial({0.9, 0.3}), Potential::constant(0.35), cs.x0,
                    cs.y0};
    CantorBuild b = build_levels(spec, cfg);
    assign_mass(b);
    CantorAudit a = audit_levels(b);
    CHECK(a.elements > 0);
    CHECK(a.sandwich_violations == 0);
    CHECK(a.ball_violations == 0);
    CHECK(a.order_violations == 0);
    CHECK(a.max_conservation_error <= 1e-12);
    for (const Level& L : b.levels) {
      for (std::size_t j = 0; j < L.elements.size(); j += 61) {
        CHECK(is_admissible(b.spec.sys, L.elements[j].gamma));
        CHECK(is_admissible(b.spec.sys, L.elements[j].upsilon));
      }
    }
    for (std::uint64_t seed = 0; seed < 10; ++seed) CHECK(sample_point(b, seed).all_hit());
  }
}

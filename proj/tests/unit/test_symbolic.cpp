#include <cmath>
#include <limits>
#include <vector>

#include "betadim/beta_system.hpp"
#include "betadim/errors.hpp"
#include "betadim/symbolic.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace betadim;

namespace {

const double kEps = std::numeric_limits<double>::epsilon();

std::vector<BetaSystem> test_betas() {
  return {BetaSystem(2.0), BetaSystem::parse("golden"), BetaSystem(1.5), BetaSystem(2.7)};
}

Word concat(const Word& a, const Word& b) {
  Word c = a;
  c.insert(c.end(), b.begin(), b.end());
  return c;
}

}  // namespace

TEST_CASE("admissibility examples") {
  BetaSystem gold = BetaSystem::parse("golden");
  CHECK_FALSE(is_admissible(gold, Word{1, 1}));
  CHECK(is_admissible(BetaSystem(2.0), Word{1, 1, 1, 1}));
  for (auto& sys : test_betas()) CHECK(is_admissible(sys, Word(9, 0)));
  CHECK_FALSE(is_admissible(BetaSystem(2.0), Word{2}));
}

TEST_CASE("enumeration examples") {
  BetaSystem gold = BetaSystem::parse("golden");
  auto w = enumerate_words(gold, 3);
  CHECK(w == std::vector<Word>{{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {1, 0, 1}});
  CHECK(enumerate_words(BetaSystem(2.0), 4).size() == 16);
  CHECK(enumerate_words(gold, 2, WordFilter::ends_with_zeros(1)) == std::vector<Word>{{0, 0}, {1, 0}});
  CHECK_THROWS_AS(enumerate_words(BetaSystem(2.0), 30, {}, 1e6), BudgetExceeded);
  try {
    enumerate_words(BetaSystem(2.0), 30, {}, 1e6);
  } catch (const BudgetExceeded& e) {
    CHECK(e.predicted() == std::ldexp(1.0, 30));
    CHECK(e.renyi_upper() == doctest::Approx(std::ldexp(1.0, 31)));
  }
}

TEST_CASE("count examples") {
  CHECK(count_words(BetaSystem::parse("golden"), 10) == 144);
  CHECK(count_words(BetaSystem(2.0), 10) == 1024);
  // Frozen from the brute-force Parry oracle below.
  CHECK(count_words(BetaSystem(1.5), 8) == 40);
  CHECK(oracle::brute_force_words(1, 8, oracle::one_expansion(1.5, 8)).size() == 40);
}

TEST_CASE("cylinder examples") {
  BetaSystem gold = BetaSystem::parse("golden");
  Cylinder c0 = cylinder_of(gold, Word{0});
  CHECK(c0.left == 0.0);
  CHECK(c0.length == doctest::Approx(1.0 / gold.beta()).epsilon(1e-15));
  CHECK(c0.full);
  Cylinder c1 = cylinder_of(gold, Word{1});
  CHECK(c1.left == doctest::Approx(1.0 / gold.beta()).epsilon(1e-15));
  CHECK(c1.length == doctest::Approx(1.0 / (gold.beta() * gold.beta())).epsilon(1e-14));
  CHECK_FALSE(c1.full);
  BetaSystem two(2.0);
  for (const Word& w : enumerate_words(two, 7)) {
    Cylinder c = cylinder_of(two, w);
    CHECK(c.length == std::ldexp(1.0, -7));
    CHECK(c.full);
  }
  CHECK_THROWS_AS(cylinder_of(gold, Word{1, 1}), InvalidArgument);
}

TEST_CASE("cover_interval examples") {
  BetaSystem two(2.0);
  auto cov = cover_interval(two, {0.25, 0.5}, 2);
  REQUIRE(cov.size() == 1);
  CHECK(cov[0].word == Word{0, 1});

  BetaSystem gold = BetaSystem::parse("golden");
  double len = std::pow(gold.beta(), -3);
  Interval J{0.3, 0.3 + len};
  auto got = cover_interval(gold, J, 3);
  CHECK(got.size() <= 8);
  // direct construction: every order-3 cylinder meeting J
  std::vector<Word> expect;
  for (const Word& w : enumerate_words(gold, 3)) {
    Cylinder c = cylinder_of(gold, w);
    if (c.left < J.hi && c.left + c.length > J.lo) expect.push_back(w);
  }
  REQUIRE(got.size() == expect.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].word == expect[i]);
  CHECK_THROWS_AS(cover_interval(gold, {0.3, 0.4}, 3), InvalidArgument);
}

TEST_CASE("property: covering bound for beta = 1.5") {
  BetaSystem sys(1.5);
  oracle::Gen gen(3);
  const int l = 6;
  const double len = std::pow(1.5, -l);
  for (int t = 0; t < 500; ++t) {
    double lo = gen.uniform(0.0, 1.0 - len);
    auto cov = cover_interval(sys, {lo, lo + len}, l);
    CHECK(cov.size() <= 14);
    CHECK(cov.front().left <= lo);
    CHECK(cov.back().left + cov.back().length >= lo + len - 1e-15);
    for (std::size_t i = 1; i < cov.size(); ++i) {
      CHECK(cov[i].left == doctest::Approx(cov[i - 1].left + cov[i - 1].length).epsilon(1e-12));
    }
  }
}

TEST_CASE("packing threshold") {
  CHECK(packing_threshold(BetaSystem(2.0), 0.5) == 24);
  int n0 = packing_threshold(BetaSystem::parse("golden"), 0.3);
  BetaSystem gold = BetaSystem::parse("golden");
  for (int n = n0; n < n0 + 200; ++n) {
    CHECK(2.0 * n * n * gold.beta() < std::pow(gold.beta(), (n - 1) * 0.3));
  }
  CHECK_FALSE(2.0 * (n0 - 1) * (n0 - 1) * gold.beta() < std::pow(gold.beta(), (n0 - 2) * 0.3));
}

TEST_CASE("find_full_cylinder_in") {
  BetaSystem two(2.0);
  // Intervals longer than the packing bound are refused.
  CHECK_THROWS_AS(find_full_cylinder_in(two, {0.3, 0.3 + 12.0 / 64.0}, 0.5), PreconditionError);
  BetaSystem gold = BetaSystem::parse("golden");
  CHECK_THROWS_AS(find_full_cylinder_in(gold, {0.4995, 0.5005}, 0.3), PreconditionError);
  CHECK_THROWS_AS(find_full_cylinder_in(two, {0.3, 0.3}, 0.5), PreconditionError);

  // Inside the admissible range the proof's choice of n works.
  for (auto& sys : {two, gold, BetaSystem(1.5)}) {
    for (double eps : {0.3, 0.5}) {
      int n0 = packing_threshold(sys, eps);
      double bound = 2.0 * n0 * std::pow(sys.beta(), -n0);
      for (double frac : {0.9, 0.5, 0.1}) {
        double r = frac * bound;
        if (r < 1e-13) continue;
        Interval J{0.3, 0.3 + r};
        Cylinder c = find_full_cylinder_in(sys, J, eps);
        CHECK(c.full);
        CHECK(c.left >= J.lo);
        CHECK(c.left + c.length <= J.hi);
        CHECK(c.length <= r);
        CHECK(c.length > std::pow(r, 1.0 + eps));
      }
    }
  }
}

TEST_CASE("property: automaton language equals brute-force Parry filter") {
  for (auto& sys : test_betas()) {
    for (int n = 1; n <= 12; ++n) {
      auto brute = oracle::brute_force_words(sys.max_digit(), n, oracle::one_expansion(sys.beta(), n));
      auto fast = enumerate_words(sys, n);
      CHECK(fast == brute);
      CHECK(count_words(sys, n) == fast.size());
    }
  }
}

TEST_CASE("property: golden counts are Fibonacci") {
  BetaSystem gold = BetaSystem::parse("golden");
  for (int n = 1; n <= 40; ++n) CHECK(count_words(gold, n) == oracle::fibonacci(n + 2));
}

TEST_CASE("property: Renyi bounds") {
  oracle::Gen gen(5);
  for (int t = 0; t < 50; ++t) {
    BetaSystem sys(gen.uniform(1.01, 4.0));
    for (int n = 1; n <= 16; ++n) {
      std::uint64_t c = count_words(sys, n);
      CHECK(static_cast<long double>(c) >= std::pow(static_cast<long double>(sys.beta()), n));
      CHECK(static_cast<long double>(c) <=
            std::pow(static_cast<long double>(sys.beta()), n + 1) / (sys.beta() - 1.0L));
    }
  }
}

TEST_CASE("property: filters match post-filtering") {
  for (auto& sys : test_betas()) {
    for (int n = 1; n <= 10; ++n) {
      auto all = enumerate_words(sys, n);
      std::vector<Word> full, z2;
      for (auto& w : all) {
        if (is_full(sys, w)) full.push_back(w);
        if (n >= 2 && w[n - 1] == 0 && w[n - 2] == 0) z2.push_back(w);
      }
      CHECK(enumerate_words(sys, n, WordFilter::full()) == full);
      if (n >= 2) CHECK(enumerate_words(sys, n, WordFilter::ends_with_zeros(2)) == z2);
      CHECK(predicted_count(sys, n, WordFilter::full()) == static_cast<double>(full.size()));
    }
  }
}

TEST_CASE("property: cylinder lengths partition [0,1)") {
  for (auto& sys : test_betas()) {
    for (int n = 1; n <= 12; ++n) {
      auto words = enumerate_words(sys, n);
      double total = 0.0, prev_end = 0.0;
      for (auto& w : words) {
        Cylinder c = cylinder_of(sys, w);
        CHECK(c.length <= std::pow(sys.beta(), -n) * (1 + 2 * n * kEps));
        CHECK(c.left == doctest::Approx(prev_end).epsilon(1e-12));
        prev_end = c.left + c.length;
        total += c.length;
      }
      CHECK(std::fabs(total - 1.0) <= n * kEps * words.size());
    }
  }
}

TEST_CASE("property: fullness agrees with the follower state and the successor gap") {
  for (auto& sys : test_betas()) {
    for (int n = 1; n <= 12; ++n) {
      FollowerAutomaton a(sys, n);
      for (auto& w : enumerate_words(sys, n)) {
        int state = a.run(w);
        Cylinder c = cylinder_of(sys, w);
        CHECK(c.full == (state == 0));
        // successor gap, computed directly in extended precision
        auto ld_left = [&](const Word& v) {
          long double L = 0.0L;
          for (std::size_t i = v.size(); i-- > 0;) L = (v[i] + L) / static_cast<long double>(sys.beta());
          return L;
        };
        auto succ = successor_word(sys, w);
        long double gap = (succ ? ld_left(*succ) : 1.0L) - ld_left(w);
        double tail = static_cast<double>(gap / std::pow(static_cast<long double>(sys.beta()), -n));
        CHECK(c.length == doctest::Approx(std::pow(sys.beta(), -n) * tail).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("property: every n+1 consecutive cylinders include a full one") {
  for (auto& sys : test_betas()) {
    for (int n = 1; n <= 12; ++n) {
      auto words = enumerate_words(sys, n);
      std::vector<char> full;
      for (auto& w : words) full.push_back(is_full(sys, w));
      std::size_t window = n + 1;
      for (std::size_t s = 0; s + window <= full.size(); ++s) {
        bool any = false;
        for (std::size_t i = s; i < s + window; ++i) any = any || full[i];
        CHECK(any);
      }
    }
  }
}

TEST_CASE("property: concatenations of full words are full") {
  for (auto& sys : test_betas()) {
    std::vector<std::vector<Word>> full(12);
    for (int n = 1; n < 12; ++n) full[n] = enumerate_words(sys, n, WordFilter::full());
    for (int a = 1; a < 12; ++a) {
      for (int b = 1; a + b <= 12; ++b) {
        for (auto& u : full[a]) {
          for (auto& v : full[b]) {
            Word uv = concat(u, v);
            REQUIRE(is_admissible(sys, uv));
            Cylinder c = cylinder_of(sys, uv);
            CHECK(c.full);
            double prod = cylinder_of(sys, u).length * cylinder_of(sys, v).length;
            CHECK(std::fabs(c.length - prod) <= 2 * (a + b) * kEps * prod);
          }
        }
      }
    }
  }
}

TEST_CASE("property: fullness equals free concatenation, bounded lookahead") {
  // A word u is full iff uv is admissible for every admissible v; checked for
  // all v of length up to 2|u|.
  for (auto& sys : test_betas()) {
    for (int n = 1; n <= 5; ++n) {
      for (auto& u : enumerate_words(sys, n)) {
        bool concat_ok = true;
        for (int m = 1; m <= 2 * n && concat_ok; ++m) {
          for (auto& v : enumerate_words(sys, m)) {
            if (!is_admissible(sys, concat(u, v))) {
              concat_ok = false;
              break;
            }
          }
        }
        CHECK(concat_ok == is_full(sys, u));
      }
    }
  }
}

TEST_CASE("property: zero padding in the beta_N subsystem") {
  ArithmeticOptions loose;
  loose.snap_tolerance = 1e-9;  // β_N is only known to ~1e-13
  for (double beta : {2.0, 2.7, 1.8}) {
    BetaSystem sys(beta);
    for (int N = 2; N <= 5; ++N) {
      if (sys.one_digit(N) == 0) continue;
      double bn;
      try {
        bn = beta_n_approx(sys, N);
      } catch (const InvalidArgument&) {
        continue;
      }
      BetaSystem sub(bn, loose);
      REQUIRE(sub.parry_kind() == ParryKind::SimpleParry);
      Word expect = sys.one_expansion(N);
      expect[N - 1] -= 1;
      CHECK(sub.one_expansion(N) == expect);
      for (int a = 1; a + N <= 13; ++a) {
        auto us = enumerate_words(sub, a);
        for (int b = 1; a + b + N <= 14; ++b) {
          auto vs = enumerate_words(sub, b);
          for (std::size_t i = 0; i < us.size(); i += 3) {
            Word pad = concat(us[i], Word(N, 0));
            CHECK(is_full(sub, pad));
            for (std::size_t j = 0; j < vs.size(); j += 5) CHECK(is_admissible(sub, concat(pad, vs[j])));
          }
        }
      }
    }
  }
}

TEST_CASE("property: successor and predecessor walk the language in order") {
  for (auto& sys : test_betas()) {
    for (int n = 1; n <= 9; ++n) {
      auto words = enumerate_words(sys, n);
      for (std::size_t i = 0; i < words.size(); ++i) {
        auto s = successor_word(sys, words[i]);
        auto p = predecessor_word(sys, words[i]);
        if (i + 1 < words.size()) {
          REQUIRE(s);
          CHECK(*s == words[i + 1]);
        } else {
          CHECK_FALSE(s);
        }
        if (i > 0) {
          REQUIRE(p);
          CHECK(*p == words[i - 1]);
        } else {
          CHECK_FALSE(p);
        }
      }
    }
  }
}

TEST_CASE("property: locate agrees with expand") {
  oracle::Gen gen(9);
  for (auto& sys : test_betas()) {
    for (int t = 0; t < 500; ++t) {
      double x = gen.uniform();
      int n = gen.integer(1, 20);
      Word w = locate_word(sys, x, n);
      Cylinder c = cylinder_of(sys, w);
      CHECK(c.left <= x);
      CHECK(x < c.left + c.length + 1e-15);
      CHECK(w == expand(sys, x, n).digits);
    }
  }
}

TEST_CASE("word text round trip") {
  CHECK(parse_word("0110") == Word{0, 1, 1, 0});
  CHECK(parse_word("1,12,0") == Word{1, 12, 0});
  CHECK(format_word(Word{1, 12, 0}) == "1,12,0");
  CHECK(format_word(Word{1, 0, 1}) == "101");
  CHECK_THROWS_AS(parse_word("01x"), InvalidArgument);
}

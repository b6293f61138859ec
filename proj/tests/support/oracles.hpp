// Independent reference implementations used only by the test suites. None
// of these touch the follower automaton.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "betadim/beta_system.hpp"

namespace oracle {

using betadim::Word;

// Small deterministic generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }

 private:
  std::uint64_t s_;
};

// ε*(1,β) to depth n by iterating x -> βx mod 1 on 1 in long double, with the
// periodic rewrite applied when the orbit hits 0.
inline Word one_expansion(double beta, int n) {
  long double b = beta, t = 1.0L;
  Word raw;
  for (int i = 0; i < 200 && static_cast<int>(raw.size()) < 200; ++i) {
    long double y = b * t;
    long double d = std::floor(y + 1e-13L);
    raw.push_back(static_cast<betadim::Digit>(d));
    t = y - d;
    if (std::fabs(t) < 1e-13L) {
      Word period = raw;
      period.back() -= 1;
      Word out;
      while (static_cast<int>(out.size()) < n) out.push_back(period[out.size() % period.size()]);
      return out;
    }
  }
  raw.resize(n);
  return raw;
}

// Parry's criterion: every suffix block is <= the same-length prefix of ε*.
inline bool parry_admissible(const Word& w, const Word& eps) {
  const std::size_t n = w.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; k + i < n; ++i) {
      if (w[k + i] < eps[i]) break;
      if (w[k + i] > eps[i]) return false;
    }
  }
  return true;
}

// Every string over {0..max_digit} of length n that passes Parry's test, in
// lexicographic order.
inline std::vector<Word> brute_force_words(int max_digit, int n, const Word& eps) {
  std::vector<Word> out;
  Word w(n, 0);
  for (;;) {
    if (parry_admissible(w, eps)) out.push_back(w);
    int i = n - 1;
    while (i >= 0 && w[i] == max_digit) w[i--] = 0;
    if (i < 0) break;
    ++w[i];
  }
  return out;
}

inline std::uint64_t fibonacci(int k) {
  std::uint64_t a = 0, b = 1;
  for (int i = 0; i < k; ++i) {
    std::uint64_t c = a + b;
    a = b;
    b = c;
  }
  return a;
}

inline double golden() { return (1.0 + std::sqrt(5.0)) / 2.0; }

}  // namespace oracle

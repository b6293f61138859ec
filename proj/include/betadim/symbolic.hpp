#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "betadim/beta_system.hpp"
#include "betadim/interval.hpp"

namespace betadim {

struct Cylinder {
  Word word;
  double left = 0.0;
  double length = 0.0;
  bool full = false;
  int order = 0;
};

// Follower-state automaton of the β-shift. State j means the current suffix
// matches ε*_1..ε*_j and constrains the next digit to be <= ε*_{j+1}. For a
// simple Parry β the states wrap around at the period; otherwise they run up
// to `depth`, which must cover the longest word fed in.
class FollowerAutomaton {
 public:
  FollowerAutomaton(const BetaSystem& sys, int depth);

  int limit(int state) const { return eps_[state]; }
  // Next state, or -1 when the digit is not allowed.
  int next(int state, int digit) const {
    int e = eps_[state];
    if (digit < e) return 0;
    if (digit > e) return -1;
    int s = state + 1;
    return s == wrap_ ? 0 : s;
  }
  int num_states() const { return static_cast<int>(eps_.size()) + (wrap_ ? 0 : 1); }
  int depth() const { return depth_; }
  // Final state after reading w from state 0, or -1 if w is inadmissible.
  int run(const Word& w) const;

 private:
  Word eps_;
  int wrap_ = 0;  // period for simple Parry, 0 otherwise
  int depth_;
};

struct WordFilter {
  bool full_only = false;
  int zero_suffix = 0;  // words must end with this many zeros

  static WordFilter all() { return {}; }
  static WordFilter full() { return {true, 0}; }
  static WordFilter ends_with_zeros(int n) { return {false, n}; }
  std::string describe() const;
};

// Completion counts for admissible words of length n accepted by a filter,
// indexed by (remaining length, automaton state, trailing zeros so far).
class WordCounter {
 public:
  WordCounter(const BetaSystem& sys, int n, WordFilter filter);

  const FollowerAutomaton& automaton() const { return automaton_; }
  int length() const { return n_; }
  const WordFilter& filter() const { return filter_; }

  long double completions(int remaining, int state, int zeros) const;
  // Saturates at UINT64_MAX.
  std::uint64_t exact_completions(int remaining, int state, int zeros) const;
  long double total() const { return completions(n_, 0, 0); }
  bool total_is_exact() const { return exact_completions(n_, 0, 0) != UINT64_MAX; }
  std::uint64_t exact_total() const;  // throws on overflow
  int bump_zeros(int zeros, int digit) const {
    return digit == 0 ? std::min(zeros + 1, filter_.zero_suffix) : 0;
  }

 private:
  std::size_t index(int remaining, int state, int zeros) const {
    return (static_cast<std::size_t>(remaining) * states_ + state) * zslots_ + zeros;
  }

  FollowerAutomaton automaton_;
  int n_;
  WordFilter filter_;
  int states_;
  int zslots_;
  std::vector<long double> approx_;
  std::vector<std::uint64_t> exact_;
};

bool is_admissible(const BetaSystem& sys, const Word& w);

// Depth-first enumeration in lexicographic order. The callback receives the
// word and its final automaton state (0 exactly when the word is full).
void for_each_word(const BetaSystem& sys, int n, WordFilter filter,
                   const std::function<void(const Word&, int)>& visit,
                   double budget = 1e8);
// Same, restricted to completions of `prefix` (which must be admissible and
// shorter than n). Used to split the search tree into subtrees.
void for_each_completion(const WordCounter& counter, const Word& prefix,
                         const std::function<void(const Word&, int)>& visit);

std::vector<Word> enumerate_words(const BetaSystem& sys, int n, WordFilter filter = {},
                                  double budget = 1e8);
std::uint64_t count_words(const BetaSystem& sys, int n);
double predicted_count(const BetaSystem& sys, int n, WordFilter filter = {});
double renyi_upper(const BetaSystem& sys, int n);

// Σ w_i β^{-i}, accumulated from the last digit so that the left endpoint of
// every shift of w is available along the way.
double left_endpoint(const BetaSystem& sys, const Word& w);
// left_endpoint of w_{j+1..n} for j = 0..n (entry n is 0).
std::vector<double> shifted_left_endpoints(const BetaSystem& sys, const Word& w);

// value(σ^j ε*), the image length T^j(1) of a cylinder ending in state j.
double shifted_one_value(const BetaSystem& sys, int j);

Cylinder cylinder_of(const BetaSystem& sys, const Word& w);
bool is_full(const BetaSystem& sys, const Word& w);

std::optional<Word> successor_word(const BetaSystem& sys, const Word& w);
std::optional<Word> predecessor_word(const BetaSystem& sys, const Word& w);
// The order-n word whose cylinder contains x, chosen by comparing left
// endpoints rather than iterating T.
Word locate_word(const BetaSystem& sys, double x, int n);

std::vector<Cylinder> cover_interval(const BetaSystem& sys, Interval J, int l);

// Smallest n0 with 2n²β < β^{(n-1)ε} for all n >= n0.
int packing_threshold(const BetaSystem& sys, double epsilon);
Cylinder find_full_cylinder_in(const BetaSystem& sys, Interval J, double epsilon);

std::string format_word(const Word& w);
Word parse_word(const std::string& text);

}  // namespace betadim

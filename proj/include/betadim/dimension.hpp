#pragma once

#include <optional>
#include <vector>

#include "betadim/interval.hpp"
#include "betadim/pressure.hpp"

namespace betadim {

struct RootBracket {
  Interval bracket;         // contains the root of the limiting pressure equation
  Interval bisection;       // final bisection interval on the finite-n midpoint
  double slope_bound = 0;   // κ = inf(log β + potential)
  int iterations = 0;
  bool at_zero = false;     // the midpoint is already <= 0 at s = 0
};

struct SeriesRow {
  int n = 0;
  // log of the n-th summands (sums over U, W in Σ_β^n)
  double log_term1 = 0;
  double log_term2 = 0;
  double log_term_min = 0;
  // log of the partial sums over the requested range up to n
  double log_partial1 = 0;
  double log_partial2 = 0;
  double log_partial_min = 0;
  // log(term_min(n) / term_min(n-1)); NaN on the first row
  double log_ratio_min = 0;
};

struct DimensionResult {
  Interval s1;
  Interval s2;
  Interval s0;
  int n_used = 0;
  int iterations = 0;
  RootBracket s1_detail;
  RootBracket s2_detail;
  std::optional<std::vector<SeriesRow>> series;
};

// n = 0 picks the largest n whose word count fits in 1e7.
RootBracket solve_s1_detail(const PhiEvaluator& phi, const TargetSpec& spec, double tol);
RootBracket solve_s2_detail(const PhiEvaluator& phi, const TargetSpec& spec, double tol);
Interval solve_s1(const TargetSpec& spec, int n, double tol);
Interval solve_s2(const TargetSpec& spec, int n, double tol);
DimensionResult dimension(const TargetSpec& spec, int n, double tol);

// Summands of the two covering series and of their pointwise minimum.
class SeriesTerms {
 public:
  SeriesTerms(const TargetSpec& spec, int n, double budget = 1e8);
  int n() const { return n_; }
  double log_term1(double s) const;
  double log_term2(double s) const;
  double log_term_min(double s) const;

 private:
  int n_;
  double log_beta_;
  ErgodicSpectrum f_;
  ErgodicSpectrum g_;
};

std::vector<SeriesRow> series_partial_sums(const TargetSpec& spec, double s, int n_lo, int n_hi,
                                           double budget = 1e8);
// Interval where the per-n growth of the minimum-form series crosses 1.
Interval s0_prime_probe(const TargetSpec& spec, int n, double tol);

}  // namespace betadim

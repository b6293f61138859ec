#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "betadim/potential.hpp"

namespace betadim {

enum class SumMode { LeftEndpoint, UpperBound };

struct PressureEstimate {
  int n = 0;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::string potential_id;
};

struct Bracketed {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// log Σ exp(x_i), reduced in fixed-size chunks and then pairwise, so the
// result does not depend on the number of worker threads.
double log_sum_exp(const std::vector<double>& xs);

// S_n p at the left endpoint of every word in Σ_β^n, kept as a sorted table
// of distinct values with their multiplicities among all words and among
// full words. Pressures of every affine transform a·p + b are read off the
// same table.
class ErgodicSpectrum {
 public:
  ErgodicSpectrum(const BetaSystem& sys, const Potential& p, int n, double budget = 1e8);

  int n() const { return n_; }
  double words() const { return words_; }
  // distinct values of S_n p, ascending
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& counts() const { return counts_; }
  const std::vector<double>& full_counts() const { return full_counts_; }
  const Potential& potential() const { return p_; }
  const BetaSystem& system() const { return sys_; }

  // log Σ_w exp(a·S_w + n·b) over all words or over full words only.
  double log_sum(double a, double b, bool full_only = false) const;
  // log Σ_w exp(upper end of the bracket of S_n(a·p + b) on I_n(w)).
  double log_sum_upper(double a, double b) const;
  PressureEstimate estimate(double a = 1.0, double b = 0.0) const;

 private:
  BetaSystem sys_;
  Potential p_;
  int n_;
  double words_ = 0;
  std::vector<double> values_;
  std::vector<double> counts_;
  std::vector<double> full_counts_;
  std::vector<double> log_counts_;
  std::vector<double> log_full_counts_;
};

double log_partition_sum(const BetaSystem& sys, const Potential& p, int n, SumMode mode, double budget = 1e8);
double partition_sum(const BetaSystem& sys, const Potential& p, int n, SumMode mode, double budget = 1e8);
PressureEstimate pressure_estimate(const BetaSystem& sys, const Potential& p, int n, double budget = 1e8);

// Largest n whose word count is at most `budget`.
int default_pressure_n(const BetaSystem& sys, double budget = 1e7);

// φ1(s) = P(f - s(log β + f)) + P(-g) and φ2(s) = P(-s(log β + g)) + log β,
// with the spectra of f and g built once.
class PhiEvaluator {
 public:
  PhiEvaluator(const TargetSpec& spec, int n, double budget = 1e8);

  Bracketed phi1(double s) const;
  Bracketed phi2(double s) const;
  int n() const { return f_.n(); }
  const ErgodicSpectrum& f_spectrum() const { return f_; }
  const ErgodicSpectrum& g_spectrum() const { return g_; }

 private:
  ErgodicSpectrum f_;
  ErgodicSpectrum g_;
  PressureEstimate minus_g_;
  double log_beta_;
};

Bracketed phi1(const TargetSpec& spec, double s, int n);
Bracketed phi2(const TargetSpec& spec, double s, int n);

}  // namespace betadim

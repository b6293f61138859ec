#include "betadim/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "betadim/errors.hpp"
#include "betadim/parallel.hpp"
#include "betadim/symbolic.hpp"

namespace betadim {

namespace {

constexpr std::size_t kChunk = 4096;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double pairwise_sum(std::vector<double> v) {
  if (v.empty()) return 0.0;
  while (v.size() > 1) {
    std::size_t half = (v.size() + 1) / 2;
    for (std::size_t i = 0; i < v.size() / 2; ++i) v[i] = v[2 * i] + v[2 * i + 1];
    if (v.size() % 2) v[half - 1] = v.back();
    v.resize(half);
  }
  return v[0];
}

// log Σ exp(value(i)); value may return -inf to skip an entry.
template <class F>
double lse_indexed(std::size_t count, F value) {
  std::size_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<double> maxima(chunks, kNegInf);
  parallel_for(chunks, [&](std::size_t c) {
    double m = kNegInf;
    std::size_t end = std::min(count, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) m = std::max(m, value(i));
    maxima[c] = m;
  });
  double M = kNegInf;
  for (double m : maxima) M = std::max(M, m);
  if (M == kNegInf) return kNegInf;
  if (M == std::numeric_limits<double>::infinity()) return M;
  std::vector<double> partial(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    double s = 0.0;
    std::size_t end = std::min(count, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) s += std::exp(value(i) - M);
    partial[c] = s;
  });
  return M + std::log(pairwise_sum(std::move(partial)));
}

}  // namespace

double log_sum_exp(const std::vector<double>& xs) {
  return lse_indexed(xs.size(), [&](std::size_t i) { return xs[i]; });
}

ErgodicSpectrum::ErgodicSpectrum(const BetaSystem& sys, const Potential& p, int n, double budget)
    : sys_(sys), p_(p), n_(n) {
  if (n < 1) throw InvalidArgument("pressure: n must be >= 1");
  WordCounter counter(sys, n, WordFilter::all());
  double predicted = static_cast<double>(counter.total());
  if (predicted > budget) {
    throw BudgetExceeded("pressure at n=" + std::to_string(n) + " needs " + std::to_string(predicted) +
                             " words, over the budget " + std::to_string(budget),
                         predicted, renyi_upper(sys, n));
  }
  const std::size_t total = counter.exact_total();
  words_ = static_cast<double>(total);
  std::vector<double> sums(total);
  std::vector<std::uint8_t> full(total);

  // Split the search tree at a prefix depth with enough subtrees to share out.
  int depth = 1;
  while (depth < n && count_words(sys, depth) < 256) ++depth;
  std::vector<Word> prefixes = enumerate_words(sys, depth);
  std::vector<std::size_t> offset(prefixes.size() + 1, 0);
  const auto& a = counter.automaton();
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    int state = a.run(prefixes[i]);
    offset[i + 1] = offset[i] + counter.exact_completions(n - depth, state, 0);
  }
  if (offset.back() != total) throw InternalError("spectrum subtree offsets do not add up");

  parallel_for(prefixes.size(), [&](std::size_t i) {
    std::size_t k = offset[i];
    for_each_completion(counter, prefixes[i], [&](const Word& w, int state) {
      sums[k] = ergodic_sum_of_word(sys_, p_, w);
      full[k] = state == 0;
      ++k;
    });
  });

  // Collapse to distinct values; the ordering makes every later reduction
  // independent of how the enumeration was split.
  std::vector<double> full_sums, other_sums;
  for (std::size_t k = 0; k < total; ++k) (full[k] ? full_sums : other_sums).push_back(sums[k]);
  sums.clear();
  sums.shrink_to_fit();
  std::sort(full_sums.begin(), full_sums.end());
  std::sort(other_sums.begin(), other_sums.end());
  std::size_t i = 0, j = 0;
  while (i < full_sums.size() || j < other_sums.size()) {
    double v = (j == other_sums.size() || (i < full_sums.size() && full_sums[i] <= other_sums[j])) ? full_sums[i]
                                                                                                  : other_sums[j];
    double nf = 0, no = 0;
    while (i < full_sums.size() && full_sums[i] == v) ++i, ++nf;
    while (j < other_sums.size() && other_sums[j] == v) ++j, ++no;
    values_.push_back(v);
    counts_.push_back(nf + no);
    full_counts_.push_back(nf);
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    log_counts_.push_back(std::log(counts_[k]));
    log_full_counts_.push_back(full_counts_[k] > 0 ? std::log(full_counts_[k]) : kNegInf);
  }
}

double ErgodicSpectrum::log_sum(double a, double b, bool full_only) const {
  const auto& w = full_only ? log_full_counts_ : log_counts_;
  return lse_indexed(values_.size(), [&](std::size_t i) { return a * values_[i] + w[i]; }) + n_ * b;
}

double ErgodicSpectrum::log_sum_upper(double a, double b) const {
  const double delta = std::fabs(a) * p_.lipschitz() * lipschitz_spread(sys_, n_);
  const double top = n_ * (a >= 0 ? a * p_.max_value() + b : a * p_.min_value() + b);
  const double shift = n_ * b + delta;
  return lse_indexed(values_.size(),
                     [&](std::size_t i) { return std::min(a * values_[i] + shift, top) + log_counts_[i]; });
}

PressureEstimate ErgodicSpectrum::estimate(double a, double b) const {
  PressureEstimate e;
  e.n = n_;
  e.value = log_sum(a, b) / n_;
  e.upper = log_sum_upper(a, b) / n_ + std::log(sys_.beta() / (sys_.beta() - 1.0)) / n_;
  // Full words concatenate freely, so (1/n) log Σ_full inf e^{S_n φ} bounds P from below.
  const double delta = std::fabs(a) * p_.lipschitz() * lipschitz_spread(sys_, n_);
  e.lower = (log_sum(a, b, true) - delta) / n_;
  e.lower = std::min(e.lower, e.value);
  e.potential_id = p_.describe();
  if (a != 1.0 || b != 0.0) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g*(%s)+%.17g", a, e.potential_id.c_str(), b);
    e.potential_id = buf;
  }
  return e;
}

double log_partition_sum(const BetaSystem& sys, const Potential& p, int n, SumMode mode, double budget) {
  ErgodicSpectrum spec(sys, p, n, budget);
  return mode == SumMode::LeftEndpoint ? spec.log_sum(1.0, 0.0) : spec.log_sum_upper(1.0, 0.0);
}

double partition_sum(const BetaSystem& sys, const Potential& p, int n, SumMode mode, double budget) {
  return std::exp(log_partition_sum(sys, p, n, mode, budget));
}

PressureEstimate pressure_estimate(const BetaSystem& sys, const Potential& p, int n, double budget) {
  return ErgodicSpectrum(sys, p, n, budget).estimate();
}

int default_pressure_n(const BetaSystem& sys, double budget) {
  int n = 1;
  while (n < 10000 && predicted_count(sys, n + 1) <= budget) ++n;
  return n;
}

PhiEvaluator::PhiEvaluator(const TargetSpec& spec, int n, double budget)
    : f_(spec.sys, spec.f, n, budget),
      g_(spec.sys, spec.g, n, budget),
      minus_g_(g_.estimate(-1.0, 0.0)),
      log_beta_(spec.sys.log_beta()) {}

Bracketed PhiEvaluator::phi1(double s) const {
  PressureEstimate a = f_.estimate(1.0 - s, -s * log_beta_);
  return {a.value + minus_g_.value, a.lower + minus_g_.lower, a.upper + minus_g_.upper};
}

Bracketed PhiEvaluator::phi2(double s) const {
  PressureEstimate a = g_.estimate(-s, -s * log_beta_);
  return {a.value + log_beta_, a.lower + log_beta_, a.upper + log_beta_};
}

Bracketed phi1(const TargetSpec& spec, double s, int n) { return PhiEvaluator(spec, n).phi1(s); }
Bracketed phi2(const TargetSpec& spec, double s, int n) { return PhiEvaluator(spec, n).phi2(s); }

}  // namespace betadim

#include "betadim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "betadim/errors.hpp"
#include "betadim/parallel.hpp"

namespace betadim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

int resolve_n(const TargetSpec& spec, int n) { return n > 0 ? n : default_pressure_n(spec.sys, 1e7); }

// Root of a decreasing bracketed function φ, located by bisection on the
// midpoint and widened by the bracket half-widths divided by the slope bound.
RootBracket solve_root(const std::function<Bracketed(double)>& phi, double kappa, double s_hi, double tol,
                       const char* name) {
  if (!(kappa > 0.0)) throw HypothesisViolation(std::string(name) + ": slope bound log(beta) + inf potential must be > 0");
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be > 0");
  RootBracket r;
  r.slope_bound = kappa;
  Bracketed at0 = phi(0.0);
  if (at0.value <= 0.0) {
    r.at_zero = true;
    r.bisection = {0.0, 0.0};
    r.bracket = {0.0, (at0.upper - at0.value) / kappa};
    return r;
  }
  Bracketed top = phi(s_hi);
  for (int grow = 0; top.value > 0.0 && grow < 8; ++grow) {
    s_hi *= 2.0;
    top = phi(s_hi);
  }
  if (top.value > 0.0) {
    throw NonBracketingError(std::string(name) + ": no sign change, midpoint still positive at the upper end s = " +
                             std::to_string(s_hi));
  }
  double lo = 0.0, hi = s_hi;
  Bracketed phi_lo = at0, phi_hi = top;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    Bracketed v = phi(mid);
    if (v.value > 0.0) {
      lo = mid;
      phi_lo = v;
    } else {
      hi = mid;
      phi_hi = v;
    }
    ++r.iterations;
    if (r.iterations > 200) throw NoConvergence(std::string(name) + ": bisection did not converge");
  }
  r.bisection = {lo, hi};
  r.bracket = {std::max(0.0, lo - (phi_lo.value - phi_lo.lower) / kappa), hi + (phi_hi.upper - phi_hi.value) / kappa};
  return r;
}

}  // namespace

RootBracket solve_s1_detail(const PhiEvaluator& phi, const TargetSpec& spec, double tol) {
  const double lb = spec.sys.log_beta();
  const double kappa = lb + spec.f.min_value();
  // φ1(s) <= 2 log β + min f - min g - s κ for s >= 1
  double s_hi = std::max(2.0 + 4.0 / kappa, (2.0 * lb + spec.f.max_value() - spec.g.min_value()) / kappa + 1.0);
  return solve_root([&](double s) { return phi.phi1(s); }, kappa, s_hi, tol, "s1");
}

RootBracket solve_s2_detail(const PhiEvaluator& phi, const TargetSpec& spec, double tol) {
  const double kappa = spec.sys.log_beta() + spec.g.min_value();
  double s_hi = 2.0 + 4.0 / kappa;
  return solve_root([&](double s) { return phi.phi2(s); }, kappa, s_hi, tol, "s2");
}

Interval solve_s1(const TargetSpec& spec, int n, double tol) {
  spec.validate();
  PhiEvaluator phi(spec, resolve_n(spec, n));
  return solve_s1_detail(phi, spec, tol).bracket;
}

Interval solve_s2(const TargetSpec& spec, int n, double tol) {
  spec.validate();
  PhiEvaluator phi(spec, resolve_n(spec, n));
  return solve_s2_detail(phi, spec, tol).bracket;
}

DimensionResult dimension(const TargetSpec& spec, int n, double tol) {
  spec.validate();
  DimensionResult d;
  d.n_used = resolve_n(spec, n);
  PhiEvaluator phi(spec, d.n_used);
  d.s1_detail = solve_s1_detail(phi, spec, tol);
  d.s2_detail = solve_s2_detail(phi, spec, tol);
  d.s1 = d.s1_detail.bracket;
  d.s2 = d.s2_detail.bracket;
  d.s0 = elementwise_min(d.s1, d.s2);
  d.s0.lo = std::clamp(d.s0.lo, 0.0, 2.0);
  d.s0.hi = std::clamp(d.s0.hi, 0.0, 2.0);
  d.iterations = d.s1_detail.iterations + d.s2_detail.iterations;
  return d;
}

SeriesTerms::SeriesTerms(const TargetSpec& spec, int n, double budget)
    : n_(n), log_beta_(spec.sys.log_beta()), f_(spec.sys, spec.f, n, budget), g_(spec.sys, spec.g, n, budget) {}

double SeriesTerms::log_term1(double s) const {
  // Σ_{U,W} e^{F_U - G_W} (β^n e^{F_U})^{-s} factorizes over U and W
  return f_.log_sum(1.0 - s, -s * log_beta_) + g_.log_sum(-1.0, 0.0);
}

double SeriesTerms::log_term2(double s) const {
  return std::log(f_.words()) + g_.log_sum(-s, -s * log_beta_);
}

double SeriesTerms::log_term_min(double s) const {
  // term1 <= term2 exactly when (1-s)(F_U - G_W) <= 0, so for each W the U's
  // split at G_W in the sorted order of F.
  const auto& F = f_.values();
  const auto& Fc = f_.counts();
  const std::size_t N = F.size();
  const bool below_one = s <= 1.0;
  std::vector<double> cum(N + 1, kNegInf), words(N + 1, 0.0);
  for (std::size_t i = 0; i < N; ++i) words[i + 1] = words[i] + Fc[i];
  if (below_one) {
    for (std::size_t i = 0; i < N; ++i) cum[i + 1] = log_add(cum[i], (1.0 - s) * F[i] + std::log(Fc[i]));
  } else {
    for (std::size_t i = N; i-- > 0;) cum[i] = log_add(cum[i + 1], (1.0 - s) * F[i] + std::log(Fc[i]));
  }
  const auto& G = g_.values();
  const auto& Gc = g_.counts();
  std::vector<double> contrib(G.size());
  const std::size_t chunk = 4096;
  const double base = -s * n_ * log_beta_;
  parallel_for((G.size() + chunk - 1) / chunk, [&](std::size_t c) {
    std::size_t end = std::min(G.size(), (c + 1) * chunk);
    for (std::size_t w = c * chunk; w < end; ++w) {
      double gw = G[w];
      double rest;
      std::size_t k;
      if (below_one) {
        k = std::upper_bound(F.begin(), F.end(), gw) - F.begin();
        rest = words[N] - words[k];
      } else {
        k = std::lower_bound(F.begin(), F.end(), gw) - F.begin();
        rest = words[k];
      }
      double t1 = cum[k] - gw + base;
      double t2 = rest > 0 ? std::log(rest) + base - s * gw : kNegInf;
      contrib[w] = std::log(Gc[w]) + log_add(t1, t2);
    }
  });
  return log_sum_exp(contrib);
}

std::vector<SeriesRow> series_partial_sums(const TargetSpec& spec, double s, int n_lo, int n_hi, double budget) {
  if (n_lo < 1 || n_hi < n_lo) throw InvalidArgument("series: need 1 <= n_lo <= n_hi");
  if (!(s >= 0.0)) throw InvalidArgument("series: s must be >= 0");
  std::vector<SeriesRow> rows;
  double p1 = kNegInf, p2 = kNegInf, pm = kNegInf;
  for (int n = n_lo; n <= n_hi; ++n) {
    SeriesTerms terms(spec, n, budget);
    SeriesRow r;
    r.n = n;
    r.log_term1 = terms.log_term1(s);
    r.log_term2 = terms.log_term2(s);
    r.log_term_min = terms.log_term_min(s);
    p1 = log_add(p1, r.log_term1);
    p2 = log_add(p2, r.log_term2);
    pm = log_add(pm, r.log_term_min);
    r.log_partial1 = p1;
    r.log_partial2 = p2;
    r.log_partial_min = pm;
    r.log_ratio_min = rows.empty() ? std::nan("") : r.log_term_min - rows.back().log_term_min;
    rows.push_back(r);
  }
  return rows;
}

namespace {

// Crossing of a decreasing function through 0 on [0, s_hi], by bisection.
double crossing(const std::function<double(double)>& h, double s_hi, double tol) {
  if (h(0.0) <= 0.0) return 0.0;
  for (int grow = 0; h(s_hi) > 0.0; ++grow) {
    if (grow > 8) throw NonBracketingError("s0' probe: growth still above 1 at s = " + std::to_string(s_hi));
    s_hi *= 2.0;
  }
  double lo = 0.0, hi = s_hi;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Interval s0_prime_probe(const TargetSpec& spec, int n, double tol) {
  spec.validate();
  n = resolve_n(spec, n);
  if (n < 2) throw InvalidArgument("s0' probe needs n >= 2");
  SeriesTerms now(spec, n), before(spec, n - 1);
  const double kappa = spec.sys.log_beta() + std::min(spec.f.min_value(), spec.g.min_value());
  double s_hi = 2.0 + 4.0 / kappa;
  double ratio = crossing([&](double s) { return now.log_term_min(s) - before.log_term_min(s); }, s_hi, tol);
  double root = crossing([&](double s) { return now.log_term_min(s) / n; }, s_hi, tol);
  return {std::max(0.0, std::min(ratio, root) - tol), std::max(ratio, root) + tol};
}

}  // namespace betadim

#include "betadim/beta_system.hpp"

#include <cmath>
#include <cstdlib>
#include <mutex>
#include <string>

#include "betadim/diagnostics.hpp"
#include "betadim/errors.hpp"

namespace betadim {

const char* to_string(ParryKind kind) {
  return kind == ParryKind::SimpleParry ? "SimpleParry" : "NonSimple";
}

std::pair<int, double> greedy_step(double beta, double t, int max_digit, double snap, bool clamp) {
  double y = beta * t;
  double d = std::floor(y);
  double frac = y - d;
  if (frac > 1.0 - snap) {
    d += 1.0;
    frac = 0.0;
  } else if (frac < snap) {
    frac = 0.0;
  }
  int digit = static_cast<int>(d);
  if (clamp && digit > max_digit) {
    digit = max_digit;
    frac = std::min(y - digit, std::nextafter(1.0, 0.0));
  }
  return {digit, frac};
}

struct BetaSystem::Lazy {
  std::mutex mutex;
  Word digits;     // ε*_1 .. ε*_k computed so far (NonSimple only)
  double tail = 0;  // T^k 1
  bool warned = false;
};

namespace {

int compute_cap(double log_beta) {
  double cap = (52.0 * std::log(2.0) - std::log(1000.0)) / log_beta;
  if (cap > 1e6) return 1000000;
  return std::max(1, static_cast<int>(std::floor(cap)));
}

}  // namespace

BetaSystem::BetaSystem(double beta, ArithmeticOptions opts)
    : beta_(beta), opts_(opts), lazy_(std::make_shared<Lazy>()) {
  if (!std::isfinite(beta) || !(beta > 1.0)) {
    throw DomainError("beta must be a finite real > 1, got " + std::to_string(beta));
  }
  if (beta >= 256.0) throw DomainError("beta must be < 256 so digits fit in a byte");
  log_beta_ = std::log(beta);
  double fl = std::floor(beta);
  max_digit_ = (fl == beta) ? static_cast<int>(fl) - 1 : static_cast<int>(fl);
  precision_cap_ = compute_cap(log_beta_);
  label_ = std::to_string(beta);

  // Iterate T on 1 until the tail snaps to zero or the cap is reached.
  Word raw;
  double t = 1.0;
  kind_ = ParryKind::NonSimple;
  for (int i = 0; i < precision_cap_; ++i) {
    auto [d, tail] = greedy_step(beta_, t, max_digit_, opts_.snap_tolerance, false);
    raw.push_back(static_cast<Digit>(d));
    t = tail;
    if (t == 0.0) {
      kind_ = ParryKind::SimpleParry;
      break;
    }
  }
  if (kind_ == ParryKind::SimpleParry) {
    raw_ = raw;
  } else {
    lazy_->digits = std::move(raw);
    lazy_->tail = t;
  }
}

BetaSystem BetaSystem::parse(std::string_view text, ArithmeticOptions opts) {
  std::string s(text);
  if (s == "golden" || s == "phi") {
    BetaSystem sys((1.0 + std::sqrt(5.0)) / 2.0, opts);
    sys.label_ = "golden";
    return sys;
  }
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw InvalidArgument("cannot parse beta '" + s + "' (expected 'golden', an integer or a decimal)");
  }
  BetaSystem sys(v, opts);
  sys.label_ = s;
  return sys;
}

void BetaSystem::check_depth(std::size_t depth, const char* what) const {
  if (depth <= static_cast<std::size_t>(precision_cap_)) return;
  std::string msg = std::string(what) + ": depth " + std::to_string(depth) +
                    " exceeds precision cap " + std::to_string(precision_cap_) +
                    " for beta=" + label_;
  if (opts_.strict) throw PrecisionError(msg);
  std::lock_guard<std::mutex> lock(lazy_->mutex);
  if (!lazy_->warned) {
    lazy_->warned = true;
    warn(msg + "; digits past the cap are unreliable");
  }
}

int BetaSystem::one_digit(std::size_t i) const {
  if (i == 0) throw InvalidArgument("one_digit index is 1-based");
  if (kind_ == ParryKind::SimpleParry) {
    std::size_t m = raw_.size();
    std::size_t r = (i - 1) % m;
    return r + 1 == m ? raw_[r] - 1 : raw_[r];
  }
  std::lock_guard<std::mutex> lock(lazy_->mutex);
  while (lazy_->digits.size() < i) {
    auto [d, tail] = greedy_step(beta_, lazy_->tail, max_digit_, opts_.snap_tolerance, true);
    lazy_->digits.push_back(static_cast<Digit>(d));
    lazy_->tail = tail;
  }
  return lazy_->digits[i - 1];
}

Word BetaSystem::one_expansion(std::size_t n) const {
  Word out(n);
  if (kind_ == ParryKind::NonSimple && n > 0) one_digit(n);  // extend once under the lock
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<Digit>(one_digit(i + 1));
  return out;
}

double t_map(const BetaSystem& sys, double x) {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("t_map: x must lie in [0,1), got " + std::to_string(x));
  return greedy_step(sys.beta(), x, sys.max_digit(), sys.options().snap_tolerance, true).second;
}

DigitOrbit expand(const BetaSystem& sys, double x, int n) {
  if (n < 1) throw InvalidArgument("expand: n must be >= 1");
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("expand: x must lie in [0,1), got " + std::to_string(x));
  sys.check_depth(static_cast<std::size_t>(n), "expand");
  DigitOrbit orbit;
  orbit.digits.reserve(n);
  double t = x;
  for (int i = 0; i < n; ++i) {
    auto [d, tail] = greedy_step(sys.beta(), t, sys.max_digit(), sys.options().snap_tolerance, true);
    orbit.digits.push_back(static_cast<Digit>(d));
    t = tail;
  }
  orbit.tail = t;
  orbit.reliable_upto = std::min(n, sys.precision_cap());
  return orbit;
}

std::pair<Word, ParryKind> expansion_of_one(double beta, int n, ArithmeticOptions opts) {
  if (n < 1) throw InvalidArgument("expansion_of_one: n must be >= 1");
  BetaSystem sys(beta, opts);
  if (sys.parry_kind() == ParryKind::NonSimple) sys.check_depth(n, "expansion_of_one");
  return {sys.one_expansion(n), sys.parry_kind()};
}

double beta_n_approx(const BetaSystem& sys, int N) {
  if (N < 1) throw InvalidArgument("beta_n_approx: N must be >= 1");
  Word eps = sys.one_expansion(N);
  if (eps[N - 1] == 0) {
    throw InvalidArgument("beta_n_approx: invalid N=" + std::to_string(N) + " (digit " +
                          std::to_string(N) + " of the expansion of 1 is 0)");
  }
  int digit_sum = 0;
  for (Digit d : eps) digit_sum += d;
  if (digit_sum == 1) {
    throw InvalidArgument("beta_n_approx: N=" + std::to_string(N) + " gives the trivial base 1");
  }
  auto h = [&](double x) {
    double s = 0.0;
    for (int i = N; i >= 1; --i) s = (s + eps[i - 1]) / x;
    return s - 1.0;
  };
  double lo = 1.0, hi = sys.beta();
  if (h(hi) >= 0.0) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  if (hi - lo > 1e-12) throw NoConvergence("beta_n_approx: bisection did not converge");
  return 0.5 * (lo + hi);
}

}  // namespace betadim

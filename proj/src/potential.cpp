#include "betadim/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "betadim/errors.hpp"
#include "betadim/symbolic.hpp"

namespace betadim {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& s, const std::string& context) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw InvalidArgument("bad number '" + s + "' in potential '" + context + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, sep)) out.push_back(tok);
  return out;
}

}  // namespace

Potential Potential::constant(double c) {
  if (!std::isfinite(c)) throw InvalidArgument("constant potential must be finite");
  Potential p;
  p.kind_ = Kind::Constant;
  p.coeffs_ = {c};
  p.finish();
  return p;
}

Potential Potential::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw InvalidArgument("polynomial potential needs at least one coefficient");
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw InvalidArgument("polynomial coefficients must be finite");
  }
  Potential p;
  p.kind_ = Kind::Polynomial;
  p.coeffs_ = std::move(coeffs);
  p.finish();
  return p;
}

Potential Potential::piecewise_linear(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw InvalidArgument("piecewise-linear potential needs at least two knots");
  if (knots.front().first != 0.0 || knots.back().first != 1.0) {
    throw InvalidArgument("piecewise-linear knots must start at x=0 and end at x=1");
  }
  Potential p;
  p.kind_ = Kind::PiecewiseLinear;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (i && !(knots[i].first > knots[i - 1].first)) {
      throw InvalidArgument("piecewise-linear knots must have strictly increasing x");
    }
    if (!std::isfinite(knots[i].second)) throw InvalidArgument("piecewise-linear values must be finite");
    p.xs_.push_back(knots[i].first);
    p.ys_.push_back(knots[i].second);
  }
  p.finish();
  return p;
}

Potential Potential::parse(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) return constant(parse_number(text, text));
  std::string kind = text.substr(0, colon), body = text.substr(colon + 1);
  if (kind == "const") return constant(parse_number(body, text));
  if (kind == "poly") {
    std::vector<double> c;
    for (auto& t : split(body, ',')) c.push_back(parse_number(t, text));
    return polynomial(std::move(c));
  }
  if (kind == "pwl") {
    std::vector<std::pair<double, double>> knots;
    for (auto& t : split(body, ',')) {
      auto parts = split(t, ':');
      if (parts.size() != 2) throw InvalidArgument("piecewise knot must be x:y in '" + text + "'");
      knots.emplace_back(parse_number(parts[0], text), parse_number(parts[1], text));
    }
    return piecewise_linear(std::move(knots));
  }
  throw InvalidArgument("unknown potential kind '" + kind + "' (expected const, poly or pwl)");
}

void Potential::finish() {
  switch (kind_) {
    case Kind::Constant:
      lipschitz_ = 0.0;
      min_ = max_ = coeffs_[0];
      break;
    case Kind::Polynomial: {
      lipschitz_ = 0.0;
      for (std::size_t k = 1; k < coeffs_.size(); ++k) lipschitz_ += k * std::fabs(coeffs_[k]);
      if (coeffs_.size() <= 2) {
        double a = eval_unchecked(0.0), b = eval_unchecked(1.0);
        min_ = std::min(a, b);
        max_ = std::max(a, b);
      } else {
        // grid scan; every x is within h/2 of a grid point
        const int steps = 10000;
        const double h = 1.0 / steps;
        min_ = max_ = eval_unchecked(0.0);
        for (int i = 1; i <= steps; ++i) {
          double v = eval_unchecked(i * h);
          min_ = std::min(min_, v);
          max_ = std::max(max_, v);
        }
        min_ -= lipschitz_ * h / 2;
        max_ += lipschitz_ * h / 2;
      }
      break;
    }
    case Kind::PiecewiseLinear:
      lipschitz_ = 0.0;
      for (std::size_t i = 1; i < xs_.size(); ++i) {
        lipschitz_ = std::max(lipschitz_, std::fabs((ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1])));
      }
      min_ = *std::min_element(ys_.begin(), ys_.end());
      max_ = *std::max_element(ys_.begin(), ys_.end());
      break;
  }
}

double Potential::eval_unchecked(double x) const {
  switch (kind_) {
    case Kind::Constant:
      return coeffs_[0];
    case Kind::Polynomial: {
      double v = 0.0;
      for (std::size_t k = coeffs_.size(); k-- > 0;) v = v * x + coeffs_[k];
      return v;
    }
    case Kind::PiecewiseLinear: {
      auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      std::size_t i = it == xs_.begin() ? 1 : static_cast<std::size_t>(it - xs_.begin());
      if (i >= xs_.size()) i = xs_.size() - 1;
      double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
      return ys_[i - 1] + t * (ys_[i] - ys_[i - 1]);
    }
  }
  return 0.0;
}

double Potential::operator()(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("potential evaluated outside [0,1]: x = " + num(x));
  return eval_unchecked(x);
}

double Potential::sup_norm() const { return std::max(std::fabs(min_), std::fabs(max_)); }

Potential Potential::affine(double scale, double shift) const {
  switch (kind_) {
    case Kind::Constant:
      return constant(scale * coeffs_[0] + shift);
    case Kind::Polynomial: {
      std::vector<double> c = coeffs_;
      for (double& v : c) v *= scale;
      c[0] += shift;
      return polynomial(std::move(c));
    }
    case Kind::PiecewiseLinear: {
      std::vector<std::pair<double, double>> k;
      for (std::size_t i = 0; i < xs_.size(); ++i) k.emplace_back(xs_[i], scale * ys_[i] + shift);
      return piecewise_linear(std::move(k));
    }
  }
  return *this;
}

std::string Potential::describe() const {
  std::string out;
  switch (kind_) {
    case Kind::Constant:
      return "const:" + num(coeffs_[0]);
    case Kind::Polynomial:
      out = "poly:";
      for (std::size_t i = 0; i < coeffs_.size(); ++i) out += (i ? "," : "") + num(coeffs_[i]);
      return out;
    case Kind::PiecewiseLinear:
      out = "pwl:";
      for (std::size_t i = 0; i < xs_.size(); ++i) out += (i ? "," : "") + num(xs_[i]) + ":" + num(ys_[i]);
      return out;
  }
  return out;
}

void TargetSpec::validate() const {
  if (!(x0 > 0.0 && x0 <= 1.0)) throw DomainError("x0 must lie in (0,1], got " + num(x0));
  if (!(y0 > 0.0 && y0 <= 1.0)) throw DomainError("y0 must lie in (0,1], got " + num(y0));
  if (f.min_value() < g.max_value()) {
    throw HypothesisViolation("hypothesis f(x) >= g(y) fails: min f = " + num(f.min_value()) +
                              " < max g = " + num(g.max_value()));
  }
  if (!(sys.log_beta() + g.min_value() > 0.0)) {
    throw HypothesisViolation("hypothesis log(beta) + g > 0 fails: min g = " + num(g.min_value()));
  }
}

bool TargetSpec::strengthened_gap_holds(double epsilon) const {
  return f.min_value() >= (1.0 + epsilon) * g.max_value();
}

double ergodic_sum(const BetaSystem& sys, const Potential& p, double x, int n) {
  if (n < 0) throw InvalidArgument("ergodic_sum: n must be >= 0");
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("ergodic_sum: x must lie in [0,1), got " + num(x));
  sys.check_depth(n, "ergodic_sum");
  double s = 0.0, t = x;
  for (int j = 0; j < n; ++j) {
    s += p.eval_unchecked(t);
    if (j + 1 < n) t = t_map(sys, t);
  }
  return s;
}

double ergodic_sum_of_word(const BetaSystem& sys, const Potential& p, const Word& w) {
  double s = 0.0, L = 0.0;
  for (std::size_t i = w.size(); i-- > 0;) {
    L = (w[i] + L) / sys.beta();
    s += p.eval_unchecked(L);
  }
  return s;
}

double lipschitz_spread(const BetaSystem& sys, int n) {
  // Σ_{j<n} β^{j-n} = (1 - β^{-n}) / (β - 1)
  return (1.0 - std::pow(sys.beta(), -n)) / (sys.beta() - 1.0);
}

Interval ergodic_sum_bounds(const BetaSystem& sys, const Potential& p, const Word& w) {
  if (!is_admissible(sys, w)) throw InvalidArgument("inadmissible word " + format_word(w));
  const int n = static_cast<int>(w.size());
  double center = ergodic_sum_of_word(sys, p, w);
  double delta = p.lipschitz() * lipschitz_spread(sys, n);
  return {std::max(center - delta, n * p.min_value()), std::min(center + delta, n * p.max_value())};
}

}  // namespace betadim

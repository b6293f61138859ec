#pragma once

#include <string>
#include <utility>
#include <vector>

#include "betadim/beta_system.hpp"
#include "betadim/interval.hpp"

namespace betadim {

class Potential {
 public:
  enum class Kind { Constant, Polynomial, PiecewiseLinear };

  static Potential constant(double c);
  // c0 + c1 x + c2 x² + ...
  static Potential polynomial(std::vector<double> coeffs);
  // Knots (x, y) with strictly increasing x from 0 to 1.
  static Potential piecewise_linear(std::vector<std::pair<double, double>> knots);
  // "const:0.7", "poly:0.5,1", "pwl:0:1,1:2", or a bare number.
  static Potential parse(const std::string& text);

  Kind kind() const { return kind_; }
  double operator()(double x) const;
  double eval_unchecked(double x) const;

  double lipschitz() const { return lipschitz_; }
  double min_value() const { return min_; }
  double max_value() const { return max_; }
  double sup_norm() const;

  // scale·p + shift
  Potential affine(double scale, double shift) const;
  std::string describe() const;

 private:
  Potential() = default;
  void finish();

  Kind kind_ = Kind::Constant;
  std::vector<double> coeffs_;
  std::vector<double> xs_, ys_;
  double lipschitz_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
};

struct TargetSpec {
  BetaSystem sys;
  Potential f;
  Potential g;
  double x0 = 0.5;
  double y0 = 0.5;

  // x0, y0 in (0,1]; f >= g everywhere; log β + g > 0.
  void validate() const;
  // min f >= (1+ε) max g
  bool strengthened_gap_holds(double epsilon) const;
};

double ergodic_sum(const BetaSystem& sys, const Potential& p, double x, int n);
// S_n p at the left endpoint of I_n(w), using left(σ^j w) in place of T^j(left(w)).
double ergodic_sum_of_word(const BetaSystem& sys, const Potential& p, const Word& w);
Interval ergodic_sum_bounds(const BetaSystem& sys, const Potential& p, const Word& w);
// Σ_{j<n} β^{j-n}
double lipschitz_spread(const BetaSystem& sys, int n);

}  // namespace betadim

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace betadim {

using Digit = std::uint8_t;
using Word = std::vector<Digit>;

enum class ParryKind { SimpleParry, NonSimple };

const char* to_string(ParryKind kind);

struct ArithmeticOptions {
  // |βt - k| below this counts as landing on the integer k.
  double snap_tolerance = 1e-14;
  // Past precision_cap: throw PrecisionError instead of warning.
  bool strict = false;
};

struct DigitOrbit {
  Word digits;
  double tail = 0.0;  // T^n x
  int reliable_upto = 0;
};

// One greedy step t -> (⌊βt⌋, βt - ⌊βt⌋) with integer snapping. With clamp
// set the digit is capped at max_digit (orbits of points in [0,1)); the
// expansion of 1 itself passes clamp = false.
std::pair<int, double> greedy_step(double beta, double t, int max_digit, double snap, bool clamp);

class BetaSystem {
 public:
  explicit BetaSystem(double beta, ArithmeticOptions opts = {});

  // "golden", an integer or a decimal literal.
  static BetaSystem parse(std::string_view text, ArithmeticOptions opts = {});

  double beta() const { return beta_; }
  double log_beta() const { return log_beta_; }
  int max_digit() const { return max_digit_; }
  int precision_cap() const { return precision_cap_; }
  ParryKind parry_kind() const { return kind_; }
  const ArithmeticOptions& options() const { return opts_; }
  const std::string& label() const { return label_; }

  // Raw finite expansion of 1 for simple Parry numbers (empty otherwise).
  const Word& raw_expansion() const { return raw_; }
  // Period of ε* for simple Parry numbers, 0 otherwise.
  int period() const { return kind_ == ParryKind::SimpleParry ? static_cast<int>(raw_.size()) : 0; }

  // ε*_i, 1-based.
  int one_digit(std::size_t i) const;
  // ε*_1 .. ε*_n.
  Word one_expansion(std::size_t n) const;

  // Handles a request for `depth` digits of anything: warns or throws past
  // the cap. `what` names the caller in the message.
  void check_depth(std::size_t depth, const char* what) const;

 private:
  struct Lazy;

  double beta_;
  double log_beta_;
  int max_digit_;
  int precision_cap_;
  ParryKind kind_;
  ArithmeticOptions opts_;
  std::string label_;
  Word raw_;
  std::shared_ptr<Lazy> lazy_;  // NonSimple digits beyond the detection window
};

double t_map(const BetaSystem& sys, double x);
DigitOrbit expand(const BetaSystem& sys, double x, int n);
std::pair<Word, ParryKind> expansion_of_one(double beta, int n, ArithmeticOptions opts = {});
double beta_n_approx(const BetaSystem& sys, int N);

}  // namespace betadim

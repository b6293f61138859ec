#include "betadim/symbolic.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "betadim/errors.hpp"

namespace betadim {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t c = a + b;
  return c < a ? UINT64_MAX : c;
}

std::vector<int> states_along(const FollowerAutomaton& a, const Word& w) {
  std::vector<int> s(w.size() + 1, 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    s[i + 1] = a.next(s[i], w[i]);
    if (s[i + 1] < 0) throw InvalidArgument("inadmissible word " + format_word(w));
  }
  return s;
}

}  // namespace

FollowerAutomaton::FollowerAutomaton(const BetaSystem& sys, int depth) : depth_(depth) {
  if (sys.parry_kind() == ParryKind::SimpleParry) {
    wrap_ = sys.period();
    eps_ = sys.one_expansion(wrap_);
  } else {
    sys.check_depth(depth, "admissibility automaton");
    eps_ = sys.one_expansion(std::max(depth, 1));
  }
}

int FollowerAutomaton::run(const Word& w) const {
  int s = 0;
  for (Digit d : w) {
    if (!wrap_ && s >= static_cast<int>(eps_.size())) {
      throw InternalError("automaton depth too small for word of length " + std::to_string(w.size()));
    }
    s = next(s, d);
    if (s < 0) return -1;
  }
  return s;
}

std::string WordFilter::describe() const {
  std::string out = full_only ? "full" : "all";
  if (zero_suffix > 0) out += "+zeros:" + std::to_string(zero_suffix);
  return out;
}

WordCounter::WordCounter(const BetaSystem& sys, int n, WordFilter filter)
    : automaton_(sys, n), n_(n), filter_(filter) {
  if (n < 0) throw InvalidArgument("word length must be >= 0");
  if (filter.zero_suffix < 0) throw InvalidArgument("zero block length must be >= 0");
  states_ = automaton_.num_states();
  zslots_ = filter.zero_suffix + 1;
  const bool periodic = sys.parry_kind() == ParryKind::SimpleParry;
  std::size_t size = static_cast<std::size_t>(n + 1) * states_ * zslots_;
  approx_.assign(size, 0.0L);
  exact_.assign(size, 0);
  for (int j = 0; j < states_; ++j) {
    if (filter.full_only && j != 0) continue;
    approx_[index(0, j, filter.zero_suffix)] = 1.0L;
    exact_[index(0, j, filter.zero_suffix)] = 1;
  }
  for (int r = 1; r <= n; ++r) {
    for (int j = 0; j < states_; ++j) {
      if (!periodic && j + r > n) continue;  // unreachable, and past the materialized ε*
      for (int z = 0; z < zslots_; ++z) {
        long double a = 0.0L;
        std::uint64_t e = 0;
        for (int d = 0; d <= automaton_.limit(j); ++d) {
          int j2 = automaton_.next(j, d);
          std::size_t k = index(r - 1, j2, bump_zeros(z, d));
          a += approx_[k];
          e = sat_add(e, exact_[k]);
        }
        approx_[index(r, j, z)] = a;
        exact_[index(r, j, z)] = e;
      }
    }
  }
}

long double WordCounter::completions(int remaining, int state, int zeros) const {
  return approx_[index(remaining, state, zeros)];
}

std::uint64_t WordCounter::exact_completions(int remaining, int state, int zeros) const {
  return exact_[index(remaining, state, zeros)];
}

std::uint64_t WordCounter::exact_total() const {
  std::uint64_t t = exact_completions(n_, 0, 0);
  if (t == UINT64_MAX) {
    throw InvalidArgument("word count for n=" + std::to_string(n_) + " exceeds the 64-bit range");
  }
  return t;
}

bool is_admissible(const BetaSystem& sys, const Word& w) {
  for (Digit d : w) {
    if (d > sys.max_digit()) return false;
  }
  FollowerAutomaton a(sys, static_cast<int>(w.size()));
  return a.run(w) >= 0;
}

namespace {

void dfs(const WordCounter& c, Word& w, int pos, int state, int zeros,
         const std::function<void(const Word&, int)>& visit) {
  const int n = c.length();
  if (pos == n) {
    visit(w, state);
    return;
  }
  const auto& a = c.automaton();
  for (int d = 0; d <= a.limit(state); ++d) {
    int s2 = a.next(state, d);
    int z2 = c.bump_zeros(zeros, d);
    if (c.completions(n - pos - 1, s2, z2) <= 0.0L) continue;
    w[pos] = static_cast<Digit>(d);
    dfs(c, w, pos + 1, s2, z2, visit);
  }
}

}  // namespace

void for_each_completion(const WordCounter& counter, const Word& prefix,
                         const std::function<void(const Word&, int)>& visit) {
  const int n = counter.length();
  if (static_cast<int>(prefix.size()) > n) throw InvalidArgument("prefix longer than the word length");
  int state = 0, zeros = 0;
  for (Digit d : prefix) {
    state = counter.automaton().next(state, d);
    if (state < 0) throw InvalidArgument("inadmissible prefix " + format_word(prefix));
    zeros = counter.bump_zeros(zeros, d);
  }
  Word w(n, 0);
  std::copy(prefix.begin(), prefix.end(), w.begin());
  if (counter.completions(n - static_cast<int>(prefix.size()), state, zeros) <= 0.0L) return;
  dfs(counter, w, static_cast<int>(prefix.size()), state, zeros, visit);
}

double renyi_upper(const BetaSystem& sys, int n) {
  return std::pow(sys.beta(), n + 1) / (sys.beta() - 1.0);
}

double predicted_count(const BetaSystem& sys, int n, WordFilter filter) {
  return static_cast<double>(WordCounter(sys, n, filter).total());
}

void for_each_word(const BetaSystem& sys, int n, WordFilter filter,
                   const std::function<void(const Word&, int)>& visit, double budget) {
  if (n < 1) throw InvalidArgument("word length n must be >= 1");
  WordCounter counter(sys, n, filter);
  double predicted = static_cast<double>(counter.total());
  if (predicted > budget) {
    throw BudgetExceeded("enumeration of " + std::to_string(predicted) + " words (n=" +
                             std::to_string(n) + ") exceeds budget " + std::to_string(budget),
                         predicted, renyi_upper(sys, n));
  }
  for_each_completion(counter, {}, visit);
}

std::vector<Word> enumerate_words(const BetaSystem& sys, int n, WordFilter filter, double budget) {
  std::vector<Word> out;
  for_each_word(sys, n, filter, [&](const Word& w, int) { out.push_back(w); }, budget);
  return out;
}

std::uint64_t count_words(const BetaSystem& sys, int n) {
  if (n < 0) throw InvalidArgument("word length n must be >= 0");
  return WordCounter(sys, n, WordFilter::all()).exact_total();
}

double left_endpoint(const BetaSystem& sys, const Word& w) {
  double L = 0.0;
  for (std::size_t i = w.size(); i-- > 0;) L = (w[i] + L) / sys.beta();
  return L;
}

std::vector<double> shifted_left_endpoints(const BetaSystem& sys, const Word& w) {
  std::vector<double> L(w.size() + 1, 0.0);
  for (std::size_t i = w.size(); i-- > 0;) L[i] = (w[i] + L[i + 1]) / sys.beta();
  return L;
}

// value(σ^j ε*) = Σ_t ε*_{j+t} β^{-t}, which is T^j(1), or 1 for j = 0.
double shifted_one_value(const BetaSystem& sys, int j) {
  if (j == 0) return 1.0;
  int tail = static_cast<int>(std::ceil(53.0 * std::log(2.0) / sys.log_beta())) + 2;
  double v = 0.0;
  for (int t = j + tail; t > j; --t) v = (sys.one_digit(t) + v) / sys.beta();
  return v;
}

Cylinder cylinder_of(const BetaSystem& sys, const Word& w) {
  const int n = static_cast<int>(w.size());
  for (Digit d : w) {
    if (d > sys.max_digit()) throw InvalidArgument("inadmissible word " + format_word(w));
  }
  FollowerAutomaton a(sys, n);
  std::vector<int> s = states_along(a, w);
  Cylinder c;
  c.word = w;
  c.order = n;
  c.left = left_endpoint(sys, w);
  // The successor differs from w at the last non-maximal digit (position i);
  // the digits after it then spell ε*_1..ε*_{n-i}, so the gap
  // β^{-i}(1 - left(w_{i+1..n})) equals β^{-n}·value(σ^j ε*) with j the final
  // state. Evaluating the right-hand side avoids the cancellation in 1 - left.
  double nominal = std::pow(sys.beta(), -n);
  c.length = nominal * shifted_one_value(sys, s[n]);
  c.full = std::fabs(c.length - nominal) <= 2.0 * n * kEps * nominal;
  return c;
}

bool is_full(const BetaSystem& sys, const Word& w) { return cylinder_of(sys, w).full; }

std::optional<Word> successor_word(const BetaSystem& sys, const Word& w) {
  FollowerAutomaton a(sys, static_cast<int>(w.size()));
  std::vector<int> s = states_along(a, w);
  for (std::size_t i = w.size(); i-- > 0;) {
    if (w[i] < a.limit(s[i])) {
      Word out(w.begin(), w.begin() + i + 1);
      out[i] += 1;
      out.resize(w.size(), 0);
      return out;
    }
  }
  return std::nullopt;
}

std::optional<Word> predecessor_word(const BetaSystem& sys, const Word& w) {
  FollowerAutomaton a(sys, static_cast<int>(w.size()));
  states_along(a, w);
  for (std::size_t i = w.size(); i-- > 0;) {
    if (w[i] == 0) continue;
    Word out(w.begin(), w.begin() + i + 1);
    out[i] -= 1;
    int state = a.run(out);
    while (out.size() < w.size()) {
      int d = a.limit(state);
      out.push_back(static_cast<Digit>(d));
      state = a.next(state, d);
    }
    return out;
  }
  return std::nullopt;
}

Word locate_word(const BetaSystem& sys, double x, int n) {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("locate: x must lie in [0,1), got " + std::to_string(x));
  FollowerAutomaton a(sys, n);
  Word w;
  w.reserve(n);
  int state = 0;
  double left = 0.0, scale = 1.0;
  for (int k = 0; k < n; ++k) {
    scale /= sys.beta();
    int d = a.limit(state);
    while (d > 0 && left + d * scale > x) --d;
    w.push_back(static_cast<Digit>(d));
    left += d * scale;
    state = a.next(state, d);
  }
  return w;
}

std::vector<Cylinder> cover_interval(const BetaSystem& sys, Interval J, int l) {
  if (l < 1) throw InvalidArgument("cover_interval: l must be >= 1");
  double target = std::pow(sys.beta(), -l);
  if (std::fabs(J.width() - target) > 1e-9 * target) {
    throw InvalidArgument("cover_interval: length mismatch, |J| = " + std::to_string(J.width()) +
                          " but beta^-l = " + std::to_string(target));
  }
  if (J.lo < 0.0 || J.hi > 1.0) throw DomainError("cover_interval: J must lie inside [0,1)");
  std::vector<Cylinder> out;
  std::optional<Word> w = locate_word(sys, J.lo, l);
  while (w) {
    Cylinder c = cylinder_of(sys, *w);
    if (c.left >= J.hi) break;
    out.push_back(std::move(c));
    w = successor_word(sys, *w);
  }
  return out;
}

int packing_threshold(const BetaSystem& sys, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0,1)");
  const double lb = sys.log_beta();
  auto g = [&](int n) { return (n - 1) * epsilon * lb - std::log(2.0 * n * n * sys.beta()); };
  // g is increasing once n > 2/(ε log β); past that the first positive value settles it.
  int turn = static_cast<int>(std::ceil(2.0 / (epsilon * lb))) + 1;
  int last_bad = 0;
  for (int n = 1;; ++n) {
    if (g(n) <= 0.0) last_bad = n;
    else if (n > turn) break;
    if (n > 100000000) throw NoConvergence("packing threshold search did not terminate");
  }
  return last_bad + 1;
}

Cylinder find_full_cylinder_in(const BetaSystem& sys, Interval J, double epsilon) {
  const double r = J.width();
  const int n0 = packing_threshold(sys, epsilon);
  const double bound = 2.0 * n0 * std::pow(sys.beta(), -n0);
  if (!(r > 0.0) || !(r < bound)) {
    throw PreconditionError("find_full_cylinder_in: need 0 < |J| < 2 n0 beta^-n0 = " +
                            std::to_string(bound) + " (n0=" + std::to_string(n0) +
                            "), got |J| = " + std::to_string(r));
  }
  if (J.lo < 0.0 || J.hi > 1.0) throw DomainError("find_full_cylinder_in: J must lie inside [0,1]");
  int n = n0;
  while (2.0 * n * std::pow(sys.beta(), -n) > r) ++n;
  const double side = std::pow(sys.beta(), -n);
  if (!(side > std::pow(r, 1.0 + epsilon))) {
    throw InternalError("packing order violates |I| > r^(1+eps)");
  }
  std::optional<Word> w = locate_word(sys, std::min(J.lo, std::nextafter(1.0, 0.0)), n);
  while (w) {
    Cylinder c = cylinder_of(sys, *w);
    if (c.left >= J.hi) break;
    if (c.left >= J.lo && c.left + c.length <= J.hi && c.full) return c;
    w = successor_word(sys, *w);
  }
  throw InternalError("no full cylinder among consecutive cylinders inside J (full-cylinder density failed)");
}

std::string format_word(const Word& w) {
  bool small = true;
  for (Digit d : w) small = small && d <= 9;
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!small && i) os << ',';
    os << static_cast<int>(w[i]);
  }
  return os.str();
}

Word parse_word(const std::string& text) {
  Word w;
  if (text.find(',') != std::string::npos) {
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      int v = std::stoi(tok);
      if (v < 0 || v > 255) throw InvalidArgument("digit out of range in word '" + text + "'");
      w.push_back(static_cast<Digit>(v));
    }
    return w;
  }
  for (char ch : text) {
    if (ch < '0' || ch > '9') throw InvalidArgument("bad digit '" + std::string(1, ch) + "' in word");
    w.push_back(static_cast<Digit>(ch - '0'));
  }
  return w;
}

}  // namespace betadim

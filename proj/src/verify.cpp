#include "betadim/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>

#include "betadim/errors.hpp"
#include "betadim/parallel.hpp"
#include "betadim/pressure.hpp"
#include "betadim/rng.hpp"
#include "betadim/symbolic.hpp"

namespace betadim {

double StageLayer::area() const {
  double wx = 0.0, wy = 0.0;
  for (const Interval& i : x) wx += i.width();
  for (const Interval& i : y) wy += i.width();
  return wx * wy;
}

std::size_t StageSet::rectangles() const {
  std::size_t n = 0;
  for (const StageLayer& l : layers) n += l.rectangles();
  return n;
}

std::size_t StageSet::dropped() const {
  std::size_t n = 0;
  for (const StageLayer& l : layers) n += l.dropped_x + l.dropped_y;
  return n;
}

std::vector<Rect> StageSet::materialize(std::size_t budget) const {
  if (rectangles() > budget) {
    throw BudgetExceeded("materializing " + std::to_string(rectangles()) + " rectangles", static_cast<double>(rectangles()),
                         static_cast<double>(budget));
  }
  std::vector<Rect> out;
  out.reserve(rectangles());
  for (const StageLayer& l : layers)
    for (const Interval& a : l.x)
      for (const Interval& b : l.y) out.push_back({a, b});
  return out;
}

namespace {

std::vector<Interval> hitting_intervals(const BetaSystem& sys, const Potential& p, double target, int n,
                                        std::size_t& dropped) {
  std::vector<Interval> out;
  const double scale = std::pow(sys.beta(), -n);
  for_each_word(sys, n, WordFilter::all(), [&](const Word& w, int state) {
    const double left = left_endpoint(sys, w);
    const double len = scale * shifted_one_value(sys, state);
    const double r = scale * std::exp(-ergodic_sum_of_word(sys, p, w));
    const double c = left + target * scale;
    const double lo = std::max({c - r, left, 0.0});
    const double hi = std::min({c + r, left + len, 1.0});
    if (!(r >= std::numeric_limits<double>::min()) || !(hi > lo)) {
      ++dropped;
      return;
    }
    out.push_back({lo, hi});
  });
  return out;
}

// Cells [first, last] of the 2^k grid met by the open interval (lo, hi).
std::pair<std::uint64_t, std::uint64_t> cell_span(const Interval& i, int k) {
  const double side = std::ldexp(1.0, k);
  const double top = side - 1.0;
  double a = std::clamp(std::floor(i.lo * side), 0.0, top);
  double b = std::clamp(std::ceil(i.hi * side) - 1.0, 0.0, top);
  if (b < a) b = a;
  return {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b)};
}

class Bitmap {
 public:
  explicit Bitmap(int k) : side_(std::uint64_t{1} << k), words_((side_ + 63) / 64), bits_(side_ * words_, 0) {}
  std::uint64_t side() const { return side_; }
  void set_row_span(std::uint64_t row, std::uint64_t a, std::uint64_t b) {
    std::uint64_t* r = &bits_[row * words_];
    for (std::uint64_t j = a; j <= b; ++j) r[j / 64] |= std::uint64_t{1} << (j % 64);
  }
  void or_row(std::uint64_t row, const std::vector<std::uint64_t>& mask) {
    std::uint64_t* r = &bits_[row * words_];
    for (std::size_t w = 0; w < words_; ++w) r[w] |= mask[w];
  }
  std::size_t row_words() const { return words_; }
  std::uint64_t count() const {
    std::uint64_t c = 0;
    for (std::uint64_t w : bits_) c += static_cast<std::uint64_t>(std::popcount(w));
    return c;
  }

 private:
  std::uint64_t side_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

void check_grid(int k) {
  if (k < 0 || k > 14) throw InvalidArgument("grid exponent must lie in [0, 14], got " + std::to_string(k));
}

BoxCount finish(int k, std::uint64_t occupied) {
  BoxCount b;
  b.k = k;
  b.occupied = occupied;
  if (occupied > 0 && k > 0) b.dim_estimate = std::log(static_cast<double>(occupied)) / (k * std::log(2.0));
  return b;
}

}  // namespace

StageSet finite_stage_set(const TargetSpec& spec, int n_lo, int n_hi, double budget) {
  StageSet out;
  if (n_lo > n_hi) return out;
  if (n_lo < 1) throw InvalidArgument("finite_stage_set needs n_lo >= 1");
  const BetaSystem& sys = spec.sys;
  double words = 0.0;
  for (int n = n_lo; n <= n_hi; ++n) words += 2.0 * predicted_count(sys, n);
  if (words > budget) {
    throw BudgetExceeded("finite stage set over n in [" + std::to_string(n_lo) + ", " + std::to_string(n_hi) +
                             "] needs " + std::to_string(words) + " intervals, budget " + std::to_string(budget),
                         words, 2.0 * renyi_upper(sys, n_hi));
  }
  out.layers.resize(n_hi - n_lo + 1);
  parallel_for(out.layers.size(), [&](std::size_t i) {
    StageLayer& l = out.layers[i];
    l.n = n_lo + static_cast<int>(i);
    l.x = hitting_intervals(sys, spec.f, spec.x0, l.n, l.dropped_x);
    l.y = hitting_intervals(sys, spec.g, spec.y0, l.n, l.dropped_y);
  });
  return out;
}

BoxCount box_count(const StageSet& set, int k) {
  check_grid(k);
  Bitmap grid(k);
  for (const StageLayer& l : set.layers) {
    if (l.x.empty() || l.y.empty()) continue;
    std::vector<std::uint64_t> mask(grid.row_words(), 0);
    for (const Interval& y : l.y) {
      auto [a, b] = cell_span(y, k);
      for (std::uint64_t j = a; j <= b; ++j) mask[j / 64] |= std::uint64_t{1} << (j % 64);
    }
    std::vector<bool> rows(grid.side(), false);
    for (const Interval& x : l.x) {
      auto [a, b] = cell_span(x, k);
      for (std::uint64_t r = a; r <= b; ++r) rows[r] = true;
    }
    for (std::uint64_t r = 0; r < grid.side(); ++r)
      if (rows[r]) grid.or_row(r, mask);
  }
  return finish(k, grid.count());
}

BoxCount box_count(const std::vector<Rect>& rects, int k) {
  check_grid(k);
  Bitmap grid(k);
  for (const Rect& rc : rects) {
    auto [xa, xb] = cell_span(rc.x, k);
    auto [ya, yb] = cell_span(rc.y, k);
    for (std::uint64_t r = xa; r <= xb; ++r) grid.set_row_span(r, ya, yb);
  }
  return finish(k, rects.empty() ? 0 : grid.count());
}

BoxSweep box_count_sweep(const StageSet& set, int k_lo, int k_hi) {
  BoxSweep out;
  for (int k = k_lo; k <= k_hi; ++k) out.rows.push_back(box_count(set, k));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const BoxCount& b : out.rows) {
    if (b.occupied == 0) continue;
    const double x = b.k * std::log(2.0), y = std::log(static_cast<double>(b.occupied));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  const double den = m * sxx - sx * sx;
  if (m >= 2 && den > 0) out.slope = (m * sxy - sx * sy) / den;
  return out;
}

namespace {

// A rectangle of F_i: I(Γ_{i-1} U K) × I(Υ_{i-1} W L), carrying the mass of
// all its H children.
struct FRect {
  Interval x;
  Interval y;
  double log_mass = 0.0;
  std::size_t element = 0;  // a representative child
  int y_order = 0;
};

double dist_to(const Interval& i, double t) {
  if (t < i.lo) return i.lo - t;
  if (t > i.hi) return t - i.hi;
  return 0.0;
}

}  // namespace

MdpReport mdp_audit(const CantorBuild& build, double s, double c, double delta, const MdpOptions& opts) {
  if (build.levels.empty()) throw PreconditionError("mdp_audit needs at least one constructed level");
  if (!(c > 0.0)) throw InvalidArgument("mdp_audit needs c > 0");
  const BetaSystem& sys = build.spec.sys;
  const double lb = sys.log_beta();
  const double log_c = std::log(c);
  MdpReport r;

  for (const Level& L : build.levels) {
    if (std::isnan(L.s)) throw PreconditionError("mdp_audit needs masses; run assign_mass first");
    for (const LevelElement& e : L.elements) {
      const double ratio = e.log_mass - log_c + s * e.order() * lb;
      ++r.cylinders_checked;
      if (ratio > 0.0) ++r.cylinder_violations;
      r.max_cylinder_log_ratio = std::max(r.max_cylinder_log_ratio, ratio);
    }
  }

  // Deepest level above which no (U, W) pair was dropped.
  std::size_t audit = 0;
  r.level_complete = !build.levels[0].subsampled;
  for (std::size_t i = 1; i < build.levels.size() && !build.levels[i].subsampled && r.level_complete; ++i) audit = i;
  const Level& L = build.levels[audit];
  r.level = L.index;

  std::vector<FRect> rects;
  for (std::size_t j = 0; j < L.elements.size();) {
    const LevelElement& e = L.elements[j];
    const std::size_t y_order = static_cast<std::size_t>(e.n + e.l);
    std::vector<double> masses;
    std::size_t t = j;
    while (t < L.elements.size() && L.elements[t].gamma == e.gamma && L.elements[t].parent == e.parent &&
           std::equal(e.upsilon.begin(), e.upsilon.begin() + y_order, L.elements[t].upsilon.begin())) {
      masses.push_back(L.elements[t].log_weight + L.elements[t].log_mass);
      ++t;
    }
    FRect f;
    const double lx = left_endpoint(sys, e.gamma);
    const double ly = left_endpoint(sys, Word(e.upsilon.begin(), e.upsilon.begin() + y_order));
    f.x = {lx, lx + std::pow(sys.beta(), -e.order())};
    f.y = {ly, ly + std::pow(sys.beta(), -static_cast<double>(y_order))};
    f.log_mass = log_sum_exp(masses);
    f.element = j;
    f.y_order = static_cast<int>(y_order);
    r.resolution = std::max({r.resolution, f.x.width(), f.y.width()});
    rects.push_back(f);
    j = t;
  }

  struct BallResult {
    bool tested = false, skipped = false, excluded = false;
    double ratio = -1e300;
    int columns = 0;
  };
  std::vector<BallResult> balls(opts.balls);
  const double r_lo = r.resolution / 4.0;
  parallel_for(opts.balls, [&](std::size_t b) {
    BallResult& out = balls[b];
    SamplePoint p = sample_point(build, splitmix64(opts.seed) ^ b);
    Rng rng = make_rng({opts.seed, b, 0xba11ULL});
    const double rad = r_lo < delta ? std::exp(std::log(r_lo) + unit_real(rng) * (std::log(delta) - std::log(r_lo))) : r_lo;
    if (!(rad < delta)) {
      out.excluded = true;
      return;
    }
    if (rad < r.resolution) {
      out.skipped = true;
      return;
    }
    out.tested = true;
    std::vector<double> masses;
    const int order = std::max(0, static_cast<int>(std::floor(-std::log(rad) / lb)));
    std::set<Word> cols_x, cols_y;
    for (const FRect& f : rects) {
      const double dx = dist_to(f.x, p.x), dy = dist_to(f.y, p.y);
      if (dx * dx + dy * dy >= rad * rad) continue;
      masses.push_back(f.log_mass);
      const LevelElement& e = L.elements[f.element];
      const std::size_t ox = std::min<std::size_t>(order, e.gamma.size());
      const std::size_t oy = std::min<std::size_t>(order, f.y_order);
      cols_x.emplace(e.gamma.begin(), e.gamma.begin() + ox);
      cols_y.emplace(e.upsilon.begin(), e.upsilon.begin() + oy);
    }
    out.columns = static_cast<int>(std::max(cols_x.size(), cols_y.size()));
    if (!masses.empty()) out.ratio = log_sum_exp(masses) - log_c - s * std::log(2.0 * rad);
  });
  for (const BallResult& b : balls) {
    if (b.excluded) ++r.balls_excluded;
    if (b.skipped) ++r.balls_skipped;
    if (!b.tested) continue;
    ++r.balls_tested;
    if (b.ratio > 0.0) ++r.ball_violations;
    r.max_ball_log_ratio = std::max(r.max_ball_log_ratio, b.ratio);
    r.max_columns = std::max(r.max_columns, b.columns);
    if (b.columns > 3) ++r.column_violations;
  }
  return r;
}

}  // namespace betadim

#include "betadim/cantor.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <set>

#include "betadim/errors.hpp"
#include "betadim/parallel.hpp"
#include "betadim/pressure.hpp"
#include "betadim/rng.hpp"
#include "betadim/symbolic.hpp"

namespace betadim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Digits of the point the construction aims at. Past the stored digits the
// target continues with zeros, except for 1 under a simple Parry β, which is
// followed along ε*(1,β) forever.
struct Target {
  Word digits;
  bool one = false;
  double residual = 0.0;

  int digit(const BetaSystem& sys, int i) const {
    if (one) return sys.one_digit(i);
    return i <= static_cast<int>(digits.size()) ? digits[i - 1] : 0;
  }
  Word prefix(const BetaSystem& sys, int k) const {
    Word w(k);
    for (int i = 0; i < k; ++i) w[i] = static_cast<Digit>(digit(sys, i + 1));
    return w;
  }
  // Left endpoint of σ^k applied to the target.
  double remainder(const BetaSystem& sys, int k) const {
    if (one) return shifted_one_value(sys, k);
    double v = 0.0;
    for (int i = static_cast<int>(digits.size()); i > k; --i) v = (digits[i - 1] + v) / sys.beta();
    return v;
  }
};

Target make_target(const BetaSystem& sys, double x0) {
  Target t;
  const int cap = sys.precision_cap();
  if (x0 >= 1.0) {
    if (sys.parry_kind() == ParryKind::SimpleParry) {
      t.one = true;
      return t;
    }
    t.digits = sys.one_expansion(cap);
    t.residual = std::pow(sys.beta(), -cap) * shifted_one_value(sys, cap);
    return t;
  }
  DigitOrbit o = expand(sys, x0, cap);
  t.digits = std::move(o.digits);
  t.residual = o.tail * std::pow(sys.beta(), -cap);
  return t;
}

std::vector<int> states_of(const FollowerAutomaton& a, const Word& w) {
  std::vector<int> s(w.size() + 1, 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    s[i + 1] = a.next(s[i], w[i]);
    if (s[i + 1] < 0) throw InternalError("inadmissible word in neighbour scan");
  }
  return s;
}

// Lexicographic neighbours among admissible words of the same length.
bool step_up(const FollowerAutomaton& a, Word& w) {
  std::vector<int> s = states_of(a, w);
  for (std::size_t i = w.size(); i-- > 0;) {
    if (w[i] < a.limit(s[i])) {
      w[i] += 1;
      std::fill(w.begin() + i + 1, w.end(), 0);
      return true;
    }
  }
  return false;
}

bool step_down(const FollowerAutomaton& a, Word& w) {
  for (std::size_t i = w.size(); i-- > 0;) {
    if (w[i] == 0) continue;
    w[i] -= 1;
    int state = 0;  // a digit below the limit resets the automaton
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      int d = a.limit(state);
      w[j] = static_cast<Digit>(d);
      state = a.next(state, d);
    }
    return true;
  }
  return false;
}

struct Hit {
  Word word;
  int k = 0;
  double offset = 0.0;  // in units of β^{-k}
  double length = 1.0;
};

// A full cylinder of order k inside the ball of radius rho·β^{-k} around the
// target, scanning outwards from the cylinder that contains the target.
std::optional<Hit> search_order(const BetaSystem& sys, const FollowerAutomaton& a, const Target& t,
                                int k, double rho) {
  Word c = t.prefix(sys, k);
  int st = a.run(c);
  if (st < 0) throw InternalError("target prefix is inadmissible");
  const double off0 = -t.remainder(sys, k);
  const double len0 = shifted_one_value(sys, st);
  auto inside = [rho](double o, double len) { return o > -rho && o + len <= rho; };
  if (st == 0 && inside(off0, len0)) return Hit{c, k, off0, len0};

  const int max_steps = 2 * k + 4;
  std::optional<Hit> up, down;
  int up_t = 0, down_t = 0;
  {
    Word w = c;
    double o = off0, len = len0;
    for (int step = 1; step <= max_steps; ++step) {
      o += len;
      if (o >= rho || !step_up(a, w)) break;
      int s = a.run(w);
      len = shifted_one_value(sys, s);
      if (s == 0 && inside(o, len)) {
        up = Hit{w, k, o, len};
        up_t = step;
        break;
      }
    }
  }
  {
    Word w = c;
    double o = off0;
    for (int step = 1; step <= max_steps; ++step) {
      if (!step_down(a, w)) break;
      int s = a.run(w);
      double len = shifted_one_value(sys, s);
      o -= len;
      if (o <= -rho) break;
      if (s == 0 && inside(o, len)) {
        down = Hit{w, k, o, len};
        down_t = step;
        break;
      }
    }
  }
  if (up && down) return up_t <= down_t ? up : down;
  return up ? up : down;
}

// Smallest k >= min_k with e^{-S} > β^{-k} > e^{-(1+ε)S} admitting a full
// cylinder inside B(target, e^{-S}).
std::optional<Hit> search_full(const BetaSystem& sys, const Target& t, double S, double eps,
                               int min_k) {
  const double lb = sys.log_beta();
  const double margin = 1e-12 * std::max(1.0, S);
  int k_lo = std::max(1, static_cast<int>(std::floor(S / lb)));
  while (k_lo * lb <= S + margin) ++k_lo;
  int k_hi = static_cast<int>(std::ceil((1.0 + eps) * S / lb));
  while (k_hi >= k_lo && k_hi * lb >= (1.0 + eps) * S - margin) --k_hi;
  k_lo = std::max(k_lo, min_k);
  if (k_hi < k_lo) return std::nullopt;
  FollowerAutomaton a(sys, k_hi);
  for (int k = k_lo; k <= k_hi; ++k) {
    if (auto h = search_order(sys, a, t, k, std::exp(k * lb - S))) return h;
  }
  return std::nullopt;
}

Word sample_word(const WordCounter& c, Rng& rng) {
  const FollowerAutomaton& a = c.automaton();
  const int n = c.length();
  Word w;
  w.reserve(n);
  int state = 0, zeros = 0;
  for (int pos = 0; pos < n; ++pos) {
    const int rem = n - pos - 1;
    long double r = static_cast<long double>(unit_real(rng)) * c.completions(n - pos, state, zeros);
    long double acc = 0;
    int chosen = -1, chosen_state = 0, chosen_zeros = 0;
    for (int d = 0; d <= a.limit(state); ++d) {
      int ns = a.next(state, d);
      if (ns < 0) continue;
      int nz = c.bump_zeros(zeros, d);
      long double wt = c.completions(rem, ns, nz);
      if (wt <= 0) continue;
      chosen = d;
      chosen_state = ns;
      chosen_zeros = nz;
      acc += wt;
      if (r < acc) break;
    }
    if (chosen < 0) throw InternalError("sampling from an empty word set");
    w.push_back(static_cast<Digit>(chosen));
    state = chosen_state;
    zeros = chosen_zeros;
  }
  return w;
}

// Up to `want` distinct words drawn uniformly from the counter's set, sorted.
std::vector<Word> sample_distinct(const WordCounter& c, std::size_t want, Rng& rng) {
  std::set<Word> out;
  std::size_t attempts = 0;
  while (out.size() < want && attempts < 20 * want + 20) {
    out.insert(sample_word(c, rng));
    ++attempts;
  }
  return {out.begin(), out.end()};
}

Word concat(const Word& a, const Word& b) {
  Word out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

struct PairTask {
  std::size_t parent = 0;
  std::size_t slot = 0;  // position among the parent's pairs
  Word u;
  Word w;
  double log_weight = 0.0;
};

// Counters for full words of a given length, shared by the workers of a level.
class FullCounterCache {
 public:
  explicit FullCounterCache(const BetaSystem& sys) : sys_(sys) {}
  std::shared_ptr<const WordCounter> get(int len) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(len);
    if (it != cache_.end()) return it->second;
    auto c = std::make_shared<const WordCounter>(sys_, len, WordFilter::full());
    cache_.emplace(len, c);
    return c;
  }

 private:
  const BetaSystem& sys_;
  std::mutex mutex_;
  std::map<int, std::shared_ptr<const WordCounter>> cache_;
};

MassCase auto_case(const TargetSpec& spec) {
  // s₀ > 1 exactly when P(-g) > 0: both pressure functions equal P(-g) at s = 1.
  int n = default_pressure_n(spec.sys, 1e6);
  double p = ErgodicSpectrum(spec.sys, spec.g, n).estimate(-1.0, 0.0).value;
  return p > 1e-9 ? MassCase::CaseI : MassCase::CaseII;
}

int auto_first_m(const BetaSystem& sys, int N, double budget) {
  int m = std::max(N, 1);
  while (m < 64) {
    long double next = WordCounter(sys, m + 1, {true, N}).total();
    if (next * next > budget) break;
    ++m;
  }
  return m;
}

std::vector<LevelElement> expand_pair(const CantorBuild& b, int level, const LevelElement* parent,
                                      const PairTask& task, const Target& tx, const Target& ty,
                                      FullCounterCache& counters) {
  const TargetSpec& spec = b.spec;
  const BetaSystem& sys = spec.sys;
  const double eps = b.config.epsilon;
  static const Word kEmpty;
  const Word& gamma0 = parent ? parent->gamma : kEmpty;
  const Word& upsilon0 = parent ? parent->upsilon : kEmpty;

  Word gu = concat(gamma0, task.u);
  Word yw = concat(upsilon0, task.w);
  const double sf = ergodic_sum_of_word(sys, spec.f, gu);
  const double sg = ergodic_sum_of_word(sys, spec.g, yw);
  auto where = [&](const char* axis, double S) {
    return std::string(" at level ") + std::to_string(level) + " (" + axis + ", S = " + num(S) + ")";
  };

  std::optional<Hit> K = search_full(sys, tx, sf, eps, 1);
  if (!K) {
    throw PreconditionError("no full cylinder with e^{-S} > beta^{-k} > e^{-(1+eps)S} fits in the ball around x0" +
                            where("x", sf));
  }
  std::optional<Hit> L = search_full(sys, ty, sg, eps, 1);
  if (!L) {
    throw PreconditionError("no full cylinder with e^{-S} > beta^{-l} > e^{-(1+eps)S} fits in the ball around y0" +
                            where("y", sg));
  }
  if (L->k > K->k) {
    K = search_full(sys, tx, sf, eps, L->k);
    if (!K) {
      throw HypothesisViolation("k_i >= l_i cannot be met" + where("x", sf) +
                                "; min f >= (1+eps) max g would guarantee it");
    }
  }

  const int h_len = K->k - L->k;
  std::vector<Word> hs;
  double log_h_count = 0.0, log_h_weight = 0.0;
  if (h_len == 0) {
    hs.emplace_back();
  } else {
    auto counter = counters.get(h_len);
    long double count = counter->total();
    log_h_count = static_cast<double>(std::log(count));
    if (count <= b.config.h_samples) {
      for_each_completion(*counter, Word{}, [&](const Word& h, int) { hs.push_back(h); });
    } else {
      Rng rng = make_rng({b.config.seed, static_cast<std::uint64_t>(level), task.parent, task.slot, 7});
      hs = sample_distinct(*counter, static_cast<std::size_t>(b.config.h_samples), rng);
    }
    log_h_weight = log_h_count - std::log(static_cast<double>(hs.size()));
  }

  const double sf_m = ergodic_sum_of_word(sys, spec.f, task.u);
  const double sg_m = ergodic_sum_of_word(sys, spec.g, task.w);
  Word gamma = concat(gu, K->word);
  Word yl = concat(yw, L->word);
  std::vector<LevelElement> out;
  out.reserve(hs.size());
  for (const Word& h : hs) {
    LevelElement e;
    e.gamma = gamma;
    e.upsilon = concat(yl, h);
    e.n = static_cast<int>(gu.size());
    e.k = K->k;
    e.l = L->k;
    e.parent = task.parent;
    e.log_weight = task.log_weight + log_h_weight;
    e.sf_n = sf;
    e.sg_n = sg;
    e.sf_m = sf_m;
    e.sg_m = sg_m;
    e.x_offset = K->offset;
    e.x_length = K->length;
    e.y_offset = L->offset;
    e.y_length = L->length;
    e.log_h_count = log_h_count;
    out.push_back(std::move(e));
  }
  return out;
}

// Pairs (U, W) for one parent: all of them when they fit, otherwise a
// uniform sample without replacement.
std::vector<PairTask> choose_pairs(const WordCounter& cc, const std::vector<Word>* listed,
                                   std::size_t want, std::size_t parent, Rng& rng) {
  std::vector<PairTask> out;
  const long double total = cc.total();
  const long double pairs = total * total;
  if (listed && pairs <= static_cast<long double>(want)) {
    for (const Word& u : *listed)
      for (const Word& w : *listed) out.push_back({parent, out.size(), u, w, 0.0});
    return out;
  }
  if (listed) {
    // Floyd's sampling of distinct pair indices.
    const std::uint64_t C = listed->size();
    const std::uint64_t T = C * C;
    std::set<std::uint64_t> picked;
    for (std::uint64_t j = T - want; j < T; ++j) {
      std::uint64_t t = uniform_index(rng, j + 1);
      if (!picked.insert(t).second) picked.insert(j);
    }
    for (std::uint64_t idx : picked) out.push_back({parent, out.size(), (*listed)[idx / C], (*listed)[idx % C], 0.0});
  } else {
    std::set<std::pair<Word, Word>> picked;
    std::size_t attempts = 0;
    while (picked.size() < want && attempts < 20 * want + 20) {
      Word u = sample_word(cc, rng);
      Word w = sample_word(cc, rng);
      picked.emplace(std::move(u), std::move(w));
      ++attempts;
    }
    for (const auto& [u, w] : picked) out.push_back({parent, out.size(), u, w, 0.0});
  }
  const double log_weight = static_cast<double>(2.0L * std::log(total)) - std::log(static_cast<double>(out.size()));
  for (PairTask& t : out) t.log_weight = log_weight;
  return out;
}

}  // namespace

const char* to_string(MassCase c) { return c == MassCase::CaseI ? "CaseI" : "CaseII"; }

MassCase parse_mass_case(const std::string& text) {
  if (text == "CaseI" || text == "I" || text == "1") return MassCase::CaseI;
  if (text == "CaseII" || text == "II" || text == "2") return MassCase::CaseII;
  throw InvalidArgument("unknown mass case '" + text + "' (expected CaseI or CaseII)");
}

bool SamplePoint::all_hit() const {
  for (const HitWitness& w : witnesses)
    if (!w.hit_x || !w.hit_y) return false;
  return true;
}


CantorBuild build_levels(const TargetSpec& spec, const CantorConfig& cfg) {
  spec.validate();
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0,1), got " + num(cfg.epsilon));
  if (cfg.N < 0) throw InvalidArgument("N must be >= 0");
  if (cfg.depth < 0) throw InvalidArgument("depth must be >= 0");
  if (!(cfg.level_budget >= 1.0)) throw InvalidArgument("level_budget must be >= 1");
  if (cfg.h_samples < 1 || cfg.norm_samples < 1) throw InvalidArgument("h_samples and norm_samples must be >= 1");
  if (!(spec.f.min_value() > 0.0)) {
    throw HypothesisViolation("the construction needs f strictly positive: min f = " + num(spec.f.min_value()));
  }
  if (!(spec.g.min_value() > 0.0)) {
    throw HypothesisViolation("the construction needs g strictly positive: min g = " + num(spec.g.min_value()));
  }

  const BetaSystem& sys = spec.sys;
  const double eps = cfg.epsilon;
  const double lb = sys.log_beta();
  CantorBuild b{spec, cfg, MassCase::CaseII, false, false, 0.0, 0.0, {}};
  b.strengthened_gap = spec.strengthened_gap_holds(eps);
  b.case_overridden = cfg.case_override.has_value();
  b.mass_case = cfg.case_override ? *cfg.case_override : auto_case(spec);
  Target tx = make_target(sys, spec.x0);
  Target ty = make_target(sys, spec.y0);
  b.x_residual = tx.residual;
  b.y_residual = ty.residual;
  const WordFilter filter{true, cfg.N};
  const double norm_f = spec.f.sup_norm();
  const double gap_factor = eps / (1.0 + eps) * lb;
  int prev_max_order = 0;

  for (int i = 1; i <= cfg.depth; ++i) {
    Level L;
    L.index = i;
    L.gap_rhs = prev_max_order * norm_f;
    int m = i <= static_cast<int>(cfg.m_schedule.size()) ? cfg.m_schedule[i - 1] : 0;
    if (m > 0) {
      if (m < std::max(cfg.N, 1)) {
        throw PreconditionError("m_" + std::to_string(i) + " = " + std::to_string(m) + " is shorter than the zero block N = " +
                                std::to_string(cfg.N));
      }
      if (gap_factor * m < L.gap_rhs) {
        throw PreconditionError("m_" + std::to_string(i) + " = " + std::to_string(m) +
                                " violates the gap condition (eps/(1+eps)) m log(beta) >= (n + k)||f||: " +
                                num(gap_factor * m) + " < " + num(L.gap_rhs));
      }
    } else {
      L.auto_m = true;
      if (i == 1) {
        // Long enough that the order window (S, (1+ε)S)/log β of the
        // smaller potential spans a whole integer.
        const double smallest = std::min(spec.f.min_value(), spec.g.min_value());
        const int window = static_cast<int>(std::ceil(lb / (eps * smallest))) + 1;
        m = std::max(auto_first_m(sys, cfg.N, cfg.level_budget), window);
      } else {
        m = static_cast<int>(std::ceil(L.gap_rhs / gap_factor)) + 2;
      }
      m = std::max(m, std::max(cfg.N, 1));
    }
    L.m = m;
    L.gap_lhs = gap_factor * m;

    WordCounter cc(sys, m, filter);
    const long double total = cc.total();
    L.candidates = static_cast<double>(total);
    if (!(total >= 1)) {
      throw PreconditionError("no full words of length " + std::to_string(m) + " end with 0^" + std::to_string(cfg.N));
    }
    std::vector<Word> listed;
    const bool list_all = total <= cfg.enumerate_limit || total * total <= cfg.level_budget;
    if (list_all) listed = enumerate_words(sys, m, filter);

    std::vector<Word> norm_words;
    if (list_all) {
      L.s_exact = true;
    } else {
      Rng rng = make_rng({cfg.seed, static_cast<std::uint64_t>(i), 0xa11ULL});
      norm_words.reserve(cfg.norm_samples);
      for (int j = 0; j < cfg.norm_samples; ++j) norm_words.push_back(sample_word(cc, rng));
      L.norm_log_scale = static_cast<double>(std::log(total)) - std::log(static_cast<double>(cfg.norm_samples));
    }
    const std::vector<Word>& summed = list_all ? listed : norm_words;
    L.norm_f.resize(summed.size());
    L.norm_g.resize(summed.size());
    parallel_for(summed.size(), [&](std::size_t j) {
      L.norm_f[j] = ergodic_sum_of_word(sys, spec.f, summed[j]);
      L.norm_g[j] = ergodic_sum_of_word(sys, spec.g, summed[j]);
    });

    const Level* prev = i == 1 ? nullptr : &b.levels.back();
    const std::size_t parents = prev ? prev->elements.size() : 1;
    const std::size_t per_parent =
        std::max<std::size_t>(1, static_cast<std::size_t>(cfg.level_budget / static_cast<double>(parents)));
    std::vector<PairTask> tasks;
    for (std::size_t p = 0; p < parents; ++p) {
      Rng rng = make_rng({cfg.seed, static_cast<std::uint64_t>(i), p, 1});
      std::vector<PairTask> mine = choose_pairs(cc, list_all ? &listed : nullptr, per_parent, p, rng);
      for (PairTask& t : mine) tasks.push_back(std::move(t));
    }
    L.pairs_kept = tasks.size();
    L.subsampled = static_cast<long double>(tasks.size()) < total * total * static_cast<long double>(parents);

    std::vector<std::vector<LevelElement>> results(tasks.size());
    FullCounterCache counters(sys);
    parallel_for(tasks.size(), [&](std::size_t t) {
      const LevelElement* parent = prev ? &prev->elements[tasks[t].parent] : nullptr;
      results[t] = expand_pair(b, i, parent, tasks[t], tx, ty, counters);
    });

    L.first_child.assign(parents + 1, 0);
    std::size_t count = 0;
    for (const auto& r : results) count += r.size();
    L.elements.reserve(count);
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      for (LevelElement& e : results[t]) L.elements.push_back(std::move(e));
      L.first_child[tasks[t].parent + 1] = L.elements.size();
    }
    for (std::size_t p = 1; p <= parents; ++p) L.first_child[p] = std::max(L.first_child[p], L.first_child[p - 1]);
    for (const LevelElement& e : L.elements) prev_max_order = std::max(prev_max_order, e.order());
    b.levels.push_back(std::move(L));
  }
  return b;
}

namespace {

// Left side minus right side of the normalization equation, in logs.
double normalization_gap(const Level& L, MassCase c, double lb, double s) {
  const double mlb = L.m * lb;
  std::vector<double> a(L.norm_f.size());
  if (c == MassCase::CaseI) {
    for (std::size_t j = 0; j < a.size(); ++j) a[j] = (1.0 - s) * L.norm_f[j] - s * mlb;
    std::vector<double> w(L.norm_g.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = -L.norm_g[j];
    return 2.0 * L.norm_log_scale + log_sum_exp(a) + log_sum_exp(w);
  }
  for (std::size_t j = 0; j < a.size(); ++j) a[j] = -s * (mlb + L.norm_g[j]);
  return std::log(L.candidates) + L.norm_log_scale + log_sum_exp(a);
}

double solve_level_s(const Level& L, MassCase c, double lb) {
  auto h = [&](double s) { return normalization_gap(L, c, lb, s); };
  if (h(0.0) <= 0.0) return 0.0;
  double lo = 0.0, hi = 2.0;
  int doublings = 0;
  while (h(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 40) throw NoConvergence("normalization equation for s_" + std::to_string(L.index) + " has no root");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void assign_mass(CantorBuild& build, std::optional<MassCase> mass_case) {
  const MassCase c = mass_case.value_or(build.mass_case);
  build.mass_case = c;
  const double lb = build.spec.sys.log_beta();
  for (std::size_t i = 0; i < build.levels.size(); ++i) {
    Level& L = build.levels[i];
    const Level* prev = i == 0 ? nullptr : &build.levels[i - 1];
    L.s = solve_level_s(L, c, lb);
    const double mlb = L.m * lb;
    L.log_renorm_min = kInf;
    L.log_renorm_max = -kInf;
    const std::size_t parents = L.first_child.size() - 1;
    for (std::size_t p = 0; p < parents; ++p) {
      const std::size_t b0 = L.first_child[p], b1 = L.first_child[p + 1];
      if (b0 == b1) continue;
      std::vector<double> raw(b1 - b0), terms(b1 - b0);
      for (std::size_t j = b0; j < b1; ++j) {
        const LevelElement& e = L.elements[j];
        raw[j - b0] = c == MassCase::CaseI ? -L.s * (mlb + e.sf_m) : -L.s * (mlb + e.sg_m) - e.log_h_count;
        terms[j - b0] = e.log_weight + raw[j - b0];
      }
      const double log_c = -log_sum_exp(terms);
      const double parent_log = prev ? prev->elements[p].log_mass : 0.0;
      for (std::size_t j = b0; j < b1; ++j) L.elements[j].log_mass = parent_log + raw[j - b0] + log_c;
      L.log_renorm_min = std::min(L.log_renorm_min, log_c);
      L.log_renorm_max = std::max(L.log_renorm_max, log_c);
    }
  }
}

CantorAudit audit_levels(const CantorBuild& build) {
  const BetaSystem& sys = build.spec.sys;
  const double lb = sys.log_beta();
  const double eps = build.config.epsilon;
  CantorAudit a;
  for (std::size_t i = 0; i < build.levels.size(); ++i) {
    const Level& L = build.levels[i];
    const Level* prev = i == 0 ? nullptr : &build.levels[i - 1];
    if (!std::isnan(L.s)) {
      a.min_s = std::isnan(a.min_s) ? L.s : std::min(a.min_s, L.s);
      a.max_s = std::isnan(a.max_s) ? L.s : std::max(a.max_s, L.s);
    }
    for (const LevelElement& e : L.elements) {
      ++a.elements;
      const double kl = e.k * lb, ll = e.l * lb;
      if (!(e.sf_n < kl && kl < (1.0 + eps) * e.sf_n)) ++a.sandwich_violations;
      if (!(e.sg_n < ll && ll < (1.0 + eps) * e.sg_n)) ++a.sandwich_violations;
      const double rx = std::exp(kl - e.sf_n), ry = std::exp(ll - e.sg_n);
      if (!(e.x_offset > -rx && e.x_offset + e.x_length <= rx)) ++a.ball_violations;
      if (!(e.y_offset > -ry && e.y_offset + e.y_length <= ry)) ++a.ball_violations;
      if (e.k < e.l) ++a.order_violations;
      // β^{-k} ≈ e^{-S_m f(x')}: the prefix before U_i contributes at most
      // (1+ε)(S_n - S_m) on top of the ε S_m spread of the sandwich.
      const double slack = (1.0 + eps) * (e.sf_n - e.sf_m);
      const double excess = std::fabs(kl - e.sf_m) - (eps * e.sf_m + slack);
      a.max_remark_excess = std::max(a.max_remark_excess, excess);
      if (excess > 1e-9 * std::max(1.0, e.sf_n)) ++a.remark_violations;
    }
    if (std::isnan(L.s)) continue;
    const std::size_t parents = L.first_child.size() - 1;
    for (std::size_t p = 0; p < parents; ++p) {
      const std::size_t b0 = L.first_child[p], b1 = L.first_child[p + 1];
      if (b0 == b1) continue;
      std::vector<double> terms;
      for (std::size_t j = b0; j < b1; ++j) terms.push_back(L.elements[j].log_weight + L.elements[j].log_mass);
      const double parent_log = prev ? prev->elements[p].log_mass : 0.0;
      a.max_conservation_error = std::max(a.max_conservation_error, std::fabs(std::expm1(log_sum_exp(terms) - parent_log)));
    }
  }
  return a;
}

MassLengthReport mass_vs_length_check(const CantorBuild& build, double s, double epsilon) {
  const double lb = build.spec.sys.log_beta();
  const double exponent = s / (1.0 + epsilon);
  MassLengthReport r;
  for (std::size_t i = 0; i < build.levels.size(); ++i) {
    const Level& L = build.levels[i];
    if (std::isnan(L.s)) throw PreconditionError("mass_vs_length_check needs masses; run assign_mass first");
    for (std::size_t j = 0; j < L.elements.size(); ++j) {
      const LevelElement& e = L.elements[j];
      const double ratio = e.log_mass + exponent * e.order() * lb;
      ++r.checked;
      if (ratio > 0.0) ++r.violations;
      if (ratio > r.max_log_ratio) {
        r.max_log_ratio = ratio;
        r.witness_level = static_cast<int>(i) + 1;
        r.witness_index = j;
      }
    }
  }
  return r;
}

SamplePoint sample_point(const CantorBuild& build, std::uint64_t seed) {
  Rng rng = make_rng({seed, 0x5a3dULL});
  SamplePoint sp;
  if (build.levels.empty()) {
    sp.x = unit_real(rng);
    sp.y = unit_real(rng);
    return sp;
  }
  std::size_t parent = 0;
  for (const Level& L : build.levels) {
    const std::size_t b0 = L.first_child[parent], b1 = L.first_child[parent + 1];
    if (b0 == b1) throw InternalError("level " + std::to_string(L.index) + " has a childless element");
    parent = b0 + uniform_index(rng, b1 - b0);
    sp.path.push_back(parent);
  }
  const BetaSystem& sys = build.spec.sys;
  const double lb = sys.log_beta();
  const LevelElement& deepest = build.levels.back().elements[sp.path.back()];
  std::vector<double> gx = shifted_left_endpoints(sys, deepest.gamma);
  std::vector<double> gy = shifted_left_endpoints(sys, deepest.upsilon);
  sp.x = gx[0];
  sp.y = gy[0];
  for (std::size_t i = 0; i < build.levels.size(); ++i) {
    const LevelElement& e = build.levels[i].elements[sp.path[i]];
    HitWitness w;
    w.level = static_cast<int>(i) + 1;
    w.n = e.n;
    // (T^n x - target)·β^k = offset of I(K) + left endpoint of what follows K
    const double dx = std::fabs(e.x_offset + gx[e.n + e.k]);
    const double dy = std::fabs(e.y_offset + gy[e.n + e.l]);
    w.log_radius_x = -e.sf_n;
    w.log_radius_y = -e.sg_n;
    w.log_dist_x = std::log(dx) - e.k * lb;
    w.log_dist_y = std::log(dy) - e.l * lb;
    w.hit_x = dx < std::exp(e.k * lb - e.sf_n);
    w.hit_y = dy < std::exp(e.l * lb - e.sg_n);
    sp.witnesses.push_back(w);
  }
  return sp;
}

void dump_levels(const CantorBuild& build, std::ostream& out) {
  for (const Level& L : build.levels) {
    for (std::size_t j = 0; j < L.elements.size(); ++j) {
      const LevelElement& e = L.elements[j];
      out << "level=" << L.index << " index=" << j << " parent=" << e.parent << " n=" << e.n << " k=" << e.k
          << " l=" << e.l << " log_weight=" << num(e.log_weight) << " log_mass=" << num(e.log_mass)
          << " sf_n=" << num(e.sf_n) << " sg_n=" << num(e.sg_n) << " x_offset=" << num(e.x_offset)
          << " y_offset=" << num(e.y_offset) << " gamma=" << format_word(e.gamma)
          << " upsilon=" << format_word(e.upsilon) << '\n';
    }
  }
}

}  // namespace betadim

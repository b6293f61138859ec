#include "betadim/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "betadim/cantor.hpp"
#include "betadim/diagnostics.hpp"
#include "betadim/dimension.hpp"
#include "betadim/errors.hpp"
#include "betadim/parallel.hpp"
#include "betadim/pressure.hpp"
#include "betadim/symbolic.hpp"
#include "betadim/verify.hpp"

namespace betadim::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string cell(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string cell(long double v) { return cell(static_cast<double>(v)); }
std::string cell(int v) { return std::to_string(v); }
std::string cell(std::size_t v) { return std::to_string(v); }
std::string cell(bool v) { return v ? "1" : "0"; }
std::string cell(const std::string& v) { return v; }
std::string cell(const char* v) { return v; }

// A CSV table preceded by a schema line.
class Table {
 public:
  Table(std::string schema, std::vector<std::string> columns) : schema_(std::move(schema)), columns_(std::move(columns)) {}

  template <typename... Ts>
  void row(const Ts&... values) {
    rows_.push_back({cell(values)...});
    if (rows_.back().size() != columns_.size()) throw InternalError("row width does not match the header");
  }

  void write(std::ostream& os) const {
    os << "# schema=" << schema_ << '\n';
    line(os, columns_);
    for (const auto& r : rows_) line(os, r);
  }

 private:
  static void line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  }
  std::string schema_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

Json interval(const Interval& i) { return Json{{"lo", i.lo}, {"hi", i.hi}}; }

struct SpecOptions {
  std::string beta = "2";
  std::string f = "1";
  std::string g = "0.5";
  double x0 = 0.5;
  double y0 = 0.5;
};

struct Options {
  unsigned threads = 0;
  bool strict = false;
  std::string out_path;
  std::string summary_path;
  bool json = false;

  SpecOptions spec;

  // expand / words / cylinder
  std::string x = "1";
  int n = 0;
  bool full = false;
  int zeros = 0;
  bool list = false;
  std::string word;

  // pressure / dimension / series
  std::string potential = "0";
  int n_from = 0;
  double budget = 1e8;
  double tol = 1e-3;
  double s = 1.0;
  int n_lo = 1;
  int n_hi = 12;
  int probe_n = 0;

  // cantor
  double epsilon = 0.3;
  int N = 1;
  int depth = 2;
  std::vector<int> m_schedule;
  std::string mass_case = "auto";
  std::uint64_t seed = 1;
  double level_budget = 16384;
  int h_samples = 2;
  int norm_samples = 4096;
  std::optional<double> s_check;
  std::optional<double> s_control;
  std::size_t balls = 10000;
  double delta = 0.1;
  double mdp_c = 0.0;
  int samples = 20;
  std::string dump_path;

  // boxdim
  int k_lo = 10;
  int k_hi = 10;
};

BetaSystem make_system(const Options& o) {
  ArithmeticOptions a;
  a.strict = o.strict;
  return BetaSystem::parse(o.spec.beta, a);
}

TargetSpec make_spec(const Options& o) {
  TargetSpec spec{make_system(o), Potential::parse(o.spec.f), Potential::parse(o.spec.g), o.spec.x0, o.spec.y0};
  spec.validate();
  return spec;
}

Json spec_json(const TargetSpec& s) {
  return Json{{"beta", s.sys.label()}, {"f", s.f.describe()}, {"g", s.g.describe()}, {"x0", s.x0}, {"y0", s.y0}};
}

void add_spec_options(CLI::App* cmd, SpecOptions& s) {
  cmd->add_option("--beta", s.beta, "base: 'golden', an integer or a decimal")->capture_default_str();
  cmd->add_option("--f", s.f, "potential f: const:c, poly:c0,c1,..., pwl:x:y,... or a number")->capture_default_str();
  cmd->add_option("--g", s.g, "potential g, same syntax")->capture_default_str();
  cmd->add_option("--x0", s.x0, "target x0 in (0,1]")->capture_default_str();
  cmd->add_option("--y0", s.y0, "target y0 in (0,1]")->capture_default_str();
}

struct Result {
  Table table;
  Json summary;
};

Result cmd_expand(const Options& o) {
  BetaSystem sys = make_system(o);
  const int n = o.n > 0 ? o.n : 20;
  Word digits;
  double tail = 0.0;
  int reliable = 0;
  double x = 0.0;
  if (o.x == "1") {
    x = 1.0;
    digits = sys.one_expansion(n);
    tail = shifted_one_value(sys, n);
    reliable = sys.parry_kind() == ParryKind::SimpleParry ? n : std::min(n, sys.precision_cap());
  } else {
    try {
      std::size_t used = 0;
      x = std::stod(o.x, &used);
      if (used != o.x.size()) throw std::invalid_argument(o.x);
    } catch (const std::exception&) {
      throw InvalidArgument("cannot parse x '" + o.x + "'");
    }
    if (!(x >= 0.0 && x < 1.0)) throw DomainError("x must lie in [0,1) or be 1, got " + o.x);
    DigitOrbit orbit = expand(sys, x, n);
    digits = orbit.digits;
    tail = orbit.tail;
    reliable = orbit.reliable_upto;
  }
  Table t("betadim.expand/1", {"beta", "x", "n", "digits", "tail", "parry_kind", "reliable_upto"});
  t.row(sys.label(), x, n, format_word(digits), tail, to_string(sys.parry_kind()), reliable);
  Json j{{"schema", "betadim.expand.summary/1"},   {"beta", sys.label()}, {"x", x},
         {"n", n},
         {"digits", format_word(digits)},           {"tail", tail},        {"parry_kind", to_string(sys.parry_kind())},
         {"period", sys.period()},                  {"precision_cap", sys.precision_cap()},
         {"reliable_upto", reliable}};
  return {t, j};
}

Result cmd_words(const Options& o) {
  BetaSystem sys = make_system(o);
  const int n = o.n > 0 ? o.n : 10;
  WordFilter filter{o.full, o.zeros};
  Json j{{"schema", "betadim.words.summary/1"}, {"beta", sys.label()}, {"n", n}, {"filter", filter.describe()}};
  if (o.list) {
    Table t("betadim.words.list/1", {"word", "full"});
    std::size_t count = 0;
    for_each_word(sys, n, filter, [&](const Word& w, int state) {
      t.row(format_word(w), state == 0);
      ++count;
    }, o.budget);
    j["count"] = count;
    return {t, j};
  }
  WordCounter counter(sys, n, filter);
  const bool exact = counter.total_is_exact();
  Table t("betadim.words/1", {"beta", "n", "filter", "count", "exact", "beta_pow_n", "renyi_upper"});
  const std::string count = exact ? std::to_string(counter.exact_total()) : cell(counter.total());
  t.row(sys.label(), n, filter.describe(), count, exact, std::pow(sys.beta(), n), renyi_upper(sys, n));
  j["count"] = count;
  j["exact"] = exact;
  j["beta_pow_n"] = std::pow(sys.beta(), n);
  j["renyi_upper"] = renyi_upper(sys, n);
  return {t, j};
}

Result cmd_cylinder(const Options& o) {
  BetaSystem sys = make_system(o);
  if (o.word.empty()) throw InvalidArgument("cylinder needs --word");
  Word w = parse_word(o.word);
  if (!is_admissible(sys, w)) throw PreconditionError("word " + format_word(w) + " is not admissible for beta=" + sys.label());
  Cylinder c = cylinder_of(sys, w);
  Table t("betadim.cylinder/1", {"word", "order", "left", "length", "full"});
  t.row(format_word(c.word), c.order, c.left, c.length, c.full);
  Json j{{"schema", "betadim.cylinder.summary/1"}, {"beta", sys.label()}, {"word", format_word(c.word)},
         {"order", c.order}, {"left", c.left}, {"length", c.length}, {"full", c.full}};
  return {t, j};
}

Result cmd_pressure(const Options& o) {
  BetaSystem sys = make_system(o);
  Potential p = Potential::parse(o.potential);
  const int n = o.n > 0 ? o.n : default_pressure_n(sys);
  const int from = o.n_from > 0 ? std::min(o.n_from, n) : n;
  Table t("betadim.pressure/1", {"n", "value", "lower", "upper"});
  Json rows = Json::array();
  for (int k = from; k <= n; ++k) {
    PressureEstimate e = pressure_estimate(sys, p, k, o.budget);
    t.row(e.n, e.value, e.lower, e.upper);
    rows.push_back(Json{{"n", e.n}, {"value", e.value}, {"lower", e.lower}, {"upper", e.upper}});
  }
  Json j{{"schema", "betadim.pressure.summary/1"}, {"beta", sys.label()}, {"potential", p.describe()},
         {"estimates", rows}};
  return {t, j};
}

Result cmd_dimension(const Options& o) {
  TargetSpec spec = make_spec(o);
  DimensionResult r = dimension(spec, o.n, o.tol);
  Table t("betadim.dimension/1", {"n_used", "s1_lo", "s1_hi", "s2_lo", "s2_hi", "s0_lo", "s0_hi", "iterations"});
  t.row(r.n_used, r.s1.lo, r.s1.hi, r.s2.lo, r.s2.hi, r.s0.lo, r.s0.hi, r.iterations);
  auto detail = [](const RootBracket& b) {
    return Json{{"bracket", interval(b.bracket)}, {"bisection", interval(b.bisection)},
                {"slope_bound", b.slope_bound}, {"iterations", b.iterations}, {"at_zero", b.at_zero}};
  };
  Json j{{"schema", "betadim.dimension.summary/1"},
         {"spec", spec_json(spec)},
         {"tol", o.tol},
         {"n_used", r.n_used},
         {"s1", interval(r.s1)},
         {"s2", interval(r.s2)},
         {"s0", interval(r.s0)},
         {"s1_detail", detail(r.s1_detail)},
         {"s2_detail", detail(r.s2_detail)}};
  return {t, j};
}

Result cmd_series(const Options& o) {
  TargetSpec spec = make_spec(o);
  std::vector<SeriesRow> rows = series_partial_sums(spec, o.s, o.n_lo, o.n_hi, o.budget);
  Table t("betadim.series/1", {"n", "log_term1", "log_term2", "log_term_min", "log_partial1", "log_partial2",
                               "log_partial_min", "log_ratio_min"});
  for (const SeriesRow& r : rows) {
    t.row(r.n, r.log_term1, r.log_term2, r.log_term_min, r.log_partial1, r.log_partial2, r.log_partial_min,
          r.log_ratio_min);
  }
  Json j{{"schema", "betadim.series.summary/1"}, {"spec", spec_json(spec)}, {"s", o.s},
         {"n_lo", o.n_lo}, {"n_hi", o.n_hi}};
  if (o.probe_n > 0) j["s0_prime_probe"] = interval(s0_prime_probe(spec, o.probe_n, o.tol));
  return {t, j};
}

Result cmd_cantor(const Options& o) {
  TargetSpec spec = make_spec(o);
  CantorConfig cfg;
  cfg.epsilon = o.epsilon;
  cfg.N = o.N;
  cfg.depth = o.depth;
  cfg.m_schedule = o.m_schedule;
  if (o.mass_case != "auto") cfg.case_override = parse_mass_case(o.mass_case);
  cfg.seed = o.seed;
  cfg.level_budget = o.level_budget;
  cfg.h_samples = o.h_samples;
  cfg.norm_samples = o.norm_samples;

  CantorBuild b = build_levels(spec, cfg);
  assign_mass(b);
  CantorAudit audit = audit_levels(b);

  double s_check = 0.0, s_control = 0.0;
  Json s0_json = nullptr;
  if (o.s_check && o.s_control) {
    s_check = *o.s_check;
    s_control = *o.s_control;
  } else {
    DimensionResult d = dimension(spec, 0, 1e-3);
    s0_json = interval(d.s0);
    s_check = o.s_check.value_or(d.s0.lo - 0.1);
    s_control = o.s_control.value_or(d.s0.hi + 0.5);
  }
  MassLengthReport pass = mass_vs_length_check(b, s_check, cfg.epsilon);
  MassLengthReport control = mass_vs_length_check(b, s_control, cfg.epsilon);

  Table t("betadim.cantor/1", {"level", "m", "auto_m", "candidates", "pairs_kept", "subsampled", "elements", "min_k",
                               "max_k", "min_l", "max_l", "s_i", "s_exact", "log_renorm_min", "log_renorm_max",
                               "total_mass"});
  Json levels = Json::array();
  for (const Level& L : b.levels) {
    int min_k = 0, max_k = 0, min_l = 0, max_l = 0;
    std::vector<double> terms;
    for (std::size_t i = 0; i < L.elements.size(); ++i) {
      const LevelElement& e = L.elements[i];
      min_k = i ? std::min(min_k, e.k) : e.k;
      max_k = std::max(max_k, e.k);
      min_l = i ? std::min(min_l, e.l) : e.l;
      max_l = std::max(max_l, e.l);
      terms.push_back(e.log_weight + e.log_mass);
    }
    const double total = terms.empty() ? 0.0 : std::exp(log_sum_exp(terms));
    t.row(L.index, L.m, L.auto_m, L.candidates, L.pairs_kept, L.subsampled, L.elements.size(), min_k, max_k, min_l,
          max_l, L.s, L.s_exact, L.log_renorm_min, L.log_renorm_max, total);
    levels.push_back(Json{{"level", L.index}, {"m", L.m}, {"gap_lhs", L.gap_lhs}, {"gap_rhs", L.gap_rhs},
                          {"s_i", L.s}, {"total_mass", total}});
  }

  Json mdp = nullptr;
  if (!b.levels.empty() && o.balls > 0) {
    MdpOptions mo;
    mo.balls = o.balls;
    mo.seed = o.seed;
    const double c = o.mdp_c > 0 ? o.mdp_c : 3.0 * spec.sys.beta() * spec.sys.beta();
    MdpReport r = mdp_audit(b, s_check, c, o.delta, mo);
    mdp = Json{{"s", s_check},
               {"c", c},
               {"delta", o.delta},
               {"level", r.level},
               {"level_complete", r.level_complete},
               {"resolution", r.resolution},
               {"cylinders_checked", r.cylinders_checked},
               {"cylinder_violations", r.cylinder_violations},
               {"max_cylinder_log_ratio", r.max_cylinder_log_ratio},
               {"balls_tested", r.balls_tested},
               {"balls_skipped", r.balls_skipped},
               {"balls_excluded", r.balls_excluded},
               {"ball_violations", r.ball_violations},
               {"max_ball_log_ratio", r.max_ball_log_ratio},
               {"max_columns", r.max_columns},
               {"column_violations", r.column_violations},
               {"passed", r.passed()}};
  }

  Json samples = Json::array();
  std::size_t missed = 0;
  for (int i = 0; i < o.samples; ++i) {
    SamplePoint p = sample_point(b, o.seed + static_cast<std::uint64_t>(i));
    if (!p.all_hit()) ++missed;
    Json w = Json::array();
    for (const HitWitness& h : p.witnesses) {
      w.push_back(Json{{"level", h.level}, {"n", h.n}, {"log_dist_x", h.log_dist_x}, {"log_radius_x", h.log_radius_x},
                       {"log_dist_y", h.log_dist_y}, {"log_radius_y", h.log_radius_y}, {"hit", h.hit_x && h.hit_y}});
    }
    samples.push_back(Json{{"x", p.x}, {"y", p.y}, {"witnesses", w}});
  }

  if (!o.dump_path.empty()) {
    std::ofstream dump(o.dump_path);
    if (!dump) throw InvalidArgument("cannot write level dump to " + o.dump_path);
    dump_levels(b, dump);
  }

  auto report = [](const MassLengthReport& r, double s) {
    return Json{{"s", s}, {"checked", r.checked}, {"violations", r.violations}, {"max_log_ratio", r.max_log_ratio},
                {"witness_level", r.witness_level}, {"witness_index", r.witness_index}, {"passed", r.passed()}};
  };
  Json j{{"schema", "betadim.cantor.summary/1"},
         {"spec", spec_json(spec)},
         {"epsilon", cfg.epsilon},
         {"N", cfg.N},
         {"depth", cfg.depth},
         {"seed", cfg.seed},
         {"mass_case", to_string(b.mass_case)},
         {"case_overridden", b.case_overridden},
         {"strengthened_gap", b.strengthened_gap},
         {"x_residual", b.x_residual},
         {"y_residual", b.y_residual},
         {"s0", s0_json},
         {"levels", levels},
         {"audit", Json{{"elements", audit.elements},
                        {"sandwich_violations", audit.sandwich_violations},
                        {"ball_violations", audit.ball_violations},
                        {"order_violations", audit.order_violations},
                        {"remark_violations", audit.remark_violations},
                        {"max_remark_excess", audit.max_remark_excess},
                        {"max_conservation_error", audit.max_conservation_error}}},
         {"mass_vs_length", report(pass, s_check)},
         {"mass_vs_length_control", report(control, s_control)},
         {"mdp", mdp},
         {"sample_misses", missed},
         {"samples", samples}};
  return {t, j};
}

Result cmd_boxdim(const Options& o) {
  TargetSpec spec = make_spec(o);
  StageSet set = finite_stage_set(spec, o.n_lo, o.n_hi, o.budget);
  BoxSweep sweep = box_count_sweep(set, o.k_lo, o.k_hi);
  Table t("betadim.boxdim/1", {"k", "occupied", "dim_estimate"});
  for (const BoxCount& b : sweep.rows) t.row(b.k, b.occupied, b.dim_estimate ? cell(*b.dim_estimate) : std::string());
  Json j{{"schema", "betadim.boxdim.summary/1"}, {"spec", spec_json(spec)}, {"n_lo", o.n_lo}, {"n_hi", o.n_hi},
         {"rectangles", set.rectangles()}, {"dropped", set.dropped()}};
  j["slope"] = sweep.slope ? Json(*sweep.slope) : Json(nullptr);
  return {t, j};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write " + path);
  f << text;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Numerical companion for shrinking-target sets of beta-transformations", "betadim"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.set_config("--config", "", "TOML or INI file; command-line flags override it");
  app.add_option("--threads", o.threads, "worker cap (0: BETADIM_THREADS or all cores)");
  app.add_flag("--strict", o.strict, "fail instead of warning when digits pass the precision cap");
  app.add_option("--out", o.out_path, "write the CSV table here instead of stdout");
  app.add_option("--summary", o.summary_path, "write the JSON summary here");
  app.add_flag("--json", o.json, "print the JSON summary instead of the table");

  CLI::App* expand_cmd = app.add_subcommand("expand", "greedy digits of x (or of 1)");
  expand_cmd->add_option("--beta", o.spec.beta, "base")->capture_default_str();
  expand_cmd->add_option("--x", o.x, "point in [0,1), or 1")->capture_default_str();
  expand_cmd->add_option("--n", o.n, "number of digits (default 20)");

  CLI::App* words_cmd = app.add_subcommand("words", "count or list admissible words");
  words_cmd->add_option("--beta", o.spec.beta, "base")->capture_default_str();
  words_cmd->add_option("--n", o.n, "word length (default 10)");
  words_cmd->add_flag("--full", o.full, "full words only");
  words_cmd->add_option("--zeros", o.zeros, "words must end with this many zeros");
  words_cmd->add_flag("--list", o.list, "list the words instead of counting");
  words_cmd->add_option("--budget", o.budget, "largest enumeration allowed");

  CLI::App* cyl_cmd = app.add_subcommand("cylinder", "geometry of one cylinder");
  cyl_cmd->add_option("--beta", o.spec.beta, "base")->capture_default_str();
  cyl_cmd->add_option("--word", o.word, "digits, e.g. 1001 or 1,0,12")->required();

  CLI::App* p_cmd = app.add_subcommand("pressure", "pressure estimate with bracket");
  p_cmd->add_option("--beta", o.spec.beta, "base")->capture_default_str();
  p_cmd->add_option("--potential", o.potential, "potential literal")->capture_default_str();
  p_cmd->add_option("--n", o.n, "word length (0: largest n with at most 1e7 words)");
  p_cmd->add_option("--n-from", o.n_from, "also report every n from here up to --n");
  p_cmd->add_option("--budget", o.budget, "largest enumeration allowed");

  CLI::App* d_cmd = app.add_subcommand("dimension", "brackets for s1, s2 and s0");
  add_spec_options(d_cmd, o.spec);
  d_cmd->add_option("--n", o.n, "pressure word length (0: chosen by budget)");
  d_cmd->add_option("--tol", o.tol, "bisection tolerance")->capture_default_str();

  CLI::App* s_cmd = app.add_subcommand("series", "covering series terms around s");
  add_spec_options(s_cmd, o.spec);
  s_cmd->add_option("--s", o.s, "exponent")->capture_default_str();
  s_cmd->add_option("--n-lo", o.n_lo, "first n")->capture_default_str();
  s_cmd->add_option("--n-hi", o.n_hi, "last n")->capture_default_str();
  s_cmd->add_option("--probe-n", o.probe_n, "also locate the series-ratio crossing at this n");
  s_cmd->add_option("--tol", o.tol, "probe tolerance")->capture_default_str();
  s_cmd->add_option("--budget", o.budget, "largest enumeration allowed");

  CLI::App* c_cmd = app.add_subcommand("cantor", "build the Cantor levels, assign mass and audit them");
  add_spec_options(c_cmd, o.spec);
  c_cmd->add_option("--epsilon", o.epsilon, "construction epsilon in (0,1)")->capture_default_str();
  c_cmd->add_option("--N", o.N, "zero block closing U_i and W_i")->capture_default_str();
  c_cmd->add_option("--depth", o.depth, "number of levels")->capture_default_str();
  c_cmd->add_option("--m", o.m_schedule, "m_1 m_2 ...; 0 entries are chosen automatically")->delimiter(',');
  c_cmd->add_option("--case", o.mass_case, "auto, CaseI or CaseII")->capture_default_str();
  c_cmd->add_option("--seed", o.seed, "seed for every sampling step")->capture_default_str();
  c_cmd->add_option("--level-budget", o.level_budget, "(U, W) pairs kept per level")->capture_default_str();
  c_cmd->add_option("--h-samples", o.h_samples, "H words kept per pair")->capture_default_str();
  c_cmd->add_option("--norm-samples", o.norm_samples, "words drawn for s_i on large levels")->capture_default_str();
  c_cmd->add_option("--s", o.s_check, "exponent for mass_vs_length and the mdp audit (default s0 - 0.1)");
  c_cmd->add_option("--s-control", o.s_control, "negative-control exponent (default s0 + 0.5)");
  c_cmd->add_option("--balls", o.balls, "random balls in the mdp audit (0 skips it)")->capture_default_str();
  c_cmd->add_option("--delta", o.delta, "largest ball radius")->capture_default_str();
  c_cmd->add_option("--mdp-c", o.mdp_c, "constant c in mu(U) <= c|U|^s (default 3 beta^2)");
  c_cmd->add_option("--samples", o.samples, "sample points with hitting witnesses")->capture_default_str();
  c_cmd->add_option("--dump", o.dump_path, "write one line per level element here");

  CLI::App* b_cmd = app.add_subcommand("boxdim", "box counts of the finite-stage set");
  add_spec_options(b_cmd, o.spec);
  b_cmd->add_option("--n-lo", o.n_lo, "first n")->capture_default_str();
  b_cmd->add_option("--n-hi", o.n_hi, "last n")->capture_default_str();
  b_cmd->add_option("--k-lo", o.k_lo, "first grid exponent")->capture_default_str();
  b_cmd->add_option("--k-hi", o.k_hi, "last grid exponent")->capture_default_str();
  b_cmd->add_option("--budget", o.budget, "largest number of intervals")->capture_default_str();

  // The boxdim defaults differ from series.
  o.n_lo = 1;
  o.n_hi = 12;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  if (b_cmd->parsed()) {
    if (b_cmd->count("--n-lo") == 0) o.n_lo = 6;
    if (b_cmd->count("--n-hi") == 0) o.n_hi = 10;
  }

  set_thread_cap(o.threads);
  WarningSink previous = set_warning_sink([&err](const std::string& m) { err << "warning: " << m << '\n'; });
  struct Restore {
    WarningSink& sink;
    ~Restore() {
      set_warning_sink(sink);
      set_thread_cap(0);
    }
  } restore{previous};
  try {
    std::optional<Result> r;
    if (expand_cmd->parsed()) r = cmd_expand(o);
    else if (words_cmd->parsed()) r = cmd_words(o);
    else if (cyl_cmd->parsed()) r = cmd_cylinder(o);
    else if (p_cmd->parsed()) r = cmd_pressure(o);
    else if (d_cmd->parsed()) r = cmd_dimension(o);
    else if (s_cmd->parsed()) r = cmd_series(o);
    else if (c_cmd->parsed()) r = cmd_cantor(o);
    else if (b_cmd->parsed()) r = cmd_boxdim(o);
    if (!r) return kUsage;

    std::ostringstream table;
    r->table.write(table);
    const std::string summary = r->summary.dump(2) + "\n";
    if (!o.out_path.empty()) write_file(o.out_path, table.str());
    if (!o.summary_path.empty()) write_file(o.summary_path, summary);
    if (o.json) out << summary;
    else if (o.out_path.empty()) out << table.str();
    return kOk;
  } catch (const BudgetExceeded& e) {
    err << "error: budget exhausted: " << e.what() << '\n';
    return kBudget;
  } catch (const HypothesisViolation& e) {
    err << "error: hypothesis violated: " << e.what() << '\n';
    return kHypothesis;
  } catch (const PreconditionError& e) {
    err << "error: precondition violated: " << e.what() << '\n';
    return kHypothesis;
  } catch (const DomainError& e) {
    err << "error: domain violated: " << e.what() << '\n';
    return kHypothesis;
  } catch (const PrecisionError& e) {
    err << "error: precision cap: " << e.what() << '\n';
    return kHypothesis;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace betadim::cli

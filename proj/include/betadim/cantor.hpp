#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "betadim/potential.hpp"

namespace betadim {

enum class MassCase { CaseI, CaseII };
const char* to_string(MassCase c);
MassCase parse_mass_case(const std::string& text);

struct CantorConfig {
  double epsilon = 0.3;
  int N = 1;  // zero block closing every U_i and W_i
  int depth = 2;
  // Entries that are missing or <= 0 are chosen automatically.
  std::vector<int> m_schedule;
  std::optional<MassCase> case_override;
  double level_budget = 16384;     // (U, W) pairs kept per level
  int h_samples = 2;               // H words kept per pair when there are more
  int norm_samples = 4096;         // words drawn for s_i when C_m is too large to list
  double enumerate_limit = 65536;  // largest C_m that is listed in full
  std::uint64_t seed = 1;
};

// One cylinder of G_i: Γ_i × Υ_i, both of order n_i + k_i.
struct LevelElement {
  Word gamma;    // (Γ_{i-1}, U_i, K_i)
  Word upsilon;  // (Υ_{i-1}, W_i, L_i, H_i)
  int n = 0;     // |Γ_{i-1}| + m_i
  int k = 0;
  int l = 0;
  std::size_t parent = 0;  // index into the previous level (0 at level 1)
  // log of how many siblings this element stands for once U, W and H are
  // subsampled (0 when nothing was dropped).
  double log_weight = 0.0;
  double sf_n = 0.0;  // S_{n_i} f at the left endpoint of (Γ_{i-1}, U_i)
  double sg_n = 0.0;  // S_{n_i} g at the left endpoint of (Υ_{i-1}, W_i)
  double sf_m = 0.0;  // S_{m_i} f over U_i alone
  double sg_m = 0.0;  // S_{m_i} g over W_i alone
  // Left endpoint of I(K_i) minus the x target, and |I(K_i)|, in units of
  // β^{-k_i}; likewise for L_i in units of β^{-l_i}.
  double x_offset = 0.0;
  double x_length = 1.0;
  double y_offset = 0.0;
  double y_length = 1.0;
  double log_h_count = 0.0;  // log #(full words of length k_i - l_i)
  double log_mass = -std::numeric_limits<double>::infinity();

  int order() const { return n + k; }
  double mass() const { return std::exp(log_mass); }
};

struct Level {
  int index = 0;
  int m = 0;
  bool auto_m = false;
  double candidates = 0.0;  // #C_m, full words of length m ending with 0^N
  // gap condition: (ε/(1+ε)) m log β >= (max order of the previous level)·‖f‖
  double gap_lhs = 0.0;
  double gap_rhs = 0.0;
  std::size_t pairs_kept = 0;
  bool subsampled = false;
  // Children of parent p occupy elements[first_child[p], first_child[p+1]).
  std::vector<std::size_t> first_child;
  std::vector<LevelElement> elements;
  // S_m f and S_m g over C_m (or a uniform sample of it when C_m is large);
  // log of #C_m over the number of words summed.
  std::vector<double> norm_f;
  std::vector<double> norm_g;
  double norm_log_scale = 0.0;
  double s = std::numeric_limits<double>::quiet_NaN();  // s_i, set by assign_mass
  bool s_exact = false;  // normalization summed over all of C_m
  double log_renorm_min = 0.0;
  double log_renorm_max = 0.0;
};

struct CantorBuild {
  TargetSpec spec;
  CantorConfig config;
  MassCase mass_case = MassCase::CaseII;
  bool case_overridden = false;
  bool strengthened_gap = false;  // min f >= (1+ε) max g
  // The construction aims at the point spelled by the first precision_cap
  // digits of x0 (y0); these are x0 minus that point.
  double x_residual = 0.0;
  double y_residual = 0.0;
  std::vector<Level> levels;
};

CantorBuild build_levels(const TargetSpec& spec, const CantorConfig& cfg);
// Solves for each s_i and fills log_mass. Without an explicit case the one
// chosen by build_levels is used.
void assign_mass(CantorBuild& build, std::optional<MassCase> mass_case = std::nullopt);

struct CantorAudit {
  std::size_t elements = 0;
  std::size_t sandwich_violations = 0;
  std::size_t ball_violations = 0;   // chosen cylinder not inside its ball
  std::size_t order_violations = 0;  // k < l
  std::size_t remark_violations = 0;
  double max_remark_excess = -std::numeric_limits<double>::infinity();
  double max_conservation_error = 0.0;  // relative, over all parents
  double min_s = std::numeric_limits<double>::quiet_NaN();
  double max_s = std::numeric_limits<double>::quiet_NaN();
};
CantorAudit audit_levels(const CantorBuild& build);

struct MassLengthReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double max_log_ratio = -std::numeric_limits<double>::infinity();  // log μ(I) - (s/(1+ε)) log|I|
  int witness_level = 0;
  std::size_t witness_index = 0;
  bool passed() const { return checked > 0 && violations == 0; }
};
MassLengthReport mass_vs_length_check(const CantorBuild& build, double s, double epsilon);

struct HitWitness {
  int level = 0;
  int n = 0;
  double log_radius_x = 0.0;  // -S_{n_i} f(x*)
  double log_dist_x = 0.0;    // log |T^{n_i} x - x target|
  double log_radius_y = 0.0;
  double log_dist_y = 0.0;
  bool hit_x = false;
  bool hit_y = false;
};

struct SamplePoint {
  double x = 0.0;
  double y = 0.0;
  std::vector<std::size_t> path;  // chosen element index per level
  std::vector<HitWitness> witnesses;
  bool all_hit() const;
};
SamplePoint sample_point(const CantorBuild& build, std::uint64_t seed);

// One line per element: level, index, parent, orders, mass and words.
void dump_levels(const CantorBuild& build, std::ostream& out);

}  // namespace betadim

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "betadim/cantor.hpp"
#include "betadim/interval.hpp"

namespace betadim {

struct Rect {
  Interval x;
  Interval y;
};

// ⋃_{U,W} J_n(U) × J_n(W) for one n, kept as the two factor lists: every
// pairing of an x interval with a y interval is a rectangle of the set.
struct StageLayer {
  int n = 0;
  std::vector<Interval> x;
  std::vector<Interval> y;
  std::size_t dropped_x = 0;  // intervals whose width fell below the floor
  std::size_t dropped_y = 0;

  std::size_t rectangles() const { return x.size() * y.size(); }
  double area() const;
};

struct StageSet {
  std::vector<StageLayer> layers;
  std::size_t rectangles() const;
  std::size_t dropped() const;  // x or y intervals lost to underflow
  std::vector<Rect> materialize(std::size_t budget = 10'000'000) const;
};

// J_n(U) = I_n(U) ∩ (c - r, c + r) with c = left(U) + x0 β^{-n} and
// r = β^{-n} e^{-S_n f(left(U))}, clipped to [0,1]; likewise for W with g, y0.
StageSet finite_stage_set(const TargetSpec& spec, int n_lo, int n_hi, double budget = 1e7);

struct BoxCount {
  int k = 0;
  std::uint64_t occupied = 0;
  std::optional<double> dim_estimate;  // log(occupied) / (k log 2); absent when empty
};

BoxCount box_count(const StageSet& set, int k);
BoxCount box_count(const std::vector<Rect>& rects, int k);

struct BoxSweep {
  std::vector<BoxCount> rows;
  // least-squares slope of log(occupied) against k log 2 over non-empty rows
  std::optional<double> slope;
};
BoxSweep box_count_sweep(const StageSet& set, int k_lo, int k_hi);

struct MdpOptions {
  std::size_t balls = 10000;
  std::uint64_t seed = 1;
};

struct MdpReport {
  int level = 0;            // level whose rectangles measure the balls
  bool level_complete = false;  // its (U, W) pairs were all kept
  double resolution = 0.0;  // largest rectangle side at that level
  std::size_t cylinders_checked = 0;
  std::size_t cylinder_violations = 0;
  double max_cylinder_log_ratio = -1e300;  // log μ(I) - log c - s log|I|
  std::size_t balls_tested = 0;
  std::size_t balls_skipped = 0;   // radius below the resolution
  std::size_t balls_excluded = 0;  // radius not below delta
  std::size_t ball_violations = 0;
  double max_ball_log_ratio = -1e300;
  int max_columns = 0;  // most order-n(r) cylinders met per axis by one ball
  std::size_t column_violations = 0;

  bool passed() const {
    return cylinder_violations == 0 && ball_violations == 0 && balls_tested > 0;
  }
};

// Mass distribution principle check μ(U) <= c|U|^s over every constructed
// cylinder and over random discs of radius below delta centred on sample
// points of the construction.
MdpReport mdp_audit(const CantorBuild& build, double s, double c, double delta, const MdpOptions& opts = {});

}  // namespace betadim

#pragma once

#include <utility>
#include <vector>

#include "lfrac/sampled_function.hpp"
#include "lfrac/space_conditions.hpp"

namespace lfrac {

// Quadrature grid for integrals over step vectors h: radii with
// log-midpoint weights for the measure dr/r on [h_min, h_max], and unit
// directions with their surface-measure weights ({+1,-1} with weight 1
// each in one dimension, uniform angles with weight 2*pi/D in two).
struct HGrid {
  int dim = 1;
  double h_min = 0.0;
  double h_max = 0.0;
  int radius_count = 0;
  double snap_spacing = 0.0;
  std::vector<double> radii;
  std::vector<double> radial_weights;
  std::vector<Point> directions;
  std::vector<double> direction_weights;

  // snap_spacing > 0 rounds each radius to the nearest positive multiple
  // of it, merging duplicates; weight totals are preserved. Snapping to
  // the sample spacing keeps difference stencils on grid nodes, which is
  // what makes piecewise-linear test functions evaluate exactly.
  static HGrid make(int dim, double h_min, double h_max, int radius_count,
                    int direction_count = 64, double snap_spacing = 0.0);

  // h_min = 4 grid spacings (snapped to the grid in one dimension),
  // h_max = the domain diameter.
  static HGrid defaults_for(const SampledFunction& f, int radius_count = 48,
                            int direction_count = 64);

  // Same construction with h_min halved (never below min_h_min); used for
  // the divergence probe. Returns an unchanged copy when already there.
  HGrid refined(double min_h_min) const;
};

// Order-M forward difference of f at x with step h, restricted to X:
// sum_{mu=0..M} (-1)^{M-mu} C(M,mu) f(x + mu h) when every node lies in
// the closure of X, else exactly 0.
double forward_difference(const SampledFunction& f, const Point& x,
                          const Point& h, int order, const Box& X);

// Trapezoidal L^p quasi-norm over the grid (max for p = infinity).
double lp_norm_grid(const SampledFunction& f, double p);

struct SeminormEstimate {
  double value = 0.0;
  // Estimate recomputed with h_min halved; the flag marks a > 20% move,
  // the numerical proxy for a divergent h-integral.
  double refined_value = 0.0;
  bool divergence_flag = false;
  double h_min = 0.0;
  double h_max = 0.0;
  int resolution = 0;
};

// Besov-style seminorm: the L^p norm in x is taken per step h, then the
// weighted q-quasi-norm over h (sup for q = infinity).
SeminormEstimate besov_seminorm_estimate(const SampledFunction& f,
                                         const SpaceParams& sp,
                                         const HGrid& hg);

// Triebel-Lizorkin-style seminorm: the weighted q-quasi-norm over h is
// taken pointwise in x first, the L^p norm last. Requires p < infinity.
SeminormEstimate triebel_seminorm_estimate(const SampledFunction& f,
                                           const SpaceParams& sp,
                                           const HGrid& hg);

// Same estimates counting only stencils that stay inside a single region
// box; the difference to the full estimate isolates what piece boundaries
// contribute.
double besov_seminorm_masked(const SampledFunction& f, const SpaceParams& sp,
                             const HGrid& hg, const std::vector<Box>& regions);
double triebel_seminorm_masked(const SampledFunction& f, const SpaceParams& sp,
                               const HGrid& hg,
                               const std::vector<Box>& regions);

struct NormBreakdown {
  double lp_part = 0.0;
  SeminormEstimate seminorm;
  double total = 0.0;
};

NormBreakdown full_norm(const SampledFunction& f, const SpaceParams& sp,
                        const HGrid& hg, SpaceFamily family);

// Radial profile (|h|, direction-aggregated integrand) for plotting.
std::vector<std::pair<double, double>> h_profile(const SampledFunction& f,
                                                 const SpaceParams& sp,
                                                 const HGrid& hg);

}  // namespace lfrac

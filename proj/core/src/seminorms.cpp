#include "lfrac/seminorms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lfrac/parallel.hpp"

namespace lfrac {

namespace {

bool is_inf(double p) { return std::isinf(p) && p > 0.0; }

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double max_spacing(const SampledFunction& f) {
  double s = f.spacing(0);
  if (f.domain().dim() == 2) s = std::max(s, f.spacing(1));
  return s;
}

// Signed binomial coefficients (-1)^{M-mu} C(M,mu), mu = 0..M.
std::vector<double> signed_binomials(int M) {
  std::vector<double> c(M + 1, 0.0);
  c[0] = 1.0;
  for (int row = 1; row <= M; ++row)
    for (int j = row; j > 0; --j) c[j] += c[j - 1];
  for (int mu = 0; mu <= M; ++mu)
    if ((M - mu) % 2 != 0) c[mu] = -c[mu];
  return c;
}

bool in_closure(const Box& b, const Point& x) {
  return b.contains(x, /*include_upper=*/true);
}

void validate_params(const SampledFunction& f, const SpaceParams& sp,
                     bool triebel) {
  require(sp.n == f.domain().dim(),
          "space dimension does not match the sampled function");
  require(sp.p > 0.0 && !std::isnan(sp.p), "p must lie in (0, infinity]");
  require(sp.q > 0.0 && !std::isnan(sp.q), "q must lie in (0, infinity]");
  require(!triebel || !is_inf(sp.p), "this estimator needs p < infinity");
  require(sp.M >= 1, "difference order must be >= 1");
  require(sp.s > 0.0 && std::isfinite(sp.s), "smoothness s must be positive");
  require(double(sp.M) > sp.s, "difference order must exceed s");
}

void validate_hgrid(const SampledFunction& f, const HGrid& hg) {
  require(hg.dim == f.domain().dim(), "h-grid dimension does not match");
  const double spacing = max_spacing(f);
  if (hg.h_min < spacing - 1e-12) {
    std::ostringstream os;
    os << "h_min = " << hg.h_min << " is below the grid spacing; the "
       << "minimum admissible value is " << spacing;
    throw std::invalid_argument(os.str());
  }
}

// |Delta_h^M f| over all grid nodes; zero where the stencil leaves the
// closure of X (or, when regions are given, where it fits in no single
// region).
void difference_field(const SampledFunction& f, const Point& h, int M,
                      const std::vector<Box>* regions,
                      std::vector<double>& out) {
  const std::vector<double> coef = signed_binomials(M);
  const Box& X = f.domain();
  const std::size_t n = f.points_per_axis();
  out.assign(f.value_count(), 0.0);

  // Grid-aligned steps in one dimension reduce to index shifts; values
  // come straight from the sample array, so piecewise-linear inputs are
  // differenced exactly.
  if (X.dim() == 1 && regions == nullptr) {
    const double ratio = h[0] / f.spacing(0);
    const auto k = static_cast<long long>(std::llround(ratio));
    if (std::abs(ratio - double(k)) < 1e-9) {
      const long long N = static_cast<long long>(n);
      const long long lo = std::max<long long>(0, -static_cast<long long>(M) * k);
      const long long hi =
          std::min<long long>(N - 1, N - 1 - static_cast<long long>(M) * k);
      const auto& vals = f.values();
      for (long long idx = lo; idx <= hi; ++idx) {
        double acc = 0.0;
        for (int mu = 0; mu <= M; ++mu)
          acc += coef[mu] * vals[idx + mu * k];
        out[idx] = std::abs(acc);
      }
      return;
    }
  }

  const bool one_d = X.dim() == 1;
  parallel_for(f.value_count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Point x =
          one_d ? f.grid_point(idx) : f.grid_point(idx / n, idx % n);
      bool inside = true;
      for (int mu = 0; mu <= M && inside; ++mu)
        inside = in_closure(X, x + double(mu) * h);
      if (inside && regions != nullptr) {
        bool in_one = false;
        for (const Box& r : *regions) {
          bool all = true;
          for (int mu = 0; mu <= M && all; ++mu)
            all = in_closure(r, x + double(mu) * h);
          if (all) {
            in_one = true;
            break;
          }
        }
        inside = in_one;
      }
      if (!inside) continue;
      double acc = 0.0;
      for (int mu = 0; mu <= M; ++mu)
        acc += coef[mu] * f.evaluate(x + double(mu) * h);
      out[idx] = std::abs(acc);
    }
  });
}

double trapezoid_weight(const SampledFunction& f, std::size_t idx) {
  const std::size_t n = f.points_per_axis();
  double w = 1.0;
  if (f.domain().dim() == 1) {
    if (idx == 0 || idx == n - 1) w *= 0.5;
    return w * f.spacing(0);
  }
  const std::size_t ix = idx / n, iy = idx % n;
  if (ix == 0 || ix == n - 1) w *= 0.5;
  if (iy == 0 || iy == n - 1) w *= 0.5;
  return w * f.spacing(0) * f.spacing(1);
}

double lp_of_field(const SampledFunction& f, const std::vector<double>& field,
                   double p) {
  if (is_inf(p)) {
    double mx = 0.0;
    for (double v : field) mx = std::max(mx, v);
    return mx;
  }
  double acc = 0.0;
  for (std::size_t idx = 0; idx < field.size(); ++idx)
    if (field[idx] != 0.0)
      acc += trapezoid_weight(f, idx) * std::pow(field[idx], p);
  return std::pow(acc, 1.0 / p);
}

double besov_raw(const SampledFunction& f, const SpaceParams& sp,
                 const HGrid& hg, const std::vector<Box>* regions) {
  std::vector<double> field;
  double total = 0.0, best = 0.0;
  const bool qf = !is_inf(sp.q);
  for (std::size_t ri = 0; ri < hg.radii.size(); ++ri) {
    const double r = hg.radii[ri];
    for (std::size_t di = 0; di < hg.directions.size(); ++di) {
      difference_field(f, r * hg.directions[di], sp.M, regions, field);
      const double lp = lp_of_field(f, field, sp.p);
      if (qf)
        total += hg.radial_weights[ri] * hg.direction_weights[di] *
                 std::pow(r, -sp.s * sp.q) * std::pow(lp, sp.q);
      else
        best = std::max(best, std::pow(r, -sp.s) * lp);
    }
  }
  return qf ? std::pow(total, 1.0 / sp.q) : best;
}

double triebel_raw(const SampledFunction& f, const SpaceParams& sp,
                   const HGrid& hg, const std::vector<Box>* regions) {
  std::vector<double> field;
  std::vector<double> inner(f.value_count(), 0.0);
  const bool qf = !is_inf(sp.q);
  for (std::size_t ri = 0; ri < hg.radii.size(); ++ri) {
    const double r = hg.radii[ri];
    for (std::size_t di = 0; di < hg.directions.size(); ++di) {
      difference_field(f, r * hg.directions[di], sp.M, regions, field);
      const double w = hg.radial_weights[ri] * hg.direction_weights[di] *
                       std::pow(r, -sp.s * sp.q);
      if (qf) {
        for (std::size_t idx = 0; idx < field.size(); ++idx)
          if (field[idx] != 0.0) inner[idx] += w * std::pow(field[idx], sp.q);
      } else {
        const double rs = std::pow(r, -sp.s);
        for (std::size_t idx = 0; idx < field.size(); ++idx)
          inner[idx] = std::max(inner[idx], rs * field[idx]);
      }
    }
  }
  double acc = 0.0;
  for (std::size_t idx = 0; idx < inner.size(); ++idx) {
    const double v = qf ? std::pow(inner[idx], 1.0 / sp.q) : inner[idx];
    if (v != 0.0) acc += trapezoid_weight(f, idx) * std::pow(v, sp.p);
  }
  return std::pow(acc, 1.0 / sp.p);
}

SeminormEstimate run_with_refinement(
    const SampledFunction& f, const SpaceParams& sp, const HGrid& hg,
    double (*raw)(const SampledFunction&, const SpaceParams&, const HGrid&,
                  const std::vector<Box>*)) {
  SeminormEstimate est;
  est.h_min = hg.h_min;
  est.h_max = hg.h_max;
  est.resolution = f.level();
  est.value = raw(f, sp, hg, nullptr);
  const HGrid finer = hg.refined(max_spacing(f));
  if (finer.h_min < hg.h_min - 1e-15) {
    est.refined_value = raw(f, sp, finer, nullptr);
    est.divergence_flag =
        std::max(est.value, est.refined_value) > 1e-10 &&
        std::abs(est.refined_value - est.value) > 0.2 * est.value;
  } else {
    est.refined_value = est.value;
  }
  return est;
}

}  // namespace

HGrid HGrid::make(int dim, double h_min, double h_max, int radius_count,
                  int direction_count, double snap_spacing) {
  require(dim == 1 || dim == 2, "h-grid dimension must be 1 or 2");
  require(std::isfinite(h_min) && std::isfinite(h_max) && h_min > 0.0 &&
              h_min < h_max,
          "need 0 < h_min < h_max");
  require(radius_count >= 1, "need at least one radius");
  require(snap_spacing >= 0.0, "snap spacing must be non-negative");
  HGrid hg;
  hg.dim = dim;
  hg.h_min = h_min;
  hg.h_max = h_max;
  hg.radius_count = radius_count;
  hg.snap_spacing = snap_spacing;

  const double span = std::log(h_max / h_min);
  const double dt = span / radius_count;
  std::vector<double> nodes(radius_count);
  for (int k = 0; k < radius_count; ++k)
    nodes[k] = h_min * std::exp((k + 0.5) * dt);
  if (snap_spacing > 0.0) {
    const double top = std::floor(h_max / snap_spacing);
    require(top >= 1.0, "snap spacing exceeds h_max");
    for (double& r : nodes) {
      double mult = std::round(r / snap_spacing);
      mult = std::clamp(mult, 1.0, top);
      r = mult * snap_spacing;
    }
  }
  for (int k = 0; k < radius_count; ++k) {
    if (!hg.radii.empty() && nodes[k] == hg.radii.back()) {
      hg.radial_weights.back() += dt;
    } else {
      hg.radii.push_back(nodes[k]);
      hg.radial_weights.push_back(dt);
    }
  }

  if (dim == 1) {
    hg.directions = {Point(1.0), Point(-1.0)};
    hg.direction_weights = {1.0, 1.0};
  } else {
    require(direction_count >= 1, "need at least one direction");
    const double dw = 2.0 * std::acos(-1.0) / direction_count;
    for (int j = 0; j < direction_count; ++j) {
      const double th = (j + 0.5) * dw;
      hg.directions.push_back(Point(std::cos(th), std::sin(th)));
      hg.direction_weights.push_back(dw);
    }
  }
  return hg;
}

HGrid HGrid::defaults_for(const SampledFunction& f, int radius_count,
                          int direction_count) {
  const int dim = f.domain().dim();
  const double spacing = max_spacing(f);
  const double h_max = f.domain().diameter();
  double h_min = 4.0 * spacing;
  if (h_min >= h_max / 2.0) h_min = std::max(spacing, h_max / 4.0);
  return make(dim, h_min, h_max, radius_count, direction_count,
              dim == 1 ? f.spacing(0) : 0.0);
}

HGrid HGrid::refined(double min_h_min) const {
  const double target = std::max(h_min / 2.0, min_h_min);
  if (target >= h_min) return *this;
  const int count = static_cast<int>(std::ceil(
      radius_count * std::log(h_max / target) / std::log(h_max / h_min)));
  const int dc = dim == 2 ? static_cast<int>(directions.size()) : 2;
  return make(dim, target, h_max, count, dc, snap_spacing);
}

double forward_difference(const SampledFunction& f, const Point& x,
                          const Point& h, int order, const Box& X) {
  require(order >= 1, "difference order must be >= 1");
  require(x.dim == f.domain().dim() && h.dim == x.dim && X.dim() == x.dim,
          "dimensions do not match");
  const std::vector<double> coef = signed_binomials(order);
  for (int mu = 0; mu <= order; ++mu)
    if (!in_closure(X, x + double(mu) * h)) return 0.0;
  double acc = 0.0;
  for (int mu = 0; mu <= order; ++mu)
    acc += coef[mu] * f.evaluate(x + double(mu) * h);
  return acc;
}

double lp_norm_grid(const SampledFunction& f, double p) {
  require(p > 0.0 && !std::isnan(p), "p must lie in (0, infinity]");
  if (is_inf(p)) return f.sup_abs();
  double acc = 0.0;
  for (std::size_t idx = 0; idx < f.value_count(); ++idx) {
    const double v = std::abs(f.values()[idx]);
    if (v != 0.0) acc += trapezoid_weight(f, idx) * std::pow(v, p);
  }
  return std::pow(acc, 1.0 / p);
}

SeminormEstimate besov_seminorm_estimate(const SampledFunction& f,
                                         const SpaceParams& sp,
                                         const HGrid& hg) {
  validate_params(f, sp, /*triebel=*/false);
  validate_hgrid(f, hg);
  return run_with_refinement(f, sp, hg, &besov_raw);
}

SeminormEstimate triebel_seminorm_estimate(const SampledFunction& f,
                                           const SpaceParams& sp,
                                           const HGrid& hg) {
  validate_params(f, sp, /*triebel=*/true);
  validate_hgrid(f, hg);
  return run_with_refinement(f, sp, hg, &triebel_raw);
}

double besov_seminorm_masked(const SampledFunction& f, const SpaceParams& sp,
                             const HGrid& hg,
                             const std::vector<Box>& regions) {
  validate_params(f, sp, /*triebel=*/false);
  validate_hgrid(f, hg);
  require(!regions.empty(), "need at least one region");
  return besov_raw(f, sp, hg, &regions);
}

double triebel_seminorm_masked(const SampledFunction& f, const SpaceParams& sp,
                               const HGrid& hg,
                               const std::vector<Box>& regions) {
  validate_params(f, sp, /*triebel=*/true);
  validate_hgrid(f, hg);
  require(!regions.empty(), "need at least one region");
  return triebel_raw(f, sp, hg, &regions);
}

NormBreakdown full_norm(const SampledFunction& f, const SpaceParams& sp,
                        const HGrid& hg, SpaceFamily family) {
  NormBreakdown out;
  out.lp_part = lp_norm_grid(f, sp.p);
  out.seminorm = family == SpaceFamily::besov
                     ? besov_seminorm_estimate(f, sp, hg)
                     : triebel_seminorm_estimate(f, sp, hg);
  out.total = out.lp_part + out.seminorm.value;
  return out;
}

std::vector<std::pair<double, double>> h_profile(const SampledFunction& f,
                                                 const SpaceParams& sp,
                                                 const HGrid& hg) {
  validate_params(f, sp, /*triebel=*/false);
  validate_hgrid(f, hg);
  std::vector<std::pair<double, double>> prof;
  prof.reserve(hg.radii.size());
  std::vector<double> field;
  const bool qf = !is_inf(sp.q);
  for (std::size_t ri = 0; ri < hg.radii.size(); ++ri) {
    const double r = hg.radii[ri];
    double total = 0.0, best = 0.0;
    for (std::size_t di = 0; di < hg.directions.size(); ++di) {
      difference_field(f, r * hg.directions[di], sp.M, nullptr, field);
      const double lp = lp_of_field(f, field, sp.p);
      if (qf)
        total += hg.direction_weights[di] * std::pow(r, -sp.s * sp.q) *
                 std::pow(lp, sp.q);
      else
        best = std::max(best, std::pow(r, -sp.s) * lp);
    }
    prof.emplace_back(r, qf ? std::pow(total, 1.0 / sp.q) : best);
  }
  return prof;
}

}  // namespace lfrac

#pragma once

#include <cstddef>
#include <vector>

#include "lfrac/geometry.hpp"

namespace lfrac {

// Scalar field sampled on a uniform dyadic grid over the closure of a box:
// 2^level + 1 points per axis, values row-major with the last axis fastest.
class SampledFunction {
 public:
  SampledFunction(Box domain, int level);

  const Box& domain() const { return domain_; }
  int level() const { return level_; }
  std::size_t points_per_axis() const { return n_; }
  double spacing(int axis) const { return domain_.side(axis) / double(n_ - 1); }
  std::size_t value_count() const { return values_.size(); }

  double& at(std::size_t ix, std::size_t iy = 0) {
    return values_[index(ix, iy)];
  }
  double at(std::size_t ix, std::size_t iy = 0) const {
    return values_[index(ix, iy)];
  }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  Point grid_point(std::size_t ix, std::size_t iy = 0) const;

  // Multilinear interpolation on the closure; points are clamped into the
  // domain and near-node coordinates snap to the node, so images of grid
  // points under exact-arithmetic maps read back exactly.
  double evaluate(const Point& x) const;

  // Level + 1 grid agreeing with *this on the common nodes, new nodes by
  // interpolation.
  SampledFunction upsampled() const;

  double sup_abs() const;

 private:
  std::size_t index(std::size_t ix, std::size_t iy) const {
    return domain_.dim() == 1 ? ix : ix * n_ + iy;
  }

  Box domain_;
  int level_;
  std::size_t n_;
  std::vector<double> values_;
};

// max_x |f(x) - g(x)| over the grid nodes; grids must match in domain,
// dimension and level.
double sup_distance(const SampledFunction& f, const SampledFunction& g);

}  // namespace lfrac

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "lfrac/rb_operator.hpp"

namespace lfrac {

// Attractor-side geometry lives in up to three coordinates: the base
// dimension n plus one graph coordinate.
struct APoint {
  int dim = 1;
  std::array<double, 3> v{0.0, 0.0, 0.0};

  double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
};

// Half-open box in up to three coordinates; degenerate axes (lo == hi)
// are allowed for interval bookkeeping in the address map.
struct ABox {
  int dim = 1;
  std::array<double, 3> lo{0.0, 0.0, 0.0};
  std::array<double, 3> hi{0.0, 0.0, 0.0};

  static ABox from_box(const Box& b);
  static ABox graph_box(const Box& base, double y_lo, double y_hi);

  bool contains(const APoint& x, bool include_upper = false) const;
  APoint center() const;
  double diameter() const;
};

// Finite point cloud with interleaved coordinate storage.
class PointSet {
 public:
  explicit PointSet(int dim = 1);

  int dim() const { return dim_; }
  std::size_t size() const { return coords_.size() / dim_; }
  bool empty() const { return coords_.empty(); }
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }
  void push(const APoint& p);
  APoint get(std::size_t i) const;
  const std::vector<double>& coords() const { return coords_; }

  static PointSet grid_sample(const Box& domain, std::size_t target_count);

 private:
  int dim_;
  std::vector<double> coords_;
};

// Merges points whose coordinates agree after snapping to the given
// tolerance lattice; keeps the smallest representative of each cell and
// returns them sorted, so results are order-independent.
PointSet dedupe(const PointSet& s, double snap = 1e-12);

bool point_set_equal(const PointSet& a, const PointSet& b,
                     double snap = 1e-12);

// Maps acting on points of matching dimension.
struct AffineMap {
  Similitude map;  // acts on all coordinates (dim 1 or 2)
};
struct GraphMap {
  Similitude base;       // acts on the first base.dim() coordinates
  FunctionSpec lambda;   // displacement at the base point
  FunctionSpec scaling;  // multiplies the last coordinate
};
using PieceMap = std::variant<AffineMap, GraphMap>;

struct LocalMapPiece {
  ABox domain;
  PieceMap map;
};

struct LocalMapSystem {
  int dim = 1;
  ABox ambient;
  std::vector<LocalMapPiece> pieces;
};

APoint apply_piece(const LocalMapPiece& piece, const APoint& x);

// Union over pieces of the images of the points lying in the piece
// domain; points in no domain contribute nothing. Result deduplicated.
PointSet floc_apply(const LocalMapSystem& sys, const PointSet& s,
                    double snap = 1e-12);

struct IterationResult {
  PointSet final_set;
  std::vector<double> distances;  // d(K_l, K_{l+1}) per step
  std::vector<std::size_t> sizes;
  bool collapsed = false;
  std::string warning;
  // Hausdorff distances between point clouds carry a floor of the cloud
  // spacing; reported so small distances are read against it.
  double distance_floor = 0.0;
};

IterationResult iterate_attractor(const LocalMapSystem& sys,
                                  const PointSet& k0, int steps,
                                  double snap = 1e-12);

double directed_hausdorff(const PointSet& a, const PointSet& b);
double hausdorff_distance(const PointSet& a, const PointSet& b);

// Base-space system: the partition's similitudes on their subdomains.
LocalMapSystem base_map_system(const Partition& p);

// Graph-space system w_i(x, y) = (u_i(x), lambda_i(x) + S_i(x) y) on
// X_i x [-y_bound, y_bound]; its attractor is the graph of the fixed
// point. y_bound must dominate the fixed-point sup bound.
LocalMapSystem wloc_system(const LocalFractalSystem& sys, double y_bound);

// Same maps with every piece domain widened to the ambient box.
LocalMapSystem global_counterpart(const LocalMapSystem& sys);

// Graph of a sampled function as a point cloud; half_open drops nodes on
// the upper domain boundary so the cloud matches the half-open tiling.
PointSet sampled_graph(const SampledFunction& f, bool half_open = true);

using Code = std::vector<int>;  // entries in 1..m

struct AddressResult {
  APoint point;
  double diameter = 0.0;
  std::size_t valid_prefix = 0;
  bool complete = false;
};

// Center and diameter of f_{c1} o ... o f_{ck} (ambient), intersecting
// with each piece domain along the way. When the composition dies early
// the longest valid prefix is reported instead.
AddressResult address_point(const LocalMapSystem& sys, const Code& code);

// sum_n |a_n - b_n| / (m+1)^n over the compared prefix.
double code_metric(const Code& a, const Code& b, int m);

}  // namespace lfrac

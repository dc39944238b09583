#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace lfrac {

// Points live in R^1 or R^2; unused coordinates stay zero.
struct Point {
  int dim = 1;
  std::array<double, 2> v{0.0, 0.0};

  Point() = default;
  explicit Point(double x) : dim(1), v{x, 0.0} {}
  Point(double x, double y) : dim(2), v{x, y} {}

  double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
};

Point operator+(Point a, const Point& b);
Point operator-(Point a, const Point& b);
Point operator*(double s, Point a);
double euclidean_norm(const Point& a);
double distance(const Point& a, const Point& b);

// Axis-aligned half-open box: the product of [lower_i, upper_i).
// Requires finite bounds with lower_i < upper_i on every axis.
class Box {
 public:
  Box(Point lower, Point upper);
  static Box interval(double lo, double hi);
  static Box rectangle(double lx, double ly, double ux, double uy);

  int dim() const { return lower_.dim; }
  const Point& lower() const { return lower_; }
  const Point& upper() const { return upper_; }
  double side(int axis) const { return upper_[axis] - lower_[axis]; }
  double volume() const;
  double diameter() const;
  Point center() const;

  // Half-open membership by default; include_upper tests the closure.
  bool contains(const Point& x, bool include_upper = false) const;
  bool contains_box(const Box& inner, double tol = 1e-12) const;
  std::optional<Box> intersection(const Box& other) const;

 private:
  Point lower_;
  Point upper_;
};

// Similarity map u(x) = gamma * O x + tau with gamma > 0 and O orthogonal.
class Similitude {
 public:
  // One dimensional: O is +1 or -1.
  Similitude(double gamma, double ortho, double tau);
  // Two dimensional: O given row-major as {o00, o01, o10, o11}.
  Similitude(double gamma, const std::array<double, 4>& ortho, Point tau);

  int dim() const { return dim_; }
  double gamma() const { return gamma_; }
  const std::array<double, 4>& ortho() const { return ortho_; }
  const Point& tau() const { return tau_; }

  Point apply(const Point& x) const;
  Point apply_inverse(const Point& y) const;
  Similitude inverse() const;

  // True when O only permutes and flips axes; image boxes are then exact.
  bool ortho_is_signed_permutation(double tol = 1e-12) const;

  // Half-open bounding box of the image of the closure of b.
  Box map_box(const Box& b) const;

 private:
  int dim_;
  double gamma_;
  std::array<double, 4> ortho_;  // 1-D uses o00 only
  Point tau_;
};

struct PartitionPiece {
  Box subdomain;
  Similitude map;
};

// The pieces' images u_i(X_i) are meant to tile the domain: pairwise
// disjoint with union equal to X. Construction only checks shapes;
// call validate() to test the tiling itself.
class Partition {
 public:
  Partition(Box domain, std::vector<PartitionPiece> pieces);

  int dim() const { return domain_.dim(); }
  std::size_t size() const { return pieces_.size(); }
  const Box& domain() const { return domain_; }
  const PartitionPiece& piece(std::size_t i) const { return pieces_[i]; }
  const Box& image(std::size_t i) const { return images_[i]; }

  // Membership of x in u_i(X_i). Exact box test for signed-permutation
  // orthogonal parts, otherwise a preimage test against the subdomain.
  bool image_contains(std::size_t i, const Point& x,
                      bool include_upper = false) const;

 private:
  Box domain_;
  std::vector<PartitionPiece> pieces_;
  std::vector<Box> images_;
};

struct ValidationReport {
  bool pieces_contained = true;
  bool images_disjoint = true;
  bool images_cover = true;
  // True when disjointness and cover were decided by interval arithmetic;
  // false when a probe grid was used (rotated orthogonal parts).
  bool exact = true;
  std::vector<std::string> problems;
  std::vector<Point> witness_points;

  bool valid() const {
    return pieces_contained && images_disjoint && images_cover;
  }
};

// Checks that every subdomain sits inside the domain and that the piece
// images tile it. probe_resolution cells per axis are used for the
// probe fallback; must be at least 2.
ValidationReport validate(const Partition& p, int probe_resolution = 512);

struct Located {
  std::size_t index = 0;  // zero-based piece index
  Point preimage;
};

// Finds the unique piece with x in u_i(X_i) and returns u_i^{-1}(x).
// Throws std::domain_error when x lies in no image.
Located locate(const Partition& p, const Point& x);

// Like locate but also admits points on the closure of the images, so
// grid points on the upper domain boundary resolve. Returns nullopt
// only when x misses every closed image.
std::optional<Located> locate_closure(const Partition& p, const Point& x);

}  // namespace lfrac

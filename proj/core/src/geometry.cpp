#include "lfrac/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lfrac {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::string fmt_point(const Point& x) {
  std::ostringstream os;
  os << "(";
  for (int a = 0; a < x.dim; ++a) {
    if (a) os << ", ";
    os << x[a];
  }
  os << ")";
  return os.str();
}

}  // namespace

Point operator+(Point a, const Point& b) {
  for (int i = 0; i < a.dim; ++i) a[i] += b[i];
  return a;
}

Point operator-(Point a, const Point& b) {
  for (int i = 0; i < a.dim; ++i) a[i] -= b[i];
  return a;
}

Point operator*(double s, Point a) {
  for (int i = 0; i < a.dim; ++i) a[i] *= s;
  return a;
}

double euclidean_norm(const Point& a) {
  double acc = 0.0;
  for (int i = 0; i < a.dim; ++i) acc += a[i] * a[i];
  return std::sqrt(acc);
}

double distance(const Point& a, const Point& b) {
  return euclidean_norm(a - b);
}

Box::Box(Point lower, Point upper) : lower_(lower), upper_(upper) {
  require(lower.dim == upper.dim, "box corners have different dimensions");
  require(lower.dim == 1 || lower.dim == 2, "box dimension must be 1 or 2");
  for (int a = 0; a < lower.dim; ++a) {
    require(std::isfinite(lower[a]) && std::isfinite(upper[a]),
            "box bounds must be finite");
    require(lower[a] < upper[a], "box needs lower < upper on every axis");
  }
}

Box Box::interval(double lo, double hi) { return Box(Point(lo), Point(hi)); }

Box Box::rectangle(double lx, double ly, double ux, double uy) {
  return Box(Point(lx, ly), Point(ux, uy));
}

double Box::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= side(a);
  return v;
}

double Box::diameter() const { return distance(lower_, upper_); }

Point Box::center() const {
  Point c = lower_;
  for (int a = 0; a < dim(); ++a) c[a] = 0.5 * (lower_[a] + upper_[a]);
  return c;
}

bool Box::contains(const Point& x, bool include_upper) const {
  if (x.dim != dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    if (x[a] < lower_[a]) return false;
    if (include_upper ? x[a] > upper_[a] : x[a] >= upper_[a]) return false;
  }
  return true;
}

bool Box::contains_box(const Box& inner, double tol) const {
  if (inner.dim() != dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    if (inner.lower()[a] < lower_[a] - tol) return false;
    if (inner.upper()[a] > upper_[a] + tol) return false;
  }
  return true;
}

std::optional<Box> Box::intersection(const Box& other) const {
  if (other.dim() != dim()) return std::nullopt;
  Point lo = lower_, hi = upper_;
  for (int a = 0; a < dim(); ++a) {
    lo[a] = std::max(lo[a], other.lower()[a]);
    hi[a] = std::min(hi[a], other.upper()[a]);
    if (!(lo[a] < hi[a])) return std::nullopt;
  }
  return Box(lo, hi);
}

Similitude::Similitude(double gamma, double ortho, double tau)
    : dim_(1), gamma_(gamma), ortho_{ortho, 0.0, 0.0, 1.0}, tau_(tau) {
  require(std::isfinite(gamma) && gamma > 0.0,
          "similarity ratio must be positive and finite");
  require(std::abs(std::abs(ortho) - 1.0) <= 1e-12,
          "orthogonal part in one dimension must be +1 or -1");
  ortho_[0] = (ortho > 0.0) ? 1.0 : -1.0;
}

Similitude::Similitude(double gamma, const std::array<double, 4>& ortho,
                       Point tau)
    : dim_(2), gamma_(gamma), ortho_(ortho), tau_(tau) {
  require(std::isfinite(gamma) && gamma > 0.0,
          "similarity ratio must be positive and finite");
  require(tau.dim == 2, "translation must be two dimensional");
  for (double e : ortho)
    require(std::isfinite(e), "orthogonal part must be finite");
  // O O^T = I, checked entrywise.
  const double r00 = ortho[0] * ortho[0] + ortho[1] * ortho[1];
  const double r01 = ortho[0] * ortho[2] + ortho[1] * ortho[3];
  const double r11 = ortho[2] * ortho[2] + ortho[3] * ortho[3];
  require(std::abs(r00 - 1.0) <= 1e-12 && std::abs(r11 - 1.0) <= 1e-12 &&
              std::abs(r01) <= 1e-12,
          "matrix is not orthogonal");
}

Point Similitude::apply(const Point& x) const {
  if (dim_ == 1) {
    Point y(gamma_ * ortho_[0] * x[0] + tau_[0]);
    return y;
  }
  return Point(gamma_ * (ortho_[0] * x[0] + ortho_[1] * x[1]) + tau_[0],
               gamma_ * (ortho_[2] * x[0] + ortho_[3] * x[1]) + tau_[1]);
}

Point Similitude::apply_inverse(const Point& y) const {
  if (dim_ == 1) return Point(ortho_[0] * (y[0] - tau_[0]) / gamma_);
  const double dx = (y[0] - tau_[0]) / gamma_;
  const double dy = (y[1] - tau_[1]) / gamma_;
  // O^{-1} = O^T
  return Point(ortho_[0] * dx + ortho_[2] * dy,
               ortho_[1] * dx + ortho_[3] * dy);
}

Similitude Similitude::inverse() const {
  if (dim_ == 1)
    return Similitude(1.0 / gamma_, ortho_[0], -ortho_[0] * tau_[0] / gamma_);
  const std::array<double, 4> ot{ortho_[0], ortho_[2], ortho_[1], ortho_[3]};
  const Point t(-(ot[0] * tau_[0] + ot[1] * tau_[1]) / gamma_,
                -(ot[2] * tau_[0] + ot[3] * tau_[1]) / gamma_);
  return Similitude(1.0 / gamma_, ot, t);
}

bool Similitude::ortho_is_signed_permutation(double tol) const {
  if (dim_ == 1) return true;
  const auto near = [tol](double x, double t) { return std::abs(x - t) <= tol; };
  const auto axis_like = [&](double a, double b) {
    return (near(std::abs(a), 1.0) && near(b, 0.0)) ||
           (near(a, 0.0) && near(std::abs(b), 1.0));
  };
  return axis_like(ortho_[0], ortho_[1]) && axis_like(ortho_[2], ortho_[3]);
}

Box Similitude::map_box(const Box& b) const {
  require(b.dim() == dim_, "box dimension does not match the map");
  Point lo, hi;
  lo.dim = hi.dim = dim_;
  bool first = true;
  const int corners = 1 << dim_;
  for (int mask = 0; mask < corners; ++mask) {
    Point c;
    c.dim = dim_;
    for (int a = 0; a < dim_; ++a)
      c[a] = (mask >> a & 1) ? b.upper()[a] : b.lower()[a];
    const Point y = apply(c);
    for (int a = 0; a < dim_; ++a) {
      if (first) {
        lo[a] = hi[a] = y[a];
      } else {
        lo[a] = std::min(lo[a], y[a]);
        hi[a] = std::max(hi[a], y[a]);
      }
    }
    first = false;
  }
  return Box(lo, hi);
}

Partition::Partition(Box domain, std::vector<PartitionPiece> pieces)
    : domain_(domain), pieces_(std::move(pieces)) {
  require(!pieces_.empty(), "a partition needs at least one piece");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    require(pieces_[i].subdomain.dim() == domain_.dim(),
            "piece subdomain dimension does not match the domain");
    require(pieces_[i].map.dim() == domain_.dim(),
            "piece map dimension does not match the domain");
  }
  images_.reserve(pieces_.size());
  for (const auto& pc : pieces_) images_.push_back(pc.map.map_box(pc.subdomain));
}

bool Partition::image_contains(std::size_t i, const Point& x,
                               bool include_upper) const {
  const auto& pc = pieces_[i];
  if (pc.map.ortho_is_signed_permutation())
    return images_[i].contains(x, include_upper);
  const Point y = pc.map.apply_inverse(x);
  return pc.subdomain.contains(y, include_upper);
}

namespace {

// For signed-permutation orthogonal parts the image of a half-open box is
// again half-open up to axis flips; its bounding box has the same measure,
// so containment + pairwise disjointness + matching total volume decide
// the tiling exactly.
bool all_signed_permutation(const Partition& p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!p.piece(i).map.ortho_is_signed_permutation()) return false;
  return true;
}

void validate_exact(const Partition& p, ValidationReport& rep) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Box& img = p.image(i);
    total += img.volume();
    if (!p.domain().contains_box(img)) {
      rep.images_cover = false;
      std::ostringstream os;
      os << "image of piece " << (i + 1) << " leaves the domain: ["
         << fmt_point(img.lower()) << ", " << fmt_point(img.upper()) << ")";
      rep.problems.push_back(os.str());
    }
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const auto overlap = img.intersection(p.image(j));
      if (overlap && overlap->volume() > 1e-12 * p.domain().volume()) {
        rep.images_disjoint = false;
        std::ostringstream os;
        os << "images of pieces " << (i + 1) << " and " << (j + 1)
           << " overlap on [" << fmt_point(overlap->lower()) << ", "
           << fmt_point(overlap->upper()) << ")";
        rep.problems.push_back(os.str());
      }
    }
  }
  const double vol = p.domain().volume();
  if (rep.images_disjoint && std::abs(total - vol) > 1e-12 * vol) {
    rep.images_cover = false;
    std::ostringstream os;
    os << "piece images have total measure " << total
       << " but the domain has measure " << vol;
    rep.problems.push_back(os.str());
    // A one dimensional sweep names a gap when there is one.
    if (p.dim() == 1 && total < vol) {
      std::vector<std::pair<double, double>> iv;
      for (std::size_t i = 0; i < p.size(); ++i)
        iv.emplace_back(p.image(i).lower()[0], p.image(i).upper()[0]);
      std::sort(iv.begin(), iv.end());
      double cursor = p.domain().lower()[0];
      for (const auto& [lo, hi] : iv) {
        if (lo > cursor + 1e-12) {
          rep.witness_points.push_back(Point(0.5 * (cursor + lo)));
          std::ostringstream gap;
          gap << "no image covers [" << cursor << ", " << lo << ")";
          rep.problems.push_back(gap.str());
          break;
        }
        cursor = std::max(cursor, hi);
      }
    }
  }
}

void validate_probe(const Partition& p, int res, ValidationReport& rep) {
  rep.exact = false;
  const int n = p.dim();
  constexpr std::size_t kMaxWitnesses = 16;
  std::size_t uncovered = 0, overlapped = 0;
  const auto probe = [&](const Point& x) {
    int hits = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p.image_contains(i, x)) ++hits;
    if (hits == 0) {
      ++uncovered;
      rep.images_cover = false;
      if (rep.witness_points.size() < kMaxWitnesses)
        rep.witness_points.push_back(x);
    } else if (hits > 1) {
      ++overlapped;
      rep.images_disjoint = false;
      if (rep.witness_points.size() < kMaxWitnesses)
        rep.witness_points.push_back(x);
    }
  };
  // Cell centers stay clear of piece boundaries, where membership is
  // legitimately ambiguous at probe precision.
  if (n == 1) {
    const double lo = p.domain().lower()[0], s = p.domain().side(0);
    for (int k = 0; k < res; ++k) probe(Point(lo + (k + 0.5) * s / res));
  } else {
    const double lx = p.domain().lower()[0], sx = p.domain().side(0);
    const double ly = p.domain().lower()[1], sy = p.domain().side(1);
    for (int kx = 0; kx < res; ++kx)
      for (int ky = 0; ky < res; ++ky)
        probe(Point(lx + (kx + 0.5) * sx / res, ly + (ky + 0.5) * sy / res));
  }
  const auto count = [&](std::size_t c, const char* what) {
    if (c == 0) return;
    std::ostringstream os;
    os << c << " of " << (n == 1 ? res : res * res) << " probe points are "
       << what;
    rep.problems.push_back(os.str());
  };
  count(uncovered, "covered by no piece image");
  count(overlapped, "covered by more than one piece image");
}

}  // namespace

ValidationReport validate(const Partition& p, int probe_resolution) {
  require(probe_resolution >= 2, "probe resolution must be at least 2");
  ValidationReport rep;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!p.domain().contains_box(p.piece(i).subdomain)) {
      rep.pieces_contained = false;
      std::ostringstream os;
      os << "subdomain of piece " << (i + 1) << " is not contained in the domain";
      rep.problems.push_back(os.str());
    }
  }
  if (all_signed_permutation(p))
    validate_exact(p, rep);
  else
    validate_probe(p, probe_resolution, rep);
  return rep;
}

Located locate(const Partition& p, const Point& x) {
  if (x.dim != p.dim())
    throw std::domain_error("point dimension does not match the partition");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.image_contains(i, x))
      return Located{i, p.piece(i).map.apply_inverse(x)};
  }
  throw std::domain_error("point " + fmt_point(x) +
                          " lies in no piece image");
}

std::optional<Located> locate_closure(const Partition& p, const Point& x) {
  if (x.dim != p.dim()) return std::nullopt;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.image_contains(i, x)) return Located{i, p.piece(i).map.apply_inverse(x)};
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.image_contains(i, x, /*include_upper=*/true)) {
      Point y = p.piece(i).map.apply_inverse(x);
      // Round-off from the inverse may push y a hair outside the closed
      // subdomain; clamp so downstream evaluation stays in range.
      const Box& sub = p.piece(i).subdomain;
      for (int a = 0; a < y.dim; ++a)
        y[a] = std::clamp(y[a], sub.lower()[a], sub.upper()[a]);
      return Located{i, y};
    }
  }
  return std::nullopt;
}

}  // namespace lfrac

#include "lfrac/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lfrac {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

long long snap_key(double v, double snap) {
  const double q = v / snap;
  if (std::abs(q) > 9.0e15)
    throw std::invalid_argument("coordinate too large for snap tolerance");
  return std::llround(q);
}

}  // namespace

ABox ABox::from_box(const Box& b) {
  ABox out;
  out.dim = b.dim();
  for (int a = 0; a < b.dim(); ++a) {
    out.lo[a] = b.lower()[a];
    out.hi[a] = b.upper()[a];
  }
  return out;
}

ABox ABox::graph_box(const Box& base, double y_lo, double y_hi) {
  ABox out = from_box(base);
  out.dim = base.dim() + 1;
  out.lo[base.dim()] = y_lo;
  out.hi[base.dim()] = y_hi;
  return out;
}

bool ABox::contains(const APoint& x, bool include_upper) const {
  if (x.dim != dim) return false;
  for (int a = 0; a < dim; ++a) {
    if (x[a] < lo[a]) return false;
    if (include_upper ? x[a] > hi[a] : x[a] >= hi[a]) return false;
  }
  return true;
}

APoint ABox::center() const {
  APoint c;
  c.dim = dim;
  for (int a = 0; a < dim; ++a) c[a] = 0.5 * (lo[a] + hi[a]);
  return c;
}

double ABox::diameter() const {
  double acc = 0.0;
  for (int a = 0; a < dim; ++a) acc += (hi[a] - lo[a]) * (hi[a] - lo[a]);
  return std::sqrt(acc);
}

PointSet::PointSet(int dim) : dim_(dim) {
  require(dim >= 1 && dim <= 3, "point set dimension must be 1, 2 or 3");
}

void PointSet::push(const APoint& p) {
  require(p.dim == dim_, "point dimension does not match the set");
  for (int a = 0; a < dim_; ++a) {
    require(std::isfinite(p[a]), "point coordinates must be finite");
    coords_.push_back(p[a]);
  }
}

APoint PointSet::get(std::size_t i) const {
  APoint p;
  p.dim = dim_;
  for (int a = 0; a < dim_; ++a) p[a] = coords_[i * dim_ + a];
  return p;
}

PointSet PointSet::grid_sample(const Box& domain, std::size_t target_count) {
  require(target_count >= 2, "need at least two sample points");
  PointSet out(domain.dim());
  if (domain.dim() == 1) {
    const std::size_t n = target_count;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      APoint p;
      p.dim = 1;
      p[0] = domain.lower()[0] + domain.side(0) * double(i) / double(n - 1);
      out.push(p);
    }
    return out;
  }
  const std::size_t per_axis = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::sqrt(double(target_count))));
  out.reserve(per_axis * per_axis);
  for (std::size_t i = 0; i < per_axis; ++i)
    for (std::size_t j = 0; j < per_axis; ++j) {
      APoint p;
      p.dim = 2;
      p[0] = domain.lower()[0] + domain.side(0) * double(i) / double(per_axis - 1);
      p[1] = domain.lower()[1] + domain.side(1) * double(j) / double(per_axis - 1);
      out.push(p);
    }
  return out;
}

PointSet dedupe(const PointSet& s, double snap) {
  require(snap > 0.0, "snap tolerance must be positive");
  if (s.empty()) return PointSet(s.dim());
  PointSet out(s.dim());
  if (s.dim() == 1) {
    std::vector<double> v(s.coords());
    std::sort(v.begin(), v.end());
    out.reserve(v.size());
    long long prev_key = 0;
    bool first = true;
    for (double x : v) {
      const long long k = snap_key(x, snap);
      if (first || k != prev_key) {
        APoint p;
        p.dim = 1;
        p[0] = x;
        out.push(p);
        prev_key = k;
        first = false;
      }
    }
    return out;
  }
  const int d = s.dim();
  std::vector<std::array<double, 3>> pts(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const APoint p = s.get(i);
    pts[i] = p.v;
  }
  const auto key_less = [&](const std::array<double, 3>& a,
                            const std::array<double, 3>& b) {
    for (int ax = 0; ax < d; ++ax) {
      const long long ka = snap_key(a[ax], snap), kb = snap_key(b[ax], snap);
      if (ka != kb) return ka < kb;
    }
    return a < b;
  };
  std::sort(pts.begin(), pts.end(), key_less);
  const auto key_eq = [&](const std::array<double, 3>& a,
                          const std::array<double, 3>& b) {
    for (int ax = 0; ax < d; ++ax)
      if (snap_key(a[ax], snap) != snap_key(b[ax], snap)) return false;
    return true;
  };
  pts.erase(std::unique(pts.begin(), pts.end(), key_eq), pts.end());
  out.reserve(pts.size());
  for (const auto& c : pts) {
    APoint p;
    p.dim = d;
    p.v = c;
    out.push(p);
  }
  return out;
}

bool point_set_equal(const PointSet& a, const PointSet& b, double snap) {
  if (a.dim() != b.dim()) return false;
  const PointSet da = dedupe(a, snap), db = dedupe(b, snap);
  if (da.size() != db.size()) return false;
  for (std::size_t i = 0; i < da.size(); ++i)
    for (int ax = 0; ax < da.dim(); ++ax)
      if (snap_key(da.get(i)[ax], snap) != snap_key(db.get(i)[ax], snap))
        return false;
  return true;
}

APoint apply_piece(const LocalMapPiece& piece, const APoint& x) {
  APoint out;
  out.dim = x.dim;
  if (const auto* aff = std::get_if<AffineMap>(&piece.map)) {
    Point base;
    base.dim = aff->map.dim();
    for (int a = 0; a < base.dim; ++a) base[a] = x[a];
    const Point y = aff->map.apply(base);
    for (int a = 0; a < base.dim; ++a) out[a] = y[a];
    return out;
  }
  const auto& gm = std::get<GraphMap>(piece.map);
  Point base;
  base.dim = gm.base.dim();
  for (int a = 0; a < base.dim; ++a) base[a] = x[a];
  const Point y = gm.base.apply(base);
  for (int a = 0; a < base.dim; ++a) out[a] = y[a];
  out[base.dim] = gm.lambda(base) + gm.scaling(base) * x[base.dim];
  return out;
}

PointSet floc_apply(const LocalMapSystem& sys, const PointSet& s,
                    double snap) {
  require(sys.dim == s.dim(), "point set dimension does not match the system");
  PointSet out(sys.dim);
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const APoint p = s.get(i);
    for (const auto& piece : sys.pieces)
      if (piece.domain.contains(p)) out.push(apply_piece(piece, p));
  }
  return dedupe(out, snap);
}

double directed_hausdorff(const PointSet& a, const PointSet& b) {
  if (a.empty() || b.empty())
    throw std::domain_error("Hausdorff distance needs nonempty sets");
  require(a.dim() == b.dim(), "point sets have different dimensions");
  if (a.dim() == 1) {
    std::vector<double> bs(b.coords());
    std::sort(bs.begin(), bs.end());
    double worst = 0.0;
    for (double x : a.coords()) {
      const auto it = std::lower_bound(bs.begin(), bs.end(), x);
      double best = std::numeric_limits<double>::infinity();
      if (it != bs.end()) best = std::min(best, *it - x);
      if (it != bs.begin()) best = std::min(best, x - *(it - 1));
      worst = std::max(worst, best);
    }
    return worst;
  }
  const int d = a.dim();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const APoint p = a.get(i);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      double acc = 0.0;
      for (int ax = 0; ax < d; ++ax) {
        const double diff = p[ax] - b.coords()[j * d + ax];
        acc += diff * diff;
      }
      best = std::min(best, acc);
      if (best == 0.0) break;
    }
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

double hausdorff_distance(const PointSet& a, const PointSet& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

namespace {

double cloud_spacing_floor(const PointSet& k0) {
  // Nearest-neighbor spacing of the seed cloud in one dimension; a cheap
  // proxy (bounding-box diagonal over point count) otherwise.
  if (k0.size() < 2) return 0.0;
  if (k0.dim() == 1) {
    std::vector<double> v(k0.coords());
    std::sort(v.begin(), v.end());
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < v.size(); ++i)
      m = std::min(m, v[i] - v[i - 1]);
    return m;
  }
  std::array<double, 3> lo{}, hi{};
  const int d = k0.dim();
  for (int ax = 0; ax < d; ++ax) lo[ax] = hi[ax] = k0.coords()[ax];
  for (std::size_t i = 1; i < k0.size(); ++i)
    for (int ax = 0; ax < d; ++ax) {
      lo[ax] = std::min(lo[ax], k0.coords()[i * d + ax]);
      hi[ax] = std::max(hi[ax], k0.coords()[i * d + ax]);
    }
  double acc = 0.0;
  for (int ax = 0; ax < d; ++ax) acc += (hi[ax] - lo[ax]) * (hi[ax] - lo[ax]);
  return std::sqrt(acc) / double(k0.size());
}

}  // namespace

IterationResult iterate_attractor(const LocalMapSystem& sys,
                                  const PointSet& k0, int steps, double snap) {
  require(steps >= 0, "step count must be non-negative");
  IterationResult out;
  out.distance_floor = cloud_spacing_floor(k0);
  PointSet current = dedupe(k0, snap);
  out.sizes.push_back(current.size());
  if (current.empty()) {
    out.collapsed = true;
    out.warning = "seed cloud is empty";
    out.final_set = std::move(current);
    return out;
  }
  for (int l = 0; l < steps; ++l) {
    PointSet next = floc_apply(sys, current, snap);
    if (next.empty()) {
      out.collapsed = true;
      std::ostringstream os;
      os << "all points left every piece domain at step " << (l + 1)
         << "; the iteration collapsed to the empty set";
      out.warning = os.str();
      current = std::move(next);
      out.sizes.push_back(0);
      break;
    }
    out.distances.push_back(hausdorff_distance(current, next));
    current = std::move(next);
    out.sizes.push_back(current.size());
  }
  out.final_set = std::move(current);
  return out;
}

LocalMapSystem base_map_system(const Partition& p) {
  LocalMapSystem sys;
  sys.dim = p.dim();
  sys.ambient = ABox::from_box(p.domain());
  sys.pieces.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    sys.pieces.push_back(
        LocalMapPiece{ABox::from_box(p.piece(i).subdomain),
                      AffineMap{p.piece(i).map}});
  return sys;
}

LocalMapSystem wloc_system(const LocalFractalSystem& sys, double y_bound) {
  const double bound = fixed_point_sup_bound(sys);
  if (!(y_bound >= bound)) {
    std::ostringstream os;
    os << "y_bound = " << y_bound
       << " is below the fixed-point sup bound " << bound;
    throw std::invalid_argument(os.str());
  }
  // The vertical slab is padded by one so closed-range y values pass the
  // half-open domain test.
  const double y_lo = -y_bound - 1.0, y_hi = y_bound + 1.0;
  LocalMapSystem out;
  out.dim = sys.partition().dim() + 1;
  out.ambient = ABox::graph_box(sys.partition().domain(), y_lo, y_hi);
  out.pieces.reserve(sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i)
    out.pieces.push_back(LocalMapPiece{
        ABox::graph_box(sys.partition().piece(i).subdomain, y_lo, y_hi),
        GraphMap{sys.partition().piece(i).map, sys.lambda(i),
                 sys.scaling(i)}});
  return out;
}

LocalMapSystem global_counterpart(const LocalMapSystem& sys) {
  LocalMapSystem out = sys;
  for (auto& piece : out.pieces) piece.domain = out.ambient;
  return out;
}

PointSet sampled_graph(const SampledFunction& f, bool half_open) {
  const int n = f.domain().dim();
  PointSet out(n + 1);
  const std::size_t N = f.points_per_axis();
  const std::size_t top = half_open ? N - 1 : N;
  if (n == 1) {
    out.reserve(top);
    for (std::size_t i = 0; i < top; ++i) {
      APoint p;
      p.dim = 2;
      p[0] = f.grid_point(i)[0];
      p[1] = f.at(i);
      out.push(p);
    }
    return out;
  }
  out.reserve(top * top);
  for (std::size_t ix = 0; ix < top; ++ix)
    for (std::size_t iy = 0; iy < top; ++iy) {
      const Point g = f.grid_point(ix, iy);
      APoint p;
      p.dim = 3;
      p[0] = g[0];
      p[1] = g[1];
      p[2] = f.at(ix, iy);
      out.push(p);
    }
  return out;
}

namespace {

struct Interval {
  std::array<double, 3> lo{}, hi{};
  int dim = 1;
  bool empty = false;
};

Interval intersect_closed(const Interval& a, const ABox& b) {
  Interval out = a;
  for (int ax = 0; ax < a.dim; ++ax) {
    out.lo[ax] = std::max(a.lo[ax], b.lo[ax]);
    out.hi[ax] = std::min(a.hi[ax], b.hi[ax]);
    if (out.lo[ax] > out.hi[ax] + 1e-15) out.empty = true;
  }
  return out;
}

Interval map_interval(const LocalMapPiece& piece, const Interval& c) {
  Interval out;
  out.dim = c.dim;
  if (const auto* aff = std::get_if<AffineMap>(&piece.map)) {
    const int n = aff->map.dim();
    bool first = true;
    for (int mask = 0; mask < (1 << n); ++mask) {
      Point corner;
      corner.dim = n;
      for (int ax = 0; ax < n; ++ax)
        corner[ax] = (mask >> ax & 1) ? c.hi[ax] : c.lo[ax];
      const Point y = aff->map.apply(corner);
      for (int ax = 0; ax < n; ++ax) {
        if (first) {
          out.lo[ax] = out.hi[ax] = y[ax];
        } else {
          out.lo[ax] = std::min(out.lo[ax], y[ax]);
          out.hi[ax] = std::max(out.hi[ax], y[ax]);
        }
      }
      first = false;
    }
    return out;
  }
  const auto& gm = std::get<GraphMap>(piece.map);
  const int n = gm.base.dim();
  bool first = true;
  Point blo, bhi;
  blo.dim = bhi.dim = n;
  for (int ax = 0; ax < n; ++ax) {
    blo[ax] = c.lo[ax];
    bhi[ax] = c.hi[ax];
  }
  for (int mask = 0; mask < (1 << n); ++mask) {
    Point corner;
    corner.dim = n;
    for (int ax = 0; ax < n; ++ax)
      corner[ax] = (mask >> ax & 1) ? c.hi[ax] : c.lo[ax];
    const Point y = gm.base.apply(corner);
    for (int ax = 0; ax < n; ++ax) {
      if (first) {
        out.lo[ax] = out.hi[ax] = y[ax];
      } else {
        out.lo[ax] = std::min(out.lo[ax], y[ax]);
        out.hi[ax] = std::max(out.hi[ax], y[ax]);
      }
    }
    first = false;
  }
  // y' = lambda(x) + S(x) * y over the base sub-box times [ylo, yhi];
  // bounded through the probed ranges of lambda and S (conservative).
  Box base_region = [&] {
    Point lo2 = blo, hi2 = bhi;
    for (int ax = 0; ax < n; ++ax)
      if (!(lo2[ax] < hi2[ax]))
        hi2[ax] = std::nextafter(lo2[ax],
                                 std::numeric_limits<double>::infinity());
    return Box(lo2, hi2);
  }();
  const auto lr = gm.lambda.range(base_region, 256);
  const auto sr = gm.scaling.range(base_region, 256);
  const double ylo = c.lo[n], yhi = c.hi[n];
  double mn = std::numeric_limits<double>::infinity();
  double mx = -mn;
  for (const double sv : {sr.first, sr.second})
    for (const double yv : {ylo, yhi}) {
      mn = std::min(mn, sv * yv);
      mx = std::max(mx, sv * yv);
    }
  out.lo[n] = lr.first + mn;
  out.hi[n] = lr.second + mx;
  return out;
}

}  // namespace

AddressResult address_point(const LocalMapSystem& sys, const Code& code) {
  if (code.empty()) throw std::invalid_argument("code must be nonempty");
  if (code.size() > 256)
    throw std::invalid_argument("code prefixes longer than 256 not supported");
  const int m = static_cast<int>(sys.pieces.size());
  for (int c : code)
    if (c < 1 || c > m)
      throw std::domain_error("code entries must lie in 1.." +
                              std::to_string(m));
  AddressResult out;
  Interval last_good;
  std::size_t best_len = 0;
  for (std::size_t len = 1; len <= code.size(); ++len) {
    Interval cur;
    cur.dim = sys.dim;
    for (int ax = 0; ax < sys.dim; ++ax) {
      cur.lo[ax] = sys.ambient.lo[ax];
      cur.hi[ax] = sys.ambient.hi[ax];
    }
    bool ok = true;
    for (std::size_t j = len; j-- > 0;) {
      const auto& piece = sys.pieces[static_cast<std::size_t>(code[j] - 1)];
      cur = intersect_closed(cur, piece.domain);
      if (cur.empty) {
        ok = false;
        break;
      }
      cur = map_interval(piece, cur);
    }
    if (!ok) break;
    last_good = cur;
    best_len = len;
  }
  if (best_len == 0)
    throw std::domain_error(
        "the first code entry already maps an empty intersection");
  ABox final_box;
  final_box.dim = sys.dim;
  final_box.lo = last_good.lo;
  final_box.hi = last_good.hi;
  out.point = final_box.center();
  out.diameter = final_box.diameter();
  out.valid_prefix = best_len;
  out.complete = best_len == code.size();
  return out;
}

double code_metric(const Code& a, const Code& b, int m) {
  if (m < 1) throw std::invalid_argument("piece count must be positive");
  if (a.size() != b.size())
    throw std::invalid_argument(
        "codes must have equal length; pad the shorter one explicitly");
  for (const Code* c : {&a, &b})
    for (int e : *c)
      if (e < 1 || e > m)
        throw std::domain_error("code entries must lie in 1.." +
                                std::to_string(m));
  double acc = 0.0;
  double denom = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    denom *= double(m + 1);
    acc += std::abs(double(a[i] - b[i])) / denom;
  }
  return acc;
}

}  // namespace lfrac

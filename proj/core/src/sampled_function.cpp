#include "lfrac/sampled_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lfrac {

SampledFunction::SampledFunction(Box domain, int level)
    : domain_(domain), level_(level) {
  if (level < 1 || level > 24)
    throw std::invalid_argument("grid level must be between 1 and 24");
  n_ = (std::size_t{1} << level) + 1;
  values_.assign(domain.dim() == 1 ? n_ : n_ * n_, 0.0);
}

Point SampledFunction::grid_point(std::size_t ix, std::size_t iy) const {
  if (domain_.dim() == 1)
    return Point(domain_.lower()[0] + spacing(0) * double(ix));
  return Point(domain_.lower()[0] + spacing(0) * double(ix),
               domain_.lower()[1] + spacing(1) * double(iy));
}

double SampledFunction::evaluate(const Point& x) const {
  if (x.dim != domain_.dim())
    throw std::domain_error("evaluation point has the wrong dimension");
  double w[2];
  std::size_t i0[2];
  for (int a = 0; a < domain_.dim(); ++a) {
    double t = (x[a] - domain_.lower()[a]) / spacing(a);
    t = std::clamp(t, 0.0, double(n_ - 1));
    std::size_t i = static_cast<std::size_t>(t);
    if (i >= n_ - 1) i = n_ - 2;
    double frac = t - double(i);
    if (frac < 1e-9) frac = 0.0;
    if (frac > 1.0 - 1e-9) frac = 1.0;
    i0[a] = i;
    w[a] = frac;
  }
  if (domain_.dim() == 1)
    return (1.0 - w[0]) * values_[i0[0]] + w[0] * values_[i0[0] + 1];
  const double top =
      (1.0 - w[1]) * at(i0[0], i0[1]) + w[1] * at(i0[0], i0[1] + 1);
  const double bot =
      (1.0 - w[1]) * at(i0[0] + 1, i0[1]) + w[1] * at(i0[0] + 1, i0[1] + 1);
  return (1.0 - w[0]) * top + w[0] * bot;
}

SampledFunction SampledFunction::upsampled() const {
  SampledFunction out(domain_, level_ + 1);
  const std::size_t m = out.n_;
  if (domain_.dim() == 1) {
    for (std::size_t i = 0; i < m; ++i) {
      out.values_[i] = (i % 2 == 0)
                           ? values_[i / 2]
                           : 0.5 * (values_[i / 2] + values_[i / 2 + 1]);
    }
    return out;
  }
  for (std::size_t ix = 0; ix < m; ++ix)
    for (std::size_t iy = 0; iy < m; ++iy) {
      const std::size_t cx = ix / 2, cy = iy / 2;
      double v;
      if (ix % 2 == 0 && iy % 2 == 0)
        v = at(cx, cy);
      else if (ix % 2 == 0)
        v = 0.5 * (at(cx, cy) + at(cx, cy + 1));
      else if (iy % 2 == 0)
        v = 0.5 * (at(cx, cy) + at(cx + 1, cy));
      else
        v = 0.25 * (at(cx, cy) + at(cx, cy + 1) + at(cx + 1, cy) +
                    at(cx + 1, cy + 1));
      out.values_[ix * m + iy] = v;
    }
  return out;
}

double SampledFunction::sup_abs() const {
  double mx = 0.0;
  for (double v : values_) mx = std::max(mx, std::abs(v));
  return mx;
}

double sup_distance(const SampledFunction& f, const SampledFunction& g) {
  if (f.level() != g.level() || f.domain().dim() != g.domain().dim())
    throw std::invalid_argument("grids do not match");
  double mx = 0.0;
  const auto& a = f.values();
  const auto& b = g.values();
  for (std::size_t i = 0; i < a.size(); ++i)
    mx = std::max(mx, std::abs(a[i] - b[i]));
  return mx;
}

}  // namespace lfrac

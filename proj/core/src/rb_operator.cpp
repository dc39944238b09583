#include "lfrac/rb_operator.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "lfrac/parallel.hpp"

namespace lfrac {

LocalFractalSystem::LocalFractalSystem(Partition partition,
                                       std::vector<FunctionSpec> lambdas,
                                       std::vector<FunctionSpec> scalings)
    : partition_(std::move(partition)),
      lambdas_(std::move(lambdas)),
      scalings_(std::move(scalings)) {
  if (lambdas_.size() != partition_.size() ||
      scalings_.size() != partition_.size())
    throw std::invalid_argument(
        "need exactly one displacement and one scaling per piece");
  for (std::size_t i = 0; i < partition_.size(); ++i) {
    const Box& sub = partition_.piece(i).subdomain;
    if (!lambdas_[i].domain().contains_box(sub))
      throw std::invalid_argument(
          "displacement domain does not cover its piece subdomain");
    if (!scalings_[i].domain().contains_box(sub))
      throw std::invalid_argument(
          "scaling domain does not cover its piece subdomain");
  }
}

double max_scaling_sup(const LocalFractalSystem& sys, int probe_per_axis) {
  double mx = 0.0;
  for (std::size_t i = 0; i < sys.size(); ++i)
    mx = std::max(mx, sys.scaling(i).sup_abs(sys.partition().piece(i).subdomain,
                                             probe_per_axis));
  return mx;
}

double max_lambda_sup(const LocalFractalSystem& sys, int probe_per_axis) {
  double mx = 0.0;
  for (std::size_t i = 0; i < sys.size(); ++i)
    mx = std::max(mx, sys.lambda(i).sup_abs(sys.partition().piece(i).subdomain,
                                            probe_per_axis));
  return mx;
}

double fixed_point_sup_bound(const LocalFractalSystem& sys) {
  const double s = max_scaling_sup(sys);
  if (s >= 1.0)
    throw std::invalid_argument("scalings do not contract in the sup norm");
  return max_lambda_sup(sys) / (1.0 - s);
}

namespace {

void check_grid_resolution(const LocalFractalSystem& sys,
                           const SampledFunction& f) {
  const Partition& p = sys.partition();
  for (std::size_t i = 0; i < p.size(); ++i)
    for (int a = 0; a < p.dim(); ++a)
      if (p.image(i).side(a) < f.spacing(a) - 1e-12) {
        std::ostringstream os;
        os << "grid level " << f.level() << " cannot resolve piece " << (i + 1)
           << ": image side " << p.image(i).side(a) << " is below the grid "
           << "spacing " << f.spacing(a);
        throw std::invalid_argument(os.str());
      }
}

}  // namespace

SampledFunction rb_apply(const LocalFractalSystem& sys,
                         const SampledFunction& f) {
  const Partition& p = sys.partition();
  if (!(p.domain().contains_box(f.domain()) &&
        f.domain().contains_box(p.domain())))
    throw std::invalid_argument("grid domain does not match the partition");
  check_grid_resolution(sys, f);
  SampledFunction out(f.domain(), f.level());
  const std::size_t n = f.points_per_axis();
  const bool one_d = p.dim() == 1;
  auto& vals = out.values();
  parallel_for(out.value_count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Point x =
          one_d ? f.grid_point(idx) : f.grid_point(idx / n, idx % n);
      const auto loc = locate_closure(p, x);
      if (!loc) {
        std::ostringstream os;
        os << "grid node (";
        for (int a = 0; a < x.dim; ++a) os << (a ? ", " : "") << x[a];
        os << ") lies in no piece image; validate the partition";
        throw std::runtime_error(os.str());
      }
      const Point& y = loc->preimage;
      vals[idx] = sys.lambda(loc->index)(y) +
                  sys.scaling(loc->index)(y) * f.evaluate(y);
    }
  });
  return out;
}

FixedPointResult solve_fixed_point(const LocalFractalSystem& sys,
                                   const SolveOptions& opts) {
  if (opts.max_iter < 1)
    throw std::invalid_argument("need at least one iteration");
  if (!(opts.tol > 0.0))
    throw std::invalid_argument("solver tolerance must be positive");
  const double contraction = max_scaling_sup(sys);
  if (contraction >= 1.0) {
    std::ostringstream os;
    os << "operator is not contractive: max scaling sup is " << contraction;
    throw std::invalid_argument(os.str());
  }
  SampledFunction f = [&] {
    if (!opts.initial) return SampledFunction(sys.partition().domain(), opts.level);
    const SampledFunction& init = *opts.initial;
    if (init.level() != opts.level ||
        !(init.domain().contains_box(sys.partition().domain()) &&
          sys.partition().domain().contains_box(init.domain())))
      throw std::invalid_argument("initial guess grid does not match");
    return init;
  }();

  SolveDiagnostics diag;
  for (int k = 0; k < opts.max_iter; ++k) {
    SampledFunction g = rb_apply(sys, f);
    const double step = sup_distance(g, f);
    const double prev =
        diag.step_norms.empty() ? step : diag.step_norms.back();
    diag.step_norms.push_back(step);
    diag.contraction_history.push_back(
        diag.step_norms.size() == 1 ? 1.0 : (prev > 0.0 ? step / prev : 0.0));
    f = std::move(g);
    ++diag.iterations;
    // step < tol ends the iteration; so does contraction * step < tol,
    // since the residual of the current iterate is at most that.
    if (step < opts.tol || contraction * step < opts.tol) {
      diag.converged = true;
      break;
    }
  }
  // One extra application measures the true residual of the returned grid.
  diag.final_residual = sup_distance(rb_apply(sys, f), f);
  return FixedPointResult{std::move(f), std::move(diag)};
}

ExactValue evaluate_exact(const LocalFractalSystem& sys, const Point& x,
                          int depth) {
  if (depth < 0) throw std::invalid_argument("depth must be non-negative");
  if (!sys.partition().domain().contains(x, /*include_upper=*/true))
    throw std::domain_error("point lies outside the domain");
  ExactValue out;
  double prod = 1.0;
  Point cur = x;
  for (int k = 0; k < depth; ++k) {
    const auto loc = locate_closure(sys.partition(), cur);
    if (!loc) break;
    const Point& y = loc->preimage;
    out.value += prod * sys.lambda(loc->index)(y);
    prod *= sys.scaling(loc->index)(y);
    cur = y;
    ++out.depth_reached;
  }
  out.tail_bound = std::abs(prod) * fixed_point_sup_bound(sys);
  return out;
}

double sup_contraction_estimate(const LocalFractalSystem& sys, int trials,
                                std::uint64_t seed, int level) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const Box& dom = sys.partition().domain();
  double best = 0.0;
  for (int t = 0; t < trials; ++t) {
    SampledFunction g(dom, level), h(dom, level);
    for (auto& v : g.values()) v = uni(rng);
    for (auto& v : h.values()) v = uni(rng);
    const double den = sup_distance(g, h);
    if (den == 0.0) continue;
    const double num = sup_distance(rb_apply(sys, g), rb_apply(sys, h));
    best = std::max(best, num / den);
  }
  return best;
}

LinearityCheck lambda_linearity_check(const LocalFractalSystem& a_sys,
                                      const LocalFractalSystem& b_sys,
                                      double a, double b,
                                      const SolveOptions& opts) {
  if (a_sys.size() != b_sys.size())
    throw std::invalid_argument("systems have different piece counts");
  std::vector<FunctionSpec> combined;
  std::vector<FunctionSpec> scalings;
  combined.reserve(a_sys.size());
  for (std::size_t i = 0; i < a_sys.size(); ++i) {
    combined.push_back(FunctionSpec::linear_combination(a, a_sys.lambda(i), b,
                                                        b_sys.lambda(i)));
    scalings.push_back(a_sys.scaling(i));
  }
  LocalFractalSystem c_sys(a_sys.partition(), std::move(combined),
                           std::move(scalings));
  const auto fa = solve_fixed_point(a_sys, opts);
  const auto fb = solve_fixed_point(b_sys, opts);
  const auto fc = solve_fixed_point(c_sys, opts);
  double dev = 0.0;
  for (std::size_t i = 0; i < fc.f.value_count(); ++i) {
    const double want = a * fa.f.values()[i] + b * fb.f.values()[i];
    dev = std::max(dev, std::abs(fc.f.values()[i] - want));
  }
  LinearityCheck out;
  out.deviation = dev;
  out.threshold = 10.0 * opts.tol;
  out.passed = dev <= out.threshold;
  return out;
}

}  // namespace lfrac

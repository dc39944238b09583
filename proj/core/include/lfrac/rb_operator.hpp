#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lfrac/function_spec.hpp"
#include "lfrac/geometry.hpp"
#include "lfrac/sampled_function.hpp"

namespace lfrac {

// A partitioned domain together with one displacement function lambda_i
// and one scaling function S_i per piece. The associated operator T sends
// a function f to the function whose value at u_i(x) is
//
//   (T f)(u_i(x)) = lambda_i(x) + S_i(x) * f(x),   x in X_i.
//
// T is contractive in the sup norm when max_i sup_{X_i} |S_i| < 1, and its
// fixed point is the self-referential function the rest of the library
// studies.
class LocalFractalSystem {
 public:
  LocalFractalSystem(Partition partition, std::vector<FunctionSpec> lambdas,
                     std::vector<FunctionSpec> scalings);

  const Partition& partition() const { return partition_; }
  std::size_t size() const { return lambdas_.size(); }
  const FunctionSpec& lambda(std::size_t i) const { return lambdas_[i]; }
  const FunctionSpec& scaling(std::size_t i) const { return scalings_[i]; }

 private:
  Partition partition_;
  std::vector<FunctionSpec> lambdas_;
  std::vector<FunctionSpec> scalings_;
};

// max_i sup_{X_i} |S_i|, the contraction factor of T in the sup norm.
double max_scaling_sup(const LocalFractalSystem& sys,
                       int probe_per_axis = 4096);

// max_i sup_{X_i} |lambda_i|.
double max_lambda_sup(const LocalFractalSystem& sys,
                      int probe_per_axis = 4096);

// Sup-norm bound for the fixed point: max_lambda / (1 - max_scaling).
double fixed_point_sup_bound(const LocalFractalSystem& sys);

// One application of T on a sampled grid. Throws when a grid node falls in
// no piece image or when some piece image is narrower than a grid cell.
SampledFunction rb_apply(const LocalFractalSystem& sys,
                         const SampledFunction& f);

struct SolveOptions {
  int level = 12;
  double tol = 1e-10;
  int max_iter = 200;
  std::optional<SampledFunction> initial;
};

struct SolveDiagnostics {
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  std::vector<double> step_norms;
  // step_norms[k] / step_norms[k-1]; the first entry is 1 by convention.
  std::vector<double> contraction_history;
};

struct FixedPointResult {
  SampledFunction f;
  SolveDiagnostics diagnostics;
};

// Iterates T from zero (or opts.initial) until the sup-norm step drops
// below opts.tol. Throws std::invalid_argument when the contraction factor
// is not below 1.
FixedPointResult solve_fixed_point(const LocalFractalSystem& sys,
                                   const SolveOptions& opts = {});

struct ExactValue {
  double value = 0.0;
  int depth_reached = 0;
  double tail_bound = 0.0;
};

// Unrolls the self-referential identity along the address chain of x:
// depth terms of lambda values weighted by products of scalings. The tail
// past depth_reached is bounded by tail_bound; when the chain leaves every
// piece image early the remaining terms are taken as zero.
ExactValue evaluate_exact(const LocalFractalSystem& sys, const Point& x,
                          int depth);

// Empirical contraction factor: max over random grid-function pairs of
// ||T g - T h||_inf / ||g - h||_inf. Deterministic in the seed.
double sup_contraction_estimate(const LocalFractalSystem& sys, int trials,
                                std::uint64_t seed, int level = 12);

struct LinearityCheck {
  double deviation = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

// The fixed point depends linearly on the displacement functions when the
// partition and scalings are shared: solving with a*lambda_A + b*lambda_B
// must reproduce a*f_A + b*f_B up to solver tolerance.
LinearityCheck lambda_linearity_check(const LocalFractalSystem& a_sys,
                                      const LocalFractalSystem& b_sys,
                                      double a, double b,
                                      const SolveOptions& opts = {});

}  // namespace lfrac

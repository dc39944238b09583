#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lfrac/rb_operator.hpp"

namespace lfrac {

// Smoothness-space parameters. p or q may be infinity. The theorem
// checkers additionally require M > s >= M-1 and s above the relevant
// smoothness threshold; the seminorm estimators only need M > s > 0.
struct SpaceParams {
  int n = 1;
  double p = 2.0;
  double q = 2.0;
  double s = 0.5;
  int M = 1;
};

// Per-piece data the membership conditions consume: contraction ratios
// gamma_i and the sup norms of the scaling functions on their pieces.
struct SystemSummary {
  int n = 1;
  std::vector<double> gammas;
  std::vector<double> sup_S;

  static SystemSummary from_system(const LocalFractalSystem& sys);
};

enum class Verdict { sufficient, not_implied };

// The checked inequality is max(xi_norm, eta_norm) < 1; the theorems are
// one-directional, so a failing check never claims non-membership.
struct ConditionReport {
  std::vector<double> xi;
  std::vector<double> eta;
  double xi_norm = 0.0;
  double eta_norm = 0.0;
  double condition_value = 0.0;
  double sigma_threshold = 0.0;
  Verdict verdict = Verdict::not_implied;
  std::vector<std::string> notes;

  bool sufficient() const { return verdict == Verdict::sufficient; }
};

// (sum |v_i|^p)^(1/p), max for p = infinity. Throws std::domain_error for
// p <= 0 or non-finite entries.
double p_quasinorm(const std::vector<double>& v, double p);

// 1/min{p,1} - 1 and n/min{p,q}.
double sigma_p(double p);
double sigma_npq(int n, double p, double q);

// xi_i = gamma_i^{n/p} * supS_i, with n/p read as 0 when p = infinity.
std::vector<double> xi_vector(const SystemSummary& sum, double p);
// eta_i = gamma_i^{n/p - s} * supS_i, same p = infinity convention.
std::vector<double> eta_vector(const SystemSummary& sum, double p, double s);

ConditionReport check_Lp(const SystemSummary& sum, double p);
ConditionReport check_besov(const SystemSummary& sum, const SpaceParams& sp);
ConditionReport check_triebel(const SystemSummary& sum, const SpaceParams& sp);

enum class SpaceFamily { besov, triebel_lizorkin };

// Classical scales expressed through the two families.
struct PresetSpace {
  std::string name;
  SpaceFamily family = SpaceFamily::besov;
  SpaceParams params;
  // Set when the parameters fall outside the theorems' range; such presets
  // only report the specialized inequality below.
  bool reporting_only = false;
  std::string caveat;
};

PresetSpace preset_hoelder(double s, int n = 1);
PresetSpace preset_sobolev(int k, double p, int n = 1);
PresetSpace preset_slodeckij(double s, double p, int n = 1);
PresetSpace preset_bessel(double s, double p, int n = 1);
PresetSpace preset_local_hardy(double p, int n = 1);

// Uniform shape gamma_i = 1/m for all pieces; the classical scales then
// reduce to one-line inequalities in m and the scaling sups.
struct UniformSystem {
  std::size_t m = 0;
  std::vector<double> sup_S;
};

std::optional<UniformSystem> as_uniform(const SystemSummary& sum,
                                        double tol = 1e-12);

// Specialized left-hand sides; the condition is value < 1 except for the
// local Hardy scale, where it is value < m.
double sobolev_uniform_value(const UniformSystem& u, int k);
double slodeckij_uniform_value(const UniformSystem& u, double s, double p);
double bessel_uniform_value(const UniformSystem& u, double s, double p);
double local_hardy_uniform_value(const UniformSystem& u, double p);
// Works for arbitrary gammas: max(max supS_i, max gamma_i^{-s} supS_i).
double hoelder_value(const SystemSummary& sum, double s);

}  // namespace lfrac

#include "lfrac/space_conditions.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lfrac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_inf(double p) { return std::isinf(p) && p > 0.0; }

void check_exponent(double p, const char* name) {
  if (std::isnan(p) || p <= 0.0)
    throw std::domain_error(std::string(name) + " must lie in (0, infinity]");
}

void check_summary(const SystemSummary& sum) {
  if (sum.n != 1 && sum.n != 2)
    throw std::invalid_argument("dimension must be 1 or 2");
  if (sum.gammas.size() != sum.sup_S.size() || sum.gammas.empty())
    throw std::invalid_argument(
        "summary needs matching, nonempty gamma and scaling lists");
  for (double g : sum.gammas)
    if (!(g > 0.0) || !std::isfinite(g))
      throw std::invalid_argument("contraction ratios must be positive");
  for (double s : sum.sup_S)
    if (s < 0.0 || !std::isfinite(s))
      throw std::invalid_argument("scaling sups must be non-negative");
}

// Shared shape checks plus the theorem-range requirements.
void check_params_for_theorem(const SpaceParams& sp, bool triebel) {
  if (sp.n != 1 && sp.n != 2)
    throw std::invalid_argument("dimension must be 1 or 2");
  check_exponent(sp.p, "p");
  check_exponent(sp.q, "q");
  if (triebel && is_inf(sp.p))
    throw std::invalid_argument("the F-scale needs p < infinity");
  if (sp.M < 1) throw std::invalid_argument("difference order must be >= 1");
  if (!(sp.M > sp.s && sp.s >= sp.M - 1)) {
    std::ostringstream os;
    os << "difference order M = " << sp.M << " must satisfy M > s >= M-1 "
       << "for s = " << sp.s;
    throw std::invalid_argument(os.str());
  }
  const double sigma = triebel ? sigma_npq(sp.n, sp.p, sp.q) : sigma_p(sp.p);
  if (!(sp.s > sigma)) {
    std::ostringstream os;
    os << "smoothness s = " << sp.s << " must exceed "
       << (triebel ? "n/min{p,q} = " : "1/min{p,1} - 1 = ") << sigma;
    throw std::domain_error(os.str());
  }
}

}  // namespace

SystemSummary SystemSummary::from_system(const LocalFractalSystem& sys) {
  SystemSummary out;
  out.n = sys.partition().dim();
  out.gammas.reserve(sys.size());
  out.sup_S.reserve(sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i) {
    out.gammas.push_back(sys.partition().piece(i).map.gamma());
    out.sup_S.push_back(
        sys.scaling(i).sup_abs(sys.partition().piece(i).subdomain));
  }
  return out;
}

double p_quasinorm(const std::vector<double>& v, double p) {
  check_exponent(p, "p");
  for (double x : v)
    if (!std::isfinite(x))
      throw std::domain_error("quasi-norm entries must be finite");
  if (is_inf(p)) {
    double mx = 0.0;
    for (double x : v) mx = std::max(mx, std::abs(x));
    return mx;
  }
  double acc = 0.0;
  for (double x : v) acc += std::pow(std::abs(x), p);
  return std::pow(acc, 1.0 / p);
}

double sigma_p(double p) {
  check_exponent(p, "p");
  return 1.0 / std::min(p, 1.0) - 1.0;
}

double sigma_npq(int n, double p, double q) {
  check_exponent(p, "p");
  check_exponent(q, "q");
  if (is_inf(p))
    throw std::domain_error("n/min{p,q} threshold is defined for p < infinity");
  return double(n) / std::min(p, q);
}

std::vector<double> xi_vector(const SystemSummary& sum, double p) {
  check_summary(sum);
  check_exponent(p, "p");
  const double expo = is_inf(p) ? 0.0 : double(sum.n) / p;
  std::vector<double> xi(sum.gammas.size());
  for (std::size_t i = 0; i < xi.size(); ++i)
    xi[i] = std::pow(sum.gammas[i], expo) * sum.sup_S[i];
  return xi;
}

std::vector<double> eta_vector(const SystemSummary& sum, double p, double s) {
  check_summary(sum);
  check_exponent(p, "p");
  const double expo = (is_inf(p) ? 0.0 : double(sum.n) / p) - s;
  std::vector<double> eta(sum.gammas.size());
  for (std::size_t i = 0; i < eta.size(); ++i)
    eta[i] = std::pow(sum.gammas[i], expo) * sum.sup_S[i];
  return eta;
}

ConditionReport check_Lp(const SystemSummary& sum, double p) {
  check_summary(sum);
  check_exponent(p, "p");
  ConditionReport rep;
  rep.xi = xi_vector(sum, p);
  rep.xi_norm = p_quasinorm(rep.xi, p);
  rep.condition_value = rep.xi_norm;
  rep.verdict =
      rep.condition_value < 1.0 ? Verdict::sufficient : Verdict::not_implied;
  if (is_inf(p))
    rep.notes.push_back(
        "p = infinity: the condition reduces to max sup|S_i| < 1");
  rep.notes.push_back(
      "sufficient condition only; a failing check does not imply "
      "non-membership");
  return rep;
}

ConditionReport check_besov(const SystemSummary& sum, const SpaceParams& sp) {
  check_summary(sum);
  check_params_for_theorem(sp, /*triebel=*/false);
  if (sum.n != sp.n)
    throw std::invalid_argument("summary and space dimensions differ");
  ConditionReport rep;
  rep.xi = xi_vector(sum, sp.p);
  rep.eta = eta_vector(sum, sp.p, sp.s);
  rep.xi_norm = p_quasinorm(rep.xi, sp.p);
  rep.eta_norm = p_quasinorm(rep.eta, sp.q);
  rep.condition_value = std::max(rep.xi_norm, rep.eta_norm);
  rep.sigma_threshold = sigma_p(sp.p);
  rep.verdict =
      rep.condition_value < 1.0 ? Verdict::sufficient : Verdict::not_implied;
  rep.notes.push_back(
      "sufficient condition only; a failing check does not imply "
      "non-membership");
  return rep;
}

ConditionReport check_triebel(const SystemSummary& sum, const SpaceParams& sp) {
  check_summary(sum);
  check_params_for_theorem(sp, /*triebel=*/true);
  if (sum.n != sp.n)
    throw std::invalid_argument("summary and space dimensions differ");
  ConditionReport rep;
  rep.xi = xi_vector(sum, sp.p);
  rep.eta = eta_vector(sum, sp.p, sp.s);
  rep.xi_norm = p_quasinorm(rep.xi, sp.p);
  // Both norms are taken with exponent p; the condition does not see q.
  rep.eta_norm = p_quasinorm(rep.eta, sp.p);
  rep.condition_value = std::max(rep.xi_norm, rep.eta_norm);
  rep.sigma_threshold = sigma_npq(sp.n, sp.p, sp.q);
  rep.verdict =
      rep.condition_value < 1.0 ? Verdict::sufficient : Verdict::not_implied;
  rep.notes.push_back("condition is independent of q");
  rep.notes.push_back(
      "sufficient condition only; a failing check does not imply "
      "non-membership");
  return rep;
}

namespace {

void require_range(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

bool is_integer(double s) { return std::abs(s - std::round(s)) <= 1e-12; }

int minimal_order(double s) {
  // Smallest M with M > s >= M-1.
  const int m = static_cast<int>(std::floor(s)) + 1;
  return m < 1 ? 1 : m;
}

}  // namespace

PresetSpace preset_hoelder(double s, int n) {
  require_range(s > 0.0 && std::isfinite(s),
                "Hoelder scale needs s > 0 (and s not an integer)");
  require_range(!is_integer(s),
                "Hoelder scale needs non-integer s; integer orders are a "
                "different space");
  PresetSpace out;
  out.name = "hoelder";
  out.family = SpaceFamily::besov;
  out.params = SpaceParams{n, kInf, kInf, s, minimal_order(s)};
  return out;
}

PresetSpace preset_sobolev(int k, double p, int n) {
  require_range(k >= 1, "Sobolev scale needs integer order k >= 1");
  require_range(p > 1.0 && std::isfinite(p), "Sobolev scale needs 1 < p < infinity");
  PresetSpace out;
  out.name = "sobolev";
  out.family = SpaceFamily::triebel_lizorkin;
  out.params = SpaceParams{n, p, 2.0, double(k), k + 1};
  if (p == 2.0)
    out.caveat = "for p = 2 this coincides with the q = 2 Besov scale";
  return out;
}

PresetSpace preset_slodeckij(double s, double p, int n) {
  require_range(p >= 1.0 && std::isfinite(p),
                "Slodeckij scale needs 1 <= p < infinity");
  require_range(s > 0.0 && std::isfinite(s) && !is_integer(s),
                "Slodeckij scale needs non-integer s > 0");
  PresetSpace out;
  out.name = "slodeckij";
  out.family = SpaceFamily::besov;
  out.params = SpaceParams{n, p, p, s, minimal_order(s)};
  return out;
}

PresetSpace preset_bessel(double s, double p, int n) {
  require_range(p > 1.0 && std::isfinite(p),
                "Bessel-potential scale needs 1 < p < infinity");
  require_range(s > 0.0 && std::isfinite(s),
                "Bessel-potential scale needs s > 0");
  PresetSpace out;
  out.name = "bessel";
  out.family = SpaceFamily::triebel_lizorkin;
  out.params = SpaceParams{n, p, 2.0, s, minimal_order(s)};
  return out;
}

PresetSpace preset_local_hardy(double p, int n) {
  require_range(p > 0.0 && std::isfinite(p),
                "local Hardy scale needs 0 < p < infinity");
  PresetSpace out;
  out.name = "local_hardy";
  out.family = SpaceFamily::triebel_lizorkin;
  out.params = SpaceParams{n, p, 2.0, 0.0, 1};
  out.reporting_only = true;
  out.caveat =
      "s = 0 lies outside the smoothness range of the membership theorem; "
      "only the specialized inequality sum |s_i|^p < m is reported";
  return out;
}

std::optional<UniformSystem> as_uniform(const SystemSummary& sum, double tol) {
  check_summary(sum);
  const double m = double(sum.gammas.size());
  for (double g : sum.gammas)
    if (std::abs(g - 1.0 / m) > tol) return std::nullopt;
  return UniformSystem{sum.gammas.size(), sum.sup_S};
}

double sobolev_uniform_value(const UniformSystem& u, int k) {
  const double m = double(u.m);
  double acc = 0.0;
  for (double s : u.sup_S) acc += s * s * std::pow(m, 2.0 * k - 1.0);
  return acc;
}

double slodeckij_uniform_value(const UniformSystem& u, double s, double p) {
  const double m = double(u.m);
  double acc = 0.0;
  for (double si : u.sup_S) acc += std::pow(std::abs(si), p) * std::pow(m, p * s - 1.0);
  return acc;
}

double bessel_uniform_value(const UniformSystem& u, double s, double p) {
  // Same display as the Slodeckij line; the scales differ, the reduced
  // inequality does not.
  return slodeckij_uniform_value(u, s, p);
}

double local_hardy_uniform_value(const UniformSystem& u, double p) {
  double acc = 0.0;
  for (double si : u.sup_S) acc += std::pow(std::abs(si), p);
  return acc;
}

double hoelder_value(const SystemSummary& sum, double s) {
  check_summary(sum);
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < sum.sup_S.size(); ++i) {
    a = std::max(a, sum.sup_S[i]);
    b = std::max(b, std::pow(sum.gammas[i], -s) * sum.sup_S[i]);
  }
  return std::max(a, b);
}

}  // namespace lfrac

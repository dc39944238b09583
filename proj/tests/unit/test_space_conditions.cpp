#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "lfrac/space_conditions.hpp"
#include "support/test_systems.hpp"

using namespace lfrac;
using lfrac::testing::affine_system;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SystemSummary halving_summary(double s1, double s2) {
  SystemSummary sum;
  sum.n = 1;
  sum.gammas = {0.5, 0.5};
  sum.sup_S = {s1, s2};
  return sum;
}

// Bisects the largest constant scaling the predicate accepts. Assumes a
// single flip between 0 and 4.
double flip_point(const std::function<bool(double)>& sufficient_at) {
  double lo = 0.0, hi = 4.0;
  REQUIRE(sufficient_at(lo + 1e-12));
  REQUIRE_FALSE(sufficient_at(hi));
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sufficient_at(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("p quasi-norm") {
  CHECK(p_quasinorm({3.0, 4.0}, 2.0) == doctest::Approx(5.0));
  CHECK(p_quasinorm({3.0, -4.0}, 1.0) == doctest::Approx(7.0));
  CHECK(p_quasinorm({3.0, -4.0}, kInf) == doctest::Approx(4.0));
  CHECK(p_quasinorm({0.5, 0.5}, 0.5) == doctest::Approx(2.0));
  CHECK_THROWS_AS(p_quasinorm({1.0}, 0.0), std::domain_error);
  CHECK_THROWS_AS(p_quasinorm({1.0}, -2.0), std::domain_error);
  CHECK_THROWS_AS(p_quasinorm({std::nan("")}, 2.0), std::domain_error);
}

TEST_CASE("smoothness thresholds") {
  CHECK(sigma_p(2.0) == doctest::Approx(0.0));
  CHECK(sigma_p(1.0) == doctest::Approx(0.0));
  CHECK(sigma_p(0.5) == doctest::Approx(1.0));
  CHECK(sigma_p(kInf) == doctest::Approx(0.0));

  CHECK(sigma_npq(1, 2.0, 2.0) == doctest::Approx(0.5));
  CHECK(sigma_npq(1, 2.0, 0.5) == doctest::Approx(2.0));
  CHECK(sigma_npq(2, 4.0, 8.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(sigma_npq(1, kInf, 2.0), std::domain_error);
}

TEST_CASE("per-piece condition vectors") {
  const SystemSummary sum = halving_summary(0.3, 0.4);

  const auto xi = xi_vector(sum, 2.0);
  CHECK(xi[0] == doctest::Approx(0.3 * std::sqrt(0.5)));
  CHECK(xi[1] == doctest::Approx(0.4 * std::sqrt(0.5)));

  // at s = 1/p = 1/2 the gamma powers cancel
  const auto eta = eta_vector(sum, 2.0, 0.5);
  CHECK(eta[0] == doctest::Approx(0.3));
  CHECK(eta[1] == doctest::Approx(0.4));

  // p = infinity reads n/p as zero
  const auto xi_inf = xi_vector(sum, kInf);
  CHECK(xi_inf[0] == doctest::Approx(0.3));
  const auto eta_inf = eta_vector(sum, kInf, 0.5);
  CHECK(eta_inf[1] == doctest::Approx(0.4 * std::pow(0.5, -0.5)));
}

TEST_CASE("integrability condition") {
  // uniform halving: the p-norm of xi is the common scaling sup
  ConditionReport ok = check_Lp(halving_summary(0.9, 0.9), 2.0);
  CHECK(ok.sufficient());
  CHECK(ok.condition_value == doctest::Approx(0.9));
  CHECK(ok.eta.empty());

  ConditionReport bad = check_Lp(halving_summary(1.5, 1.5), 2.0);
  CHECK_FALSE(bad.sufficient());
  CHECK(bad.verdict == Verdict::not_implied);

  ConditionReport inf = check_Lp(halving_summary(0.7, 0.2), kInf);
  CHECK(inf.sufficient());
  CHECK(inf.condition_value == doctest::Approx(0.7));
  bool notes_inf = false;
  for (const auto& n : inf.notes)
    if (n.find("infinity") != std::string::npos) notes_inf = true;
  CHECK(notes_inf);
}

TEST_CASE("one-directional wording is always attached") {
  const ConditionReport rep =
      check_besov(halving_summary(0.5, 0.5), SpaceParams{1, 2.0, 2.0, 0.5, 1});
  bool found = false;
  for (const auto& n : rep.notes)
    if (n.find("does not imply") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("besov condition on the halving system") {
  // xi-norm is t, eta-q-norm is 2^(s + 1/q - 1/p) t; at p = q = 2, s = 1/2
  // the flip sits at 2^(-1/2)
  const SpaceParams sp{1, 2.0, 2.0, 0.5, 1};
  const double t_flip = flip_point([&](double t) {
    return check_besov(halving_summary(t, t), sp).sufficient();
  });
  CHECK(t_flip == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-9));

  const ConditionReport rep = check_besov(halving_summary(0.5, 0.5), sp);
  CHECK(rep.xi_norm == doctest::Approx(0.5));
  CHECK(rep.eta_norm == doctest::Approx(0.5 * std::sqrt(2.0)));
  CHECK(rep.condition_value == doctest::Approx(rep.eta_norm));
  CHECK(rep.sigma_threshold == doctest::Approx(0.0));
}

TEST_CASE("triebel-lizorkin condition ignores q") {
  const SystemSummary sum = halving_summary(0.4, 0.6);
  const SpaceParams qa{1, 2.0, 1.5, 0.75, 1};
  const SpaceParams qb{1, 2.0, 7.0, 0.75, 1};
  const ConditionReport a = check_triebel(sum, qa);
  const ConditionReport b = check_triebel(sum, qb);
  CHECK(a.condition_value == b.condition_value);
  CHECK(a.verdict == b.verdict);
  bool says_independent = false;
  for (const auto& n : a.notes)
    if (n.find("independent of q") != std::string::npos) says_independent = true;
  CHECK(says_independent);
  // the smoothness threshold does see q through n/min{p,q}
  CHECK(a.sigma_threshold == doctest::Approx(2.0 / 3.0));
  CHECK(b.sigma_threshold == doctest::Approx(0.5));
}

TEST_CASE("theorem range enforcement") {
  const SystemSummary sum = halving_summary(0.5, 0.5);
  // s at or below the threshold
  CHECK_THROWS_AS(check_besov(sum, SpaceParams{1, 0.5, 2.0, 0.9, 1}),
                  std::domain_error);
  CHECK_THROWS_AS(check_triebel(sum, SpaceParams{1, 2.0, 2.0, 0.5, 1}),
                  std::domain_error);
  // difference order must bracket s
  CHECK_THROWS_AS(check_besov(sum, SpaceParams{1, 2.0, 2.0, 0.5, 2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_besov(sum, SpaceParams{1, 2.0, 2.0, 1.5, 1}),
                  std::invalid_argument);
  // the F-scale needs p finite
  CHECK_THROWS_AS(check_triebel(sum, SpaceParams{1, kInf, 2.0, 0.5, 1}),
                  std::invalid_argument);
  CHECK_NOTHROW(check_besov(sum, SpaceParams{1, kInf, 2.0, 0.5, 1}));
  // dimensions must agree
  SystemSummary flat = sum;
  flat.n = 2;
  CHECK_THROWS_AS(check_besov(flat, SpaceParams{1, 2.0, 2.0, 0.5, 1}),
                  std::invalid_argument);
}

TEST_CASE("preset parameter mapping") {
  const PresetSpace hoe = preset_hoelder(0.6);
  CHECK(hoe.family == SpaceFamily::besov);
  CHECK(std::isinf(hoe.params.p));
  CHECK(std::isinf(hoe.params.q));
  CHECK(hoe.params.s == doctest::Approx(0.6));
  CHECK(hoe.params.M == 1);
  CHECK_FALSE(hoe.reporting_only);
  CHECK(preset_hoelder(1.3).params.M == 2);
  CHECK_THROWS_AS(preset_hoelder(2.0), std::invalid_argument);
  CHECK_THROWS_AS(preset_hoelder(-0.5), std::invalid_argument);

  const PresetSpace sob = preset_sobolev(1, 2.0);
  CHECK(sob.family == SpaceFamily::triebel_lizorkin);
  CHECK(sob.params.q == doctest::Approx(2.0));
  CHECK(sob.params.s == doctest::Approx(1.0));
  CHECK(sob.params.M == 2);
  CHECK_FALSE(sob.caveat.empty());  // p = 2 coincidence note
  CHECK(preset_sobolev(1, 3.0).caveat.empty());
  CHECK_THROWS_AS(preset_sobolev(0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(preset_sobolev(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(preset_sobolev(1, kInf), std::invalid_argument);

  const PresetSpace slo = preset_slodeckij(0.75, 3.0);
  CHECK(slo.family == SpaceFamily::besov);
  CHECK(slo.params.q == doctest::Approx(3.0));
  CHECK(slo.params.M == 1);
  CHECK_NOTHROW(preset_slodeckij(0.5, 1.0));
  CHECK_THROWS_AS(preset_slodeckij(0.5, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(preset_slodeckij(2.0, 2.0), std::invalid_argument);

  const PresetSpace bes = preset_bessel(0.75, 2.0);
  CHECK(bes.family == SpaceFamily::triebel_lizorkin);
  CHECK(bes.params.q == doctest::Approx(2.0));
  CHECK_THROWS_AS(preset_bessel(0.75, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(preset_bessel(-1.0, 2.0), std::invalid_argument);

  const PresetSpace hardy = preset_local_hardy(1.5);
  CHECK(hardy.reporting_only);
  CHECK_FALSE(hardy.caveat.empty());
  CHECK(hardy.params.s == doctest::Approx(0.0));
  // its parameters sit outside the theorem range by design
  CHECK_THROWS_AS(check_triebel(halving_summary(0.5, 0.5), hardy.params),
                  std::domain_error);
  CHECK_THROWS_AS(preset_local_hardy(0.0), std::invalid_argument);
}

TEST_CASE("uniform reduction detection") {
  const auto u = as_uniform(halving_summary(0.3, 0.4));
  REQUIRE(u.has_value());
  CHECK(u->m == 2);
  CHECK(u->sup_S[1] == doctest::Approx(0.4));

  SystemSummary skew;
  skew.n = 1;
  skew.gammas = {0.3, 0.7};
  skew.sup_S = {0.5, 0.5};
  CHECK_FALSE(as_uniform(skew).has_value());
}

TEST_CASE("closed forms agree with the general checkers") {
  // each classical scale: bisect the constant scaling at which the general
  // checker flips, and compare against the one-line inequality's flip
  auto uniform = [](double t) { return UniformSystem{2, {t, t}}; };

  SUBCASE("sobolev k=1 p=2") {
    const SpaceParams sp = preset_sobolev(1, 2.0).params;
    const double general = flip_point([&](double t) {
      return check_triebel(halving_summary(t, t), sp).sufficient();
    });
    const double closed = flip_point(
        [&](double t) { return sobolev_uniform_value(uniform(t), 1) < 1.0; });
    CHECK(general == doctest::Approx(closed).epsilon(1e-9));
    CHECK(general == doctest::Approx(0.5).epsilon(1e-9));
  }

  SUBCASE("slodeckij s=0.75 p=3") {
    const SpaceParams sp = preset_slodeckij(0.75, 3.0).params;
    const double general = flip_point([&](double t) {
      return check_besov(halving_summary(t, t), sp).sufficient();
    });
    const double closed = flip_point([&](double t) {
      return slodeckij_uniform_value(uniform(t), 0.75, 3.0) < 1.0;
    });
    CHECK(general == doctest::Approx(closed).epsilon(1e-9));
    CHECK(general == doctest::Approx(std::pow(2.0, -0.75)).epsilon(1e-9));
  }

  SUBCASE("bessel s=0.75 p=2") {
    const SpaceParams sp = preset_bessel(0.75, 2.0).params;
    const double general = flip_point([&](double t) {
      return check_triebel(halving_summary(t, t), sp).sufficient();
    });
    const double closed = flip_point([&](double t) {
      return bessel_uniform_value(uniform(t), 0.75, 2.0) < 1.0;
    });
    CHECK(general == doctest::Approx(closed).epsilon(1e-9));
    CHECK(general == doctest::Approx(std::pow(2.0, -0.75)).epsilon(1e-9));
  }

  SUBCASE("hoelder s=0.6") {
    const SpaceParams sp = preset_hoelder(0.6).params;
    const double general = flip_point([&](double t) {
      return check_besov(halving_summary(t, t), sp).sufficient();
    });
    const double closed = flip_point([&](double t) {
      return hoelder_value(halving_summary(t, t), 0.6) < 1.0;
    });
    CHECK(general == doctest::Approx(closed).epsilon(1e-9));
    CHECK(general == doctest::Approx(std::pow(2.0, -0.6)).epsilon(1e-9));
  }

  SUBCASE("local hardy p=1.5 matches the integrability check") {
    const double general = flip_point([&](double t) {
      return check_Lp(halving_summary(t, t), 1.5).sufficient();
    });
    const double closed = flip_point([&](double t) {
      return local_hardy_uniform_value(uniform(t), 1.5) < 2.0;
    });
    CHECK(general == doctest::Approx(closed).epsilon(1e-9));
    CHECK(general == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("hardy inequality equals the integrability condition piecewise") {
  // sum |s_i|^p < m and ||xi||_p < 1 are the same inequality when all
  // gamma_i = 1/m, for any mix of scaling sups
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(0.0, 1.6);
  for (int trial = 0; trial < 200; ++trial) {
    const double p = 0.5 + 3.0 * std::generate_canonical<double, 53>(rng);
    SystemSummary sum;
    sum.n = 1;
    const int m = 2 + int(rng() % 3);
    for (int i = 0; i < m; ++i) {
      sum.gammas.push_back(1.0 / m);
      sum.sup_S.push_back(dist(rng));
    }
    const auto u = as_uniform(sum);
    REQUIRE(u.has_value());
    const bool hardy = local_hardy_uniform_value(*u, p) < double(m);
    const bool lp = check_Lp(sum, p).sufficient();
    CHECK(hardy == lp);
  }
}

TEST_CASE("summary extraction from a system") {
  const SystemSummary sum = SystemSummary::from_system(affine_system(0.5));
  CHECK(sum.n == 1);
  REQUIRE(sum.gammas.size() == 2);
  CHECK(sum.gammas[0] == doctest::Approx(0.5));
  CHECK(sum.gammas[1] == doctest::Approx(0.5));
  CHECK(sum.sup_S[0] == doctest::Approx(0.5));
  CHECK(sum.sup_S[1] == doctest::Approx(0.5));

  // non-constant scaling: the sup is probed over the piece subdomain
  const Box x = lfrac::testing::unit_interval();
  const LocalFractalSystem sys(
      lfrac::testing::halving_partition(),
      {FunctionSpec::constant(x, 1.0), FunctionSpec::constant(x, 1.0)},
      {FunctionSpec::polynomial(x, std::vector<double>{0.0, 0.5}),
       FunctionSpec::constant(x, 0.25)});
  const SystemSummary probed = SystemSummary::from_system(sys);
  CHECK(probed.sup_S[0] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(probed.sup_S[1] == doctest::Approx(0.25));
}

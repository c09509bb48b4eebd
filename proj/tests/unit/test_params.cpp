#include <doctest.h>

#include <cmath>

#include "ckm/errors.hpp"
#include "ckm/json.hpp"
#include "ckm/params.hpp"

using namespace ckm;

namespace {
// Frozen with a 40-digit mpmath evaluation of the resolution chain.
constexpr double kDelta2 = 0.0125;
constexpr double kD4 = 309527.20004021564389;
constexpr double kAlpha6 = 10317.573334673854796;
constexpr double kAlpha5 = 4.446359778445405785;
constexpr double kAlpha2 = 44.56359778445405785;
constexpr double kVarsigma = 0.0005608387276564872767;
constexpr double kDelta1 = 0.00028041936382824363835;
constexpr double kEps0 = 3.3883385819289187827e-71;
constexpr double kEps2 = 0.0033970107448046930239;

bool close(double a, double b, double rel = 1e-12) { return std::fabs(a - b) <= rel * std::fabs(b); }
}  // namespace

TEST_CASE("base constants") {
  const ParameterSet ps = resolve(0.5);
  CHECK(ps.gamma == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(ps.delta == 0.1);
  CHECK(ps.d1 == 0.1);
  CHECK(ps.d2 == 4.0);
  CHECK(close(ps.delta2, kDelta2));
  CHECK((1 + 2 * ps.delta2) * ps.d2 <= ps.d2 + ps.delta + 1e-15);
}

TEST_CASE("derived chain matches the high-precision oracle") {
  for (double eps : {0.5, 0.05}) {
    const ParameterSet ps = resolve(eps);
    CHECK(close(ps.d4, kD4));
    CHECK(close(ps.alpha6, kAlpha6));
    CHECK(close(ps.alpha5, kAlpha5));
    CHECK(close(ps.alpha2, kAlpha2));
    CHECK(close(ps.varsigma, kVarsigma, 1e-10));
    CHECK(close(ps.delta1, kDelta1, 1e-10));
    CHECK(ps.eta == doctest::Approx(0.05));
    CHECK(ps.alpha1 == 5.0);
  }
  const ParameterSet a = resolve(0.5);
  CHECK(a.M == 619055);
  CHECK(a.N_a == 2476220);
  CHECK(a.N_b == 1343771);
  CHECK(a.N_2 == 110442131);
  const ParameterSet b = resolve(0.05);
  CHECK(b.M == 6190545);
  CHECK(b.N_a == 24762180);
  CHECK(b.N_b == 169170556);
  CHECK(b.N_2 == 110442041161.0);
}

TEST_CASE("thresholds") {
  const ParameterSet ps = resolve(0.3);
  const EpsilonThresholds t = epsilon_thresholds(ps);
  CHECK(t.eps1 == doctest::Approx(0.1));
  CHECK(close(t.eps0, kEps0, 1e-9));
  CHECK(close(t.eps2, kEps2, 1e-9));
  CHECK(t.delta0 <= 0.1);
  CHECK(t.delta0 == std::min({t.eps0, t.eps1, t.eps2}));
}

TEST_CASE("consistency conditions hold on the faithful path") {
  for (double eps : {0.01, 0.05, 0.1}) {
    const ParameterSet ps = resolve(eps, {}, true);
    CHECK(ps.faithful);
    CHECK(ps.violations.empty());
    CHECK(ps.alpha6 >= 4.0);
    CHECK(std::fabs(4 / ps.alpha6 + 4 / ps.alpha5 - 0.9) <= 1e-12);
    CHECK((1 + ps.varsigma) * (1 + 2 * ps.delta1) * ps.alpha2 <= ps.alpha2 + ps.delta / 2 + 1e-12);
  }
}

TEST_CASE("resolution is deterministic and M decreases in epsilon") {
  const ParameterSet a = resolve(0.2), b = resolve(0.2);
  CHECK(to_json(a) == to_json(b));
  double prev = INFINITY;
  for (double eps = 0.01; eps < 0.99; eps += 0.07) {
    const double m = resolve(eps).M;
    CHECK(m < prev);
    prev = m;
  }
}

TEST_CASE("failure budget") {
  SUBCASE("faithful set below the threshold") {
    const ParameterSet ps = resolve(1e-72);
    const FailureBudget fb = failure_budget(ps);
    for (const auto& [name, v] : fb.items()) {
      CAPTURE(name);
      CHECK(v <= 1.0 / 36.0 + 1e-15);
    }
    CHECK(fb.sum <= 1.0 / 3.0);
    CHECK(fb.within_gamma);
  }
  SUBCASE("small M") {
    const ParameterSet ps = resolve(0.3, {{"M", 8}});
    const FailureBudget fb = failure_budget(ps);
    CHECK(fb.gamma1 == doctest::Approx(0.9987507809245808665).epsilon(1e-13));
    CHECK(fb.gamma2 == doctest::Approx(0.99936728885376199989).epsilon(1e-13));
    CHECK_FALSE(fb.within_gamma);
    CHECK_FALSE(ps.faithful);
  }
  SUBCASE("decays in M") {
    double g1 = 2, g2 = 2, g5 = 2;
    for (double m : {8.0, 100.0, 1e4, 1e6, 1e8}) {
      const FailureBudget fb = failure_budget(resolve(0.3, {{"M", m}}));
      CHECK(fb.gamma1 < g1);
      CHECK(fb.gamma2 < g2);
      CHECK(fb.gamma5a < g5);
      g1 = fb.gamma1, g2 = fb.gamma2, g5 = fb.gamma5a;
    }
  }
}

TEST_CASE("overrides") {
  const ParameterSet ps = resolve(0.3, {{"M", 2}, {"N_a", 4}, {"N_b", 4}});
  CHECK(ps.M == 2);
  CHECK(ps.N_a == 4);
  CHECK(ps.N_b == 4);
  CHECK_FALSE(ps.faithful);
  CHECK(ps.overridden.size() == 3);

  CHECK_THROWS_AS(resolve(0.0), InputError);
  CHECK_THROWS_AS(resolve(1.0), InputError);
  CHECK_THROWS_AS(resolve(0.3, {{"delta2", 0.0}}), InputError);
  CHECK_THROWS_AS(resolve(0.3, {{"nonsense", 1.0}}), InputError);
  CHECK_THROWS_AS(resolve(0.3, {{"M", 2.5}}), InputError);
  // Huge delta2 violates the d2 slack.
  CHECK_THROWS_AS(resolve(0.3, {{"delta2", 0.4}}, true), ValidationError);
  const ParameterSet bad = resolve(0.3, {{"delta2", 0.4}});
  CHECK_FALSE(bad.violations.empty());
}

TEST_CASE("json round trip") {
  const ParameterSet ps = resolve(0.25, {{"M", 3}, {"N_2", 7}});
  const ParameterSet back = params_from_json(to_json(ps));
  CHECK(to_json(back) == to_json(ps));
}

#include <doctest.h>

#include <cmath>

#include "ckm/errors.hpp"
#include "ckm/oracle.hpp"
#include "ckm/reduction.hpp"
#include "support.hpp"

using namespace ckm;
using testing::random_points;

namespace {

double naive_opt2(const PointSet& p, const ConstraintSpec& spec) {
  const std::size_t n = p.size();
  double best = kInfeasibleCost;
  for (std::uint64_t mask = 1; mask < (1ull << n) - 1; ++mask) {
    std::vector<int> lab(n);
    std::vector<std::size_t> sizes(2, 0);
    for (std::size_t i = 0; i < n; ++i) ++sizes[lab[i] = (mask >> i) & 1];
    if (spec.admits(sizes)) best = std::min(best, partition_cost(p, lab, 2));
  }
  return best;
}

PointSet two_squares() {
  return PointSet::from_rows({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {10, 0}, {11, 0}, {10, 1}, {11, 1}});
}
const std::vector<int> kSquareLabels{0, 0, 0, 0, 1, 1, 1, 1};

}  // namespace

TEST_CASE("brute_opt2 examples") {
  CHECK(brute_opt2(PointSet::from_rows({{2.0, 1.0}, {2.0, 1.0}})).cost == 0.0);
  const ExactSolution s = brute_opt2(PointSet::from_rows({{0.0}, {1.0}, {9.0}, {10.0}}));
  CHECK(s.cost == doctest::Approx(1.0));
  CHECK(s.labels == std::vector<int>{0, 0, 1, 1});
  CHECK_THROWS_AS(brute_opt2(random_points(21, 1, 1)), RefusalError);

  // Single-edge graph embedding: the only split has cost 0.
  const PointSet k2 = reduce_to_points(GraphInstance::make(2, {{0, 1}}));
  CHECK(brute_opt2(k2, ConstraintSpec::balanced(1)).cost == 0.0);
}

TEST_CASE("brute_opt2 agrees with naive enumeration") {
  for (std::size_t n = 2; n <= 10; ++n) {
    const PointSet p = random_points(n, 2, 40 + n);
    for (const char* text : {"none", "balanced:c=1", "size:lo=3,hi=7"}) {
      const auto spec = ConstraintSpec::parse(text);
      const ExactSolution s = brute_opt2(p, spec);
      const double ref = naive_opt2(p, spec);
      CAPTURE(n);
      CAPTURE(text);
      CHECK(s.feasible == !std::isinf(ref));
      if (s.feasible) {
        CHECK(s.cost == doctest::Approx(ref).epsilon(1e-12));
        CHECK(s.cost == doctest::Approx(partition_cost(p, s.labels, 2)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("brute_opt2 matches assign plus refit at a Lloyd fixed point") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const PointSet p = random_points(9, 2, seed);
    const ExactSolution s = brute_opt2(p);
    const ClusteringStats st = clustering_stats(p, s.labels, 2);
    const PartitionResult r = assign(p, st.centroids, {});
    CHECK(r.cost == doctest::Approx(s.cost).epsilon(1e-12));
  }
}

TEST_CASE("brute_optk") {
  const PointSet p = PointSet::from_rows({{0}, {1}, {10}, {11}, {20}, {21}});
  const ExactSolution s = brute_optk(p, 3);
  CHECK(s.cost == doctest::Approx(1.5));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PointSet q = random_points(8, 2, seed);
    CHECK(brute_optk(q, 2).cost == doctest::Approx(brute_opt2(q).cost).epsilon(1e-12));
  }
  CHECK_THROWS_AS(brute_optk(random_points(13, 1, 1), 3), RefusalError);
}

TEST_CASE("probe") {
  const ParameterSet ps = resolve(0.5);
  const PointSet p = two_squares();
  SUBCASE("separated squares, c1 at the first centroid") {
    const AnalysisProbe pr = probe(p, kSquareLabels, {0.5, 0.5}, ps);
    // sqrt(eps / alpha5) for beta2 = 1/2 and sigma_opt^2 = 1/2 (mpmath).
    CHECK(pr.r2 == doctest::Approx(0.33533794743866847360).epsilon(1e-13));
    CHECK(pr.beta2 == 0.5);
    CHECK(pr.sigma_opt == doctest::Approx(std::sqrt(0.5)));
    CHECK(pr.p2_out_size == 4);
    CHECK(pr.case_tag == CaseTag::kCase2);
    REQUIRE(pr.outside_ratio.has_value());
    CHECK(*pr.outside_ratio >= 0.25 / ps.alpha2);
  }
  SUBCASE("second cluster inside the ball") {
    const PointSet q = PointSet::from_rows({{0, 0}, {4, 0}, {0, 4}, {4, 4}, {2, 2}, {2.01, 2}});
    const AnalysisProbe pr = probe(q, {0, 0, 0, 0, 1, 1}, {2.0, 2.0}, ps);
    CHECK(pr.p2_out_size == 0);
    CHECK(pr.p2_in_size == 2);
    CHECK(pr.case_tag == CaseTag::kCase1);
  }
  SUBCASE("labels are swapped so cluster 0 is the larger one") {
    const PointSet q = PointSet::from_rows({{0}, {1}, {2}, {10}});
    const AnalysisProbe pr = probe(q, {1, 1, 1, 0}, {1.0}, ps);
    CHECK(pr.labels == std::vector<int>{0, 0, 0, 1});
    CHECK(pr.p1_size == 3);
  }
  CHECK_THROWS_AS(probe(p, std::vector<int>(8, 0), {0.5, 0.5}, ps), InputError);
}

TEST_CASE("case lemmas") {
  const ParameterSet ps = resolve(0.05);
  SUBCASE("optimal second center") {
    const PointSet p = two_squares();
    const LemmaReport r = check_case_lemmas(p, kSquareLabels, {0.5, 0.5}, {10.5, 0.5}, ps);
    CHECK(r.c1_quality);
    CHECK(r.ok());
    for (const auto& c : r.checks) {
      CAPTURE(c.name);
      if (!c.vacuous) CHECK(c.pass);
    }
  }
  SUBCASE("Case 1 with c2 = c1") {
    Rng rng(5);
    std::vector<Vector> rows;
    for (int i = 0; i < 14; ++i) rows.push_back({rng.normal(), rng.normal()});
    const PointSet big = PointSet::from_rows(rows);
    const Vector m1 = centroid(big);
    for (int i = 0; i < 6; ++i) rows.push_back({m1[0] + 1e-3 * rng.normal(), m1[1] + 1e-3 * rng.normal()});
    std::vector<int> labels(20, 0);
    for (int i = 14; i < 20; ++i) labels[i] = 1;
    const PointSet p = PointSet::from_rows(rows);
    const LemmaReport r = check_case_lemmas(p, labels, m1, m1, ps);
    REQUIRE(r.probe.case_tag == CaseTag::kCase1);
    std::size_t evaluated = 0;
    for (const auto& c : r.checks) {
      CAPTURE(c.name);
      if (!c.vacuous) {
        ++evaluated;
        CHECK(c.pass);
      }
    }
    CHECK(evaluated >= 3);
  }
  SUBCASE("bad first center makes quality-dependent checks vacuous") {
    const LemmaReport r = check_case_lemmas(two_squares(), kSquareLabels, {5.0, 5.0}, {10.5, 0.5}, ps);
    CHECK_FALSE(r.c1_quality);
    for (const auto& c : r.checks)
      if (c.name == "c1_cost" || c.name == "case2_total") CHECK(c.vacuous);
  }
}

TEST_CASE("ex inequality grid") {
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 90; ++j) CHECK(ex_inequality(i / 100.0, 1.0 + j / 10.0));
}

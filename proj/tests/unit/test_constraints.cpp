#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ckm/constraints.hpp"
#include "ckm/errors.hpp"
#include "support.hpp"

using namespace ckm;
using testing::cost_at;
using testing::random_points;
using testing::random_vector;

namespace {

// Exhaustive minimum over all k^n labellings admitted by spec.
double exhaustive(const PointSet& p, const std::vector<Vector>& centers, const ConstraintSpec& spec) {
  const std::size_t n = p.size(), k = centers.size();
  std::vector<int> lab(n, 0);
  double best = kInfeasibleCost;
  while (true) {
    std::vector<std::size_t> sizes(k, 0);
    for (int l : lab) ++sizes[l];
    if (spec.admits(sizes)) best = std::min(best, cost_at(p, lab, centers));
    std::size_t i = 0;
    while (i < n && ++lab[i] == static_cast<int>(k)) lab[i++] = 0;
    if (i == n) break;
  }
  return best;
}

}  // namespace

TEST_CASE("spec parsing") {
  CHECK(ConstraintSpec::parse("none").kind == ConstraintSpec::Kind::kUnconstrained);
  const auto b = ConstraintSpec::parse("balanced:c=1.5");
  CHECK(b.kind == ConstraintSpec::Kind::kBalanced);
  CHECK(b.c == 1.5);
  const auto s = ConstraintSpec::parse("size:lo=4,hi=8");
  CHECK(s.lower(0) == 4);
  CHECK(s.upper(1) == 8);
  const auto per = ConstraintSpec::parse("size:lo=2/3,hi=6/9");
  CHECK(per.lower(1) == 3);
  CHECK(per.upper(0) == 6);
  for (const char* text : {"none", "balanced:c=1", "size:lo=4,hi=8", "size:lo=2/3,hi=6/9"})
    CHECK(ConstraintSpec::parse(ConstraintSpec::parse(text).str()).str() == ConstraintSpec::parse(text).str());
  CHECK_THROWS_AS(ConstraintSpec::parse("balanced:c=0.5"), InputError);
  CHECK_THROWS_AS(ConstraintSpec::parse("size:lo=5,hi=2"), InputError);
  CHECK_THROWS_AS(ConstraintSpec::parse("fancy"), InputError);
}

TEST_CASE("assign examples") {
  const PointSet two = PointSet::from_rows({{0.0}, {10.0}});
  const auto r = assign(two, {{0.0}, {10.0}}, ConstraintSpec::unconstrained());
  CHECK(r.assignment == std::vector<int>{0, 1});
  CHECK(r.cost == 0.0);
  CHECK(r.feasible);

  const PointSet four = PointSet::from_rows({{0.0}, {1.0}, {9.0}, {10.0}});
  const auto b = assign(four, {{0.0}, {10.0}}, ConstraintSpec::balanced(1));
  CHECK(b.assignment == std::vector<int>{0, 0, 1, 1});
  CHECK(b.cost == 2.0);

  // Ties go to the lower center index.
  const auto t = assign(PointSet::from_rows({{5.0}}), {{0.0}, {10.0}}, ConstraintSpec::unconstrained());
  CHECK(t.assignment == std::vector<int>{0});
}

TEST_CASE("infeasible spec is a value") {
  const PointSet p = random_points(5, 2, 1);
  const auto r = assign(p, {{0.0, 0.0}, {1.0, 1.0}}, ConstraintSpec::balanced(1));
  CHECK_FALSE(r.feasible);
  CHECK(std::isinf(r.cost));
  CHECK_FALSE(r.reason.empty());
  const auto s = assign(p, {{0.0, 0.0}, {1.0, 1.0}}, ConstraintSpec::size_interval({4}, {8}));
  CHECK_FALSE(s.feasible);
}

TEST_CASE("k = 2 sweep equals exhaustive search") {
  Rng rng(3);
  for (std::size_t n = 2; n <= 10; ++n) {
    for (int rep = 0; rep < 4; ++rep) {
      const PointSet p = random_points(n, 2, 100 * n + rep);
      const std::vector<Vector> c{random_vector(2, rng), random_vector(2, rng)};
      for (const char* text : {"none", "balanced:c=1", "balanced:c=2", "size:lo=1,hi=3"}) {
        const auto spec = ConstraintSpec::parse(text);
        const auto r = assign(p, c, spec);
        const double ex = exhaustive(p, c, spec);
        CAPTURE(n);
        CAPTURE(text);
        if (std::isinf(ex)) {
          CHECK_FALSE(r.feasible);
          continue;
        }
        REQUIRE(r.feasible);
        CHECK(r.cost == doctest::Approx(ex).epsilon(1e-12));
        CHECK(r.cost == doctest::Approx(cost_at(p, r.assignment, c)).epsilon(1e-12));
        std::vector<std::size_t> sizes(2, 0);
        for (int l : r.assignment) ++sizes[l];
        CHECK(spec.admits(sizes));
      }
    }
  }
}

TEST_CASE("k > 2 flow equals exhaustive search") {
  Rng rng(8);
  for (std::size_t n = 3; n <= 8; ++n) {
    const PointSet p = random_points(n, 2, 7 * n);
    const std::vector<Vector> c{random_vector(2, rng), random_vector(2, rng), random_vector(2, rng)};
    for (const char* text : {"none", "balanced:c=1", "balanced:c=2", "size:lo=1,hi=3", "size:lo=0/1/2,hi=2/3/4"}) {
      const auto spec = ConstraintSpec::parse(text);
      const auto r = assign(p, c, spec);
      const double ex = exhaustive(p, c, spec);
      CAPTURE(n);
      CAPTURE(text);
      CHECK(r.feasible == !std::isinf(ex));
      if (r.feasible) CHECK(r.cost == doctest::Approx(ex).epsilon(1e-12));
    }
  }
}

TEST_CASE("unconstrained beats random assignments") {
  Rng rng(12);
  const PointSet p = random_points(30, 3, 4);
  const std::vector<Vector> c{random_vector(3, rng), random_vector(3, rng), random_vector(3, rng)};
  const auto r = assign(p, c, {});
  for (int t = 0; t < 200; ++t) {
    std::vector<int> lab(30);
    for (int& l : lab) l = static_cast<int>(rng.index(3));
    CHECK(r.cost <= cost_at(p, lab, c) + 1e-12);
  }
}

TEST_CASE("relaxing balance never hurts") {
  Rng rng(6);
  for (int t = 0; t < 30; ++t) {
    const PointSet p = random_points(12, 2, 500 + t);
    const std::vector<Vector> c{random_vector(2, rng), random_vector(2, rng)};
    double prev = kInfeasibleCost;
    for (double cc : {1.0, 1.4, 2.0, 3.0, 11.0}) {
      const double v = assign(p, c, ConstraintSpec::balanced(cc)).cost;
      CHECK(v <= prev + 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("candidate evaluation") {
  const PointSet p = random_points(16, 2, 42);
  Rng rng(1);
  std::vector<CandidatePair> cands;
  for (int i = 0; i < 40; ++i) cands.push_back({random_vector(2, rng), random_vector(2, rng), {}});
  cands.push_back(cands[7]);  // duplicate: tie resolved to the earlier index

  const Evaluation one = evaluate_candidates(p, {cands[3]}, {});
  CHECK(one.index == 0);
  CHECK(one.result.cost == assign(p, cands[3].c1, cands[3].c2, {}).cost);

  for (const char* text : {"none", "balanced:c=1"}) {
    const auto spec = ConstraintSpec::parse(text);
    const Evaluation e1 = evaluate_candidates(p, cands, spec, 1);
    const Evaluation e3 = evaluate_candidates(p, cands, spec, 3);
    CHECK(e1.index == e3.index);
    CHECK(e1.result.cost == e3.result.cost);
    for (const auto& c : cands) CHECK(e1.result.cost <= assign(p, c.c1, c.c2, spec).cost);

    auto shuffled = cands;
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(evaluate_candidates(p, shuffled, spec).result.cost == e1.result.cost);

    CandidateEvaluator stream(p, spec, 2, 7);
    for (const auto& c : cands) stream({c.c1, c.c2, Phase::kSampling, -1, 0, {}, {}});
    const Evaluation es = stream.finish();
    CHECK(es.index == e1.index);
    CHECK(es.result.cost == e1.result.cost);
  }
  CHECK_THROWS_AS(evaluate_candidates(p, {}, {}), InputError);
  CHECK_THROWS_AS(evaluate_candidates(random_points(3, 2, 1), cands, ConstraintSpec::balanced(1)), InfeasibleError);
}

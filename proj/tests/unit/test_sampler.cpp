#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ckm/errors.hpp"
#include "ckm/sampler.hpp"
#include "ckm/subsets.hpp"
#include "support.hpp"

using namespace ckm;
using testing::random_points;

namespace {
ParameterSet small(double M, double Na, double Nb, double N2, double eps = 0.3) {
  return resolve(eps, {{"M", M}, {"N_a", Na}, {"N_b", Nb}, {"N_2", N2}});
}
}  // namespace

TEST_CASE("binomial and combinations") {
  CHECK(binomial(4, 2) == 6);
  CHECK(binomial(10, 0) == 1);
  CHECK(binomial(3, 5) == 0);
  CHECK(binomial(60, 30) == 118264581564861424.0);
  std::size_t count = 0;
  std::vector<std::uint32_t> prev;
  for (Combinations c(6, 3); !c.done(); c.next()) {
    std::vector<std::uint32_t> cur(c.current().begin(), c.current().end());
    CHECK(std::is_sorted(cur.begin(), cur.end()));
    if (!prev.empty()) CHECK(prev < cur);
    prev = cur;
    ++count;
  }
  CHECK(count == 20);
}

TEST_CASE("sub-multiset sampler") {
  const SubMultisets s({2, 1, 3}, 3);
  // k0 in 0..2, k1 in 0..1, k2 = 3 - k0 - k1 in 0..3
  CHECK(s.count() == 6.0L);
  Rng rng(4);
  CHECK(s.distinct(100, rng).size() == 6);
  const auto some = s.distinct(4, rng);
  CHECK(some.size() == 4);
  std::set<std::vector<std::pair<std::uint32_t, std::uint32_t>>> uniq(some.begin(), some.end());
  CHECK(uniq.size() == 4);
  for (const auto& m : some) {
    std::uint32_t total = 0;
    for (auto [t, k] : m) total += k;
    CHECK(total == 3);
  }
}

TEST_CASE("identical points give identical centers") {
  const PointSet p = PointSet::from_rows({{1.5, -2.25}, {1.5, -2.25}, {1.5, -2.25}});
  const CandidateSet cs = run_2means(p, small(3, 6, 6, 6), 17);
  CHECK(cs.pairs.size() == cs.total());
  for (const auto& c : cs.pairs) {
    CHECK(c.c1 == Vector{1.5, -2.25});
    CHECK(c.c2 == Vector{1.5, -2.25});
  }
}

TEST_CASE("phase-1 count equals the binomial product") {
  const PointSet p = random_points(30, 2, 3);
  const CandidateSet cs = run_2means(p, small(2, 4, 4, 4), 5);
  CHECK(cs.phase1_count == 36);
  CHECK(cs.phase1_bound == 36);
  CHECK_FALSE(cs.truncated);
  std::size_t ph1 = 0;
  for (const auto& c : cs.pairs) ph1 += c.provenance.phase == Phase::kSampling;
  CHECK(ph1 == 36);
}

TEST_CASE("round counts and bounds") {
  const PointSet p = random_points(200, 3, 9);
  const ParameterSet ps = small(2, 4, 4, 5);
  const CandidateSet cs = run_2means(p, ps, 1);
  CHECK(cs.bare_count == 1);
  CHECK(cs.round_bound == binomial(7, 2));
  CHECK(cs.phase_iterations >= 1);
  CHECK(cs.phase_iterations <= peeling_iteration_bound(200, ps.varsigma));
  // Each round enumerates sum_t C(N_2, M - t) = C(5,2) + C(5,1) + 1 = 16 pairs.
  CHECK(cs.phase2_count == 16 * cs.phase_iterations);
  CHECK(static_cast<double>(cs.phase2_count) <= cs.round_bound * cs.phase_iterations);
}

TEST_CASE("iteration bound with the resolved shrink factor") {
  const PointSet p = random_points(1000, 2, 10);
  const ParameterSet ps = small(1, 1, 1, 2);
  CHECK(peeling_iteration_bound(1000, ps.varsigma) == 12321);
  const SamplerReport r = run_2means(p, ps, 3, {}, [](const CandidateView&) {});
  CHECK(r.phase_iterations <= 12321);
  CHECK(r.phase_iterations == 999);
}

TEST_CASE("determinism") {
  const PointSet p = random_points(40, 3, 31);
  const ParameterSet ps = small(2, 5, 5, 6);
  const CandidateSet a = run_2means(p, ps, 77), b = run_2means(p, ps, 77), c = run_2means(p, ps, 78);
  REQUIRE(a.pairs.size() == b.pairs.size());
  bool same = true, differs = false;
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    same = same && a.pairs[i].c1 == b.pairs[i].c1 && a.pairs[i].c2 == b.pairs[i].c2;
    if (i < c.pairs.size()) differs = differs || a.pairs[i].c1 != c.pairs[i].c1;
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("capped enumeration") {
  const PointSet p = random_points(60, 2, 2);
  SamplerOptions so;
  so.cap = 50;
  const CandidateSet cs = run_2means(p, small(3, 12, 12, 12), 4, so);
  CHECK(cs.truncated);
  CHECK(cs.phase1_count <= 50);
  CHECK(cs.phase1_count > 0);
  // Uncapped, a very large enumeration is refused instead of running forever.
  CHECK_THROWS_AS(run_2means(p, small(8, 400, 400, 8), 4), InputError);
}

TEST_CASE("multiset subset enumeration") {
  const PointSet v = PointSet::from_rows({{0.0}, {2.0}});
  const Vector e{10.0};
  std::vector<double> cents;
  std::vector<std::uint32_t> ts;
  const auto n = enumerate_multiset_subsets(v, e, 2, 2, [&](std::span<const double> c, std::uint32_t t, auto) {
    cents.push_back(c[0]);
    ts.push_back(t);
  });
  CHECK(n == 4);
  CHECK(cents == std::vector<double>{1.0, 5.0, 6.0, 10.0});
  CHECK(ts == std::vector<std::uint32_t>{0, 1, 1, 2});

  const PointSet w = random_points(5, 2, 1);
  std::size_t m1 = 0;
  enumerate_multiset_subsets(w, Vector{0.0, 0.0}, 1, 1, [&](auto, auto, auto) { ++m1; });
  CHECK(m1 == 6);

  Vector last;
  const auto total = enumerate_multiset_subsets(w, Vector{7.0, -1.0}, 3, 3, [&](std::span<const double> c, auto, auto) {
    last.assign(c.begin(), c.end());
  });
  CHECK(total == binomial(5, 3) + binomial(5, 2) + binomial(5, 1) + 1);
  CHECK(last == Vector{7.0, -1.0});

  CHECK_THROWS_AS(enumerate_multiset_subsets(v, e, 1, 2, [](auto, auto, auto) {}), InputError);
  CHECK_THROWS_AS(enumerate_multiset_subsets(v, Vector{1.0, 2.0}, 2, 2, [](auto, auto, auto) {}), InputError);
}

TEST_CASE("peel") {
  Rng rng(2);
  SUBCASE("halving") {
    const PointSet q = random_points(100, 2, 12);
    const PeelResult r = peel(q, Vector{0.0, 0.0}, 1.0, 0.05, rng);
    CHECK(r.kept.size() == 50);
    CHECK(r.next.size() == 50);
    for (std::uint32_t i : r.kept) CHECK(distance(q[i], r.center) >= r.radius);
  }
  SUBCASE("co-circular points") {
    const double pi = std::acos(-1.0);
    std::vector<Vector> rows;
    for (int i = 0; i < 24; ++i) rows.push_back({3 + std::cos(2 * pi * i / 24), -1 + std::sin(2 * pi * i / 24)});
    const PointSet q = PointSet::from_rows(rows);
    const PeelResult r = peel(q, Vector{3.0, -1.0}, 1.0, 0.05, rng);
    CHECK(r.kept.size() == 12);
    std::set<double> d;
    for (std::size_t i = 0; i < q.size(); ++i) d.insert(squared_distance(q[i], r.center));
    CHECK(d.size() == 24);
  }
  SUBCASE("always shrinks") {
    for (std::size_t n = 2; n < 40; ++n) {
      const PointSet q = random_points(n, 1, n);
      CHECK(peel(q, Vector{0.0}, 1e-4, 0.05, rng).kept.size() == n - 1);
      CHECK(peel(q, Vector{0.0}, 0.5, 0.05, rng).kept.size() == std::min<std::size_t>(n - 1, (n * 2 + 2) / 3));
    }
  }
  CHECK_THROWS_AS(peel(PointSet(), Vector{}, 1.0, 0.05, rng), InputError);
}

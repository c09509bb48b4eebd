#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ckm/errors.hpp"
#include "ckm/extension.hpp"
#include "ckm/io.hpp"
#include "ckm/oracle.hpp"
#include "support.hpp"

using namespace ckm;
using testing::random_points;

TEST_CASE("extension parameters") {
  const ExtensionParams x = extension_params(3, 0.2);
  CHECK(x.gamma_star == doctest::Approx(0.1));
  CHECK(x.delta_eps == 0.2);
  CHECK(x.M == 50);
  CHECK(x.N_a == 4 * 3 * 50);
  CHECK(x.N_b == std::ceil(50.0 * 2 / ((1 - x.delta2) * std::pow(0.2, 1.1))));
  CHECK(x.N_a >= x.M);
  CHECK(x.N_b >= x.M);
  CHECK_THROWS_AS(extension_params(3, 0.2, {{"mu1", 0.7}}), InputError);
  CHECK_THROWS_AS(extension_params(1, 0.2), InputError);
  const ExtensionParams o = extension_params(2, 0.3, {{"M", 2}, {"N_a", 4}, {"N_b", 4}});
  CHECK(o.M == 2);
  CHECK(o.overridden.size() == 3);
}

TEST_CASE("registry") {
  const auto names = extension_names();
  for (const char* n : {"brute", "greedy", "two-means-peel"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  CHECK_THROWS_AS(make_extension("nope"), InputError);

  register_extension("constant", [](const ExtensionSettings&) {
    ExtensionAlgorithm a;
    a.name = "constant";
    a.extend = [](const ExtensionContext& ctx, const CenterTuple& prefix, const TupleSink& emit) {
      CenterTuple t = prefix;
      while (static_cast<int>(t.size()) < ctx.k) t.push_back(prefix.front());
      emit(t);
    };
    a.pair_complexity = [](int, int, std::size_t, std::size_t, double) { return 1.0; };
    return a;
  });
  const ExtensionAlgorithm c = make_extension("constant");
  const PointSet p = random_points(20, 2, 3);
  const auto xp = extension_params(3, 0.3, {{"M", 2}, {"N_a", 4}, {"N_b", 4}});
  const auto tuples = run_kmeans_framework(p, c, xp, 1);
  CHECK(tuples.size() == 37);
  for (const auto& t : tuples) CHECK(t.size() == 3);
}

TEST_CASE("prefix accounting") {
  const PointSet p = random_points(30, 2, 11);
  const auto xp = extension_params(2, 0.3, {{"M", 2}, {"N_a", 4}, {"N_b", 4}});
  std::size_t emitted = 0;
  const FrameworkReport r =
      run_kmeans_framework(p, make_extension("greedy"), xp, 5, {}, [&](const CenterTuple&) { ++emitted; });
  CHECK(r.prefix_pairs == 36);
  CHECK(r.prefixes == 37);
  CHECK(r.prefix_bound == 37);
  CHECK_FALSE(r.truncated);
  CHECK(r.tuples == emitted);

  FrameworkOptions capped;
  capped.cap = 10;
  const FrameworkReport rc =
      run_kmeans_framework(p, make_extension("greedy"), xp, 5, capped, [](const CenterTuple&) {});
  CHECK(rc.truncated);
  CHECK(rc.prefix_pairs <= 10);
}

TEST_CASE("two-means-peel covers the sampler's peeling candidates") {
  const PointSet p = random_points(40, 2, 8);
  const double M = 2;
  ExtensionSettings settings;
  settings.two_means = resolve(0.3, {{"M", M}, {"N_a", 4}, {"N_b", 4}, {"N_2", 4}});
  const auto xp = extension_params(2, 0.3, {{"M", M}, {"N_a", 4}, {"N_b", 4}});
  std::set<std::vector<double>> ext;
  run_kmeans_framework(p, make_extension("two-means-peel", settings), xp, 21, {}, [&](const CenterTuple& t) {
    std::vector<double> key = t[0];
    key.insert(key.end(), t[1].begin(), t[1].end());
    ext.insert(key);
  });
  const CandidateSet cs = run_2means(p, settings.two_means, 21);
  std::size_t checked = 0;
  for (const auto& c : cs.pairs) {
    if (c.provenance.phase != Phase::kPeeling) continue;
    std::vector<double> key = c.c1;
    key.insert(key.end(), c.c2.begin(), c.c2.end());
    CHECK(ext.count(key) == 1);
    ++checked;
  }
  CHECK(checked > 1);
}

TEST_CASE("brute completion on a separated k = 3 instance") {
  MixtureSpec ms;
  ms.n = 9;
  ms.k = 3;
  ms.separation = 10;
  ms.balanced = true;
  const MixtureInstance inst = generate_mixture(ms, 4);
  const auto xp = extension_params(3, 0.3, {{"M", 2}, {"N_a", 6}, {"N_b", 6}});
  TupleEvaluator ev(inst.points, {});
  FrameworkOptions fo;
  fo.cap = 200;
  run_kmeans_framework(inst.points, make_extension("brute"), xp, 3, fo, ev.sink());
  REQUIRE(ev.found());
  const double opt = brute_optk(inst.points, 3).cost;
  CHECK(ev.result().cost >= opt - 1e-9);
  CHECK(ev.best().size() == 3);
}

TEST_CASE("failing prefixes are skipped, all failing rethrows") {
  ExtensionAlgorithm flaky;
  flaky.name = "flaky";
  flaky.extend = [](const ExtensionContext& ctx, const CenterTuple& prefix, const TupleSink& emit) {
    if (ctx.prefix_index % 2 == 0) throw std::runtime_error("odd failure");
    emit({prefix[0], prefix[0]});
  };
  const PointSet p = random_points(20, 2, 2);
  const auto xp = extension_params(2, 0.3, {{"M", 2}, {"N_a", 4}, {"N_b", 4}});
  const FrameworkReport r = run_kmeans_framework(p, flaky, xp, 1, {}, [](const CenterTuple&) {});
  CHECK(r.failed_prefixes > 0);
  CHECK(r.tuples + r.failed_prefixes == r.prefixes);
  CHECK_FALSE(r.log.empty());

  ExtensionAlgorithm broken = flaky;
  broken.extend = [](const ExtensionContext&, const CenterTuple&, const TupleSink&) {
    throw std::runtime_error("always");
  };
  CHECK_THROWS(run_kmeans_framework(p, broken, xp, 1, {}, [](const CenterTuple&) {}));
}

TEST_CASE("balance case classifier") {
  CHECK(balance_case_classifier({0, 0, 1, 1}, 2, 0.1) == BalanceCase::kCase1);
  std::vector<int> labels(1000000, 0);
  labels[0] = 1;
  labels[1] = 2;
  CHECK(balance_case_classifier(labels, 3, 0.1) == BalanceCase::kCase2);
  // delta = 1/2, d1 = 0: threshold n / (2 (k - 1)) = 2 exactly; the boundary counts as Case 1.
  std::vector<int> edge(8, 0);
  edge[6] = 1;
  edge[7] = 1;
  CHECK(balance_case_classifier(edge, 3, 0.5, 0.0) == BalanceCase::kCase1);
  edge[7] = 0;
  CHECK(balance_case_classifier(edge, 3, 0.5, 0.0) == BalanceCase::kCase2);
}

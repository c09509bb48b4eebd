#include <doctest.h>

#include <sstream>

#include "ckm/errors.hpp"
#include "ckm/oracle.hpp"
#include "ckm/reduction.hpp"

using namespace ckm;

namespace {
GraphInstance cycle(std::size_t n) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
  for (std::uint32_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return GraphInstance::make(n, e);
}
GraphInstance complete(std::size_t n) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return GraphInstance::make(n, e);
}
}  // namespace

TEST_CASE("graph validation and parsing") {
  CHECK_THROWS_AS(GraphInstance::make(3, {{0, 0}}), InputError);
  CHECK_THROWS_AS(GraphInstance::make(3, {{0, 1}, {1, 0}}), InputError);
  CHECK_THROWS_AS(GraphInstance::make(3, {{0, 3}}), InputError);
  const GraphInstance g = GraphInstance::make(4, {{2, 1}, {0, 3}});
  CHECK(g.edges == std::vector<std::pair<std::uint32_t, std::uint32_t>>{{0, 3}, {1, 2}});

  std::istringstream in("# square\n4\n0 1\n1 2 # edge\n2 3\n\n3 0\n");
  const GraphInstance c = GraphInstance::parse(in);
  CHECK(c.n_vertices == 4);
  CHECK(c.edges.size() == 4);
  std::ostringstream out;
  c.write(out);
  std::istringstream again(out.str());
  CHECK(GraphInstance::parse(again).edges == c.edges);

  std::istringstream bad("4\n0 x\n");
  CHECK_THROWS_AS(GraphInstance::parse(bad), InputError);
}

TEST_CASE("embedding") {
  const PointSet k2 = reduce_to_points(GraphInstance::make(2, {{0, 1}}));
  CHECK(k2.dim() == 1);
  CHECK(k2[0][0] == 1.0);
  CHECK(k2[1][0] == -1.0);

  const PointSet empty = reduce_to_points(GraphInstance::make(4, {}));
  CHECK(empty.dim() == 1);
  CHECK(empty.size() == 4);
  CHECK(brute_opt2(empty, ConstraintSpec::balanced(1)).cost == 0.0);

  const GraphInstance path = GraphInstance::make(3, {{0, 1}, {1, 2}});
  CHECK_THROWS_AS(reduce_to_points(path), InputError);
  const PointSet padded = reduce_to_points(pad_vertex(path));
  CHECK(padded.size() == 4);
  CHECK(padded.dim() == 2);
  CHECK(padded[1][0] == -1.0);
  CHECK(padded[1][1] == 1.0);
  CHECK(padded[3][0] == 0.0);
}

TEST_CASE("padding") {
  const GraphInstance tri = complete(3);
  const GraphInstance t4 = pad_vertex(tri);
  CHECK(t4.n_vertices == 4);
  CHECK(t4.edges == tri.edges);
  CHECK(pad_vertex(GraphInstance::make(1, {})).n_vertices == 2);
  std::string warning;
  CHECK(pad_vertex(complete(4), &warning).n_vertices == 4);
  CHECK_FALSE(warning.empty());
  CHECK(max_bisection_bruteforce(pad_vertex(cycle(5))).cut == 4);
  CHECK(max_bisection_bruteforce(cycle(6)).cut == 6);
}

TEST_CASE("max bisection") {
  CHECK(max_bisection_bruteforce(complete(2)).cut == 1);
  CHECK(max_bisection_bruteforce(cycle(4)).cut == 4);
  CHECK(max_bisection_bruteforce(complete(4)).cut == 4);
  const Bisection b = max_bisection_bruteforce(cycle(4));
  CHECK(cut_size(cycle(4), b.side) == 4);
  CHECK_THROWS_AS(max_bisection_bruteforce(complete(3)), InputError);
  CHECK_THROWS_AS(max_bisection_bruteforce(GraphInstance::make(22, {})), RefusalError);
}

TEST_CASE("cost identity") {
  const IdentityReport k2 = verify_identity(complete(2));
  CHECK(k2.pass);
  CHECK(k2.min_balanced_cost == doctest::Approx(0.0));
  const IdentityReport c4 = verify_identity(cycle(4));
  CHECK(c4.pass);
  CHECK(c4.splits == 3);
  CHECK(c4.min_balanced_cost == doctest::Approx(4.0));
  CHECK(c4.exact_min == doctest::Approx(4.0));
  const IdentityReport e = verify_identity(GraphInstance::make(6, {}));
  CHECK(e.pass);
  CHECK(e.min_balanced_cost == 0.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) CHECK(verify_identity(random_graph(8, 0.5, seed)).pass);
  CHECK_THROWS_AS(verify_identity(GraphInstance::make(14, {})), RefusalError);
}

TEST_CASE("padding preserves max bisection for n <= 7") {
  for (std::size_t n = 1; n <= 7; n += 2)
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const GraphInstance g = random_graph(n, 0.5, seed);
      const GraphInstance p = pad_vertex(g);
      // Odd n: the best split of n+1 vertices with the isolated vertex is a best near-bisection of g.
      std::size_t best = 0;
      const std::size_t m = g.n_vertices;
      for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != m / 2) continue;
        std::vector<int> side(m);
        for (std::size_t i = 0; i < m; ++i) side[i] = (mask >> i) & 1;
        best = std::max(best, cut_size(g, side));
      }
      CHECK(max_bisection_bruteforce(p).cut == best);
    }
}

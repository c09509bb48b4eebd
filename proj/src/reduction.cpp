#include "ckm/reduction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "ckm/constraints.hpp"
#include "ckm/errors.hpp"
#include "ckm/oracle.hpp"
#include "ckm/rng.hpp"

namespace ckm {

GraphInstance GraphInstance::make(std::size_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
  for (auto& [i, j] : edges) {
    if (i == j) throw InputError("self-loop at vertex " + std::to_string(i));
    if (i >= n || j >= n) throw InputError("edge endpoint out of range");
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) throw InputError("duplicate edge");
  GraphInstance g;
  g.n_vertices = n;
  g.edges = std::move(edges);
  return g;
}

GraphInstance GraphInstance::parse(std::istream& in) {
  std::string line;
  bool have_n = false;
  std::size_t n = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    long long a = 0, b = 0;
    if (!(ls >> a)) continue;
    if (!have_n) {
      std::string rest;
      if (a < 0 || (ls >> rest)) throw InputError("graph header must be a single vertex count (line " + std::to_string(lineno) + ")");
      n = static_cast<std::size_t>(a);
      have_n = true;
      continue;
    }
    std::string rest;
    if (!(ls >> b) || (ls >> rest) || a < 0 || b < 0)
      throw InputError("bad edge on line " + std::to_string(lineno) + ": expected 'i j'");
    edges.emplace_back(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
  }
  if (!have_n) throw InputError("graph file is missing the vertex-count header");
  return make(n, std::move(edges));
}

void GraphInstance::write(std::ostream& out) const {
  out << n_vertices << '\n';
  for (auto [i, j] : edges) out << i << ' ' << j << '\n';
}

PointSet reduce_to_points(const GraphInstance& g) {
  if (g.n_vertices < 2 || g.n_vertices % 2 != 0)
    throw InputError("reduction needs an even number of vertices (>= 2); apply pad_vertex first");
  const std::size_t d = std::max<std::size_t>(1, g.edges.size());
  std::vector<double> coords(g.n_vertices * d, 0.0);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    coords[g.edges[e].first * d + e] = 1.0;
    coords[g.edges[e].second * d + e] = -1.0;
  }
  return PointSet(d, std::move(coords));
}

GraphInstance pad_vertex(const GraphInstance& g, std::string* warning) {
  if (g.n_vertices % 2 == 0) {
    if (warning) *warning = "vertex count is already even; graph returned unchanged";
    return g;
  }
  GraphInstance out = g;
  ++out.n_vertices;
  return out;
}

std::size_t cut_size(const GraphInstance& g, const std::vector<int>& side) {
  if (side.size() != g.n_vertices) throw InputError("split size does not match the graph");
  std::size_t cut = 0;
  for (auto [i, j] : g.edges) cut += side[i] != side[j];
  return cut;
}

namespace {

/// Visit every balanced split with vertex 0 on side 0, as a bitmask of side-1 vertices.
template <class Visit>
void for_each_bisection(std::size_t n, Visit visit) {
  const std::size_t half = n / 2;
  const std::uint32_t total = std::uint32_t{1} << (n - 1);
  for (std::uint32_t m = 0; m < total; ++m) {
    if (static_cast<std::size_t>(std::popcount(m)) != half) continue;
    visit(m << 1);
  }
}

std::vector<int> sides_of(std::uint32_t mask, std::size_t n) {
  std::vector<int> side(n);
  for (std::size_t i = 0; i < n; ++i) side[i] = (mask >> i) & 1u;
  return side;
}

void require_even(const GraphInstance& g, std::size_t limit) {
  if (g.n_vertices < 2 || g.n_vertices % 2 != 0) throw InputError("bisection needs an even number of vertices (>= 2)");
  if (g.n_vertices > limit)
    throw RefusalError("exhaustive bisection is limited to n <= " + std::to_string(limit) + " (got " +
                       std::to_string(g.n_vertices) + ")");
}

}  // namespace

Bisection max_bisection_bruteforce(const GraphInstance& g) {
  require_even(g, kBisectionLimit);
  const std::size_t n = g.n_vertices;
  Bisection best;
  bool have = false;
  for_each_bisection(n, [&](std::uint32_t mask) {
    std::size_t cut = 0;
    for (auto [i, j] : g.edges) cut += ((mask >> i) ^ (mask >> j)) & 1u;
    if (!have || cut > best.cut) {
      have = true;
      best.cut = cut;
      best.side = sides_of(mask, n);
    }
  });
  return best;
}

IdentityReport verify_identity(const GraphInstance& g, double tolerance) {
  require_even(g, kIdentityLimit);
  const std::size_t n = g.n_vertices;
  const PointSet pts = reduce_to_points(g);
  const double m = static_cast<double>(g.edges.size());
  IdentityReport rep;
  bool first = true;
  for_each_bisection(n, [&](std::uint32_t mask) {
    const std::vector<int> side = sides_of(mask, n);
    const double cost = partition_cost(pts, side, 2);
    const double predicted = 2.0 * m - 4.0 / static_cast<double>(n) * static_cast<double>(cut_size(g, side));
    const double err = std::abs(cost - predicted);
    rep.max_abs_error = std::max(rep.max_abs_error, err);
    if (err > tolerance) ++rep.mismatches;
    if (first || cost < rep.min_balanced_cost) rep.min_balanced_cost = cost;
    first = false;
    ++rep.splits;
  });
  rep.max_bisection = max_bisection_bruteforce(g).cut;
  rep.predicted_min = 2.0 * m - 4.0 / static_cast<double>(n) * static_cast<double>(rep.max_bisection);
  rep.exact_min = brute_opt2(pts, ConstraintSpec::balanced(1.0)).cost;
  rep.pass = rep.mismatches == 0 && std::abs(rep.min_balanced_cost - rep.predicted_min) <= tolerance &&
             std::abs(rep.exact_min - rep.predicted_min) <= tolerance;
  return rep;
}

GraphInstance random_graph(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("edge probability must lie in [0, 1]");
  Rng rng = Rng::substream(seed, "graph");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j)
      if (rng.uniform01() < p) edges.emplace_back(i, j);
  return GraphInstance::make(n, std::move(edges));
}

}  // namespace ckm

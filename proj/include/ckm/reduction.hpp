#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ckm/geometry.hpp"

namespace ckm {

/// Simple undirected graph; edges stored as (i, j) with i < j, sorted and unique.
struct GraphInstance {
  std::size_t n_vertices = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  /// Normalizes (i, j) order, sorts, and rejects self-loops, duplicates and
  /// out-of-range endpoints with InputError.
  static GraphInstance make(std::size_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges);

  /// "n" header line, then one "i j" pair per line ('#' starts a comment).
  static GraphInstance parse(std::istream& in);
  void write(std::ostream& out) const;
};

/// Row v has +1 in column e for edge e = (v, j), -1 for edge e = (i, v).
/// Edgeless graphs embed as zeros in R^1. Throws InputError for odd n.
PointSet reduce_to_points(const GraphInstance& g);

/// Adds one isolated vertex when n is odd. Even input comes back unchanged
/// and `warning` (if given) is set.
GraphInstance pad_vertex(const GraphInstance& g, std::string* warning = nullptr);

struct Bisection {
  std::size_t cut = 0;
  std::vector<int> side;  ///< 0/1 per vertex, vertex 0 on side 0
};

inline constexpr std::size_t kBisectionLimit = 20;
inline constexpr std::size_t kIdentityLimit = 12;

/// Exact maximum bisection (equal halves). n even and <= 20, else RefusalError / InputError.
Bisection max_bisection_bruteforce(const GraphInstance& g);

/// Number of edges crossing a 0/1 split.
std::size_t cut_size(const GraphInstance& g, const std::vector<int>& side);

struct IdentityReport {
  std::size_t splits = 0;           ///< balanced splits checked (vertex 0 pinned)
  std::size_t mismatches = 0;       ///< splits where cost != 2|E| - (4/n) cut
  double max_abs_error = 0.0;
  std::size_t max_bisection = 0;
  double predicted_min = 0.0;       ///< 2|E| - (4/n) max_bisection
  double min_balanced_cost = 0.0;   ///< minimum over balanced splits of the clustering cost
  double exact_min = 0.0;           ///< from the exact balanced 2-partition solver
  bool pass = false;
};

/// Check the cost identity on every balanced split and the resulting
/// min-cost formula. n even and <= 12.
IdentityReport verify_identity(const GraphInstance& g, double tolerance = 1e-9);

/// Erdos-Renyi G(n, p) from a seeded stream.
GraphInstance random_graph(std::size_t n, double p, std::uint64_t seed);

}  // namespace ckm

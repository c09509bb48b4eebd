#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ckm/rng.hpp"

namespace ckm {

using Vector = std::vector<double>;

/// Ordered set of n points in R^d stored row-major. Immutable once built.
class PointSet {
 public:
  PointSet() = default;
  /// `coords` holds n*dim values; dim must be >= 1.
  PointSet(std::size_t dim, std::vector<double> coords);

  static PointSet from_rows(const std::vector<Vector>& rows);

  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<const double> coords() const { return coords_; }

  /// Rows selected by index, in the given order (duplicates allowed).
  PointSet subset(std::span<const std::uint32_t> indices) const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);
double distance(std::span<const double> a, std::span<const double> b);

/// Sum over p in S of ||p - q||^2 (pairwise summation). Zero for empty S.
double f2(std::span<const double> q, const PointSet& s);

/// Coordinate-wise mean. Computed as s[0] + mean(s[i] - s[0]) so that a set of
/// identical points yields that point bit-for-bit.
Vector centroid(const PointSet& s);

/// Same as centroid() over the rows listed in `indices`.
Vector centroid(const PointSet& s, std::span<const std::uint32_t> indices);

/// k-th largest of {dist(p, q) : p in S}, 1-based. Expected linear time
/// (selection, no full sort). Equal distances are ordered by point index,
/// lower index counting as larger.
double kth_largest_distance(std::span<const double> q, const PointSet& s, std::size_t k);

/// Box half-width used by vibrate():
/// min(d_max, eta * d_min2^2 / (3 * d * d_max)).
double vibration_radius(std::span<const double> q, const PointSet& p, double eta);

/// q + Y with Y uniform in [-rho, rho]^d, rho = vibration_radius(q, p, eta).
/// The result satisfies f2(q', p) <= (1 + eta) f2(q, p); a draw violating it is
/// redrawn. Throws DegenerateInputError when |p| < 3 or d_min2 == 0.
Vector vibrate(std::span<const double> q, const PointSet& p, double eta, Rng& rng);

/// Per-cluster statistics of a labelled partition.
struct ClusteringStats {
  std::vector<Vector> centroids;
  std::vector<double> beta;   ///< |P_j| / |P|
  std::vector<double> sigma;  ///< sqrt(f2(m_j, P_j) / |P_j|)
  std::vector<std::size_t> sizes;
  double cost = 0.0;       ///< sum_j f2(m_j, P_j)
  double sigma_opt = 0.0;  ///< sqrt(cost / |P|)
};

/// Labels must lie in [0, k) and every cluster must be nonempty.
ClusteringStats clustering_stats(const PointSet& p, std::span<const int> labels, int k);

/// Sum_j f2(c(P_j), P_j) for a labelling (clusters at their own centroids).
/// Empty clusters contribute zero.
double partition_cost(const PointSet& p, std::span<const int> labels, int k);

}  // namespace ckm

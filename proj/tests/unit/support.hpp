#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ckm/geometry.hpp"
#include "ckm/rng.hpp"

namespace testing {

inline ckm::PointSet random_points(std::size_t n, std::size_t d, std::uint64_t seed, double scale = 1.0) {
  ckm::Rng rng(seed);
  std::vector<double> c(n * d);
  for (double& x : c) x = scale * rng.normal();
  return ckm::PointSet(d, std::move(c));
}

inline ckm::Vector random_vector(std::size_t d, ckm::Rng& rng, double scale = 1.0) {
  ckm::Vector v(d);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

// Plain left-to-right sums; independent of the library's pairwise summation.
inline double naive_f2(const ckm::Vector& q, const ckm::PointSet& s) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.dim(); ++j) {
      const double t = s[i][j] - q[j];
      total += t * t;
    }
  return total;
}

inline ckm::Vector naive_centroid(const ckm::PointSet& s) {
  ckm::Vector c(s.dim(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.dim(); ++j) c[j] += s[i][j];
  for (double& x : c) x /= static_cast<double>(s.size());
  return c;
}

inline bool rel_close(double a, double b, double rel = 1e-9, double abs = 1e-12) {
  return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b)) + abs;
}

// Cost of a labelling with the given fixed centers.
inline double cost_at(const ckm::PointSet& p, const std::vector<int>& labels, const std::vector<ckm::Vector>& centers) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += ckm::squared_distance(p[i], centers[labels[i]]);
  return total;
}

}  // namespace testing

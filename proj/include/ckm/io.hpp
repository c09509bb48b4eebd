#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ckm/geometry.hpp"

namespace ckm {

/// Headerless CSV, one point per line, %.17g (round-trips exactly).
void write_points_csv(std::ostream& out, const PointSet& p);
/// Blank lines and lines starting with '#' are skipped. Ragged rows or
/// non-numeric fields raise InputError naming the line.
PointSet read_points_csv(std::istream& in);

PointSet load_points(const std::string& path);
void save_points(const std::string& path, const PointSet& p);

/// Isotropic Gaussian mixture with well-separated centers.
struct MixtureSpec {
  std::size_t n = 12;
  std::size_t d = 2;
  int k = 2;
  double separation = 10.0;  ///< minimum center distance, in units of sigma
  double sigma = 1.0;
  std::vector<double> weights;      ///< mixing weights (uniform when empty)
  std::vector<std::size_t> sizes;   ///< exact cluster sizes (overrides weights)
  bool balanced = false;            ///< sizes as equal as possible
};

struct MixtureInstance {
  PointSet points;
  std::vector<int> labels;
  std::vector<Vector> centers;
  std::vector<std::size_t> sizes;
};

/// Deterministic in (spec, seed). Sizes drawn from the weights are
/// redrawn until every cluster is nonempty.
MixtureInstance generate_mixture(const MixtureSpec& spec, std::uint64_t seed);

}  // namespace ckm

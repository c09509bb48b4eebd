#include "ckm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ckm/errors.hpp"
#include "pairwise_sum.hpp"

namespace ckm {

PointSet::PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw InputError("point dimension must be at least 1");
  if (coords_.size() % dim_ != 0)
    throw InputError("coordinate count " + std::to_string(coords_.size()) + " is not a multiple of dimension " +
                     std::to_string(dim_));
}

PointSet PointSet::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) throw InputError("cannot infer dimension of an empty row list");
  const std::size_t d = rows.front().size();
  std::vector<double> coords;
  coords.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw InputError("rows have inconsistent dimensions");
    coords.insert(coords.end(), r.begin(), r.end());
  }
  return PointSet(d, std::move(coords));
}

PointSet PointSet::subset(std::span<const std::uint32_t> indices) const {
  std::vector<double> coords;
  coords.reserve(indices.size() * dim_);
  for (auto i : indices) {
    if (i >= size()) throw InputError("subset index out of range");
    auto row = (*this)[i];
    coords.insert(coords.end(), row.begin(), row.end());
  }
  return PointSet(dim_, std::move(coords));
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) { return std::sqrt(squared_distance(a, b)); }

namespace {

void require_dim(std::span<const double> q, const PointSet& s) {
  if (!s.empty() && q.size() != s.dim())
    throw InputError("dimension mismatch: query has " + std::to_string(q.size()) + " coordinates, set has " +
                     std::to_string(s.dim()));
}

template <class IndexOf>
Vector centroid_impl(const PointSet& s, std::size_t count, const IndexOf& index_of) {
  if (count == 0) throw InputError("centroid of an empty set");
  const std::size_t d = s.dim();
  const auto base = s[index_of(0)];
  Vector c(base.begin(), base.end());
  for (std::size_t j = 0; j < d; ++j) {
    const double shift = detail::pairwise_sum(1, count, [&](std::size_t i) { return s[index_of(i)][j] - base[j]; });
    c[j] += shift / static_cast<double>(count);
  }
  return c;
}

}  // namespace

double f2(std::span<const double> q, const PointSet& s) {
  require_dim(q, s);
  return detail::pairwise_sum(0, s.size(), [&](std::size_t i) { return squared_distance(s[i], q); });
}

Vector centroid(const PointSet& s) {
  return centroid_impl(s, s.size(), [](std::size_t i) { return i; });
}

Vector centroid(const PointSet& s, std::span<const std::uint32_t> indices) {
  for (auto i : indices)
    if (i >= s.size()) throw InputError("centroid index out of range");
  return centroid_impl(s, indices.size(), [&](std::size_t i) { return indices[i]; });
}

double kth_largest_distance(std::span<const double> q, const PointSet& s, std::size_t k) {
  require_dim(q, s);
  if (k < 1 || k > s.size())
    throw InputError("k = " + std::to_string(k) + " out of range [1, " + std::to_string(s.size()) + "]");
  std::vector<std::pair<double, std::uint32_t>> keyed(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) keyed[i] = {squared_distance(s[i], q), static_cast<std::uint32_t>(i)};
  auto larger = [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); };
  std::nth_element(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(k - 1), keyed.end(), larger);
  return std::sqrt(keyed[k - 1].first);
}

double vibration_radius(std::span<const double> q, const PointSet& p, double eta) {
  require_dim(q, p);
  if (!(eta > 0.0 && eta < 1.0)) throw InputError("eta must lie in (0, 1)");
  if (p.size() < 3) throw DegenerateInputError("vibration needs at least 3 points");
  double d_max = 0.0;
  double min1 = std::numeric_limits<double>::infinity();
  double min2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double dist = distance(p[i], q);
    d_max = std::max(d_max, dist);
    if (dist < min1) {
      min2 = min1;
      min1 = dist;
    } else if (dist < min2) {
      min2 = dist;
    }
  }
  if (min2 == 0.0) throw DegenerateInputError("query coincides with two or more points (second-smallest distance is 0)");
  const double d = static_cast<double>(p.dim());
  return std::min(d_max, eta * min2 * min2 / (3.0 * d * d_max));
}

Vector vibrate(std::span<const double> q, const PointSet& p, double eta, Rng& rng) {
  const double rho = vibration_radius(q, p, eta);
  const double bound = (1.0 + eta) * f2(q, p);
  Vector out(q.size());
  for (int attempt = 0;; ++attempt) {
    // Halve the box after repeated rejections; the bound holds for small enough rho.
    const double r = attempt < 32 ? rho : std::ldexp(rho, -(attempt - 31));
    for (std::size_t j = 0; j < q.size(); ++j) out[j] = q[j] + rng.uniform(-r, r);
    if (f2(out, p) <= bound) return out;
  }
}

ClusteringStats clustering_stats(const PointSet& p, std::span<const int> labels, int k) {
  if (labels.size() != p.size()) throw InputError("label count does not match point count");
  if (k < 1) throw InputError("cluster count must be positive");
  std::vector<std::vector<std::uint32_t>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k) throw InputError("label out of range");
    members[static_cast<std::size_t>(labels[i])].push_back(static_cast<std::uint32_t>(i));
  }
  ClusteringStats st;
  const double n = static_cast<double>(p.size());
  for (const auto& m : members) {
    if (m.empty()) throw InputError("clustering has an empty cluster");
    auto c = centroid(p, m);
    const PointSet part = p.subset(m);
    const double cost = f2(c, part);
    st.centroids.push_back(std::move(c));
    st.sizes.push_back(m.size());
    st.beta.push_back(static_cast<double>(m.size()) / n);
    st.sigma.push_back(std::sqrt(cost / static_cast<double>(m.size())));
    st.cost += cost;
  }
  st.sigma_opt = std::sqrt(st.cost / n);
  return st;
}

double partition_cost(const PointSet& p, std::span<const int> labels, int k) {
  if (labels.size() != p.size()) throw InputError("label count does not match point count");
  std::vector<std::vector<std::uint32_t>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k) throw InputError("label out of range");
    members[static_cast<std::size_t>(labels[i])].push_back(static_cast<std::uint32_t>(i));
  }
  double total = 0.0;
  for (const auto& m : members) {
    if (m.empty()) continue;
    total += f2(centroid(p, m), p.subset(m));
  }
  return total;
}

}  // namespace ckm

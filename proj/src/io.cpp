#include "ckm/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ckm/errors.hpp"
#include "ckm/rng.hpp"

namespace ckm {

void write_points_csv(std::ostream& out, const PointSet& p) {
  char buf[32];
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p.dim(); ++j) {
      if (j) out.put(',');
      std::snprintf(buf, sizeof buf, "%.17g", p[i][j]);
      out << buf;
    }
    out.put('\n');
  }
}

PointSet read_points_csv(std::istream& in) {
  std::string line;
  std::vector<double> coords;
  std::size_t dim = 0, lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
    std::size_t count = 0;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      const char* s = field.c_str();
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(s, &end);
      while (*end == ' ' || *end == '\t') ++end;
      if (end == s || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        throw InputError("line " + std::to_string(lineno) + ": '" + field + "' is not a finite number");
      coords.push_back(v);
      ++count;
    }
    if (dim == 0) dim = count;
    if (count != dim)
      throw InputError("line " + std::to_string(lineno) + " has " + std::to_string(count) + " values, expected " +
                       std::to_string(dim));
  }
  if (dim == 0) throw InputError("point file contains no points");
  return PointSet(dim, std::move(coords));
}

PointSet load_points(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open point file '" + path + "'");
  return read_points_csv(f);
}

void save_points(const std::string& path, const PointSet& p) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  write_points_csv(f, p);
  if (!f) throw InputError("write to '" + path + "' failed");
}

namespace {

std::vector<std::size_t> draw_sizes(const MixtureSpec& spec, Rng& rng) {
  const auto k = static_cast<std::size_t>(spec.k);
  if (!spec.sizes.empty()) {
    if (spec.sizes.size() != k) throw InputError("sizes must list one entry per cluster");
    if (std::accumulate(spec.sizes.begin(), spec.sizes.end(), std::size_t{0}) != spec.n)
      throw InputError("cluster sizes must sum to n");
    return spec.sizes;
  }
  if (spec.balanced) {
    std::vector<std::size_t> s(k, spec.n / k);
    for (std::size_t j = 0; j < spec.n % k; ++j) ++s[j];
    return s;
  }
  std::vector<double> w = spec.weights.empty() ? std::vector<double>(k, 1.0) : spec.weights;
  if (w.size() != k) throw InputError("weights must list one entry per cluster");
  double total = 0.0;
  for (double x : w) {
    if (!(x > 0.0)) throw InputError("mixture weights must be positive");
    total += x;
  }
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<std::size_t> s(k, 0);
    for (std::size_t i = 0; i < spec.n; ++i) {
      double u = rng.uniform01() * total;
      std::size_t j = 0;
      while (j + 1 < k && u >= w[j]) u -= w[j++];
      ++s[j];
    }
    if (std::find(s.begin(), s.end(), std::size_t{0}) == s.end()) return s;
  }
  throw InputError("could not draw nonempty clusters from the weights; pass explicit sizes");
}

std::vector<Vector> place_centers(const MixtureSpec& spec, Rng& rng) {
  const auto k = static_cast<std::size_t>(spec.k);
  const double gap = spec.separation * spec.sigma;
  std::vector<Vector> centers;
  auto unit = [&] {
    Vector u(spec.d);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double& x : u) {
        x = rng.normal();
        norm += x * x;
      }
    } while (norm == 0.0);
    for (double& x : u) x /= std::sqrt(norm);
    return u;
  };
  if (k == 2 || spec.d == 1) {
    const Vector u = unit();
    for (std::size_t j = 0; j < k; ++j) {
      Vector c(spec.d);
      for (std::size_t t = 0; t < spec.d; ++t) c[t] = gap * static_cast<double>(j) * u[t];
      centers.push_back(std::move(c));
    }
    return centers;
  }
  // Rejection sampling in a ball of radius gap * k until all pairs are at least `gap` apart.
  for (int attempt = 0; attempt < 10000; ++attempt) {
    centers.clear();
    for (std::size_t j = 0; j < k; ++j) {
      Vector c = unit();
      const double r = gap * static_cast<double>(k) * std::pow(rng.uniform01(), 1.0 / static_cast<double>(spec.d));
      for (double& x : c) x *= r;
      centers.push_back(std::move(c));
    }
    bool ok = true;
    for (std::size_t a = 0; a < k && ok; ++a)
      for (std::size_t b = a + 1; b < k && ok; ++b) ok = distance(centers[a], centers[b]) >= gap;
    if (ok) return centers;
  }
  throw InputError("could not place well-separated centers");
}

}  // namespace

MixtureInstance generate_mixture(const MixtureSpec& spec, std::uint64_t seed) {
  if (spec.n < 2) throw InputError("n must be at least 2");
  if (spec.d < 1) throw InputError("d must be at least 1");
  if (spec.k < 1 || static_cast<std::size_t>(spec.k) > spec.n) throw InputError("k must lie in [1, n]");
  if (!(spec.sigma > 0.0) || !(spec.separation >= 0.0)) throw InputError("sigma must be positive and separation >= 0");
  Rng size_rng = Rng::substream(seed, "gen.sizes");
  Rng center_rng = Rng::substream(seed, "gen.centers");
  Rng point_rng = Rng::substream(seed, "gen.points");
  MixtureInstance inst;
  inst.sizes = draw_sizes(spec, size_rng);
  inst.centers = place_centers(spec, center_rng);
  std::vector<double> coords;
  coords.reserve(spec.n * spec.d);
  for (std::size_t j = 0; j < inst.sizes.size(); ++j)
    for (std::size_t i = 0; i < inst.sizes[j]; ++i) {
      for (std::size_t t = 0; t < spec.d; ++t) coords.push_back(inst.centers[j][t] + spec.sigma * point_rng.normal());
      inst.labels.push_back(static_cast<int>(j));
    }
  inst.points = PointSet(spec.d, std::move(coords));
  return inst;
}

}  // namespace ckm

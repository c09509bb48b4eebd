#include "ckm/subsets.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ckm/errors.hpp"

namespace ckm {

double binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  // Product of exact small ratios; lgamma route only when it would overflow.
  if (k > 200) {
    const double lg = std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                      std::lgamma(static_cast<double>(n - k) + 1.0);
    return std::round(std::exp(lg));
  }
  double r = 1.0;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(r);
}

Combinations::Combinations(std::uint32_t n, std::uint32_t k) : n_(n), idx_(k), done_(k > n) {
  for (std::uint32_t i = 0; i < k; ++i) idx_[i] = i;
}

void Combinations::next() {
  const auto k = static_cast<std::uint32_t>(idx_.size());
  std::uint32_t i = k;
  while (i > 0) {
    --i;
    if (idx_[i] < n_ - k + i) {
      ++idx_[i];
      for (std::uint32_t j = i + 1; j < k; ++j) idx_[j] = idx_[j - 1] + 1;
      return;
    }
  }
  done_ = true;
}

SubMultisets::SubMultisets(std::vector<std::uint32_t> multiplicities, std::uint32_t size)
    : mult_(std::move(multiplicities)), size_(size) {
  const std::size_t types = mult_.size();
  ways_.assign(types + 1, std::vector<long double>(size_ + 1, 0.0L));
  ways_[types][0] = 1.0L;
  for (std::size_t t = types; t-- > 0;) {
    // ways[t][r] = sum_{k=0}^{min(mult_t, r)} ways[t+1][r-k], via a sliding window.
    long double window = 0.0L;
    for (std::uint32_t r = 0; r <= size_; ++r) {
      window += ways_[t + 1][r];
      if (r > mult_[t]) window -= ways_[t + 1][r - mult_[t] - 1];
      ways_[t][r] = window;
    }
  }
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> SubMultisets::draw(Rng& rng) const {
  if (count() <= 0.0L) throw InputError("multiset has no sub-multiset of the requested size");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  const std::size_t types = mult_.size();
  std::size_t t = 0;
  std::uint32_t r = size_;
  while (r > 0) {
    // P(next type with positive count is j) = (W[j][r] - W[j+1][r]) / W[t][r];
    // the cumulative sum telescopes to W[t][r] - W[j+1][r].
    const long double total = ways_[t][r];
    const long double u = static_cast<long double>(rng.uniform01()) * total;
    const long double threshold = total - u;  // find first j with W[j+1][r] < threshold
    std::size_t lo = t, hi = types - 1;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (ways_[mid + 1][r] < threshold)
        hi = mid;
      else
        lo = mid + 1;
    }
    const std::size_t j = lo;
    // Count at type j, conditioned on being positive: weight W[j+1][r-k], k in [1, min(mult, r)].
    const std::uint32_t kmax = std::min(mult_[j], r);
    long double mass = 0.0L;
    for (std::uint32_t k = 1; k <= kmax; ++k) mass += ways_[j + 1][r - k];
    long double v = static_cast<long double>(rng.uniform01()) * mass;
    std::uint32_t chosen = kmax;
    for (std::uint32_t k = 1; k <= kmax; ++k) {
      const long double w = ways_[j + 1][r - k];
      if (v < w) {
        chosen = k;
        break;
      }
      v -= w;
    }
    // Guard against rounding selecting an infeasible remainder.
    while (chosen > 1 && ways_[j + 1][r - chosen] <= 0.0L) --chosen;
    out.emplace_back(static_cast<std::uint32_t>(j), chosen);
    r -= chosen;
    t = j + 1;
  }
  return out;
}

namespace {

void enumerate_all(const std::vector<std::uint32_t>& mult, const std::vector<std::vector<long double>>& ways,
                   std::size_t t, std::uint32_t r, std::vector<std::pair<std::uint32_t, std::uint32_t>>& cur,
                   std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>>& out) {
  if (r == 0) {
    out.push_back(cur);
    return;
  }
  if (t >= mult.size() || ways[t][r] <= 0.0L) return;
  const std::uint32_t kmax = std::min(mult[t], r);
  for (std::uint32_t k = kmax + 1; k-- > 0;) {
    if (ways[t + 1][r - k] <= 0.0L) continue;
    if (k > 0) cur.emplace_back(static_cast<std::uint32_t>(t), k);
    enumerate_all(mult, ways, t + 1, r - k, cur, out);
    if (k > 0) cur.pop_back();
  }
}

}  // namespace

std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> SubMultisets::distinct(std::uint64_t limit,
                                                                                          Rng& rng) const {
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> out;
  if (count() <= 0.0L || limit == 0) return out;
  if (count() <= static_cast<long double>(limit)) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> cur;
    enumerate_all(mult_, ways_, 0, size_, cur, out);
    return out;
  }
  std::set<std::vector<std::pair<std::uint32_t, std::uint32_t>>> seen;
  const std::uint64_t max_attempts = limit * 8 + 64;
  for (std::uint64_t a = 0; a < max_attempts && out.size() < limit; ++a) {
    auto s = draw(rng);
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace ckm

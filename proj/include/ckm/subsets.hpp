#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ckm/rng.hpp"

namespace ckm {

/// C(n, k) as a double (exact while the value is below 2^53).
double binomial(std::uint64_t n, std::uint64_t k);

/// Lexicographic k-subsets of {0, ..., n-1}.
class Combinations {
 public:
  Combinations(std::uint32_t n, std::uint32_t k);
  /// Current subset; valid while !done().
  std::span<const std::uint32_t> current() const { return idx_; }
  bool done() const { return done_; }
  void next();

 private:
  std::uint32_t n_;
  std::vector<std::uint32_t> idx_;
  bool done_;
};

/// Sub-multisets of a multiset given by per-type multiplicities.
///
/// A sub-multiset of size m is a count vector (k_0, ..., k_{T-1}) with
/// 0 <= k_t <= mult_t and sum k_t = m. The class counts them with a suffix
/// table W[t][r] (ways to pick r items from types t..T-1) and draws them
/// uniformly in O(m log T) per draw.
class SubMultisets {
 public:
  SubMultisets(std::vector<std::uint32_t> multiplicities, std::uint32_t size);

  /// Number of distinct sub-multisets (long double; approximate when huge).
  long double count() const { return ways_.empty() ? 0.0L : ways_[0][size_]; }

  /// Uniform draw, returned as sorted (type, multiplicity) pairs with positive counts.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> draw(Rng& rng) const;

  /// Up to `limit` distinct sub-multisets: all of them (in lexicographic count
  /// order) when count() <= limit, otherwise uniform draws with duplicates
  /// rejected.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> distinct(std::uint64_t limit, Rng& rng) const;

 private:
  std::vector<std::uint32_t> mult_;
  std::uint32_t size_;
  std::vector<std::vector<long double>> ways_;  // ways_[t][r], t in [0, T]
};

}  // namespace ckm

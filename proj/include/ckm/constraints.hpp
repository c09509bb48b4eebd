#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ckm/geometry.hpp"
#include "ckm/sampler.hpp"

namespace ckm {

/// Constraint on the cluster sizes of a partition.
struct ConstraintSpec {
  enum class Kind { kUnconstrained, kBalanced, kSizeInterval };

  Kind kind = Kind::kUnconstrained;
  /// Balanced(c): |P_i| <= c |P_j| for every pair of clusters. c >= 1.
  double c = 1.0;
  /// SizeInterval: lo[j] <= |P_j| <= hi[j]. A single entry applies to every cluster.
  std::vector<std::size_t> lo;
  std::vector<std::size_t> hi;

  static ConstraintSpec unconstrained() { return {}; }
  static ConstraintSpec balanced(double c);
  static ConstraintSpec size_interval(std::vector<std::size_t> lo, std::vector<std::size_t> hi);

  /// "none", "balanced:c=1", "size:lo=4,hi=8" (per-cluster lists with '/': "size:lo=2/3,hi=6/9").
  static ConstraintSpec parse(const std::string& text);
  std::string str() const;

  std::size_t lower(std::size_t j) const;
  std::size_t upper(std::size_t j) const;

  /// True when cluster sizes `sizes` satisfy the constraint.
  bool admits(const std::vector<std::size_t>& sizes) const;
};

inline constexpr double kInfeasibleCost = std::numeric_limits<double>::infinity();

struct PartitionResult {
  std::vector<int> assignment;
  double cost = kInfeasibleCost;  ///< sum_j f2(c_j, P_j) at the given centers
  bool feasible = false;
  std::string reason;  ///< why the spec is infeasible (empty when feasible)
};

/// Minimum-cost assignment of every point to one of the fixed `centers`
/// subject to `spec`. Exact for every supported spec:
///   unconstrained - nearest center, ties to the lowest index;
///   k = 2 sizes   - sweep over split sizes of points sorted by
///                   ||p - c1||^2 - ||p - c2||^2 (stable);
///   k > 2 sizes   - min-cost flow with lower bounds.
PartitionResult assign(const PointSet& p, const std::vector<Vector>& centers, const ConstraintSpec& spec);

/// Two-center convenience overload (no allocation of a center list by the caller).
PartitionResult assign(const PointSet& p, std::span<const double> c1, std::span<const double> c2,
                       const ConstraintSpec& spec);

struct Evaluation {
  std::size_t index = 0;  ///< position of the winner in the candidate list
  CandidatePair best;
  PartitionResult result;
  std::size_t evaluated = 0;
  std::size_t feasible = 0;
};

/// Argmin of assign(...).cost over `candidates`, ties to the lower index.
/// Work is split over `threads` workers; the result does not depend on it.
/// Throws InfeasibleError when no candidate is feasible, InputError when empty.
Evaluation evaluate_candidates(const PointSet& p, const std::vector<CandidatePair>& candidates,
                               const ConstraintSpec& spec, unsigned threads = 1);

/// Streaming variant: feed candidates as the sampler emits them.
class CandidateEvaluator {
 public:
  CandidateEvaluator(const PointSet& p, ConstraintSpec spec, unsigned threads = 1, std::size_t batch = 4096);

  void operator()(const CandidateView& v);
  CandidateSink sink() {
    return [this](const CandidateView& v) { (*this)(v); };
  }

  /// Flushes pending work and returns the winner (throws like evaluate_candidates).
  Evaluation finish();

 private:
  void flush();

  const PointSet& p_;
  ConstraintSpec spec_;
  unsigned threads_;
  std::size_t batch_;
  std::vector<CandidatePair> pending_;
  std::size_t offset_ = 0;
  bool have_best_ = false;
  Evaluation best_;
};

}  // namespace ckm

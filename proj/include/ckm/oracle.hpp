#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ckm/constraints.hpp"
#include "ckm/geometry.hpp"
#include "ckm/params.hpp"

namespace ckm {

/// Exact optimum of a small instance.
struct ExactSolution {
  std::vector<int> labels;
  double cost = kInfeasibleCost;  ///< sum_j f2(c(P_j), P_j), recomputed naively
  bool feasible = false;
};

inline constexpr std::size_t kBruteOpt2Limit = 20;
inline constexpr std::size_t kBruteOptKLimit = 12;

/// Minimum over all feasible proper 2-partitions, clusters at their own
/// centroids. Point 0 is pinned to cluster 0; masks over points 1..n-1 are
/// visited in Gray-code order with incremental sums. Ties (relative 1e-12) go
/// to the smaller mask. Throws RefusalError for n > 20.
ExactSolution brute_opt2(const PointSet& p, const ConstraintSpec& spec = {});

/// Same for k clusters (every cluster nonempty), via restricted-growth
/// strings. Throws RefusalError for n > 12.
ExactSolution brute_optk(const PointSet& p, int k, const ConstraintSpec& spec = {});

enum class CaseTag { kCase1 = 1, kCase2 = 2 };

/// Quantities around the first center c1 for a known 2-clustering.
/// Cluster 1 is the larger ground-truth cluster (labels are swapped if needed).
struct AnalysisProbe {
  std::vector<int> labels;  ///< ground truth after relabelling (0 = larger cluster)
  double opt = 0.0;         ///< ground-truth cost, used as OPT_2(P)
  double sigma_opt = 0.0;
  double beta2 = 0.0;
  double r2 = 0.0;  ///< sqrt(eps / (alpha5 beta2)) sigma_opt
  std::vector<std::uint32_t> ball;  ///< B2 = {p : ||p - c1|| <= r2}
  std::size_t p1_size = 0, p2_size = 0;
  std::size_t p2_in_size = 0, p2_out_size = 0;
  std::size_t outside_ball = 0;  ///< |P - B2|
  CaseTag case_tag = CaseTag::kCase1;
  /// |P2_out| / |P - B2|, unset when P - B2 is empty.
  std::optional<double> outside_ratio;
};

/// Throws InputError when the labelling is not a 2-partition with both clusters nonempty.
AnalysisProbe probe(const PointSet& p, const std::vector<int>& labels, const Vector& c1, const ParameterSet& ps);

/// Every check reads lhs <= rhs (up to a 1e-10 relative slack).
struct LemmaCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
  bool vacuous = false;  ///< hypotheses unmet; lhs/rhs still reported
  std::string hypothesis;
};

struct LemmaReport {
  AnalysisProbe probe;
  bool c1_quality = false;  ///< ||c1 - m1||^2 <= eps (1 + eta) sigma1^2 / alpha6
  bool c2_closeness = false;  ///< ||m2~ - c2||^2 <= eps / alpha6 * f2(m2~, P2~) / |P2|
  std::vector<LemmaCheck> checks;

  std::size_t failures() const;  ///< non-vacuous checks that fail
  bool ok() const { return failures() == 0; }
};

/// Evaluate every deterministic inequality of the two-case analysis on one
/// instance. A check whose hypotheses do not hold is reported as vacuous.
LemmaReport check_case_lemmas(const PointSet& p, const std::vector<int>& labels, const Vector& c1, const Vector& c2,
                              const ParameterSet& ps);

/// First round j of a peeling trace with (P - B2) within Q_j and
/// |Q_j| <= (1 + varsigma)|P - B2| + 1, if any.
std::optional<std::size_t> peeling_coverage(const std::vector<std::vector<std::uint32_t>>& rounds,
                                            const AnalysisProbe& probe, std::size_t n, double varsigma);

/// 1 - x y <= (1 - x)^y for x in [0, 1], y >= 1.
bool ex_inequality(double x, double y);

}  // namespace ckm

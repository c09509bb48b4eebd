#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ckm {

/// Accuracy thresholds below which each failure bound of the 2-means sampler holds.
struct EpsilonThresholds {
  double eps0 = 0.0;  ///< ((gamma/12) / d4)^(1/d1): unbalanced-case sampling of V_a
  double eps1 = 0.0;  ///< delta6: outside-ball fraction bound
  double eps2 = 0.0;  ///< delta1^2 d4 / (2 (1-delta1) ln(12/gamma)): peeling-phase sampling
  double delta0 = 0.0;  ///< min of the three
};

/// Every constant of the 2-means sampler resolved from (epsilon, gamma).
///
/// Sample counts (M, N_a, N_b, N_2) are integral-valued doubles so that the
/// faithful schedule stays representable for tiny epsilon (M = d4/epsilon
/// exceeds 2^64 near delta0).
struct ParameterSet {
  double epsilon = 0.0;
  double gamma = 0.0;       ///< failure-probability budget, 1/3
  double delta = 0.0;       ///< delta = delta6 = 1/10
  double d1 = 0.0;          ///< exponent slack, = delta6
  double d2 = 0.0;          ///< S_a oversampling factor, 4
  double delta2 = 0.0;      ///< Chernoff slack for S_a/S_b
  double d4 = 0.0;          ///< M = d4 / epsilon
  double gamma_star = 0.0;  ///< 1/2 - delta6
  double gamma_5b = 0.0;    ///< gamma / 12
  double eta = 0.0;         ///< vibration inflation, delta6 / 2
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha5 = 0.0;
  double alpha6 = 0.0;
  double M = 0.0;
  double varsigma = 0.0;  ///< peeling shrink factor is 1 + varsigma
  double delta1 = 0.0;    ///< Chernoff slack for V_b
  double N_a = 0.0;
  double N_b = 0.0;
  double N_2 = 0.0;
  EpsilonThresholds thresholds;
  /// gamma_star * (10 * 4 * 3) / 12: the numeric floor for alpha6 used in the
  /// consistency argument; alpha6 >= alpha6_floor is checked.
  double alpha6_floor = 0.0;
  std::vector<std::string> overridden;  ///< field names replaced by the caller
  std::vector<std::string> violations;  ///< consistency conditions that fail
  bool faithful = false;                ///< no overrides and no violations
};

using Overrides = std::map<std::string, double>;

/// Names accepted as override keys, in resolution order.
const std::vector<std::string>& overridable_fields();

/// Resolve all constants for accuracy epsilon in (0, 1).
///
/// Dependency order: gamma, delta6, d1, d2, delta2, d4, gamma_star, gamma_5b,
/// eta, alpha1, alpha6, alpha5, alpha2, M, (varsigma, delta1), (N_a, N_b, N_2).
/// Any field can be overridden; later fields are derived from the overridden
/// value. delta2 is the largest value with (1 + 2 delta2) d2 <= d2 + delta.
/// varsigma and delta1 split the slack of
/// (1 + varsigma)(1 + 2 delta1) alpha2 <= alpha2 + delta/2 equally.
///
/// Throws InputError for epsilon outside (0,1), unknown override keys, or
/// overrides breaking a structural requirement (non-positive values, slack
/// parameters >= 1, fractional or zero counts). When `require_faithful` is set,
/// any violated consistency condition throws ValidationError naming it.
ParameterSet resolve(double epsilon, const Overrides& overrides = {}, bool require_faithful = false);

/// Consistency conditions that fail for ps (empty when all hold).
std::vector<std::string> check_consistency(const ParameterSet& ps);

EpsilonThresholds epsilon_thresholds(const ParameterSet& ps);

struct FailureBudget {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma3 = 0.0;
  double gamma4 = 0.0;
  double gamma5a = 0.0;
  double gamma5b = 0.0;
  double gamma5 = 0.0;
  double sum = 0.0;
  bool within_gamma = false;  ///< sum <= gamma

  /// (name, value) pairs gamma1..gamma5 in order.
  std::vector<std::pair<std::string, double>> items() const;
};

FailureBudget failure_budget(const ParameterSet& ps);

/// Convert an integral-valued count to an integer; throws InputError above `limit`.
std::uint64_t as_count(double value, const char* name, std::uint64_t limit);

}  // namespace ckm

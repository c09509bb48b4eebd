#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ckm/constraints.hpp"
#include "ckm/geometry.hpp"
#include "ckm/params.hpp"
#include "ckm/sampler.hpp"

namespace ckm {

/// Constants of the k-means framework.
struct ExtensionParams {
  int k = 2;
  double epsilon = 0.0;
  double mu1 = 0.3;
  double mu2 = 0.2;
  double mu3 = 0.2;
  double gamma_star = 0.1;  ///< mu3 / 2
  double delta_eps = 0.0;   ///< delta(eps); default delta(eps) = eps
  double d1 = 0.0;
  double d2 = 0.0;
  double delta2 = 0.0;
  double M = 0.0;    ///< ceil(1 / (gamma_star delta(eps)))
  double N_a = 0.0;  ///< d2 k M
  double N_b = 0.0;  ///< ceil(M (k - 1) / ((1 - delta2) delta(eps)^(1 + d1)))
  std::vector<std::string> overridden;
};

/// Keys accepted by extension_params overrides: mu1, mu2, mu3, delta_eps, M, N_a, N_b.
ExtensionParams extension_params(int k, double epsilon, const Overrides& overrides = {});

using CenterTuple = std::vector<Vector>;
using TupleSink = std::function<void(const CenterTuple&)>;

struct ExtensionContext {
  int k = 2;
  const PointSet* points = nullptr;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::size_t prefix_index = 0;  ///< position of T in D
};

/// A pluggable completion algorithm A(k, P, eps, T): given a prefix T of
/// r centers, emit complete k-center tuples through `emit`.
struct ExtensionAlgorithm {
  std::string name;
  std::function<void(const ExtensionContext&, const CenterTuple& prefix, const TupleSink& emit)> extend;
  /// Declared upper bound on tuples emitted for a prefix missing `missing` centers.
  std::function<double(int k, int missing, std::size_t n, std::size_t d, double eps)> pair_complexity;
  /// Free-form time-complexity note.
  std::string time_complexity;
};

/// Settings handed to extension factories.
struct ExtensionSettings {
  ParameterSet two_means;  ///< used by two-means-peel
  ConstraintSpec spec;     ///< cost model used by brute to pick its completion
  SamplerOptions sampler;
};

using ExtensionFactory = std::function<ExtensionAlgorithm(const ExtensionSettings&)>;

void register_extension(const std::string& name, ExtensionFactory factory);
/// Built-ins: "brute" (n <= 12), "greedy", "two-means-peel" (k = 2).
ExtensionAlgorithm make_extension(const std::string& name, const ExtensionSettings& settings = {});
std::vector<std::string> extension_names();

struct FrameworkOptions {
  std::optional<std::uint64_t> cap;  ///< limit on prefix pairs in D
};

struct FrameworkReport {
  std::uint64_t prefix_pairs = 0;  ///< two-center prefixes in D
  std::uint64_t prefixes = 0;      ///< |D| (pairs plus the single-center prefix)
  double prefix_bound = 0.0;       ///< C(N_a, M) C(N_b, M) + 1
  bool truncated = false;
  std::uint64_t tuples = 0;  ///< |U|
  std::uint64_t failed_prefixes = 0;
  std::vector<std::string> log;  ///< one line per failed prefix (first few)
};

/// Build D (all M-subset pairs of S_a x S_b, plus c(V_a)) and stream
/// A(k, P, eps, T) for every T in D into `emit`. The random draws use the
/// same substreams as the 2-means sampler. A prefix whose extension throws
/// is skipped and logged; if every prefix fails the first error is rethrown.
FrameworkReport run_kmeans_framework(const PointSet& p, const ExtensionAlgorithm& ext, const ExtensionParams& params,
                                     std::uint64_t seed, const FrameworkOptions& options, const TupleSink& emit);

std::vector<CenterTuple> run_kmeans_framework(const PointSet& p, const ExtensionAlgorithm& ext,
                                              const ExtensionParams& params, std::uint64_t seed,
                                              const FrameworkOptions& options = {});

/// Streaming argmin of assign(...).cost over center tuples, ties to the earlier tuple.
class TupleEvaluator {
 public:
  TupleEvaluator(const PointSet& p, ConstraintSpec spec) : p_(p), spec_(std::move(spec)) {}
  void operator()(const CenterTuple& t);
  TupleSink sink() {
    return [this](const CenterTuple& t) { (*this)(t); };
  }
  bool found() const { return found_; }
  std::size_t evaluated() const { return count_; }
  std::size_t index() const { return index_; }
  const CenterTuple& best() const { return best_; }
  const PartitionResult& result() const { return result_; }

 private:
  const PointSet& p_;
  ConstraintSpec spec_;
  bool found_ = false;
  std::size_t count_ = 0;
  std::size_t index_ = 0;
  CenterTuple best_;
  PartitionResult result_;
};

enum class BalanceCase { kCase1 = 1, kCase2 = 2 };

/// Case 1 iff |P_2| >= delta(eps)^(1 + d1) |P| / (k - 1), |P_2| the second
/// largest ground-truth cluster.
BalanceCase balance_case_classifier(const std::vector<int>& labels, int k, double delta_eps, double d1 = 0.1);

}  // namespace ckm

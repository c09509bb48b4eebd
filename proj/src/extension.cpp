#include "ckm/extension.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>

#include "ckm/errors.hpp"
#include "ckm/subsets.hpp"

namespace ckm {

namespace {

constexpr std::size_t kBruteLimit = 12;
constexpr double kBruteTupleLimit = 2e7;
constexpr std::size_t kLogLines = 16;

double pick(const Overrides& ov, const char* key, double fallback, std::vector<std::string>& used) {
  auto it = ov.find(key);
  if (it == ov.end()) return fallback;
  used.emplace_back(key);
  return it->second;
}

bool integral(double v) { return std::isfinite(v) && v == std::floor(v); }

/// Centroids of all nonempty subsets of P (bitmask order) and their squared
/// distances to every point, computed once per point set.
struct SubsetTable {
  std::size_t dim = 0;
  std::vector<double> coords;  // copy of the point set the table was built for
  std::size_t masks = 0;
  std::vector<Vector> centroids;
  std::vector<double> dist;  // masks x n
};

class BruteCompletion {
 public:
  explicit BruteCompletion(ConstraintSpec spec) : spec_(std::move(spec)) {}

  void operator()(const ExtensionContext& ctx, const CenterTuple& prefix, const TupleSink& emit) {
    const PointSet& p = *ctx.points;
    const std::size_t n = p.size();
    if (n > kBruteLimit)
      throw RefusalError("brute completion is limited to n <= " + std::to_string(kBruteLimit) + " (got " +
                         std::to_string(n) + ")");
    const int missing = ctx.k - static_cast<int>(prefix.size());
    if (missing <= 0) {
      emit(CenterTuple(prefix.begin(), prefix.begin() + ctx.k));
      return;
    }
    const SubsetTable& table = table_for(p);
    const double count = binomial(table.masks, static_cast<std::uint64_t>(missing));
    if (count > kBruteTupleLimit) throw RefusalError("brute completion would try too many center choices");

    std::vector<double> base(n, std::numeric_limits<double>::infinity());
    for (const auto& c : prefix)
      for (std::size_t i = 0; i < n; ++i) base[i] = std::min(base[i], squared_distance(p[i], c));

    const bool fast = spec_.kind == ConstraintSpec::Kind::kUnconstrained;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::uint32_t> best_pick;
    std::vector<double> cur(n);
    CenterTuple tuple(prefix);
    tuple.resize(static_cast<std::size_t>(ctx.k));
    for (Combinations comb(static_cast<std::uint32_t>(table.masks), static_cast<std::uint32_t>(missing)); !comb.done();
         comb.next()) {
      double cost = 0.0;
      if (fast) {
        cur = base;
        for (auto s : comb.current()) {
          const double* row = table.dist.data() + static_cast<std::size_t>(s) * n;
          for (std::size_t i = 0; i < n; ++i) cur[i] = std::min(cur[i], row[i]);
        }
        for (double v : cur) cost += v;
      } else {
        for (std::size_t j = 0; j < comb.current().size(); ++j) tuple[prefix.size() + j] = table.centroids[comb.current()[j]];
        const PartitionResult r = assign(p, tuple, spec_);
        if (!r.feasible) continue;
        cost = r.cost;
      }
      if (cost < best) {
        best = cost;
        best_pick.assign(comb.current().begin(), comb.current().end());
      }
    }
    if (best_pick.empty()) throw InfeasibleError("no completion is feasible");
    for (std::size_t j = 0; j < best_pick.size(); ++j) tuple[prefix.size() + j] = table.centroids[best_pick[j]];
    emit(tuple);
  }

 private:
  const SubsetTable& table_for(const PointSet& p) {
    std::lock_guard<std::mutex> lock(mu_);
    if (table_.dim == p.dim() && std::equal(table_.coords.begin(), table_.coords.end(), p.coords().begin(), p.coords().end()))
      return table_;
    const std::size_t n = p.size();
    table_ = SubsetTable{};
    table_.dim = p.dim();
    table_.coords.assign(p.coords().begin(), p.coords().end());
    table_.masks = (std::size_t{1} << n) - 1;
    table_.centroids.reserve(table_.masks);
    table_.dist.resize(table_.masks * n);
    std::vector<std::uint32_t> members;
    for (std::size_t m = 1; m <= table_.masks; ++m) {
      members.clear();
      for (std::size_t i = 0; i < n; ++i)
        if (m >> i & 1u) members.push_back(static_cast<std::uint32_t>(i));
      table_.centroids.push_back(centroid(p, members));
      for (std::size_t i = 0; i < n; ++i) table_.dist[(m - 1) * n + i] = squared_distance(p[i], table_.centroids.back());
    }
    return table_;
  }

  ConstraintSpec spec_;
  std::mutex mu_;
  SubsetTable table_;
};

void greedy_completion(const ExtensionContext& ctx, const CenterTuple& prefix, const TupleSink& emit) {
  const PointSet& p = *ctx.points;
  CenterTuple tuple(prefix.begin(), prefix.begin() + std::min<std::ptrdiff_t>(ctx.k, static_cast<std::ptrdiff_t>(prefix.size())));
  std::vector<double> gap(p.size(), std::numeric_limits<double>::infinity());
  for (const auto& c : tuple)
    for (std::size_t i = 0; i < p.size(); ++i) gap[i] = std::min(gap[i], squared_distance(p[i], c));
  while (tuple.size() < static_cast<std::size_t>(ctx.k)) {
    std::size_t far = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
      if (gap[i] > gap[far]) far = i;
    tuple.emplace_back(p[far].begin(), p[far].end());
    for (std::size_t i = 0; i < p.size(); ++i) gap[i] = std::min(gap[i], squared_distance(p[i], tuple.back()));
  }
  emit(tuple);
}

std::map<std::string, ExtensionFactory>& registry() {
  static std::map<std::string, ExtensionFactory> r = [] {
    std::map<std::string, ExtensionFactory> m;
    m["brute"] = [](const ExtensionSettings& s) {
      auto impl = std::make_shared<BruteCompletion>(s.spec);
      ExtensionAlgorithm a;
      a.name = "brute";
      a.extend = [impl](const ExtensionContext& ctx, const CenterTuple& t, const TupleSink& emit) { (*impl)(ctx, t, emit); };
      a.pair_complexity = [](int, int, std::size_t, std::size_t, double) { return 1.0; };
      a.time_complexity = "O(C(2^n - 1, k - r) n d)";
      return a;
    };
    m["greedy"] = [](const ExtensionSettings&) {
      ExtensionAlgorithm a;
      a.name = "greedy";
      a.extend = greedy_completion;
      a.pair_complexity = [](int, int, std::size_t, std::size_t, double) { return 1.0; };
      a.time_complexity = "O((k - r) n d)";
      return a;
    };
    m["two-means-peel"] = [](const ExtensionSettings& s) {
      ExtensionAlgorithm a;
      a.name = "two-means-peel";
      const ParameterSet ps = s.two_means;
      const SamplerOptions opts = s.sampler;
      a.extend = [ps, opts](const ExtensionContext& ctx, const CenterTuple& t, const TupleSink& emit) {
        if (ctx.k != 2) throw InputError("two-means-peel only completes 2-center tuples");
        if (t.size() >= 2) {
          emit(CenterTuple{t[0], t[1]});
          return;
        }
        emit(CenterTuple{t[0], t[0]});
        CenterTuple pair(2);
        run_peeling_phase(*ctx.points, ps, t[0], ctx.seed, opts, [&](const CandidateView& v) {
          pair[0].assign(v.c1.begin(), v.c1.end());
          pair[1].assign(v.c2.begin(), v.c2.end());
          emit(pair);
        });
      };
      a.pair_complexity = [ps](int, int missing, std::size_t n, std::size_t, double) {
        if (missing <= 0) return 1.0;
        return 1.0 + binomial(static_cast<std::uint64_t>(ps.N_2 + ps.M), static_cast<std::uint64_t>(ps.M)) *
                         static_cast<double>(peeling_iteration_bound(n, ps.varsigma));
      };
      a.time_complexity = "O(d n + C(N_2 + M, M) d M log n)";
      return a;
    };
    return m;
  }();
  return r;
}

}  // namespace

ExtensionParams extension_params(int k, double epsilon, const Overrides& overrides) {
  if (k < 2) throw InputError("k must be at least 2");
  for (const auto& [key, v] : overrides) {
    static const std::vector<std::string> keys{"mu1", "mu2", "mu3", "delta_eps", "M", "N_a", "N_b"};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw InputError("unknown extension override '" + key + "'");
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError("override " + key + " must be positive");
  }
  const ParameterSet base = resolve(epsilon);
  ExtensionParams x;
  x.k = k;
  x.epsilon = epsilon;
  x.mu1 = pick(overrides, "mu1", 0.3, x.overridden);
  x.mu2 = pick(overrides, "mu2", 0.2, x.overridden);
  x.mu3 = pick(overrides, "mu3", x.mu2, x.overridden);
  if (x.mu1 + x.mu2 + x.mu3 >= 1.0) throw InputError("mu1 + mu2 + mu3 must be below 1");
  x.gamma_star = x.mu3 / 2.0;
  x.delta_eps = pick(overrides, "delta_eps", epsilon, x.overridden);
  if (x.delta_eps >= 1.0) throw InputError("delta(eps) must lie in (0, 1)");
  x.d1 = base.d1;
  x.d2 = base.d2;
  x.delta2 = base.delta2;
  x.M = pick(overrides, "M", std::ceil(1.0 / (x.gamma_star * x.delta_eps) - 1e-9), x.overridden);
  x.N_a = pick(overrides, "N_a", std::ceil(x.d2 * k * x.M - 1e-9), x.overridden);
  x.N_b = pick(overrides, "N_b",
               std::ceil(x.M * (k - 1) / ((1.0 - x.delta2) * std::pow(x.delta_eps, 1.0 + x.d1)) - 1e-9), x.overridden);
  for (auto [name, v] : {std::pair{"M", x.M}, std::pair{"N_a", x.N_a}, std::pair{"N_b", x.N_b}})
    if (!integral(v) || v < 1) throw InputError(std::string(name) + " must be a positive integer");
  if (x.N_a < x.M || x.N_b < x.M) throw InputError("N_a and N_b must be at least M");
  return x;
}

void register_extension(const std::string& name, ExtensionFactory factory) { registry()[name] = std::move(factory); }

ExtensionAlgorithm make_extension(const std::string& name, const ExtensionSettings& settings) {
  auto it = registry().find(name);
  if (it == registry().end()) throw InputError("unknown extension '" + name + "'");
  return it->second(settings);
}

std::vector<std::string> extension_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

FrameworkReport run_kmeans_framework(const PointSet& p, const ExtensionAlgorithm& ext, const ExtensionParams& params,
                                     std::uint64_t seed, const FrameworkOptions& options, const TupleSink& emit) {
  if (p.empty()) throw InputError("point set is empty");
  if (p.size() < static_cast<std::size_t>(params.k)) throw InputError("need at least k points");
  if (!ext.extend) throw InputError("extension has no extend function");

  ParameterSet ps = resolve(params.epsilon);
  ps.M = params.M;
  ps.N_a = params.N_a;
  ps.N_b = params.N_b;
  ps.N_2 = params.M;

  FrameworkReport rep;
  std::exception_ptr first_error;
  ExtensionContext ctx{params.k, &p, params.epsilon, seed, 0};
  auto run_prefix = [&](const CenterTuple& prefix) {
    try {
      ext.extend(ctx, prefix, [&](const CenterTuple& t) {
        if (t.size() != static_cast<std::size_t>(params.k)) throw ValidationError("extension returned a tuple of the wrong size");
        for (const auto& c : t)
          if (c.size() != p.dim()) throw ValidationError("extension returned a center of the wrong dimension");
        ++rep.tuples;
        emit(t);
      });
    } catch (const std::exception& e) {
      if (!first_error) first_error = std::current_exception();
      ++rep.failed_prefixes;
      if (rep.log.size() < kLogLines) rep.log.push_back("prefix " + std::to_string(ctx.prefix_index) + ": " + e.what());
    }
    ++ctx.prefix_index;
  };

  SamplerOptions so;
  so.cap = options.cap;
  CenterTuple prefix(2);
  const SamplerReport sr = run_sampling_phase(p, ps, seed, so, [&](const CandidateView& v) {
    prefix[0].assign(v.c1.begin(), v.c1.end());
    prefix[1].assign(v.c2.begin(), v.c2.end());
    run_prefix(prefix);
  });
  rep.prefix_pairs = sr.phase1_count;
  rep.prefix_bound = sr.phase1_bound + 1.0;
  rep.truncated = sr.truncated;
  run_prefix(CenterTuple{draw_first_center(p, static_cast<std::uint64_t>(params.M), seed)});
  rep.prefixes = rep.prefix_pairs + 1;
  if (rep.failed_prefixes == rep.prefixes && first_error) std::rethrow_exception(first_error);
  return rep;
}

std::vector<CenterTuple> run_kmeans_framework(const PointSet& p, const ExtensionAlgorithm& ext,
                                              const ExtensionParams& params, std::uint64_t seed,
                                              const FrameworkOptions& options) {
  std::vector<CenterTuple> out;
  run_kmeans_framework(p, ext, params, seed, options, [&](const CenterTuple& t) { out.push_back(t); });
  return out;
}

void TupleEvaluator::operator()(const CenterTuple& t) {
  PartitionResult r = assign(p_, t, spec_);
  if (r.feasible && (!found_ || r.cost < result_.cost)) {
    found_ = true;
    index_ = count_;
    best_ = t;
    result_ = std::move(r);
  }
  ++count_;
}

BalanceCase balance_case_classifier(const std::vector<int>& labels, int k, double delta_eps, double d1) {
  if (k < 2) throw InputError("k must be at least 2");
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) {
    if (l < 0 || l >= k) throw InputError("label out of range");
    ++sizes[static_cast<std::size_t>(l)];
  }
  std::sort(sizes.rbegin(), sizes.rend());
  const double threshold = std::pow(delta_eps, 1.0 + d1) * static_cast<double>(labels.size()) / (k - 1);
  return static_cast<double>(sizes[1]) >= threshold * (1.0 - 1e-12) ? BalanceCase::kCase1 : BalanceCase::kCase2;
}

}  // namespace ckm

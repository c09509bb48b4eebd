#include "ckm/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "ckm/errors.hpp"
#include "pairwise_sum.hpp"

namespace ckm {

namespace {

constexpr double kSlack = 1e-9;

std::size_t parse_count(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw InputError("bad " + what + " value '" + s + "'");
  }
  if (used != s.size() || v < 0) throw InputError("bad " + what + " value '" + s + "'");
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> parse_list(const std::string& s, const std::string& what) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, '/')) out.push_back(parse_count(item, what));
  if (out.empty()) throw InputError("empty " + what + " list");
  return out;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += '/';
    out += std::to_string(v[i]);
  }
  return out;
}

void check_centers(const PointSet& p, const std::vector<Vector>& centers) {
  if (centers.empty()) throw InputError("at least one center is required");
  for (const auto& c : centers)
    if (c.size() != p.dim()) throw InputError("center dimension does not match the point set");
}

PartitionResult infeasible(std::string why) {
  PartitionResult r;
  r.reason = std::move(why);
  return r;
}

double assignment_cost(const PointSet& p, const std::vector<Vector>& centers, const std::vector<int>& a) {
  return detail::pairwise_sum(std::size_t{0}, p.size(),
                              [&](std::size_t i) { return squared_distance(p[i], centers[static_cast<std::size_t>(a[i])]); });
}

PartitionResult nearest(const PointSet& p, const std::vector<Vector>& centers) {
  PartitionResult r;
  r.assignment.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    double best = squared_distance(p[i], centers[0]);
    int arg = 0;
    for (std::size_t j = 1; j < centers.size(); ++j) {
      const double d = squared_distance(p[i], centers[j]);
      if (d < best) {
        best = d;
        arg = static_cast<int>(j);
      }
    }
    r.assignment[i] = arg;
  }
  r.cost = assignment_cost(p, centers, r.assignment);
  r.feasible = true;
  return r;
}

/// k = 2 with a size rule on s = |cluster 0|.
template <class Admit>
PartitionResult sweep(const PointSet& p, const std::vector<Vector>& centers, Admit admit) {
  const std::size_t n = p.size();
  std::vector<double> d1(n), d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    d1[i] = squared_distance(p[i], centers[0]);
    d2[i] = squared_distance(p[i], centers[1]);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d1[a] - d2[a] < d1[b] - d2[b]; });
  std::vector<double> pre(n + 1, 0.0), suf(n + 1, 0.0);
  for (std::size_t s = 0; s < n; ++s) pre[s + 1] = pre[s] + d1[order[s]];
  for (std::size_t s = n; s-- > 0;) suf[s] = suf[s + 1] + d2[order[s]];

  std::size_t best_s = n + 1;
  double best = kInfeasibleCost;
  for (std::size_t s = 0; s <= n; ++s) {
    if (!admit(s, n - s)) continue;
    const double c = pre[s] + suf[s];
    if (best_s > n || c < best) {
      best = c;
      best_s = s;
    }
  }
  if (best_s > n) return infeasible("no split size satisfies the constraint");
  PartitionResult r;
  r.assignment.assign(n, 1);
  for (std::size_t s = 0; s < best_s; ++s) r.assignment[order[s]] = 0;
  r.cost = assignment_cost(p, centers, r.assignment);
  r.feasible = true;
  return r;
}

/// Lexicographic (penalty, cost) pair: lower-bound arcs carry penalty -1 so a
/// shortest path fills them first without mixing magnitudes into the cost.
struct Cost {
  long long big = 0;
  double small = 0.0;
  Cost operator+(const Cost& o) const { return {big + o.big, small + o.small}; }
  Cost operator-() const { return {-big, -small}; }
};

bool less_than(const Cost& a, const Cost& b, double tol) {
  if (a.big != b.big) return a.big < b.big;
  return a.small < b.small - tol;
}

struct Arc {
  std::size_t to;
  int cap;
  Cost cost;
  std::size_t rev;
};

class Flow {
 public:
  explicit Flow(std::size_t nodes) : g_(nodes) {}

  std::size_t add(std::size_t u, std::size_t v, int cap, Cost cost) {
    g_[u].push_back({v, cap, cost, g_[v].size()});
    g_[v].push_back({u, 0, -cost, g_[u].size() - 1});
    return g_[u].size() - 1;
  }

  /// Push up to `units` one at a time along shortest (SPFA) paths.
  int run(std::size_t s, std::size_t t, int units, double tol) {
    const std::size_t n = g_.size();
    int pushed = 0;
    std::vector<Cost> dist(n);
    std::vector<bool> reached(n), queued(n);
    std::vector<std::pair<std::size_t, std::size_t>> parent(n);
    while (pushed < units) {
      std::fill(reached.begin(), reached.end(), false);
      std::fill(queued.begin(), queued.end(), false);
      std::deque<std::size_t> queue{s};
      dist[s] = {};
      reached[s] = queued[s] = true;
      std::size_t relaxations = 0;
      const std::size_t limit = n * n * 64 + 4096;
      while (!queue.empty() && relaxations < limit) {
        const std::size_t u = queue.front();
        queue.pop_front();
        queued[u] = false;
        for (std::size_t e = 0; e < g_[u].size(); ++e) {
          const Arc& a = g_[u][e];
          if (a.cap <= 0) continue;
          const Cost nd = dist[u] + a.cost;
          if (!reached[a.to] || less_than(nd, dist[a.to], tol)) {
            dist[a.to] = nd;
            reached[a.to] = true;
            parent[a.to] = {u, e};
            ++relaxations;
            if (!queued[a.to]) {
              queued[a.to] = true;
              queue.push_back(a.to);
            }
          }
        }
      }
      if (!reached[t]) break;
      for (std::size_t v = t; v != s;) {
        auto [u, e] = parent[v];
        Arc& a = g_[u][e];
        a.cap -= 1;
        g_[v][a.rev].cap += 1;
        v = u;
      }
      ++pushed;
    }
    return pushed;
  }

  const std::vector<Arc>& arcs(std::size_t u) const { return g_[u]; }

 private:
  std::vector<std::vector<Arc>> g_;
};

/// Exact size-bounded assignment for any k via min-cost flow.
PartitionResult flow_assign(const PointSet& p, const std::vector<Vector>& centers, const std::vector<std::size_t>& lo,
                            const std::vector<std::size_t>& hi) {
  const std::size_t n = p.size();
  const std::size_t k = centers.size();
  std::size_t lo_sum = 0, hi_sum = 0;
  for (std::size_t j = 0; j < k; ++j) {
    if (lo[j] > hi[j]) return infeasible("cluster " + std::to_string(j) + " has lo > hi");
    lo_sum += lo[j];
    hi_sum += std::min(hi[j], n);
  }
  if (lo_sum > n || hi_sum < n) return infeasible("size bounds cannot cover n = " + std::to_string(n));

  const std::size_t source = 0, sink = n + k + 1;
  Flow flow(n + k + 2);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    flow.add(source, 1 + i, 1, {});
    for (std::size_t j = 0; j < k; ++j) {
      const double d = squared_distance(p[i], centers[j]);
      scale = std::max(scale, d);
      flow.add(1 + i, 1 + n + j, 1, {0, d});
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (lo[j] > 0) flow.add(1 + n + j, sink, static_cast<int>(lo[j]), {-1, 0.0});
    const std::size_t rest = std::min(hi[j], n) - lo[j];
    if (rest > 0) flow.add(1 + n + j, sink, static_cast<int>(rest), {});
  }
  const int pushed = flow.run(source, sink, static_cast<int>(n), 1e-12 * std::max(scale, 1.0));
  if (pushed != static_cast<int>(n)) return infeasible("size bounds cannot be met");

  PartitionResult r;
  r.assignment.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i)
    for (const Arc& a : flow.arcs(1 + i))
      if (a.to > n && a.to <= n + k && a.cap == 0) r.assignment[i] = static_cast<int>(a.to - n - 1);
  std::vector<std::size_t> sizes(k, 0);
  for (int a : r.assignment) {
    if (a < 0) return infeasible("flow left a point unassigned");
    ++sizes[static_cast<std::size_t>(a)];
  }
  for (std::size_t j = 0; j < k; ++j)
    if (sizes[j] < lo[j] || sizes[j] > hi[j]) return infeasible("size bounds cannot be met");
  r.cost = assignment_cost(p, centers, r.assignment);
  r.feasible = true;
  return r;
}

PartitionResult balanced_k(const PointSet& p, const std::vector<Vector>& centers, double c) {
  const std::size_t n = p.size();
  const std::size_t k = centers.size();
  PartitionResult best = infeasible("no size profile is " + std::to_string(c) + "-balanced");
  // Every c-balanced partition has some minimum size m and all sizes in [m, floor(c m)].
  for (std::size_t m = 1; m * k <= n; ++m) {
    const auto top = static_cast<std::size_t>(std::floor(c * static_cast<double>(m) + kSlack));
    if (top * k < n) continue;
    PartitionResult r = flow_assign(p, centers, std::vector<std::size_t>(k, m), std::vector<std::size_t>(k, top));
    if (r.feasible && (!best.feasible || r.cost < best.cost)) best = std::move(r);
  }
  return best;
}

bool better(double cost, std::size_t idx, double best_cost, std::size_t best_idx) {
  return cost < best_cost || (cost == best_cost && idx < best_idx);
}

}  // namespace

ConstraintSpec ConstraintSpec::balanced(double c) {
  if (!(c >= 1.0) || !std::isfinite(c)) throw InputError("balance factor c must be >= 1");
  ConstraintSpec s;
  s.kind = Kind::kBalanced;
  s.c = c;
  return s;
}

ConstraintSpec ConstraintSpec::size_interval(std::vector<std::size_t> lo, std::vector<std::size_t> hi) {
  if (lo.empty() || hi.empty()) throw InputError("size interval needs lo and hi");
  if (lo.size() != hi.size() && lo.size() != 1 && hi.size() != 1)
    throw InputError("lo and hi lists must have equal length (or length 1)");
  ConstraintSpec s;
  s.kind = Kind::kSizeInterval;
  s.lo = std::move(lo);
  s.hi = std::move(hi);
  for (std::size_t j = 0; j < std::max(s.lo.size(), s.hi.size()); ++j)
    if (s.lower(j) > s.upper(j)) throw InputError("size interval has lo > hi");
  return s;
}

std::size_t ConstraintSpec::lower(std::size_t j) const {
  if (lo.empty()) return 0;
  return lo.size() == 1 ? lo[0] : lo.at(j);
}

std::size_t ConstraintSpec::upper(std::size_t j) const {
  if (hi.empty()) return std::numeric_limits<std::size_t>::max();
  return hi.size() == 1 ? hi[0] : hi.at(j);
}

ConstraintSpec ConstraintSpec::parse(const std::string& text) {
  if (text == "none" || text.empty()) return unconstrained();
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  std::map<std::string, std::string> kv;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw InputError("constraint option '" + item + "' is not key=value");
      kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }
  if (kind == "balanced") {
    double c = 1.0;
    for (const auto& [k, v] : kv) {
      if (k != "c") throw InputError("unknown balanced option '" + k + "'");
      try {
        std::size_t used = 0;
        c = std::stod(v, &used);
        if (used != v.size()) throw InputError("");
      } catch (const std::exception&) {
        throw InputError("bad balance factor '" + v + "'");
      }
    }
    return balanced(c);
  }
  if (kind == "size") {
    std::vector<std::size_t> lo{0}, hi{std::numeric_limits<std::size_t>::max()};
    for (const auto& [k, v] : kv) {
      if (k == "lo")
        lo = parse_list(v, "lo");
      else if (k == "hi")
        hi = parse_list(v, "hi");
      else
        throw InputError("unknown size option '" + k + "'");
    }
    return size_interval(std::move(lo), std::move(hi));
  }
  throw InputError("unknown constraint '" + text + "' (expected none, balanced:c=..., size:lo=...,hi=...)");
}

std::string ConstraintSpec::str() const {
  switch (kind) {
    case Kind::kUnconstrained:
      return "none";
    case Kind::kBalanced: {
      std::ostringstream os;
      os.precision(17);
      os << "balanced:c=" << c;
      return os.str();
    }
    case Kind::kSizeInterval:
      return "size:lo=" + join(lo) + ",hi=" + join(hi);
  }
  return "none";
}

bool ConstraintSpec::admits(const std::vector<std::size_t>& sizes) const {
  switch (kind) {
    case Kind::kUnconstrained:
      return true;
    case Kind::kBalanced: {
      const auto [mn, mx] = std::minmax_element(sizes.begin(), sizes.end());
      return static_cast<double>(*mx) <= c * static_cast<double>(*mn) + kSlack;
    }
    case Kind::kSizeInterval:
      for (std::size_t j = 0; j < sizes.size(); ++j)
        if (sizes[j] < lower(j) || sizes[j] > upper(j)) return false;
      return true;
  }
  return false;
}

PartitionResult assign(const PointSet& p, const std::vector<Vector>& centers, const ConstraintSpec& spec) {
  if (p.empty()) throw InputError("point set is empty");
  check_centers(p, centers);
  const std::size_t k = centers.size();
  const std::size_t n = p.size();
  if (spec.kind == ConstraintSpec::Kind::kUnconstrained) return nearest(p, centers);
  if (spec.kind == ConstraintSpec::Kind::kSizeInterval && spec.lo.size() > 1 && spec.lo.size() != k)
    throw InputError("size interval lists do not match the number of centers");
  if (spec.kind == ConstraintSpec::Kind::kSizeInterval && spec.hi.size() > 1 && spec.hi.size() != k)
    throw InputError("size interval lists do not match the number of centers");
  if (k == 1) {
    if (!spec.admits({n})) return infeasible("single cluster of size " + std::to_string(n) + " violates the constraint");
    return nearest(p, centers);
  }
  if (k == 2) return sweep(p, centers, [&](std::size_t a, std::size_t b) { return spec.admits({a, b}); });
  if (spec.kind == ConstraintSpec::Kind::kBalanced) return balanced_k(p, centers, spec.c);
  std::vector<std::size_t> lo(k), hi(k);
  for (std::size_t j = 0; j < k; ++j) {
    lo[j] = spec.lower(j);
    hi[j] = std::min(spec.upper(j), n);
  }
  return flow_assign(p, centers, lo, hi);
}

PartitionResult assign(const PointSet& p, std::span<const double> c1, std::span<const double> c2,
                       const ConstraintSpec& spec) {
  return assign(p, std::vector<Vector>{Vector(c1.begin(), c1.end()), Vector(c2.begin(), c2.end())}, spec);
}

namespace {

struct Local {
  bool found = false;
  std::size_t index = 0;
  PartitionResult result;
  std::size_t feasible = 0;
};

Local scan(const PointSet& p, const std::vector<CandidatePair>& cands, const ConstraintSpec& spec, std::size_t begin,
           std::size_t end) {
  Local out;
  std::vector<Vector> centers(2);
  for (std::size_t i = begin; i < end; ++i) {
    centers[0] = cands[i].c1;
    centers[1] = cands[i].c2;
    PartitionResult r = assign(p, centers, spec);
    if (!r.feasible) continue;
    ++out.feasible;
    if (!out.found || better(r.cost, i, out.result.cost, out.index)) {
      out.found = true;
      out.index = i;
      out.result = std::move(r);
    }
  }
  return out;
}

Local scan_parallel(const PointSet& p, const std::vector<CandidatePair>& cands, const ConstraintSpec& spec,
                    unsigned threads) {
  const std::size_t n = cands.size();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n / 64)));
  if (threads <= 1) return scan(p, cands, spec, 0, n);
  std::vector<Local> parts(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t b = n * t / threads, e = n * (t + 1) / threads;
    pool.emplace_back([&, t, b, e] { parts[t] = scan(p, cands, spec, b, e); });
  }
  for (auto& th : pool) th.join();
  Local out;
  for (auto& part : parts) {
    out.feasible += part.feasible;
    if (part.found && (!out.found || better(part.result.cost, part.index, out.result.cost, out.index))) {
      out.found = true;
      out.index = part.index;
      out.result = std::move(part.result);
    }
  }
  return out;
}

}  // namespace

Evaluation evaluate_candidates(const PointSet& p, const std::vector<CandidatePair>& candidates,
                               const ConstraintSpec& spec, unsigned threads) {
  if (candidates.empty()) throw InputError("candidate list is empty");
  Local best = scan_parallel(p, candidates, spec, threads);
  if (!best.found) {
    std::vector<Vector> centers{candidates[0].c1, candidates[0].c2};
    throw InfeasibleError("no candidate admits a feasible partition: " + assign(p, centers, spec).reason);
  }
  Evaluation e;
  e.index = best.index;
  e.best = candidates[best.index];
  e.result = std::move(best.result);
  e.evaluated = candidates.size();
  e.feasible = best.feasible;
  return e;
}

CandidateEvaluator::CandidateEvaluator(const PointSet& p, ConstraintSpec spec, unsigned threads, std::size_t batch)
    : p_(p), spec_(std::move(spec)), threads_(threads), batch_(std::max<std::size_t>(batch, 1)) {}

void CandidateEvaluator::operator()(const CandidateView& v) {
  CandidatePair pair;
  pair.c1.assign(v.c1.begin(), v.c1.end());
  pair.c2.assign(v.c2.begin(), v.c2.end());
  pair.provenance.phase = v.phase;
  pair.provenance.iteration = v.iteration;
  pair.provenance.copies = v.copies;
  pair.provenance.subset_a.assign(v.subset_a.begin(), v.subset_a.end());
  pair.provenance.subset_b.assign(v.subset_b.begin(), v.subset_b.end());
  pending_.push_back(std::move(pair));
  if (pending_.size() >= batch_) flush();
}

void CandidateEvaluator::flush() {
  if (pending_.empty()) return;
  Local part = scan_parallel(p_, pending_, spec_, threads_);
  best_.evaluated += pending_.size();
  best_.feasible += part.feasible;
  if (part.found) {
    const std::size_t idx = offset_ + part.index;
    if (!have_best_ || better(part.result.cost, idx, best_.result.cost, best_.index)) {
      have_best_ = true;
      best_.index = idx;
      best_.best = pending_[part.index];
      best_.result = std::move(part.result);
    }
  }
  offset_ += pending_.size();
  pending_.clear();
}

Evaluation CandidateEvaluator::finish() {
  flush();
  if (best_.evaluated == 0) throw InputError("candidate list is empty");
  if (!have_best_) throw InfeasibleError("no candidate admits a feasible partition under " + spec_.str());
  return best_;
}

}  // namespace ckm

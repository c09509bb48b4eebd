#include "ckm/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <string>

#include "ckm/errors.hpp"
#include "ckm/subsets.hpp"

namespace ckm {

namespace {

constexpr std::uint64_t kMaxSample = std::uint64_t{1} << 26;
constexpr std::uint64_t kMaxSubsetSize = std::uint64_t{1} << 16;
constexpr double kMaxUncapped = 1e9;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Sizes {
  std::uint32_t M, N_a, N_b, N_2;
};

Sizes sizes_of(const ParameterSet& ps) {
  Sizes s;
  s.M = static_cast<std::uint32_t>(as_count(ps.M, "M", kMaxSubsetSize));
  s.N_a = static_cast<std::uint32_t>(as_count(ps.N_a, "N_a", kMaxSample));
  s.N_b = static_cast<std::uint32_t>(as_count(ps.N_b, "N_b", kMaxSample));
  s.N_2 = static_cast<std::uint32_t>(as_count(ps.N_2, "N_2", kMaxSample));
  if (s.M < 1) throw InputError("M must be at least 1");
  if (s.N_a < s.M || s.N_b < s.M || s.N_2 < s.M) throw InputError("sample sizes N_a, N_b, N_2 must be at least M");
  return s;
}

/// `count` uniform draws with replacement from `pool` (indices into P).
std::vector<std::uint32_t> draw_from(std::span<const std::uint32_t> pool, std::uint32_t count, Rng& rng) {
  std::vector<std::uint32_t> out(count);
  for (auto& v : out) v = pool[rng.index(pool.size())];
  return out;
}

std::vector<std::uint32_t> draw_from_all(std::size_t n, std::uint32_t count, Rng& rng) {
  std::vector<std::uint32_t> out(count);
  for (auto& v : out) v = static_cast<std::uint32_t>(rng.index(n));
  return out;
}

/// Shifted mean of rows of P addressed through sample positions, plus `copies`
/// copies of `extra`. The first member is the base, so identical members give
/// that member exactly.
void subset_centroid(const PointSet& p, std::span<const std::uint32_t> sample, std::span<const std::uint32_t> positions,
                     std::span<const double> extra, std::uint32_t copies, std::span<double> out) {
  const std::size_t d = p.dim();
  const auto total = static_cast<double>(positions.size() + copies);
  std::span<const double> base = positions.empty() ? extra : p[sample[positions[0]]];
  for (std::size_t j = 0; j < d; ++j) {
    double shift = 0.0;
    for (auto pos : positions) shift += p[sample[pos]][j] - base[j];
    if (copies > 0) shift += static_cast<double>(copies) * (extra[j] - base[j]);
    out[j] = base[j] + shift / total;
  }
}

/// Size-M subsets of one sample array, each with its centroid.
struct Family {
  std::vector<std::uint32_t> positions;  // M per member
  std::vector<double> centroids;         // d per member
  std::size_t size = 0;
};

/// Distinct values of a sample array (by P-index) with their positions, in
/// first-occurrence order.
struct TypeTable {
  std::vector<std::vector<std::uint32_t>> positions;
  std::vector<std::uint32_t> multiplicities() const {
    std::vector<std::uint32_t> m;
    m.reserve(positions.size());
    for (const auto& p : positions) m.push_back(static_cast<std::uint32_t>(p.size()));
    return m;
  }
};

TypeTable types_of(std::span<const std::uint32_t> sample) {
  TypeTable t;
  std::map<std::uint32_t, std::size_t> slot;
  for (std::uint32_t pos = 0; pos < sample.size(); ++pos) {
    auto [it, fresh] = slot.try_emplace(sample[pos], t.positions.size());
    if (fresh) t.positions.emplace_back();
    t.positions[it->second].push_back(pos);
  }
  return t;
}

Family build_family(const PointSet& p, std::span<const std::uint32_t> sample, std::uint32_t M,
                    std::optional<std::uint64_t> budget, Rng& trunc_rng, bool& truncated) {
  Family f;
  const std::size_t d = p.dim();
  std::vector<double> c(d);
  const double full = binomial(sample.size(), M);
  if (!budget || full <= static_cast<double>(*budget)) {
    for (Combinations comb(static_cast<std::uint32_t>(sample.size()), M); !comb.done(); comb.next()) {
      auto idx = comb.current();
      subset_centroid(p, sample, idx, {}, 0, c);
      f.positions.insert(f.positions.end(), idx.begin(), idx.end());
      f.centroids.insert(f.centroids.end(), c.begin(), c.end());
      ++f.size;
    }
    return f;
  }
  truncated = true;
  const TypeTable types = types_of(sample);
  SubMultisets subs(types.multiplicities(), M);
  std::vector<std::uint32_t> pos;
  for (const auto& ms : subs.distinct(*budget, trunc_rng)) {
    pos.clear();
    for (auto [type, k] : ms)
      for (std::uint32_t i = 0; i < k; ++i) pos.push_back(types.positions[type][i]);
    subset_centroid(p, sample, pos, {}, 0, c);
    f.positions.insert(f.positions.end(), pos.begin(), pos.end());
    f.centroids.insert(f.centroids.end(), c.begin(), c.end());
    ++f.size;
  }
  return f;
}

/// k farthest members of `members` (indices into P) from `center`; ties by lower index.
std::vector<std::uint32_t> farthest(const PointSet& p, std::span<const std::uint32_t> members, std::span<const double> center,
                                    std::size_t k, double& radius) {
  std::vector<std::pair<double, std::uint32_t>> keyed(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) keyed[i] = {squared_distance(p[members[i]], center), members[i]};
  auto larger = [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); };
  std::nth_element(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(k - 1), keyed.end(), larger);
  radius = std::sqrt(keyed[k - 1].first);
  std::vector<std::uint32_t> kept(k);
  for (std::size_t i = 0; i < k; ++i) kept[i] = keyed[i].second;
  std::sort(kept.begin(), kept.end());
  return kept;
}

Vector maybe_vibrate(const PointSet& p, std::span<const std::uint32_t> members, std::span<const double> c1, double eta,
                     Rng& rng, bool enabled) {
  if (!enabled || members.size() < 3) return Vector(c1.begin(), c1.end());
  try {
    const PointSet q = p.subset(members);
    return vibrate(c1, q, eta, rng);
  } catch (const DegenerateInputError&) {
    return Vector(c1.begin(), c1.end());
  }
}

std::vector<std::uint32_t> iota_indices(std::size_t n) {
  std::vector<std::uint32_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<std::uint32_t>(i);
  return v;
}

void fill_bounds(SamplerReport& r, const Sizes& s, std::size_t n, double varsigma) {
  r.phase1_bound = binomial(s.N_a, s.M) * binomial(s.N_b, s.M);
  r.round_bound = binomial(std::uint64_t{s.N_2} + s.M, s.M);
  r.iteration_bound = peeling_iteration_bound(n, varsigma);
}

void require_points(const PointSet& p) {
  if (p.empty()) throw InputError("point set is empty");
}

}  // namespace

std::size_t peeling_iteration_bound(std::size_t n, double varsigma) {
  if (n <= 1) return 0;
  return static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n)) / std::log1p(varsigma) - 1e-12));
}

std::uint64_t enumerate_multiset_subsets(
    const PointSet& v, std::span<const double> extra, std::uint32_t copies, std::uint32_t M,
    const std::function<void(std::span<const double>, std::uint32_t, std::span<const std::uint32_t>)>& visit) {
  if (copies != M) throw InputError("copies must equal M");
  if (!v.empty() && extra.size() != v.dim()) throw InputError("extra point has the wrong dimension");
  const std::uint64_t n = v.size();
  if (M > n + copies) throw InputError("M exceeds the multiset size");
  const std::size_t d = extra.size();
  const auto identity = iota_indices(n);
  std::vector<double> c(d);
  std::uint64_t count = 0;
  for (std::uint32_t t = 0; t <= M; ++t) {
    const std::uint32_t from_v = M - t;
    if (from_v > n) continue;
    for (Combinations comb(static_cast<std::uint32_t>(n), from_v); !comb.done(); comb.next()) {
      subset_centroid(v, identity, comb.current(), extra, t, c);
      visit(c, t, comb.current());
      ++count;
    }
  }
  return count;
}

SamplerReport run_sampling_phase(const PointSet& p, const ParameterSet& ps, std::uint64_t seed,
                                 const SamplerOptions& options, const CandidateSink& sink) {
  require_points(p);
  const Sizes s = sizes_of(ps);
  SamplerReport r;
  fill_bounds(r, s, p.size(), ps.varsigma);

  auto t0 = Clock::now();
  Rng rng_a = Rng::substream(seed, "phase1.Sa");
  Rng rng_b = Rng::substream(seed, "phase1.Sb");
  const auto sa = draw_from_all(p.size(), s.N_a, rng_a);
  const auto sb = draw_from_all(p.size(), s.N_b, rng_b);
  r.sampling_seconds += seconds_since(t0);

  t0 = Clock::now();
  const double full_a = binomial(s.N_a, s.M);
  const double full_b = binomial(s.N_b, s.M);
  std::optional<std::uint64_t> budget_a, budget_b;
  if (options.cap && full_a * full_b > static_cast<double>(*options.cap)) {
    const std::uint64_t cap = std::max<std::uint64_t>(*options.cap, 1);
    const auto root = static_cast<std::uint64_t>(std::floor(std::sqrt(static_cast<double>(cap))));
    if (full_a <= static_cast<double>(root)) {
      budget_b = std::max<std::uint64_t>(cap / static_cast<std::uint64_t>(full_a), 1);
    } else if (full_b <= static_cast<double>(root)) {
      budget_a = std::max<std::uint64_t>(cap / static_cast<std::uint64_t>(full_b), 1);
    } else {
      budget_a = budget_b = std::max<std::uint64_t>(root, 1);
    }
  } else if (!options.cap && full_a * full_b > kMaxUncapped) {
    throw InputError("exhaustive double-sampling enumeration of " + std::to_string(full_a * full_b) +
                     " pairs requested; set a cap");
  }
  Rng trunc_a = Rng::substream(seed, "phase1.trunc.a");
  Rng trunc_b = Rng::substream(seed, "phase1.trunc.b");
  const Family fa = build_family(p, sa, s.M, budget_a, trunc_a, r.truncated);
  const Family fb = build_family(p, sb, s.M, budget_b, trunc_b, r.truncated);

  const std::size_t d = p.dim();
  for (std::size_t i = 0; i < fa.size; ++i) {
    std::span<const double> c1(fa.centroids.data() + i * d, d);
    std::span<const std::uint32_t> h1(fa.positions.data() + i * s.M, s.M);
    for (std::size_t j = 0; j < fb.size; ++j) {
      std::span<const double> c2(fb.centroids.data() + j * d, d);
      std::span<const std::uint32_t> h2(fb.positions.data() + j * s.M, s.M);
      sink(CandidateView{c1, c2, Phase::kSampling, -1, 0, h1, h2});
      ++r.phase1_count;
    }
  }
  r.enumerate_seconds += seconds_since(t0);
  return r;
}

Vector draw_first_center(const PointSet& p, std::uint64_t M, std::uint64_t seed) {
  require_points(p);
  if (M < 1 || M > kMaxSample) throw InputError("M out of range for drawing V_a");
  Rng rng = Rng::substream(seed, "phase2.Va");
  const auto va = draw_from_all(p.size(), static_cast<std::uint32_t>(M), rng);
  return centroid(p, va);
}

SamplerReport run_peeling_phase(const PointSet& p, const ParameterSet& ps, std::span<const double> c1,
                                std::uint64_t seed, const SamplerOptions& options, const CandidateSink& sink) {
  require_points(p);
  if (c1.size() != p.dim()) throw InputError("first center has the wrong dimension");
  const Sizes s = sizes_of(ps);
  SamplerReport r;
  fill_bounds(r, s, p.size(), ps.varsigma);
  r.c1.assign(c1.begin(), c1.end());

  const std::size_t n = p.size();
  const std::size_t d = p.dim();
  const std::size_t stop = std::max<std::size_t>(1, s.M);
  const long double shrink = 1.0L + static_cast<long double>(ps.varsigma);
  std::vector<std::uint32_t> q = iota_indices(n);
  std::vector<double> c(d);

  for (std::size_t j = 0; q.size() > stop; ++j) {
    if (options.record_trace) r.rounds.push_back(q);

    auto t0 = Clock::now();
    Rng rng_vb = Rng::substream(seed, "phase2.Vb", j);
    const auto vb = draw_from(q, s.N_2, rng_vb);
    r.sampling_seconds += seconds_since(t0);

    t0 = Clock::now();
    const Vector extra = centroid(p, vb);
    double full = 0.0;
    for (std::uint32_t t = 0; t <= s.M; ++t) full += binomial(s.N_2, s.M - t);
    const int iter = static_cast<int>(j);
    if (!options.cap && full > kMaxUncapped)
      throw InputError("exhaustive peeling-round enumeration of " + std::to_string(full) + " subsets requested; set a cap");
    if (!options.cap || full <= static_cast<double>(*options.cap)) {
      const auto identity = iota_indices(vb.size());
      for (std::uint32_t t = 0; t <= s.M; ++t) {
        const std::uint32_t from_v = s.M - t;
        for (Combinations comb(s.N_2, from_v); !comb.done(); comb.next()) {
          subset_centroid(p, vb, comb.current(), extra, t, c);
          sink(CandidateView{c1, c, Phase::kPeeling, iter, t, comb.current(), {}});
          ++r.phase2_count;
        }
      }
    } else {
      r.truncated = true;
      TypeTable types = types_of(vb);
      auto mult = types.multiplicities();
      mult.push_back(s.M);  // the extra point c(V_b), M copies
      SubMultisets subs(std::move(mult), s.M);
      Rng trunc = Rng::substream(seed, "phase2.trunc", j);
      const std::uint32_t extra_type = static_cast<std::uint32_t>(types.positions.size());
      std::vector<std::uint32_t> pos;
      for (const auto& ms : subs.distinct(*options.cap, trunc)) {
        pos.clear();
        std::uint32_t t = 0;
        for (auto [type, k] : ms) {
          if (type == extra_type) {
            t = k;
            continue;
          }
          for (std::uint32_t i = 0; i < k; ++i) pos.push_back(types.positions[type][i]);
        }
        subset_centroid(p, vb, pos, extra, t, c);
        sink(CandidateView{c1, c, Phase::kPeeling, iter, t, pos, {}});
        ++r.phase2_count;
      }
    }
    r.enumerate_seconds += seconds_since(t0);

    t0 = Clock::now();
    // Target sizes are anchored at n so rounds stay within ceil(log n / log(1 + varsigma)).
    const long double target = static_cast<long double>(n) / std::pow(shrink, static_cast<long double>(j + 1));
    std::size_t k = static_cast<std::size_t>(std::ceil(target * (1.0L - 1e-15L)));
    k = std::clamp<std::size_t>(k, 1, q.size() - 1);
    Rng rng_vib = Rng::substream(seed, "phase2.vibrate", j);
    const Vector center = maybe_vibrate(p, q, c1, ps.eta, rng_vib, options.vibrate);
    double radius = 0.0;
    q = farthest(p, q, center, k, radius);
    r.radii.push_back(radius);
    r.peel_seconds += seconds_since(t0);
    ++r.phase_iterations;
  }
  if (options.record_trace) r.rounds.push_back(q);
  return r;
}

SamplerReport run_2means(const PointSet& p, const ParameterSet& ps, std::uint64_t seed, const SamplerOptions& options,
                         const CandidateSink& sink) {
  SamplerReport r = run_sampling_phase(p, ps, seed, options, sink);

  auto t0 = Clock::now();
  const Vector c1 = draw_first_center(p, static_cast<std::uint64_t>(ps.M), seed);
  r.sampling_seconds += seconds_since(t0);
  sink(CandidateView{c1, c1, Phase::kPeeling, -1, 0, {}, {}});
  r.bare_count = 1;

  SamplerReport peel = run_peeling_phase(p, ps, c1, seed, options, sink);
  r.c1 = std::move(peel.c1);
  r.phase2_count = peel.phase2_count;
  r.phase_iterations = peel.phase_iterations;
  r.truncated = r.truncated || peel.truncated;
  r.radii = std::move(peel.radii);
  r.rounds = std::move(peel.rounds);
  r.sampling_seconds += peel.sampling_seconds;
  r.peel_seconds += peel.peel_seconds;
  r.enumerate_seconds += peel.enumerate_seconds;
  return r;
}

CandidateSet run_2means(const PointSet& p, const ParameterSet& ps, std::uint64_t seed, const SamplerOptions& options) {
  CandidateSet out;
  auto sink = [&](const CandidateView& v) {
    CandidatePair pair;
    pair.c1.assign(v.c1.begin(), v.c1.end());
    pair.c2.assign(v.c2.begin(), v.c2.end());
    pair.provenance.phase = v.phase;
    pair.provenance.iteration = v.iteration;
    pair.provenance.copies = v.copies;
    pair.provenance.subset_a.assign(v.subset_a.begin(), v.subset_a.end());
    pair.provenance.subset_b.assign(v.subset_b.begin(), v.subset_b.end());
    out.pairs.push_back(std::move(pair));
  };
  static_cast<SamplerReport&>(out) = run_2means(p, ps, seed, options, sink);
  return out;
}

PeelResult peel(const PointSet& q, std::span<const double> c1, double varsigma, double eta, Rng& rng, bool vibrate_center) {
  if (q.empty()) throw InputError("cannot peel an empty set");
  if (c1.size() != q.dim()) throw InputError("center has the wrong dimension");
  if (!(varsigma > 0.0)) throw InputError("varsigma must be positive");
  const std::size_t n = q.size();
  std::size_t k = 1;
  if (n >= 2) {
    k = static_cast<std::size_t>(std::ceil(static_cast<double>(n) / (1.0 + varsigma)));
    k = std::clamp<std::size_t>(k, 1, n - 1);
  }
  const auto all = iota_indices(n);
  PeelResult out;
  out.center = maybe_vibrate(q, all, c1, eta, rng, vibrate_center);
  out.kept = farthest(q, all, out.center, k, out.radius);
  out.next = q.subset(out.kept);
  return out;
}

}  // namespace ckm

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ckm/geometry.hpp"
#include "ckm/params.hpp"
#include "ckm/rng.hpp"

namespace ckm {

enum class Phase : std::uint8_t {
  kSampling = 1,  ///< pairs (c(H1), c(H2)) from S_a x S_b
  kPeeling = 2,   ///< pairs (c1, c(H')) from the peeling rounds, plus the bare pair (c1, c1)
};

/// Where a candidate came from. For kSampling, subset_a / subset_b are
/// positions in S_a / S_b. For kPeeling, subset_a holds positions in V_b of
/// round `iteration`, `copies` is the number of c(V_b) copies in H'; the bare
/// pair has iteration == -1.
struct Provenance {
  Phase phase = Phase::kSampling;
  int iteration = -1;
  std::uint32_t copies = 0;
  std::vector<std::uint32_t> subset_a;
  std::vector<std::uint32_t> subset_b;
};

struct CandidatePair {
  Vector c1;
  Vector c2;
  Provenance provenance;
};

/// Non-owning view handed to a CandidateSink; valid only during the call.
struct CandidateView {
  std::span<const double> c1;
  std::span<const double> c2;
  Phase phase;
  int iteration;
  std::uint32_t copies;
  std::span<const std::uint32_t> subset_a;
  std::span<const std::uint32_t> subset_b;
};

using CandidateSink = std::function<void(const CandidateView&)>;

struct SamplerOptions {
  /// Upper bound on candidates per enumeration block (the phase-1 product, and
  /// each peeling round). Unset means exhaustive enumeration.
  std::optional<std::uint64_t> cap;
  bool vibrate = true;
  /// Keep every Q_j (as indices into P) in SamplerReport::rounds.
  bool record_trace = false;
};

struct SamplerReport {
  std::uint64_t phase1_count = 0;
  std::uint64_t phase2_count = 0;  ///< enumerated peeling-round pairs (bare pair excluded)
  std::uint64_t bare_count = 0;    ///< 1 when the bare pair (c1, c1) was emitted
  std::size_t phase_iterations = 0;
  bool truncated = false;

  double phase1_bound = 0.0;       ///< C(N_a, M) * C(N_b, M)
  double round_bound = 0.0;        ///< C(N_2 + M, M), per peeling round
  std::size_t iteration_bound = 0; ///< ceil(log n / log(1 + varsigma))

  Vector c1;                     ///< c(V_a)
  std::vector<double> radii;     ///< d_j per round
  std::vector<std::vector<std::uint32_t>> rounds;  ///< Q_0, Q_1, ... (record_trace only)

  double sampling_seconds = 0.0;
  double peel_seconds = 0.0;
  double enumerate_seconds = 0.0;

  std::uint64_t total() const { return phase1_count + phase2_count + bare_count; }
};

struct CandidateSet : SamplerReport {
  std::vector<CandidatePair> pairs;
};

/// The randomized 2-means candidate generator: double sampling (all M-subset
/// pairs of S_a x S_b) followed by peeling rounds around c1 = c(V_a). Every
/// random draw comes from Rng::substream(seed, <role>, <round>), so the output
/// depends only on (P, ps, seed, options).
SamplerReport run_2means(const PointSet& p, const ParameterSet& ps, std::uint64_t seed, const SamplerOptions& options,
                         const CandidateSink& sink);

CandidateSet run_2means(const PointSet& p, const ParameterSet& ps, std::uint64_t seed,
                        const SamplerOptions& options = {});

/// Only the double-sampling part (shared with the k-means framework).
SamplerReport run_sampling_phase(const PointSet& p, const ParameterSet& ps, std::uint64_t seed,
                                 const SamplerOptions& options, const CandidateSink& sink);

/// Draw V_a (M samples) and return c(V_a).
Vector draw_first_center(const PointSet& p, std::uint64_t M, std::uint64_t seed);

/// Peeling rounds for a fixed first center c1 (bare pair not emitted).
SamplerReport run_peeling_phase(const PointSet& p, const ParameterSet& ps, std::span<const double> c1,
                                std::uint64_t seed, const SamplerOptions& options, const CandidateSink& sink);

/// Visit c(H') for every size-M sub-multiset H' of V + {copies x extra}:
/// for t = 0..M, every (M - t)-subset of V (lexicographic) with t copies of
/// extra. Returns the number visited, sum_t C(N, M - t).
std::uint64_t enumerate_multiset_subsets(
    const PointSet& v, std::span<const double> extra, std::uint32_t copies, std::uint32_t M,
    const std::function<void(std::span<const double> centroid, std::uint32_t t, std::span<const std::uint32_t> subset)>&
        visit);

struct PeelResult {
  double radius = 0.0;                ///< d_j, the k-th largest distance
  std::vector<std::uint32_t> kept;    ///< indices into Q of the k farthest points, ascending
  PointSet next;                      ///< Q restricted to kept
  Vector center;                      ///< the (vibrated) center distances were measured from
};

/// One peeling step with k = min(ceil(|Q| / (1 + varsigma)), |Q| - 1) for
/// |Q| >= 2 (k = 1 for |Q| = 1). When |Q| >= 3 and `vibrate` is set, c1 is
/// vibrated first; a degenerate configuration falls back to the raw center
/// with ties broken by index.
PeelResult peel(const PointSet& q, std::span<const double> c1, double varsigma, double eta, Rng& rng,
                bool vibrate = true);

/// ceil(log n / log(1 + varsigma)); 0 for n <= 1.
std::size_t peeling_iteration_bound(std::size_t n, double varsigma);

}  // namespace ckm

#include "ckm/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "ckm/errors.hpp"

namespace ckm {

namespace {

constexpr double kTieRel = 1e-12;
constexpr double kCheckRel = 1e-10;
constexpr double kCheckAbs = 1e-12;

/// Orientation of a size profile under spec: 0 = as is, 1 = swapped, -1 = neither.
int orientation(const ConstraintSpec& spec, std::size_t a, std::size_t b) {
  if (spec.admits({a, b})) return 0;
  if (spec.admits({b, a})) return 1;
  return -1;
}

bool uniform_bounds(const ConstraintSpec& spec) {
  return spec.kind != ConstraintSpec::Kind::kSizeInterval || (spec.lo.size() <= 1 && spec.hi.size() <= 1);
}

/// Smallest relabelling of blocks (as a permutation) that the spec admits.
bool admit_with_relabel(const ConstraintSpec& spec, std::vector<int>& labels, int k) {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  if (uniform_bounds(spec)) return spec.admits(sizes);
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    std::vector<std::size_t> permuted(sizes.size());
    for (int b = 0; b < k; ++b) permuted[static_cast<std::size_t>(perm[static_cast<std::size_t>(b)])] = sizes[static_cast<std::size_t>(b)];
    if (spec.admits(permuted)) {
      for (int& l : labels) l = perm[static_cast<std::size_t>(l)];
      return true;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

bool within(double lhs, double rhs) { return lhs <= rhs * (1.0 + kCheckRel) + kCheckAbs; }

}  // namespace

ExactSolution brute_opt2(const PointSet& p, const ConstraintSpec& spec) {
  const std::size_t n = p.size();
  if (n > kBruteOpt2Limit)
    throw RefusalError("exact 2-partition search is limited to n <= " + std::to_string(kBruteOpt2Limit) + " (got " +
                       std::to_string(n) + ")");
  if (n == 0) throw InputError("point set is empty");
  ExactSolution best;
  if (n < 2) return best;
  const std::size_t d = p.dim();

  // Work in coordinates shifted by the mean to keep the sum-of-squares form well conditioned.
  const Vector mean = centroid(p);
  std::vector<double> x(n * d);
  std::vector<double> sq(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      x[i * d + j] = p[i][j] - mean[j];
      sq[i] += x[i * d + j] * x[i * d + j];
    }
  std::vector<double> s0(d, 0.0), s1(d, 0.0);
  double q0 = 0.0, q1 = 0.0;
  std::size_t n0 = n, n1 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    q0 += sq[i];
    for (std::size_t j = 0; j < d; ++j) s0[j] += x[i * d + j];
  }

  std::uint32_t best_mask = 0;
  bool have = false;
  std::vector<int> labels(n, 0);
  auto naive = [&](std::uint32_t mask, std::vector<int>& out) {
    out.assign(n, 0);
    for (std::size_t i = 1; i < n; ++i)
      if (mask >> (i - 1) & 1u) out[i] = 1;
    return partition_cost(p, out, 2);
  };

  const std::uint32_t total = std::uint32_t{1} << (n - 1);
  std::uint32_t mask = 0;
  std::vector<int> scratch;
  for (std::uint32_t g = 1; g < total; ++g) {
    const auto bit = static_cast<std::size_t>(std::countr_zero(g));
    const std::size_t i = bit + 1;
    mask ^= std::uint32_t{1} << bit;
    const double sign = (mask >> bit & 1u) ? 1.0 : -1.0;  // +1: point i moves to cluster 1
    for (std::size_t j = 0; j < d; ++j) {
      s1[j] += sign * x[i * d + j];
      s0[j] -= sign * x[i * d + j];
    }
    q1 += sign * sq[i];
    q0 -= sign * sq[i];
    if (sign > 0) {
      ++n1;
      --n0;
    } else {
      --n1;
      ++n0;
    }
    if (n1 == 0) continue;
    const int orient = orientation(spec, n0, n1);
    if (orient < 0) continue;
    const double cost = (q0 - norm2(s0) / static_cast<double>(n0)) + (q1 - norm2(s1) / static_cast<double>(n1));
    if (have && cost > best.cost * (1.0 + 1e-9) + 1e-12) continue;
    const double exact = naive(mask, scratch);
    const bool tie = have && std::abs(exact - best.cost) <= kTieRel * std::max(std::abs(best.cost), 1e-300);
    if (!have || (!tie && exact < best.cost) || (tie && mask < best_mask)) {
      have = true;
      best_mask = mask;
      best.cost = exact;
      labels = scratch;
      if (orient == 1)
        for (int& l : labels) l = 1 - l;
    }
  }
  if (have) {
    best.labels = std::move(labels);
    best.feasible = true;
  }
  return best;
}

ExactSolution brute_optk(const PointSet& p, int k, const ConstraintSpec& spec) {
  const std::size_t n = p.size();
  if (k < 1) throw InputError("k must be positive");
  if (n > kBruteOptKLimit)
    throw RefusalError("exact k-partition search is limited to n <= " + std::to_string(kBruteOptKLimit) + " (got " +
                       std::to_string(n) + ")");
  if (n == 0) throw InputError("point set is empty");
  ExactSolution best;
  if (n < static_cast<std::size_t>(k)) return best;

  std::vector<int> a(n, 0);
  std::vector<int> cand;
  // Restricted-growth strings: a[0] = 0, a[i] <= max(a[0..i-1]) + 1, exactly k blocks.
  auto visit = [&](auto&& self, std::size_t i, int blocks) -> void {
    if (static_cast<int>(n - i) < k - blocks) return;
    if (i == n) {
      if (blocks != k) return;
      cand = a;
      if (!admit_with_relabel(spec, cand, k)) return;
      const double cost = partition_cost(p, cand, k);
      if (!best.feasible || cost < best.cost * (1.0 - kTieRel)) {
        best.feasible = true;
        best.cost = cost;
        best.labels = cand;
      }
      return;
    }
    for (int b = 0; b <= std::min(blocks, k - 1); ++b) {
      a[i] = b;
      self(self, i + 1, std::max(blocks, b + 1));
    }
  };
  a[0] = 0;
  visit(visit, 1, 1);
  return best;
}

AnalysisProbe probe(const PointSet& p, const std::vector<int>& labels, const Vector& c1, const ParameterSet& ps) {
  const std::size_t n = p.size();
  if (labels.size() != n) throw InputError("label count does not match the point set");
  if (c1.size() != p.dim()) throw InputError("c1 has the wrong dimension");
  AnalysisProbe out;
  out.labels = labels;
  std::size_t sizes[2] = {0, 0};
  for (int l : labels) {
    if (l != 0 && l != 1) throw InputError("ground truth must be a 2-clustering with labels 0 and 1");
    ++sizes[l];
  }
  if (sizes[0] == 0 || sizes[1] == 0) throw InputError("ground truth has an empty cluster");
  if (sizes[0] < sizes[1]) {
    for (int& l : out.labels) l = 1 - l;
    std::swap(sizes[0], sizes[1]);
  }
  out.p1_size = sizes[0];
  out.p2_size = sizes[1];
  const ClusteringStats st = clustering_stats(p, out.labels, 2);
  out.opt = st.cost;
  out.sigma_opt = st.sigma_opt;
  out.beta2 = static_cast<double>(out.p2_size) / static_cast<double>(n);
  out.r2 = std::sqrt(ps.epsilon / (ps.alpha5 * out.beta2)) * out.sigma_opt;
  const double r2sq = out.r2 * out.r2;
  for (std::size_t i = 0; i < n; ++i) {
    const bool in = squared_distance(p[i], c1) <= r2sq;
    if (in) out.ball.push_back(static_cast<std::uint32_t>(i));
    if (out.labels[i] == 1) (in ? out.p2_in_size : out.p2_out_size)++;
  }
  out.outside_ball = n - out.ball.size();
  out.case_tag = static_cast<double>(out.p2_out_size) < ps.epsilon / ps.alpha1 * out.beta2 * static_cast<double>(n)
                     ? CaseTag::kCase1
                     : CaseTag::kCase2;
  if (out.outside_ball > 0)
    out.outside_ratio = static_cast<double>(out.p2_out_size) / static_cast<double>(out.outside_ball);
  return out;
}

std::size_t LemmaReport::failures() const {
  std::size_t f = 0;
  for (const auto& c : checks)
    if (!c.vacuous && !c.pass) ++f;
  return f;
}

LemmaReport check_case_lemmas(const PointSet& p, const std::vector<int>& labels, const Vector& c1, const Vector& c2,
                              const ParameterSet& ps) {
  if (c2.size() != p.dim()) throw InputError("c2 has the wrong dimension");
  LemmaReport rep;
  rep.probe = probe(p, labels, c1, ps);
  const AnalysisProbe& pr = rep.probe;
  const std::size_t n = p.size();
  const std::size_t d = p.dim();

  std::vector<std::uint32_t> idx1, idx2, idx2_in, idx2_out;
  std::vector<bool> in_ball(n, false);
  for (auto i : pr.ball) in_ball[i] = true;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (pr.labels[i] == 0) {
      idx1.push_back(i);
    } else {
      idx2.push_back(i);
      (in_ball[i] ? idx2_in : idx2_out).push_back(i);
    }
  }
  const PointSet p1 = p.subset(idx1), p2 = p.subset(idx2), p2_out = p.subset(idx2_out);
  const Vector m1 = centroid(p1), m2 = centroid(p2);
  const double n1 = static_cast<double>(idx1.size()), n2 = static_cast<double>(idx2.size());
  const double fm1 = f2(m1, p1), fm2 = f2(m2, p2);
  const double opt = pr.opt;
  const double sigma1_sq = fm1 / n1, sigma2 = std::sqrt(fm2 / n2);
  const double eps = ps.epsilon, eta = ps.eta;
  const double a1 = ps.alpha1, a2 = ps.alpha2, a5 = ps.alpha5, a6 = ps.alpha6;
  const double r2 = pr.r2;

  // m2~: P2_in collapsed onto c1.
  Vector m2t(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double s = static_cast<double>(idx2_in.size()) * c1[j];
    for (auto i : idx2_out) s += p[i][j];
    m2t[j] = s / n2;
  }
  const double f2_tilde = static_cast<double>(idx2_in.size()) * squared_distance(c1, m2t) + f2(m2t, p2_out);

  rep.c1_quality = squared_distance(c1, m1) <= eps * (1.0 + eta) * sigma1_sq / a6 * (1.0 + kCheckRel);
  rep.c2_closeness = squared_distance(m2t, c2) <= eps / a6 * f2_tilde / n2 * (1.0 + kCheckRel);
  const bool case1 = pr.case_tag == CaseTag::kCase1;
  const bool case2 = !case1;
  const bool c2_is_c1 = c1 == c2;
  const bool has_in = !idx2_in.empty();
  const double f_c1 = f2(c1, p1), f_c2 = f2(c2, p2);

  auto add = [&](std::string name, double lhs, double rhs, bool hyp, std::string hypothesis) {
    LemmaCheck c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.vacuous = !hyp;
    c.pass = within(lhs, rhs);
    c.hypothesis = std::move(hypothesis);
    rep.checks.push_back(std::move(c));
  };

  add("c1_cost", f_c1, (1.0 + eps * (1.0 + eta) / a6) * fm1, rep.c1_quality, "c1 quality");

  Vector m2in = has_in ? centroid(p, idx2_in) : m2;
  add("inner_centroid_shift", distance(m2, m2in), std::sqrt(eps / (a1 - eps)) * sigma2, case1 && has_in && eps < a1,
      "case 1");
  add("inner_centroid_radius", distance(m2in, c2), r2, case1 && has_in && c2_is_c1, "case 1, c2 = c1");
  add("case1_second_cost", f_c2, fm2 * (1.0 + 2.0 * eps / (a1 - eps)) + 2.0 * eps / a5 * opt,
      case1 && c2_is_c1 && eps < a1, "case 1, c2 = c1");
  const bool case1_params = 2.0 / a5 + std::max((1.0 + eta) / a6, 2.0 / (a1 - eps)) <= 1.0;
  add("case1_total", f_c1 + f_c2, (1.0 + eps) * opt, case1 && c2_is_c1 && rep.c1_quality && case1_params && eps < a1,
      "case 1, c2 = c1, c1 quality, constants");

  const bool ratio_params = eps * (1.0 + eta) / a6 < 1.0 && (a2 - eps * eps) / (a1 * a5) > 2.0;
  // A lower bound on the ratio; written as bound <= ratio to keep lhs <= rhs.
  add("outside_fraction", eps * eps / a2, pr.outside_ratio.value_or(0.0),
      case2 && pr.outside_ratio.has_value() && rep.c1_quality && eps <= ps.thresholds.eps1 && ratio_params,
      "case 2, c1 quality, eps <= eps1");
  add("tilde_shift", distance(m2, m2t), (1.0 - eps / a1) * r2, case2, "case 2");
  add("tilde_cost", f2_tilde, 2.0 * fm2 + a6 * pr.beta2 * static_cast<double>(n) * r2 * r2, case2 && a6 >= 4.0,
      "case 2, alpha6 >= 4");
  add("case2_second_cost", f_c2, (1.0 + 4.0 * eps / a6) * fm2 + (2.0 * eps / a5 + 2.0 * eps * eps / a5) * opt,
      case2 && rep.c2_closeness && a6 >= 4.0, "case 2, c2 closeness");
  const bool case2_params = 4.0 * (1.0 + eta) / a6 + (2.0 + 2.0 * eps) / a5 <= 1.0;
  add("case2_total", f_c1 + f_c2, (1.0 + eps) * opt,
      case2 && rep.c1_quality && rep.c2_closeness && eps <= ps.delta / 4.0 && a6 >= 4.0 && case2_params,
      "case 2, c1 quality, c2 closeness, eps <= delta/4");
  return rep;
}

std::optional<std::size_t> peeling_coverage(const std::vector<std::vector<std::uint32_t>>& rounds,
                                            const AnalysisProbe& probe, std::size_t n, double varsigma) {
  std::vector<bool> in_ball(n, false);
  for (auto i : probe.ball) in_ball[i] = true;
  const double m = static_cast<double>(probe.outside_ball);
  for (std::size_t j = 0; j < rounds.size(); ++j) {
    const auto& q = rounds[j];
    if (static_cast<double>(q.size()) > (1.0 + varsigma) * m + 1.0) continue;
    std::vector<bool> member(n, false);
    for (auto i : q) member[i] = true;
    bool covers = true;
    for (std::size_t i = 0; i < n && covers; ++i)
      if (!in_ball[i] && !member[i]) covers = false;
    if (covers) return j;
  }
  return std::nullopt;
}

bool ex_inequality(double x, double y) { return 1.0 - x * y <= std::pow(1.0 - x, y) + 1e-15; }

}  // namespace ckm

#include "ckm/json.hpp"

#include <cmath>

#include "ckm/errors.hpp"

namespace ckm {

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const ParameterSet& ps) {
  Json j;
  j["epsilon"] = ps.epsilon;
  j["gamma"] = ps.gamma;
  j["delta"] = ps.delta;
  j["d1"] = ps.d1;
  j["d2"] = ps.d2;
  j["delta2"] = ps.delta2;
  j["d4"] = ps.d4;
  j["gamma_star"] = ps.gamma_star;
  j["gamma_5b"] = ps.gamma_5b;
  j["eta"] = ps.eta;
  j["alpha1"] = ps.alpha1;
  j["alpha2"] = ps.alpha2;
  j["alpha5"] = ps.alpha5;
  j["alpha6"] = ps.alpha6;
  j["alpha6_floor"] = ps.alpha6_floor;
  j["M"] = ps.M;
  j["varsigma"] = ps.varsigma;
  j["delta1"] = ps.delta1;
  j["N_a"] = ps.N_a;
  j["N_b"] = ps.N_b;
  j["N_2"] = ps.N_2;
  j["eps0"] = ps.thresholds.eps0;
  j["eps1"] = ps.thresholds.eps1;
  j["eps2"] = ps.thresholds.eps2;
  j["delta0"] = ps.thresholds.delta0;
  j["overridden"] = ps.overridden;
  j["violations"] = ps.violations;
  j["faithful"] = ps.faithful;
  return j;
}

ParameterSet params_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("epsilon")) throw InputError("parameter JSON must be an object with 'epsilon'");
  Overrides ov;
  if (j.contains("overridden")) {
    for (const auto& name : j.at("overridden")) {
      const std::string key = name.get<std::string>();
      if (!j.contains(key)) throw InputError("overridden field '" + key + "' has no value");
      ov[key] = j.at(key).get<double>();
    }
  }
  return resolve(j.at("epsilon").get<double>(), ov);
}

Json to_json(const FailureBudget& fb) {
  Json j;
  for (const auto& [name, v] : fb.items()) j[name] = v;
  j["gamma5a"] = fb.gamma5a;
  j["gamma5b"] = fb.gamma5b;
  j["sum"] = fb.sum;
  j["within_gamma"] = fb.within_gamma;
  return j;
}

Json to_json(const CandidatePair& c) {
  Json j;
  j["c1"] = c.c1;
  j["c2"] = c.c2;
  j["phase"] = static_cast<int>(c.provenance.phase);
  j["iter"] = c.provenance.iteration;
  j["copies"] = c.provenance.copies;
  j["subset_a"] = c.provenance.subset_a;
  j["subset_b"] = c.provenance.subset_b;
  return j;
}

Json to_json(const CandidateView& c) {
  Json j;
  j["c1"] = Json(std::vector<double>(c.c1.begin(), c.c1.end()));
  j["c2"] = Json(std::vector<double>(c.c2.begin(), c.c2.end()));
  j["phase"] = static_cast<int>(c.phase);
  j["iter"] = c.iteration;
  j["copies"] = c.copies;
  j["subset_a"] = Json(std::vector<std::uint32_t>(c.subset_a.begin(), c.subset_a.end()));
  j["subset_b"] = Json(std::vector<std::uint32_t>(c.subset_b.begin(), c.subset_b.end()));
  return j;
}

CandidatePair candidate_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("c1") || !j.contains("c2")) throw InputError("candidate line needs c1 and c2");
  CandidatePair c;
  c.c1 = j.at("c1").get<std::vector<double>>();
  c.c2 = j.at("c2").get<std::vector<double>>();
  const int phase = j.value("phase", 1);
  if (phase != 1 && phase != 2) throw InputError("candidate phase must be 1 or 2");
  c.provenance.phase = static_cast<Phase>(phase);
  c.provenance.iteration = j.value("iter", -1);
  c.provenance.copies = j.value("copies", 0u);
  if (j.contains("subset_a")) c.provenance.subset_a = j.at("subset_a").get<std::vector<std::uint32_t>>();
  if (j.contains("subset_b")) c.provenance.subset_b = j.at("subset_b").get<std::vector<std::uint32_t>>();
  return c;
}

Json to_json(const SamplerReport& r, bool with_timings) {
  Json j;
  j["phase1"] = r.phase1_count;
  j["phase2"] = r.phase2_count;
  j["bare"] = r.bare_count;
  j["total"] = r.total();
  j["phase1_bound"] = r.phase1_bound;
  j["round_bound"] = r.round_bound;
  j["phase2_bound"] = r.round_bound * static_cast<double>(r.phase_iterations);
  j["iteration_bound"] = r.iteration_bound;
  j["phase_iterations"] = r.phase_iterations;
  j["truncated"] = r.truncated;
  if (with_timings) {
    j["wall_times"] = {{"sampling", r.sampling_seconds},
                       {"peeling", r.peel_seconds},
                       {"enumeration", r.enumerate_seconds}};
  }
  return j;
}

Json to_json(const PartitionResult& r) {
  Json j;
  j["feasible"] = r.feasible;
  j["cost"] = number_or_null(r.cost);
  j["assignment"] = r.assignment;
  if (!r.reason.empty()) j["reason"] = r.reason;
  return j;
}

Json to_json(const AnalysisProbe& p) {
  Json j;
  j["opt"] = p.opt;
  j["sigma_opt"] = p.sigma_opt;
  j["beta2"] = p.beta2;
  j["r2"] = p.r2;
  j["ball_size"] = p.ball.size();
  j["P1_size"] = p.p1_size;
  j["P2_size"] = p.p2_size;
  j["P2_in_size"] = p.p2_in_size;
  j["P2_out_size"] = p.p2_out_size;
  j["outside_ball"] = p.outside_ball;
  j["case"] = static_cast<int>(p.case_tag);
  j["outside_ratio"] = p.outside_ratio ? Json(*p.outside_ratio) : Json(nullptr);
  return j;
}

Json to_json(const LemmaReport& r) {
  Json j;
  j["probe"] = to_json(r.probe);
  j["c1_quality"] = r.c1_quality;
  j["c2_closeness"] = r.c2_closeness;
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"lhs", number_or_null(c.lhs)},
                      {"rhs", number_or_null(c.rhs)},
                      {"pass", c.pass},
                      {"vacuous", c.vacuous},
                      {"hypothesis", c.hypothesis}});
  j["checks"] = checks;
  j["failures"] = r.failures();
  j["ok"] = r.ok();
  return j;
}

Json to_json(const IdentityReport& r) {
  Json j;
  j["splits"] = r.splits;
  j["mismatches"] = r.mismatches;
  j["max_abs_error"] = r.max_abs_error;
  j["max_bisection"] = r.max_bisection;
  j["predicted_min"] = r.predicted_min;
  j["min_balanced_cost"] = r.min_balanced_cost;
  j["exact_min"] = r.exact_min;
  j["pass"] = r.pass;
  return j;
}

Json to_json(const ExtensionParams& x) {
  Json j;
  j["k"] = x.k;
  j["epsilon"] = x.epsilon;
  j["mu1"] = x.mu1;
  j["mu2"] = x.mu2;
  j["mu3"] = x.mu3;
  j["gamma_star"] = x.gamma_star;
  j["delta_eps"] = x.delta_eps;
  j["d1"] = x.d1;
  j["d2"] = x.d2;
  j["delta2"] = x.delta2;
  j["M"] = x.M;
  j["N_a"] = x.N_a;
  j["N_b"] = x.N_b;
  j["overridden"] = x.overridden;
  return j;
}

Json to_json(const FrameworkReport& r) {
  Json j;
  j["prefix_pairs"] = r.prefix_pairs;
  j["prefixes"] = r.prefixes;
  j["prefix_bound"] = r.prefix_bound;
  j["truncated"] = r.truncated;
  j["tuples"] = r.tuples;
  j["failed_prefixes"] = r.failed_prefixes;
  j["log"] = r.log;
  return j;
}

}  // namespace ckm

#include "ckm/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ckm/errors.hpp"

namespace ckm {

namespace {

bool leq(double lhs, double rhs) { return lhs <= rhs + 1e-12 * std::max(1.0, std::fabs(rhs)); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

class Resolver {
 public:
  explicit Resolver(const Overrides& ov) : ov_(ov) {}

  double pick(const std::string& name, double derived) {
    auto it = ov_.find(name);
    if (it == ov_.end()) return derived;
    overridden_.push_back(name);
    return it->second;
  }
  bool has(const std::string& name) const { return ov_.count(name) != 0; }
  std::vector<std::string> take_overridden() { return std::move(overridden_); }

 private:
  const Overrides& ov_;
  std::vector<std::string> overridden_;
};

void require_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) throw InputError(std::string(name) + " must lie in (0, 1), got " + fmt(v));
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string(name) + " must be positive and finite, got " + fmt(v));
}

void require_count(double v, const char* name) {
  if (!(v >= 1.0) || std::floor(v) != v) throw InputError(std::string(name) + " must be a positive integer, got " + fmt(v));
}

}  // namespace

const std::vector<std::string>& overridable_fields() {
  static const std::vector<std::string> fields = {
      "gamma", "delta", "d1",     "d2",     "delta2", "d4",       "gamma_star", "gamma_5b", "eta", "alpha1",
      "alpha6", "alpha5", "alpha2", "M",    "varsigma", "delta1", "N_a",        "N_b",      "N_2"};
  return fields;
}

ParameterSet resolve(double epsilon, const Overrides& overrides, bool require_faithful) {
  require_open_unit(epsilon, "epsilon");
  const auto& known = overridable_fields();
  for (const auto& [key, value] : overrides) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw InputError("unknown parameter override '" + key + "'");
    if (!std::isfinite(value)) throw InputError("override '" + key + "' is not finite");
  }

  Resolver r(overrides);
  ParameterSet ps;
  ps.epsilon = epsilon;
  ps.gamma = r.pick("gamma", 1.0 / 3.0);
  require_open_unit(ps.gamma, "gamma");
  ps.delta = r.pick("delta", 0.1);
  require_open_unit(ps.delta, "delta");
  ps.d1 = r.pick("d1", ps.delta);
  require_positive(ps.d1, "d1");
  ps.d2 = r.pick("d2", 4.0);
  require_positive(ps.d2, "d2");
  // Largest delta2 with (1 + 2 delta2) d2 <= d2 + delta, kept in (0, 1/2].
  ps.delta2 = r.pick("delta2", std::min(ps.delta / (2.0 * ps.d2), 0.5));
  require_open_unit(ps.delta2, "delta2");
  ps.d4 = r.pick("d4", (10.0 + 18.0 * ps.delta) / (ps.delta2 * ps.delta2) * (1.0 / ps.gamma + std::log(1.0 / ps.gamma)));
  require_positive(ps.d4, "d4");
  ps.gamma_star = r.pick("gamma_star", 0.5 - ps.delta);
  require_positive(ps.gamma_star, "gamma_star");
  ps.gamma_5b = r.pick("gamma_5b", ps.gamma / 12.0);
  require_positive(ps.gamma_5b, "gamma_5b");
  ps.eta = r.pick("eta", ps.delta / 2.0);
  require_open_unit(ps.eta, "eta");
  ps.alpha1 = r.pick("alpha1", 5.0);
  require_positive(ps.alpha1, "alpha1");
  ps.alpha6 = r.pick("alpha6", ps.gamma_star * ps.d4 / 12.0);
  require_positive(ps.alpha6, "alpha6");
  ps.alpha5 = r.pick("alpha5", 4.0 / (1.0 - ps.delta - 4.0 / ps.alpha6));
  require_positive(ps.alpha5, "alpha5");
  ps.alpha2 = r.pick("alpha2", 2.0 * ps.alpha1 * ps.alpha5 + ps.delta);
  require_positive(ps.alpha2, "alpha2");
  ps.M = r.pick("M", std::ceil(ps.d4 / epsilon));
  require_count(ps.M, "M");

  // (1 + varsigma)(1 + 2 delta1) <= slack; each factor gets sqrt(slack) by default.
  const double slack = 1.0 + (ps.delta / 2.0) / ps.alpha2;
  const double half = std::sqrt(slack) - 1.0;
  double varsigma = std::min(half, 0.5);
  double delta1 = std::min(half / 2.0, 0.5);
  if (r.has("varsigma") && !r.has("delta1")) {
    const double admissible = (slack / (1.0 + overrides.at("varsigma")) - 1.0) / 2.0;
    if (admissible > 0.0) delta1 = std::min(admissible, 0.5);
  } else if (r.has("delta1") && !r.has("varsigma")) {
    const double admissible = slack / (1.0 + 2.0 * overrides.at("delta1")) - 1.0;
    if (admissible > 0.0) varsigma = std::min(admissible, 0.5);
  }
  ps.varsigma = r.pick("varsigma", varsigma);
  require_positive(ps.varsigma, "varsigma");
  ps.delta1 = r.pick("delta1", delta1);
  require_open_unit(ps.delta1, "delta1");

  ps.N_a = r.pick("N_a", std::ceil(ps.d2 * ps.M));
  require_count(ps.N_a, "N_a");
  ps.N_b = r.pick("N_b", std::ceil(ps.M / ((1.0 - ps.delta2) * std::pow(epsilon, 1.0 + ps.d1))));
  require_count(ps.N_b, "N_b");
  ps.N_2 = r.pick("N_2", std::ceil(ps.M * (1.0 + ps.varsigma) * (ps.alpha2 / (epsilon * epsilon)) / (1.0 - ps.delta1)));
  require_count(ps.N_2, "N_2");

  ps.alpha6_floor = ps.gamma_star * (10.0 * 4.0 * 3.0) / 12.0;
  ps.thresholds = epsilon_thresholds(ps);
  ps.overridden = r.take_overridden();
  ps.violations = check_consistency(ps);
  ps.faithful = ps.overridden.empty() && ps.violations.empty();

  if (require_faithful && !ps.violations.empty()) {
    std::string msg = "parameter consistency violated:";
    for (const auto& v : ps.violations) msg += " [" + v + "]";
    throw ValidationError(msg);
  }
  return ps;
}

std::vector<std::string> check_consistency(const ParameterSet& ps) {
  std::vector<std::string> out;
  const double lhs5 = (1.0 + 2.0 * ps.delta2) * ps.d2;
  if (!leq(lhs5, ps.d2 + ps.delta))
    out.push_back("(1+2*delta2)*d2 <= d2+delta: " + fmt(lhs5) + " > " + fmt(ps.d2 + ps.delta));
  const double lhs20 = (1.0 + ps.varsigma) * (1.0 + 2.0 * ps.delta1) * ps.alpha2;
  if (!leq(lhs20, ps.alpha2 + ps.delta / 2.0))
    out.push_back("(1+varsigma)*(1+2*delta1)*alpha2 <= alpha2+delta/2: " + fmt(lhs20) + " > " +
                  fmt(ps.alpha2 + ps.delta / 2.0));
  if (!(ps.alpha6 >= 4.0)) out.push_back("alpha6 >= 4: alpha6 = " + fmt(ps.alpha6));
  if (!(ps.alpha6 >= ps.alpha6_floor))
    out.push_back("alpha6 >= gamma_star*120/12: " + fmt(ps.alpha6) + " < " + fmt(ps.alpha6_floor));
  const double sum = 4.0 / ps.alpha6 + 4.0 / ps.alpha5;
  if (std::fabs(sum - (1.0 - ps.delta)) > 1e-12)
    out.push_back("4/alpha6 + 4/alpha5 = 1-delta6: " + fmt(sum) + " != " + fmt(1.0 - ps.delta));
  if (ps.delta2 > 0.5) out.push_back("delta2 <= 1/2: delta2 = " + fmt(ps.delta2));
  if (ps.varsigma > 0.5) out.push_back("varsigma <= 1/2: varsigma = " + fmt(ps.varsigma));
  if (ps.delta1 > 0.5) out.push_back("delta1 <= 1/2: delta1 = " + fmt(ps.delta1));
  if (ps.N_a < ps.M) out.push_back("N_a >= M");
  if (ps.N_b < ps.M) out.push_back("N_b >= M");
  if (ps.N_2 < ps.M) out.push_back("N_2 >= M");
  return out;
}

EpsilonThresholds epsilon_thresholds(const ParameterSet& ps) {
  EpsilonThresholds t;
  t.eps0 = std::pow((ps.gamma / 12.0) / ps.d4, 1.0 / ps.d1);
  t.eps1 = ps.delta;
  t.eps2 = ps.delta1 * ps.delta1 * ps.d4 / (2.0 * (1.0 - ps.delta1) * std::log(12.0 / ps.gamma));
  t.delta0 = std::min({t.eps0, t.eps1, t.eps2});
  return t;
}

FailureBudget failure_budget(const ParameterSet& ps) {
  FailureBudget b;
  b.gamma1 = std::exp(-ps.delta2 * ps.delta2 * ps.d2 * ps.M / 4.0);
  b.gamma2 = std::exp(-(ps.delta2 * ps.delta2 / 2.0) * ps.M / (1.0 - ps.delta2));
  b.gamma3 = std::pow(ps.epsilon, ps.d1) * ps.d4;
  b.gamma4 = ps.gamma / 12.0;
  b.gamma5a = std::exp(-ps.delta1 * ps.delta1 * (ps.M / (1.0 - ps.delta1)) / 2.0);
  b.gamma5b = ps.gamma_5b;
  b.gamma5 = b.gamma5a + b.gamma5b;
  b.sum = b.gamma1 + b.gamma2 + b.gamma3 + b.gamma4 + b.gamma5;
  b.within_gamma = b.sum <= ps.gamma;
  return b;
}

std::vector<std::pair<std::string, double>> FailureBudget::items() const {
  return {{"gamma1", gamma1}, {"gamma2", gamma2}, {"gamma3", gamma3}, {"gamma4", gamma4}, {"gamma5", gamma5}};
}

std::uint64_t as_count(double value, const char* name, std::uint64_t limit) {
  if (!(value >= 0.0) || std::floor(value) != value || value > static_cast<double>(limit))
    throw InputError(std::string(name) + " = " + fmt(value) + " is not a usable count (limit " + std::to_string(limit) +
                     "); override it for desk-scale runs");
  return static_cast<std::uint64_t>(value);
}

}  // namespace ckm

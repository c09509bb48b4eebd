// ckm: command-line harness for the constrained 2-means candidate sampler.
//
// Exit codes: 0 success, 1 a checked condition failed, 2 bad input.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ckm/constraints.hpp"
#include "ckm/errors.hpp"
#include "ckm/extension.hpp"
#include "ckm/io.hpp"
#include "ckm/json.hpp"
#include "ckm/oracle.hpp"
#include "ckm/params.hpp"
#include "ckm/reduction.hpp"
#include "ckm/sampler.hpp"

namespace fs = std::filesystem;
using namespace ckm;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kBadInput = 2;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Common {
  double epsilon = 0.3;
  std::uint64_t seed = 1;
  std::string constraint = "none";
  std::optional<double> M, N_a, N_b, N_2;
  std::vector<std::string> overrides;  // key=value
  std::optional<std::uint64_t> cap;
  unsigned threads = 1;
  std::string out;
  bool timings = false;
};

void add_param_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--epsilon", c.epsilon, "accuracy in (0, 1)")->capture_default_str();
  cmd->add_option("--override-M", c.M, "override M");
  cmd->add_option("--override-Na", c.N_a, "override N_a");
  cmd->add_option("--override-Nb", c.N_b, "override N_b");
  cmd->add_option("--override-N2", c.N_2, "override N_2");
  cmd->add_option("--override", c.overrides, "override any field, key=value (repeatable)");
}

Overrides collect_overrides(const Common& c) {
  Overrides ov;
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InputError("--override expects key=value, got '" + kv + "'");
    try {
      ov[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw InputError("--override value in '" + kv + "' is not a number");
    }
  }
  if (c.M) ov["M"] = *c.M;
  if (c.N_a) ov["N_a"] = *c.N_a;
  if (c.N_b) ov["N_b"] = *c.N_b;
  if (c.N_2) ov["N_2"] = *c.N_2;
  return ov;
}

void emit(const Json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << j.dump(2) << '\n';
}

Json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(f);
  } catch (const Json::exception& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::vector<int> read_labels(const std::string& path, std::size_t n) {
  const Json j = read_json(path);
  if (!j.contains("labels")) throw InputError("'" + path + "' has no 'labels' array");
  auto labels = j.at("labels").get<std::vector<int>>();
  if (labels.size() != n) throw InputError("label count does not match the point file");
  return labels;
}

std::string sidecar_path(const std::string& points) {
  fs::path p(points);
  p.replace_extension(".json");
  return p.string();
}

Vector parse_vector(const std::string& s) {
  Vector v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InputError("'" + s + "' is not a comma-separated vector");
    }
  }
  return v;
}

Json ratio_json(double best, double opt) {
  if (opt > 0.0) return best / opt;
  return best == 0.0 ? Json(1.0) : Json(nullptr);
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  MixtureSpec spec;
  std::uint64_t seed = 1;
  std::string out;
  std::string labels;
};

int cmd_gen(const GenArgs& a) {
  const MixtureInstance inst = generate_mixture(a.spec, a.seed);
  const std::string labels_path = a.labels.empty() ? sidecar_path(a.out) : a.labels;
  save_points(a.out, inst.points);
  Json j;
  j["n"] = a.spec.n;
  j["d"] = a.spec.d;
  j["k"] = a.spec.k;
  j["seed"] = a.seed;
  j["separation"] = a.spec.separation;
  j["sigma"] = a.spec.sigma;
  j["sizes"] = inst.sizes;
  j["centers"] = inst.centers;
  j["labels"] = inst.labels;
  emit(j, labels_path);
  return kOk;
}

// ---------------------------------------------------------------- run

struct RunArgs {
  Common c;
  std::string points;
  std::string params_file;
  std::string candidates_out;
  std::string oracle = "auto";
  std::size_t trials = 1;
  bool no_vibrate = false;
};

int cmd_run(const RunArgs& a) {
  const PointSet p = load_points(a.points);
  const ConstraintSpec spec = ConstraintSpec::parse(a.c.constraint);
  ParameterSet ps;
  if (a.params_file.empty()) {
    ps = resolve(a.c.epsilon, collect_overrides(a.c));
  } else {
    // Command-line overrides win over the file.
    Json j = read_json(a.params_file);
    for (const auto& [key, v] : collect_overrides(a.c)) {
      j[key] = v;
      if (!j.contains("overridden")) j["overridden"] = Json::array();
      j["overridden"].push_back(key);
    }
    ps = params_from_json(j);
  }
  if (a.trials < 1) throw InputError("--trials must be at least 1");

  std::optional<double> opt;
  double oracle_seconds = 0.0;
  const bool want_oracle = a.oracle == "on" || (a.oracle == "auto" && p.size() <= kBruteOpt2Limit);
  if (a.oracle != "on" && a.oracle != "off" && a.oracle != "auto") throw InputError("--oracle must be on, off or auto");
  if (want_oracle) {
    const auto t0 = Clock::now();
    const ExactSolution s = brute_opt2(p, spec);
    oracle_seconds = since(t0);
    if (!s.feasible) throw InfeasibleError("no feasible 2-partition exists under " + spec.str());
    opt = s.cost;
  }

  std::ofstream cand_file;
  if (!a.candidates_out.empty()) {
    cand_file.open(a.candidates_out, std::ios::binary);
    if (!cand_file) throw InputError("cannot write '" + a.candidates_out + "'");
  }

  Json trials = Json::array();
  std::size_t successes = 0;
  for (std::size_t t = 0; t < a.trials; ++t) {
    const std::uint64_t seed = a.c.seed + t;
    SamplerOptions so;
    so.cap = a.c.cap;
    so.vibrate = !a.no_vibrate;
    CandidateEvaluator ev(p, spec, a.c.threads);
    auto sink = ev.sink();
    const bool dump = cand_file.is_open() && t == 0;
    const auto t0 = Clock::now();
    const SamplerReport rep = run_2means(p, ps, seed, so, [&](const CandidateView& v) {
      if (dump) cand_file << to_json(v).dump() << '\n';
      sink(v);
    });
    const auto t1 = Clock::now();
    const Evaluation best = ev.finish();
    const double eval_seconds = since(t1);
    const double total_seconds = since(t0);

    Json j;
    j["seed"] = seed;
    j["best_cost"] = best.result.cost;
    j["best_pair"] = to_json(best.best);
    j["best_index"] = best.index;
    j["feasible_candidates"] = best.feasible;
    if (opt) {
      j["opt_cost"] = *opt;
      j["ratio"] = ratio_json(best.result.cost, *opt);
      const bool ok = j["ratio"].is_number() && j["ratio"].get<double>() <= 1.0 + ps.epsilon;
      j["success"] = ok;
      successes += ok;
    }
    j["candidate_counts"] = to_json(rep, false);
    j["phase_iterations"] = rep.phase_iterations;
    if (a.c.timings) {
      Json w = to_json(rep, true)["wall_times"];
      w["evaluation"] = eval_seconds;
      w["total"] = total_seconds;
      if (opt) w["oracle"] = oracle_seconds;
      j["wall_times"] = w;
    }
    trials.push_back(j);
  }

  Json out;
  if (a.trials == 1) {
    out = trials[0];
  } else {
    out["trials"] = trials;
    if (opt) out["success_rate"] = static_cast<double>(successes) / static_cast<double>(a.trials);
  }
  out["constraint"] = spec.str();
  out["n"] = p.size();
  out["d"] = p.dim();
  out["params_echo"] = to_json(ps);
  emit(out, a.c.out);
  return kOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string points;
  std::string candidates;
  std::string constraint = "none";
  unsigned threads = 1;
  std::string out;
};

int cmd_eval(const EvalArgs& a) {
  const PointSet p = load_points(a.points);
  const ConstraintSpec spec = ConstraintSpec::parse(a.constraint);
  std::ifstream f(a.candidates);
  if (!f) throw InputError("cannot open '" + a.candidates + "'");
  std::vector<CandidatePair> cands;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      cands.push_back(candidate_from_json(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw InputError("candidate line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  const Evaluation e = evaluate_candidates(p, cands, spec, a.threads);
  Json j;
  j["best_index"] = e.index;
  j["best_pair"] = to_json(e.best);
  j["best_cost"] = e.result.cost;
  j["result"] = to_json(e.result);
  j["evaluated"] = e.evaluated;
  j["feasible"] = e.feasible;
  j["constraint"] = spec.str();
  emit(j, a.out);
  return kOk;
}

// ---------------------------------------------------------------- params

struct ParamsArgs {
  Common c;
  bool require_faithful = false;
};

int cmd_params(const ParamsArgs& a) {
  const ParameterSet ps = resolve(a.c.epsilon, collect_overrides(a.c), a.require_faithful);
  Json j = to_json(ps);
  j["failure_budget"] = to_json(failure_budget(ps));
  emit(j, a.c.out);
  return ps.violations.empty() ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- reduce

struct ReduceArgs {
  std::string graph;
  bool pad = false;
  std::string points_out;
  std::string verify = "auto";
  std::string out;
};

int cmd_reduce(const ReduceArgs& a) {
  std::ifstream f(a.graph);
  if (!f) throw InputError("cannot open graph '" + a.graph + "'");
  GraphInstance g = GraphInstance::parse(f);
  Json j;
  j["n_vertices"] = g.n_vertices;
  j["edges"] = g.edges.size();
  if (g.n_vertices % 2 != 0) {
    if (!a.pad) throw InputError("graph has an odd number of vertices; pass --pad to add an isolated vertex");
    g = pad_vertex(g);
    j["padded"] = true;
  }
  const PointSet pts = reduce_to_points(g);
  j["dim"] = pts.dim();
  if (!a.points_out.empty()) save_points(a.points_out, pts);
  bool ok = true;
  const bool verify = a.verify == "on" || (a.verify == "auto" && g.n_vertices <= kIdentityLimit);
  if (a.verify != "on" && a.verify != "off" && a.verify != "auto") throw InputError("--verify must be on, off or auto");
  if (verify) {
    const IdentityReport rep = verify_identity(g);
    j["identity"] = to_json(rep);
    ok = rep.pass;
  } else if (g.n_vertices <= kBisectionLimit) {
    j["max_bisection"] = max_bisection_bruteforce(g).cut;
  }
  emit(j, a.out);
  return ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- lemmas

struct LemmaArgs {
  Common c;
  std::string points;
  std::string labels;
  std::string c1, c2;
};

int cmd_lemmas(const LemmaArgs& a) {
  const PointSet p = load_points(a.points);
  const std::vector<int> labels = read_labels(a.labels.empty() ? sidecar_path(a.points) : a.labels, p.size());
  const ParameterSet ps = resolve(a.c.epsilon, collect_overrides(a.c));
  // Defaults: the centroid of the larger cluster for c1, c2 = c1.
  Vector c1, c2;
  if (a.c1.empty()) {
    std::vector<std::uint32_t> big, small;
    std::size_t ones = 0;
    for (int l : labels) ones += l == 1;
    const int larger = ones > labels.size() - ones ? 1 : 0;
    for (std::uint32_t i = 0; i < labels.size(); ++i) (labels[i] == larger ? big : small).push_back(i);
    if (big.empty()) throw InputError("ground truth has an empty cluster");
    c1 = centroid(p, big);
  } else {
    c1 = parse_vector(a.c1);
  }
  c2 = a.c2.empty() ? c1 : parse_vector(a.c2);
  const LemmaReport rep = check_case_lemmas(p, labels, c1, c2, ps);
  Json j = to_json(rep);
  j["c1"] = c1;
  j["c2"] = c2;
  j["epsilon"] = ps.epsilon;
  emit(j, a.c.out);
  return rep.ok() ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- extend

struct ExtendArgs {
  Common c;
  std::string points;
  std::string labels;
  std::string extension = "greedy";
  int k = 2;
};

int cmd_extend(const ExtendArgs& a) {
  const PointSet p = load_points(a.points);
  const ConstraintSpec spec = ConstraintSpec::parse(a.c.constraint);
  Overrides xov;
  for (const auto& [key, v] : collect_overrides(a.c)) {
    if (key != "M" && key != "N_a" && key != "N_b") throw InputError("extend accepts only M, N_a and N_b overrides");
    xov[key] = v;
  }
  const ExtensionParams xp = extension_params(a.k, a.c.epsilon, xov);
  ExtensionSettings settings;
  settings.spec = spec;
  settings.sampler.cap = a.c.cap;
  Overrides two;
  two["M"] = xp.M;
  settings.two_means = resolve(a.c.epsilon, two);
  const ExtensionAlgorithm ext = make_extension(a.extension, settings);

  FrameworkOptions fo;
  fo.cap = a.c.cap;
  TupleEvaluator ev(p, spec);
  const auto t0 = Clock::now();
  const FrameworkReport rep = run_kmeans_framework(p, ext, xp, a.c.seed, fo, ev.sink());
  const double seconds = since(t0);
  if (!ev.found()) throw InfeasibleError("no tuple admits a feasible partition under " + spec.str());

  Json j;
  j["extension"] = ext.name;
  j["seed"] = a.c.seed;
  j["best_cost"] = ev.result().cost;
  j["best_tuple"] = ev.best();
  j["framework"] = to_json(rep);
  j["params"] = to_json(xp);
  if (!a.labels.empty() || fs::exists(sidecar_path(a.points))) {
    if (p.size() <= kBruteOptKLimit) {
      const ExactSolution s = brute_optk(p, a.k, spec);
      if (s.feasible) {
        j["opt_cost"] = s.cost;
        j["ratio"] = ratio_json(ev.result().cost, s.cost);
      }
    }
  }
  if (a.c.timings) j["wall_times"] = {{"total", seconds}};
  emit(j, a.c.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Candidate-center sampler for constrained 2-means, with exact oracles and the bisection reduction"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "write a seeded Gaussian-mixture instance");
  g->add_option("--n", gen.spec.n, "number of points")->capture_default_str();
  g->add_option("--d", gen.spec.d, "dimension")->capture_default_str();
  g->add_option("--k", gen.spec.k, "clusters")->capture_default_str();
  g->add_option("--separation", gen.spec.separation, "minimum center distance in sigmas")->capture_default_str();
  g->add_option("--sigma", gen.spec.sigma, "within-cluster standard deviation")->capture_default_str();
  g->add_option("--weights", gen.spec.weights, "mixing weights")->delimiter(',');
  g->add_option("--sizes", gen.spec.sizes, "exact cluster sizes")->delimiter(',');
  g->add_flag("--balanced", gen.spec.balanced, "equal cluster sizes");
  g->add_option("--seed", gen.seed, "random seed")->required();
  g->add_option("--out", gen.out, "point CSV path")->required();
  g->add_option("--labels", gen.labels, "sidecar JSON path (default: <out>.json)");

  RunArgs run;
  auto* r = app.add_subcommand("run", "sample candidates, pick the best, compare with the exact optimum");
  r->add_option("points", run.points, "point CSV")->required();
  add_param_flags(r, run.c);
  r->add_option("--params", run.params_file, "parameter JSON (as written by 'params')");
  r->add_option("--seed", run.c.seed, "random seed")->required();
  r->add_option("--constraint", run.c.constraint, "none | balanced:c=.. | size:lo=..,hi=..")->capture_default_str();
  r->add_option("--cap", run.c.cap, "max candidates per enumeration block");
  r->add_option("--trials", run.trials, "repeat with seeds seed, seed+1, ...")->capture_default_str();
  r->add_option("--threads", run.c.threads, "evaluation threads")->capture_default_str();
  r->add_option("--oracle", run.oracle, "exact optimum: auto (n <= 20) | on | off")->capture_default_str();
  r->add_option("--candidates", run.candidates_out, "write the first trial's candidates as JSONL");
  r->add_flag("--no-vibrate", run.no_vibrate, "peel from the raw first center");
  r->add_flag("--timings", run.c.timings, "include wall times (output no longer byte-stable)");
  r->add_option("--out", run.c.out, "result JSON path (default stdout)");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "evaluate a JSONL candidate list");
  e->add_option("points", ev.points, "point CSV")->required();
  e->add_option("--candidates", ev.candidates, "JSONL candidates")->required();
  e->add_option("--constraint", ev.constraint, "constraint")->capture_default_str();
  e->add_option("--threads", ev.threads, "evaluation threads")->capture_default_str();
  e->add_option("--out", ev.out, "result JSON path");

  ParamsArgs pa;
  auto* pc = app.add_subcommand("params", "resolve and check every constant for one epsilon");
  add_param_flags(pc, pa.c);
  pc->add_flag("--require-faithful", pa.require_faithful, "fail on any violated condition");
  pc->add_option("--out", pa.c.out, "JSON path");

  ReduceArgs ra;
  auto* rc = app.add_subcommand("reduce", "embed a graph as points and verify the bisection cost identity");
  rc->add_option("--graph", ra.graph, "edge-list file")->required();
  rc->add_flag("--pad", ra.pad, "add an isolated vertex when n is odd");
  rc->add_option("--points-out", ra.points_out, "write the embedded points as CSV");
  rc->add_option("--verify", ra.verify, "auto (n <= 12) | on | off")->capture_default_str();
  rc->add_option("--out", ra.out, "report JSON path");

  LemmaArgs la;
  auto* lc = app.add_subcommand("lemmas", "check the case-analysis inequalities on one instance");
  lc->add_option("points", la.points, "point CSV")->required();
  lc->add_option("--labels", la.labels, "ground-truth JSON (default: sidecar)");
  add_param_flags(lc, la.c);
  lc->add_option("--c1", la.c1, "first center, comma-separated (default: larger cluster centroid)");
  lc->add_option("--c2", la.c2, "second center (default: c1)");
  lc->add_option("--out", la.c.out, "report JSON path");

  ExtendArgs xa;
  auto* xc = app.add_subcommand("extend", "run the k-means prefix framework with a named extension");
  xc->add_option("points", xa.points, "point CSV")->required();
  xc->add_option("--k", xa.k, "clusters")->capture_default_str();
  add_param_flags(xc, xa.c);
  xc->add_option("--extension", xa.extension, "brute | greedy | two-means-peel")->capture_default_str();
  xc->add_option("--seed", xa.c.seed, "random seed")->required();
  xc->add_option("--constraint", xa.c.constraint, "constraint")->capture_default_str();
  xc->add_option("--cap", xa.c.cap, "max prefix pairs");
  xc->add_option("--labels", xa.labels, "ground truth (enables the exact comparison)");
  xc->add_flag("--timings", xa.c.timings, "include wall time");
  xc->add_option("--out", xa.c.out, "result JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kBadInput;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*r) return cmd_run(run);
    if (*e) return cmd_eval(ev);
    if (*pc) return cmd_params(pa);
    if (*rc) return cmd_reduce(ra);
    if (*lc) return cmd_lemmas(la);
    if (*xc) return cmd_extend(xa);
  } catch (const InputError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kBadInput;
  } catch (const ValidationError& err) {
    std::cerr << "check failed: " << err.what() << '\n';
    return kCheckFailed;
  } catch (const InfeasibleError& err) {
    std::cerr << "infeasible: " << err.what() << '\n';
    return kCheckFailed;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kCheckFailed;
  }
  return kBadInput;
}

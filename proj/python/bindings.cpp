#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ckm/constraints.hpp"
#include "ckm/errors.hpp"
#include "ckm/geometry.hpp"
#include "ckm/json.hpp"
#include "ckm/oracle.hpp"
#include "ckm/params.hpp"
#include "ckm/reduction.hpp"
#include "ckm/sampler.hpp"

namespace py = pybind11;
using namespace ckm;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

PointSet to_points(const Array& a) {
  if (a.ndim() == 1) return PointSet(1, std::vector<double>(a.data(), a.data() + a.shape(0)));
  if (a.ndim() != 2) throw InputError("points must be a 1-d or 2-d array");
  const auto n = static_cast<std::size_t>(a.shape(0)), d = static_cast<std::size_t>(a.shape(1));
  return PointSet(d, std::vector<double>(a.data(), a.data() + n * d));
}

Vector to_vector(const Array& a) {
  if (a.ndim() != 1) throw InputError("expected a 1-d array");
  return Vector(a.data(), a.data() + a.shape(0));
}

py::array_t<double> to_array(const Vector& v) {
  py::array_t<double> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> rows_array(const std::vector<Vector>& rows, std::size_t d) {
  py::array_t<double> out({static_cast<py::ssize_t>(rows.size()), static_cast<py::ssize_t>(d)});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) m(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = rows[i][j];
  return out;
}

// JSON text is parsed on the Python side into plain dicts.
std::string dump(const Json& j) { return j.dump(); }

GraphInstance graph(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
  return GraphInstance::make(n, edges);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Candidate-center sampler for constrained 2-means";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ArithmeticError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);

  m.def("f2", [](const Array& q, const Array& s) { return f2(to_vector(q), to_points(s)); });
  m.def("centroid", [](const Array& s) { return to_array(centroid(to_points(s))); });
  m.def("kth_largest_distance",
        [](const Array& q, const Array& s, std::size_t k) { return kth_largest_distance(to_vector(q), to_points(s), k); });
  m.def("vibrate", [](const Array& q, const Array& p, double eta, std::uint64_t seed) {
    Rng rng(seed);
    return to_array(vibrate(to_vector(q), to_points(p), eta, rng));
  });

  m.def("_resolve", [](double eps, const Overrides& ov, bool faithful) {
    const ParameterSet ps = resolve(eps, ov, faithful);
    Json j = to_json(ps);
    j["failure_budget"] = to_json(failure_budget(ps));
    return dump(j);
  });

  m.def(
      "_run_2means",
      [](const Array& pts, double eps, const Overrides& ov, std::uint64_t seed, std::optional<std::uint64_t> cap) {
        const PointSet p = to_points(pts);
        SamplerOptions so;
        so.cap = cap;
        const CandidateSet cs = run_2means(p, resolve(eps, ov), seed, so);
        std::vector<Vector> c1, c2;
        std::vector<int> phase, iteration;
        for (const auto& c : cs.pairs) {
          c1.push_back(c.c1);
          c2.push_back(c.c2);
          phase.push_back(static_cast<int>(c.provenance.phase));
          iteration.push_back(c.provenance.iteration);
        }
        return py::make_tuple(dump(to_json(static_cast<const SamplerReport&>(cs), false)), rows_array(c1, p.dim()),
                              rows_array(c2, p.dim()), phase, iteration);
      },
      py::arg("points"), py::arg("epsilon"), py::arg("overrides"), py::arg("seed"), py::arg("cap") = py::none());

  m.def("assign", [](const Array& pts, const Array& centers, const std::string& constraint) {
    const PointSet p = to_points(pts);
    const PointSet c = to_points(centers);
    std::vector<Vector> cv;
    for (std::size_t i = 0; i < c.size(); ++i) cv.emplace_back(c[i].begin(), c[i].end());
    const PartitionResult r = assign(p, cv, ConstraintSpec::parse(constraint));
    return py::make_tuple(r.assignment, r.cost, r.feasible);
  });

  m.def("brute_opt2", [](const Array& pts, const std::string& constraint) {
    const ExactSolution s = brute_opt2(to_points(pts), ConstraintSpec::parse(constraint));
    return py::make_tuple(s.labels, s.cost, s.feasible);
  });

  m.def("reduce_to_points", [](std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    const PointSet p = reduce_to_points(graph(n, edges));
    py::array_t<double> out({static_cast<py::ssize_t>(p.size()), static_cast<py::ssize_t>(p.dim())});
    std::copy(p.coords().begin(), p.coords().end(), out.mutable_data());
    return out;
  });
  m.def("max_bisection", [](std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    const Bisection b = max_bisection_bruteforce(graph(n, edges));
    return py::make_tuple(b.cut, b.side);
  });
  m.def("_verify_identity", [](std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    return dump(to_json(verify_identity(graph(n, edges))));
  });

  m.def("_check_case_lemmas", [](const Array& pts, const std::vector<int>& labels, const Array& c1, const Array& c2,
                                 double eps) {
    return dump(to_json(check_case_lemmas(to_points(pts), labels, to_vector(c1), to_vector(c2), resolve(eps))));
  });
}

// Python view of the library. Exact values cross the boundary as strings
// ("(3+√13)/2") or as (a, b) rational pairs in the (1, alpha) basis.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cusp/export.hpp"
#include "cusp/parse.hpp"
#include "cusp/tower.hpp"

namespace py = pybind11;
using namespace cusp;

namespace {

py::dict element(const QuadElem& z) {
  py::dict d;
  d["a"] = z.a().get_str();
  d["b"] = z.b().get_str();
  d["text"] = to_sqrt_string(z);
  d["value"] = to_double(z);
  return d;
}

std::vector<std::string> texts(const std::vector<QuadElem>& v) {
  std::vector<std::string> out;
  for (const auto& z : v) out.push_back(to_sqrt_string(z));
  return out;
}

py::dict unit(std::int64_t n) {
  const QuadElem eps = fundamental_unit(FieldCtx::make(n));
  py::dict d = element(eps);
  d["norm"] = norm(eps).get_num().get_si();
  d["eps_squared"] = to_linear_string(eps * eps, eps, "ε");
  return d;
}

py::list levels(std::int64_t n) {
  const Tower t = bifurcation_table(FieldCtx::make(n));
  py::list rows;
  for (const auto& e : t.events) {
    py::dict r;
    r["i"] = e.index;
    r["level"] = level_display(e.level, t.epsilon);
    r["k_squared"] = to_sqrt_string(e.level.k_squared());
    r["sides"] = texts({e.pair.z, e.pair.z_prime});
    rows.append(r);
  }
  return rows;
}

py::dict slice(std::int64_t n, const std::string& k_squared) {
  const FieldCtx ctx = FieldCtx::make(n);
  const TorusSlice s = dirichlet_slice(ctx, Level(parse_element(ctx, k_squared)));
  py::dict d;
  d["shape"] = std::string(to_string(s.shape));
  d["sides"] = texts(s.contributing);
  std::vector<std::pair<double, double>> pts;
  for (const auto& v : s.vertices) pts.emplace_back(to_double(v.x1), to_double(v.x2));
  d["vertices"] = pts;
  d["area_squared"] = slice_area_squared(s).get_str();
  return d;
}

py::tuple mesh(std::int64_t n, int subdivisions, bool linear) {
  const Mesh m = build_mesh(bifurcation_table(FieldCtx::make(n)), subdivisions,
                            linear ? PsiScale::Linear : PsiScale::LogEps);
  return py::make_tuple(m.vertices, m.faces);
}

py::dict verify(std::int64_t n, int samples) {
  const Tower t = bifurcation_table(FieldCtx::make(n));
  const VerifyReport r = check_tower(t, samples, 2 * default_coeff_bound(t.epsilon));
  py::dict d;
  d["ok"] = r.ok;
  d["events"] = r.events;
  d["levels_checked"] = r.levels_checked;
  d["mismatches"] = r.mismatches;
  return d;
}

}  // namespace

PYBIND11_MODULE(_cusp, m) {
  m.doc() = "cusp sections of Hilbert modular surfaces";
  py::register_exception<Error>(m, "CuspError", PyExc_ValueError);

  m.def("is_squarefree", &is_squarefree, py::arg("n"));
  m.def("fundamental_unit", &unit, py::arg("n"));
  m.def("side_list", [](std::int64_t n) { return texts(side_list(FieldCtx::make(n)).sides); }, py::arg("n"));
  m.def("levels", &levels, py::arg("n"));
  m.def("slice", &slice, py::arg("n"), py::arg("k_squared") = "1");
  m.def("tower_json", [](std::int64_t n) { return tower_to_json(bifurcation_table(FieldCtx::make(n))).dump(); },
        py::arg("n"));
  m.def("mesh", &mesh, py::arg("n"), py::arg("subdivisions") = 16, py::arg("linear") = false);
  m.def("verify", &verify, py::arg("n"), py::arg("samples") = 3);
}

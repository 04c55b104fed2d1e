// Python bindings. Regimes are passed as strings: "xxx", "eta=<complex>", "p=<int>".

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "xxz/census.hpp"
#include "xxz/chain.hpp"
#include "xxz/reference.hpp"
#include "xxz/repcount.hpp"

namespace py = pybind11;
using namespace xxz;

namespace {

py::object to_py(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null: return py::none();
    case nlohmann::json::value_t::boolean: return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer: return py::int_(j.get<long long>());
    case nlohmann::json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
    case nlohmann::json::value_t::number_float: return py::float_(j.get<double>());
    case nlohmann::json::value_t::string: return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      py::list l;
      for (const auto& e : j) l.append(to_py(e));
      return l;
    }
    default: {
      py::dict d;
      for (const auto& [k, v] : j.items()) d[py::str(k)] = to_py(v);
      return d;
    }
  }
}

AnisotropyRegime rg(const std::string& s) { return AnisotropyRegime::parse(s); }

py::dict solution_dict(const SolutionVector& s) {
  py::dict d;
  d["roots"] = s.roots;
  d["residual"] = s.residual;
  d["verdict"] = to_string(s.verdict);
  return d;
}

py::int_ big(const BigInt& b) { return py::int_(py::str(b.str())); }

}  // namespace

PYBIND11_MODULE(xxzbethe, m) {
  m.doc() = "Bethe-ansatz completeness for the U_q(sl2)-symmetric open XXZ chain";

  py::register_exception<BudgetExceeded>(m, "BudgetExceeded");

  m.def("count_generic", [](int N, int M) { return big(count_generic(N, M)); }, py::arg("N"), py::arg("M"));
  m.def("p2_count", [](int N, int M) { return big(p2_count(N, M)); }, py::arg("N"), py::arg("M"));
  m.def("tl_dim_d0", [](int N, int two_j, int p) { return big(tl_dim_d0(N, SpinLabel(two_j), p)); }, py::arg("N"),
        py::arg("two_j"), py::arg("p"));
  m.def("tilting_dim", [](int two_j, int p) { return tilting_dim(SpinLabel(two_j), p); }, py::arg("two_j"),
        py::arg("p"));
  m.def(
      "decomposition",
      [](int N, int p) {
        py::list out;
        for (const auto& e : (p == 0 ? decomposition_generic(N) : decomposition(N, p)).entries)
          out.append(py::make_tuple(e.spin.twoJ, big(e.multiplicity), e.dimension));
        return out;
      },
      py::arg("N"), py::arg("p") = 0, "[(2j, multiplicity, dimension)]; p = 0 for generic q");

  m.def(
      "solve",
      [](int N, int M, const std::string& regime, std::uint64_t seed, long long budget) {
        CensusOptions opt;
        opt.tracker.seed = seed;
        opt.budget = budget;
        const auto r = rg(regime);
        std::vector<SolutionVector> sols;
        {
          py::gil_scoped_release release;
          sols = measure_counts(N, r, opt, M).front().admissible;
        }
        py::list out;
        for (const auto& s : sols) out.append(solution_dict(s));
        return out;
      },
      py::arg("N"), py::arg("M"), py::arg("regime") = "xxx", py::arg("seed") = 1, py::arg("budget") = 20000,
      "admissible solutions, canonically sorted");
  m.def(
      "counts",
      [](int N, const std::string& regime, std::uint64_t seed, long long budget) {
        CensusOptions opt;
        opt.tracker.seed = seed;
        opt.budget = budget;
        const auto r = rg(regime);
        std::vector<long long> c;
        {
          py::gil_scoped_release release;
          for (const auto& mc : measure_counts(N, r, opt)) c.push_back(static_cast<long long>(mc.admissible.size()));
        }
        py::dict d;
        d["counts"] = c;
        d["row"] = count_row(N, r, c).render();
        return d;
      },
      py::arg("N"), py::arg("regime") = "xxx", py::arg("seed") = 1, py::arg("budget") = 20000);
  m.def("predicted_counts", [](int N, const std::string& regime) { return predicted_counts(N, rg(regime)); },
        py::arg("N"), py::arg("regime") = "xxx");
  m.def(
      "degeneracies",
      [](int N, const std::string& regime) {
        const auto r = rg(regime);
        std::vector<long long> d;
        {
          py::gil_scoped_release release;
          d = measured_degeneracies(run_tq(N, r));
        }
        py::dict out;
        out["degeneracies"] = d;
        out["row"] = degeneracy_row(N, r, d).render();
        return out;
      },
      py::arg("N"), py::arg("regime"));
  m.def("tq", [](int N, const std::string& regime) { return to_py(to_json(run_tq(N, rg(regime)))); }, py::arg("N"),
        py::arg("regime") = "xxx", "T-Q census: {regime, N, curves, problems}");

  m.def("hamiltonian", [](int N, const std::string& regime) { return hamiltonian(N, rg(regime)).m; }, py::arg("N"),
        py::arg("regime") = "xxx");
  m.def(
      "transfer_matrix", [](cplx u, int N, const std::string& regime) { return transfer_matrix(u, N, rg(regime)).m; },
      py::arg("u"), py::arg("N"), py::arg("regime") = "xxx");
  m.def(
      "hamiltonian_spectrum",
      [](int N, const std::string& regime) {
        return to_py(to_json(spectrum_sectors(operator_sectors(hamiltonian(N, rg(regime)).m, N), N)));
      },
      py::arg("N"), py::arg("regime") = "xxx");
  m.def(
      "distinct_counts",
      [](int N, const std::string& regime) {
        const auto d = distinct_eigenvalue_count(N, rg(regime));
        return py::make_tuple(d.transfer, d.hamiltonian);
      },
      py::arg("N"), py::arg("regime"), "(transfer, hamiltonian)");
  m.def(
      "structural_residuals",
      [](int N, const std::string& regime) {
        py::dict d;
        for (const auto& r : structural_residuals(N, rg(regime))) d[py::str(r.name)] = r.value;
        return d;
      },
      py::arg("N"), py::arg("regime") = "xxx");
  m.def(
      "verify_on_shell",
      [](const std::vector<cplx>& roots, int N, const std::string& regime) {
        const auto r = verify_on_shell(roots, N, rg(regime));
        py::dict d;
        d["ok"] = r.ok;
        d["eigen_residual"] = r.eigen_residual;
        d["splus"] = r.splus;
        d["failure"] = r.failure;
        return d;
      },
      py::arg("roots"), py::arg("N"), py::arg("regime") = "xxx");
  m.def(
      "energy", [](const std::vector<cplx>& roots, int N, const std::string& regime) {
        return energy(roots, N, rg(regime));
      },
      py::arg("roots"), py::arg("N"), py::arg("regime") = "xxx");
  m.def(
      "reference_solutions",
      [](const std::string& regime, int N, int M) {
        py::list out;
        for (const auto& s : reference_solutions(rg(regime), N, M)) out.append(py::cast(s.roots));
        return out;
      },
      py::arg("regime"), py::arg("N"), py::arg("M"), "tabulated root sets");
}

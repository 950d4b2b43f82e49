#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "catcluster/categorification.hpp"
#include "catcluster/cli.hpp"
#include "catcluster/transitions.hpp"
#include "catcluster/verify.hpp"

namespace py = pybind11;
using namespace catcluster;

namespace {

py::tuple run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
}

py::dict classify_py(const std::string& family, int n, const std::string& monomial) {
    auto ctx = family_context(parse_family(family, n));
    auto c = classify(parse_monomial(monomial), *ctx);
    py::dict d;
    d["real"] = c.real;
    d["m_delta"] = c.m_delta;
    d["gamma"] = c.gamma;
    d["certificate"] = c.certificate;
    if (c.real) d["cluster_monomial"] = format_monomial(c.cluster_monomial);
    return d;
}

std::string g_inverse_py(const std::string& family, int n, const std::vector<long long>& gamma) {
    auto ctx = family_context(parse_family(family, n));
    return format_monomial(G_inverse(standard_to_family(gamma, ctx->cfg), ctx->cfg));
}

std::vector<long long> transition_py(const std::string& type, const std::string& from, const std::string& to,
                                     const std::vector<long long>& tuple) {
    auto t = parse_finite_type(type);
    return transition_tuple(t, parse_word(from, t), parse_word(to, t), tuple);
}

std::vector<py::dict> verify_py(const std::string& filter, uint64_t rng_seed) {
    std::vector<py::dict> rows;
    for (auto& r : run_suite(filter, {rng_seed, std::nullopt})) {
        py::dict d;
        d["id"] = r.id;
        d["criterion"] = r.criterion;
        d["pass"] = r.pass;
        d["counterexample"] = r.counterexample;
        rows.push_back(d);
    }
    return rows;
}

}  // namespace

PYBIND11_MODULE(_catcluster, m) {
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);
    m.def("run_cli", &run_cli, py::arg("args"), "Run the command line tool; returns (exit code, stdout, stderr).");
    m.def("classify", &classify_py, py::arg("family"), py::arg("n"), py::arg("monomial"));
    m.def("g_inverse", &g_inverse_py, py::arg("family"), py::arg("n"), py::arg("gamma"),
          "Monomial attached to a root-lattice vector in standard labels.");
    m.def("transition", &transition_py, py::arg("type"), py::arg("source"), py::arg("target"), py::arg("tuple"));
    m.def("verify", &verify_py, py::arg("filter") = "*", py::arg("rng_seed") = 0);
}

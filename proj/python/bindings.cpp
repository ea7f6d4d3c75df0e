#include "qsg/agw.hpp"
#include "qsg/catalog.hpp"
#include "qsg/suites.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

namespace py = pybind11;

namespace {

py::dict toDict(const qsg::CheckReport& r) {
    py::dict d;
    d["check"] = r.check;
    d["anchor"] = r.anchor;
    d["fixture"] = r.fixture;
    d["verdict"] = qsg::verdictName(r.verdict);
    d["samples"] = r.samples;
    d["indeterminate"] = r.indeterminate;
    d["max_residual"] = r.maxResidual;
    d["tolerance"] = r.tolerance;
    py::dict dims, metrics;
    for (const auto& [k, v] : r.dims) dims[py::str(k)] = v;
    for (const auto& [k, v] : r.metrics) metrics[py::str(k)] = v;
    d["dims"] = dims;
    d["metrics"] = metrics;
    d["notes"] = r.notes;
    d["wall_seconds"] = r.wallSeconds;
    return d;
}

py::list runSuites(const std::vector<std::string>& suites, const std::vector<std::string>& fixtures, int samples,
                   std::uint64_t seed, double fdStep, double rankThreshold, const std::vector<int>& loopNs,
                   bool richardson, int workers) {
    qsg::SuiteConfig cfg;
    cfg.suites = suites;
    cfg.fixtures = fixtures;
    cfg.loopNs = loopNs;
    cfg.opt.samples = samples;
    cfg.opt.seed = seed;
    cfg.opt.nm.fdStep = fdStep;
    cfg.opt.nm.rankThreshold = rankThreshold;
    cfg.opt.nm.richardson = richardson;
    qsg::validateConfig(cfg);  // std::invalid_argument -> ValueError
    qsg::setWorkerCount(workers);
    std::vector<qsg::CheckReport> rs;
    {
        py::gil_scoped_release release;
        rs = qsg::runSuites(cfg);
    }
    py::list out;
    for (const auto& r : rs) out.append(toDict(r));
    return out;
}

// dim(ker w ∩ A_x), dim(ker w ∩ T_xP) and the anchor kernel at a unit of the named fixture.
py::dict unitKernelDims(const std::string& fixture, const std::vector<qsg::Mat>& g, const qsg::Vec& v) {
    const qsg::CatalogEntry e = qsg::catalogByName(fixture);
    qsg::Point m;
    m.g = g;
    m.v = v;
    const qsg::NondegeneracyResult r = qsg::nondegeneracyAt(e.G, e.C, m);
    py::dict d;
    d["ker_A"] = r.dimKerA;
    d["ker_TP"] = r.dimKerP;
    d["anchor_kernel"] = r.anchorKernel;
    d["nondegenerate"] = r.pass;
    d["indeterminate"] = r.indeterminate;
    return d;
}

}  // namespace

PYBIND11_MODULE(_qsg, m) {
    m.doc() = "Numerical checks for quasi-symplectic groupoids";

    m.def("suite_names", &qsg::suiteNames);
    m.def("fixtures", [] {
        py::list out;
        for (const auto& f : qsg::fixtureList()) {
            py::dict d;
            d["name"] = f.name;
            d["anchor"] = f.anchor;
            d["kind"] = f.kind;
            d["negative"] = f.negative;
            d["suites"] = f.suites;
            out.append(d);
        }
        return out;
    });
    m.def("checks", [] {
        py::list out;
        for (const auto& c : qsg::checkList()) out.append(py::make_tuple(c.suite, c.check, c.anchor));
        return out;
    });
    m.def("run", &runSuites, py::arg("suites") = std::vector<std::string>{"all"},
          py::arg("fixtures") = std::vector<std::string>{}, py::arg("samples") = 200, py::arg("seed") = 0,
          py::arg("fd_step") = 1e-4, py::arg("rank_threshold") = 1e-8, py::arg("loop_n") = std::vector<int>{},
          py::arg("richardson") = false, py::arg("workers") = 1,
          "Run check suites; returns one dict per report. Raises ValueError on unknown names.");
    m.def("unit_kernel_dims", &unitKernelDims, py::arg("fixture"), py::arg("g"), py::arg("v"));

    m.def("expm", &qsg::expm, "Exponential of an su(n) matrix");
    m.def("su_basis", &qsg::suBasis, py::arg("n"));
    m.def("emap", [](const qsg::Vec& mu, int n) { return qsg::emap(mu, n).l; }, py::arg("mu"), py::arg("n"),
          "Lower-triangular l with l l^dag = exp(i mu#)");
    m.def("dressing", [](const qsg::Mat& g, const qsg::Mat& l) { return qsg::dressing(g, qsg::DualGroupElement{l}).l; });
    m.def("coadjoint", &qsg::coadjoint);
}

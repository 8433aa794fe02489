#include "collapse/bounds.hpp"
#include "collapse/flat_spectra.hpp"
#include "collapse/nil_ce.hpp"
#include "collapse/scenario.hpp"
#include "collapse/sheaf_ss.hpp"
#include "collapse/superconn.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace collapse;

namespace {

py::dict reportToDict(const SpectrumReport& rep) {
    py::dict d;
    d["degree"] = rep.degree;
    d["eigenvalues"] = rep.eigenvalues;
    d["multiplicities"] = rep.multiplicities;
    d["tolerance"] = rep.tolerance;
    return d;
}

CochainComplex complexFromMatrices(const std::vector<int>& dims,
                                   const std::vector<Eigen::MatrixXd>& d,
                                   const std::vector<Eigen::MatrixXd>& gram) {
    CochainComplex c;
    c.spaces.dims = dims;
    c.d = d;
    if (gram.empty()) return CochainComplex::withIdentityGram(c.spaces, c.d);
    c.gram = gram;
    c.validateShapes();
    return c;
}

RationalCochainComplex rationalFromMatrices(const std::vector<int>& dims,
                                            const std::vector<Eigen::MatrixXd>& d) {
    RationalCochainComplex c;
    c.spaces.dims = dims;
    for (const auto& m : d) c.d.push_back(MatQ::fromDouble(m));  // doubles convert exactly
    c.validateShapes();
    return c;
}

GroupActionF actionFromMatrices(const std::vector<Eigen::MatrixXd>& gens) {
    GroupActionF f;
    for (const auto& g : gens) f.generators.push_back(MatQ::fromDouble(g));
    return f;
}

}  // namespace

PYBIND11_MODULE(pycollapse, m) {
    m.doc() = "Spectra of flat collapsing families, limit superconnection operators and "
              "spectral-sequence criteria (python bindings over the C++ core)";

    // graded complexes
    m.def(
        "check_complex",
        [](const std::vector<int>& dims, const std::vector<Eigen::MatrixXd>& d,
           const std::vector<Eigen::MatrixXd>& gram) {
            return check_complex(complexFromMatrices(dims, d, gram));
        },
        py::arg("dims"), py::arg("d"), py::arg("gram") = std::vector<Eigen::MatrixXd>{},
        "Verify the differential squares to zero (float tolerance).");
    m.def(
        "spectrum",
        [](const std::vector<int>& dims, const std::vector<Eigen::MatrixXd>& d,
           const std::vector<Eigen::MatrixXd>& gram, int p, int k) {
            return reportToDict(spectrum(complexFromMatrices(dims, d, gram), p, k));
        },
        py::arg("dims"), py::arg("d"), py::arg("gram"), py::arg("p"), py::arg("k"),
        "k smallest Laplacian eigenvalues of a cochain complex at degree p.");
    m.def(
        "cohomology_dims",
        [](const std::vector<int>& dims, const std::vector<Eigen::MatrixXd>& d) {
            return cohomology_dims(rationalFromMatrices(dims, d));
        },
        py::arg("dims"), py::arg("d"),
        "Exact Betti numbers; matrix entries are converted to rationals exactly.");

    // nilpotent fiber algebras
    m.def(
        "ce_betti",
        [](const std::string& algebra) {
            NilLieAlgebra g = named_algebra(algebra);
            return cohomology_dims(ce_complex(g, Eigen::MatrixXd::Identity(g.n, g.n)).rational);
        },
        py::arg("algebra"));
    m.def(
        "invariant_dims",
        [](const std::string& algebra, const std::string& action) {
            NilLieAlgebra g = named_algebra(algebra);
            CEComplex ce = ce_complex(g, Eigen::MatrixXd::Identity(g.n, g.n));
            return invariant_subcomplex(ce, named_action(action, g.n)).dims;
        },
        py::arg("algebra"), py::arg("action"));
    m.def(
        "parallel_form_criterion",
        [](const std::string& algebra, const std::vector<Eigen::MatrixXd>& generators, int kLow,
           int kHigh) {
            NilLieAlgebra g = named_algebra(algebra);
            CEComplex ce = ce_complex(g, Eigen::MatrixXd::Identity(g.n, g.n));
            return parallel_form_criterion(ce, actionFromMatrices(generators), kLow, kHigh);
        },
        py::arg("algebra"), py::arg("generators"), py::arg("k_low"), py::arg("k_high"));

    // flat manifolds
    m.def(
        "hodge_spectrum",
        [](const std::string& manifold, int p, int k, double cutoff) {
            HodgeSpectrumOptions opts;
            opts.initialCutoff = cutoff;
            return reportToDict(hodge_spectrum(named_manifold(manifold), p, k, opts));
        },
        py::arg("manifold"), py::arg("p"), py::arg("k"), py::arg("cutoff") = 0.0,
        "Exact Hodge spectrum of a registry flat manifold, e.g. 'g6' or 's1xg6(0.5)'.");
    m.def("zero_modes",
          [](const std::string& manifold) { return zero_mode_multiplicities(named_manifold(manifold)); },
          py::arg("manifold"));
    m.def("manifold_registry", [] { return manifold_registry_names(); });

    // superconnection circle models
    m.def(
        "circle_spectrum",
        [](int fiberDim, const Eigen::MatrixXi& phi, double t, double baseLength, int cutoff, int p,
           int k) {
            SuperconnData s = torus_fiber_superconnection(fiberDim, phi, t, baseLength, cutoff);
            return reportToDict(circle_spectrum(s, p, k));
        },
        py::arg("fiber_dim"), py::arg("phi"), py::arg("t"), py::arg("base_length"),
        py::arg("cutoff"), py::arg("p"), py::arg("k"),
        "Spectrum of the limit operator for a torus-fiber mapping-torus model.");
    m.def(
        "monodromy_betti",
        [](int fiberDim, const Eigen::MatrixXi& phi) {
            SuperconnData s = torus_fiber_superconnection(fiberDim, phi, 1.0, 6.283185307179586, 4);
            return monodromy_cohomology(s).totalBetti;
        },
        py::arg("fiber_dim"), py::arg("phi"));
    m.def(
        "interval_spectrum",
        [](int twist, int k) {
            Z2EquivariantData z;
            z.data.fiber.dims = {1};
            z.data.h = {Eigen::MatrixXd::Identity(1, 1)};
            z.data.monodromy = {Eigen::MatrixXd::Identity(1, 1)};
            z.data.baseLength = 6.283185307179586;
            z.data.fourierCutoff = std::max(8, k + 2);
            z.involution = {Eigen::MatrixXd::Identity(1, 1)};
            return reportToDict(z2_basic_spectrum(z, 0, k, twist));
        },
        py::arg("twist"), py::arg("k"),
        "Function spectrum of the length-pi interval quotient: twist +1 is the invariant "
        "(absolute) side, twist -1 the anti-invariant (relative) side.");

    // simplicial cohomology and the Gysin criterion
    m.def(
        "betti_local",
        [](const std::string& complexName, const std::vector<std::tuple<int, int, int>>& weights) {
            SimplicialComplexData x = named_complex(complexName);
            LocalSystemZ2 s;
            for (const auto& [u, v, w] : weights)
                s.edgeWeight[{std::min(u, v), std::max(u, v)}] = w;
            return cohomology_local(x, s);
        },
        py::arg("complex"), py::arg("edge_weights") = std::vector<std::tuple<int, int, int>>{});
    m.def(
        "gysin_criterion",
        [](const std::string& complexName, bool generator, int p) {
            SimplicialComplexData x = named_complex(complexName);
            EulerCocycle chi = EulerCocycle::zero(x);
            if (generator && !chi.values.empty()) chi.values[0] = 1;
            return gysin_criterion(x, LocalSystemZ2::trivial(), chi, p);
        },
        py::arg("complex"), py::arg("generator"), py::arg("p"));
    m.def(
        "small_eig_budget",
        [](const std::string& complexName, const std::vector<std::tuple<int, int, int>>& weights,
           int p) {
            SimplicialComplexData x = named_complex(complexName);
            LocalSystemZ2 s;
            for (const auto& [u, v, w] : weights)
                s.edgeWeight[{std::min(u, v), std::max(u, v)}] = w;
            return small_eig_budget(x, s, p);
        },
        py::arg("complex"), py::arg("edge_weights"), py::arg("p"));
    m.def(
        "interval_sheaf_e2",
        [](const std::string& name) {
            E2Table t = interval_sheaf_e2(named_interval_sheaf(name));
            std::map<std::pair<int, int>, int> out(t.dims.begin(), t.dims.end());
            return out;
        },
        py::arg("name") = "interval-ex5");

    // quantitative bounds
    m.def(
        "gap_threshold",
        [](double A, double C, double diamZ, double normR, double normPi, double normT,
           double normTFM) -> std::optional<double> {
            return gap_threshold({A, C, diamZ, normR, normPi, normT, normTFM});
        },
        py::arg("A"), py::arg("C"), py::arg("diam_z"), py::arg("norm_r") = 0.0,
        py::arg("norm_pi") = 0.0, py::arg("norm_t") = 0.0, py::arg("norm_tfm") = 0.0,
        "Spectral-gap certificate; None when no certificate holds.");
    m.def(
        "drift_check",
        [](const std::vector<double>& s1, const std::vector<double>& s2, double opnorm, double eps) {
            PerturbationResult r = perturbation_check({s1, s2, opnorm, eps});
            return py::make_tuple(r.satisfied, r.worstMargin);
        },
        py::arg("spectrum1"), py::arg("spectrum2"), py::arg("opnorm"), py::arg("eps") = 0.0);
    m.def("one_form_budget", &one_form_budget, py::arg("b1_x"), py::arg("dim_m"), py::arg("dim_x"),
          py::arg("b1_m"));

    // scenarios
    m.def("scenario_names", [] {
        std::vector<std::string> names;
        for (const auto& s : bundled_scenarios()) names.push_back(s.name);
        return names;
    });
    m.def(
        "run_scenario",
        [](const std::string& name) {
            const Scenario& s = find_scenario(name);
            std::vector<ResultRow> rows = run_scenario(s);
            ClaimOutcome claim = evaluate_claim(s, rows);
            py::list pyRows;
            for (const auto& r : rows)
                pyRows.append(py::make_tuple(r.scenario, r.t, r.p, r.j, r.lambda, r.source));
            py::dict d;
            d["rows"] = pyRows;
            d["claim_pass"] = claim.pass;
            d["claim_detail"] = claim.detail;
            return d;
        },
        py::arg("name"));
}

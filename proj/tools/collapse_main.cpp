#include "collapse/bounds.hpp"
#include "collapse/flat_spectra.hpp"
#include "collapse/nil_ce.hpp"
#include "collapse/scenario.hpp"
#include "collapse/sheaf_ss.hpp"
#include "collapse/superconn.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace collapse;

void writeRows(const std::vector<ResultRow>& rows, const std::string& format,
               const std::string& outPath) {
    if (outPath.empty()) {
        if (format == "json") emit_json(rows, std::cout);
        else emit_csv(rows, std::cout);
    } else {
        emit(rows, format, outPath);
    }
}

int runScan(const std::string& scenarioName, const std::string& filePath,
            const std::vector<double>& tOverride, const std::vector<int>& pOverride, int kOverride,
            double cutoff, double tol, const std::string& format, const std::string& outPath) {
    Scenario s;
    if (!filePath.empty()) {
        std::ifstream is(filePath);
        if (!is) throw std::runtime_error("cannot open scenario file: " + filePath);
        s = scenario_from_json(is);
    } else {
        s = find_scenario(scenarioName);
    }
    if (!tOverride.empty()) s.tValues = tOverride;
    if (!pOverride.empty()) s.pValues = pOverride;
    if (kOverride > 0) s.k = kOverride;
    if (cutoff > 0) s.cutoff = cutoff;
    if (tol > 0) s.clusterTol = tol;

    std::vector<ResultRow> rows = run_scenario(s);
    writeRows(rows, format, outPath);
    ClaimOutcome claim = evaluate_claim(s, rows);
    if (!s.claimId.empty()) {
        std::cerr << (claim.pass ? "claim PASS" : "claim FAIL") << " [" << s.claimId << "] "
                  << claim.detail << "\n";
        return claim.pass ? 0 : 2;
    }
    return 0;
}

int runSpectrum(const std::string& manifold, const std::string& algebra, const std::string& action,
                std::vector<int> pValues, int k, double cutoff, double tol,
                const std::string& format, const std::string& outPath) {
    std::vector<ResultRow> rows;
    if (!manifold.empty()) {
        BieberbachData m = named_manifold(manifold);
        if (pValues.empty())
            for (int p = 0; p <= m.n; ++p) pValues.push_back(p);
        for (int p : pValues) {
            HodgeSpectrumOptions opts;
            opts.initialCutoff = cutoff;
            if (tol > 0) opts.clusterTol = tol;
            SpectrumReport rep = hodge_spectrum(m, p, k, opts);
            int j = 1;
            for (double v : rep.expanded()) rows.push_back({manifold, 1.0, p, j++, v, "flat-spectra"});
        }
    } else {
        NilLieAlgebra g = named_algebra(algebra);
        CEComplex ce = ce_complex(g, Eigen::MatrixXd::Identity(g.n, g.n));
        CochainComplex target = ce.complex;
        std::string label = algebra;
        if (!action.empty() && action != "trivial") {
            InvariantSubcomplex inv = invariant_subcomplex(ce, named_action(action, g.n));
            target = inv.complex;
            label += "/" + action;
        }
        if (pValues.empty())
            for (int p = 0; p <= g.n; ++p) pValues.push_back(p);
        for (int p : pValues) {
            int kk = std::min(k, target.spaces.dim(p));
            SpectrumReport rep = spectrum(target, p, kk, tol > 0 ? tol : 1e-8);
            int j = 1;
            for (double v : rep.expanded()) rows.push_back({label, 1.0, p, j++, v, "nil-ce"});
        }
    }
    writeRows(rows, format, outPath);
    return 0;
}

int runSs(const std::string& sheafName, const std::string& complexName, const std::string& filePath,
          const std::string& format, const std::string& outPath) {
    std::vector<ResultRow> rows;
    if (!sheafName.empty()) {
        E2Table e2 = interval_sheaf_e2(named_interval_sheaf(sheafName));
        for (const auto& [pq, d] : e2.dims)
            rows.push_back({sheafName, 1.0, pq.first, pq.second + 1, double(d), "sheaf-ss"});
    } else {
        SimplicialComplexData x;
        LocalSystemZ2 sys = LocalSystemZ2::trivial();
        std::string label;
        if (!filePath.empty()) {
            std::ifstream is(filePath);
            if (!is) throw std::runtime_error("cannot open complex file: " + filePath);
            UserComplex uc = user_complex_from_json(is);
            x = uc.complex;
            sys = uc.system;
            label = filePath;
        } else {
            x = named_complex(complexName);
            label = complexName;
        }
        std::vector<int> betti = cohomology_local(x, sys);
        for (int p = 0; p < int(betti.size()); ++p)
            rows.push_back({label, 1.0, p, 1, double(betti[p]), "sheaf-ss"});
    }
    writeRows(rows, format, outPath);
    return 0;
}

int runGysin(const std::string& complexName, const std::string& filePath, const std::string& chiKind,
             int p, const std::string& format, const std::string& outPath) {
    SimplicialComplexData x;
    LocalSystemZ2 sys = LocalSystemZ2::trivial();
    std::optional<EulerCocycle> fileChi;
    std::string label;
    if (!filePath.empty()) {
        std::ifstream is(filePath);
        if (!is) throw std::runtime_error("cannot open complex file: " + filePath);
        UserComplex uc = user_complex_from_json(is);
        x = uc.complex;
        sys = uc.system;
        fileChi = uc.chi;
        label = filePath;
    } else {
        x = named_complex(complexName);
        label = complexName;
    }
    EulerCocycle chi = EulerCocycle::zero(x);
    if (chiKind == "generator") {
        if (chi.values.empty()) throw std::runtime_error("complex has no 2-simplices");
        chi.values[0] = 1;
    } else if (chiKind == "file") {
        if (!fileChi) throw std::runtime_error("no 2-cochain in the complex file");
        chi = *fileChi;
    } else if (chiKind != "zero") {
        throw CLI::ValidationError("--chi must be generator|zero|file");
    }
    std::vector<ResultRow> rows;
    rows.push_back({label, 1.0, p, 1, double(euler_mult_rank(x, sys, chi, p)), "sheaf-ss"});
    rows.push_back({label, 1.0, p, 2, gysin_criterion(x, sys, chi, p) ? 1.0 : 0.0, "sheaf-ss"});
    writeRows(rows, format, outPath);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"collapse: exact spectra of flat collapsing families, limit operators on "
                 "quotient bases, and the associated spectral-sequence and gap criteria"};
    app.require_subcommand(1);

    // list
    CLI::App* list = app.add_subcommand("list", "list bundled scenarios and their claims");

    // scan
    CLI::App* scan = app.add_subcommand("scan", "run a bundled or file-defined scenario");
    std::string scenarioName, filePath, format = "csv", outPath;
    std::vector<double> tValues;
    std::vector<int> pValues;
    int k = 0;
    double cutoff = 0, tol = 0;
    scan->add_option("--scenario", scenarioName, "bundled scenario name");
    scan->add_option("--file", filePath, "scenario JSON file");
    scan->add_option("--t", tValues, "override t grid");
    scan->add_option("--p", pValues, "override degree list");
    scan->add_option("--k", k, "override eigenvalue count");
    scan->add_option("--cutoff", cutoff, "initial enumeration cutoff R");
    scan->add_option("--tol", tol, "eigenvalue clustering tolerance");
    scan->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    scan->add_option("--out", outPath, "output path (default stdout)");

    // spectrum
    CLI::App* spectrumCmd = app.add_subcommand("spectrum", "eigenvalues of a registry model");
    std::string manifold, algebra, action;
    std::vector<int> specP;
    int specK = 6;
    double specCutoff = 0, specTol = 0;
    std::string specFormat = "csv", specOut;
    spectrumCmd->add_option("--manifold", manifold, "flat manifold registry key, e.g. g6 or s1xg6(0.5)");
    spectrumCmd->add_option("--algebra", algebra, "algebra registry key, e.g. heisenberg-3");
    spectrumCmd->add_option("--action", action, "holonomy action for the invariant complex");
    spectrumCmd->add_option("--p", specP, "degrees (default: all)");
    spectrumCmd->add_option("--k", specK, "eigenvalue count");
    spectrumCmd->add_option("--cutoff", specCutoff, "initial enumeration cutoff R");
    spectrumCmd->add_option("--tol", specTol, "clustering tolerance");
    spectrumCmd->add_option("--format", specFormat, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    spectrumCmd->add_option("--out", specOut, "output path");

    // ss
    CLI::App* ss = app.add_subcommand("ss", "spectral-sequence tables and twisted Betti numbers");
    std::string sheafName, ssComplex, ssFile, ssFormat = "csv", ssOut;
    ss->add_option("--sheaf", sheafName, "interval sheaf registry key, e.g. interval-ex5");
    ss->add_option("--complex", ssComplex, "simplicial complex registry key");
    ss->add_option("--file", ssFile, "user complex JSON");
    ss->add_option("--format", ssFormat, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    ss->add_option("--out", ssOut, "output path");

    // gysin
    CLI::App* gy = app.add_subcommand("gysin", "Euler-class multiplication rank and criterion");
    std::string gyComplex = "s2-tetra", gyFile, gyChi = "generator", gyFormat = "csv", gyOut;
    int gyP = 1;
    gy->add_option("--complex", gyComplex, "simplicial complex registry key");
    gy->add_option("--file", gyFile, "user complex JSON");
    gy->add_option("--chi", gyChi, "generator|zero|file");
    gy->add_option("--p", gyP, "form degree");
    gy->add_option("--format", gyFormat, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    gy->add_option("--out", gyOut, "output path");

    // bounds
    CLI::App* bd = app.add_subcommand("bounds", "quantitative gap and counting bounds");
    CLI::App* bdGap = bd->add_subcommand("gap", "spectral-gap certificate");
    GapInputs gi;
    bdGap->add_option("--A", gi.A)->required();
    bdGap->add_option("--C", gi.C)->required();
    bdGap->add_option("--diam", gi.diamZ, "fiber diameter")->required();
    bdGap->add_option("--norm-r", gi.normR, "curvature norm");
    bdGap->add_option("--norm-pi", gi.normPi, "second fundamental form norm");
    bdGap->add_option("--norm-t", gi.normT, "affine-bundle curvature norm");
    bdGap->add_option("--norm-tfm", gi.normTFM, "frame-bundle curvature norm");
    CLI::App* bdDrift = bd->add_subcommand("drift", "square-root eigenvalue drift check");
    std::vector<double> s1, s2;
    double opnorm = 0, eps = 0;
    bdDrift->add_option("--s1", s1, "first spectrum")->required();
    bdDrift->add_option("--s2", s2, "second spectrum")->required();
    bdDrift->add_option("--opnorm", opnorm, "superconnection difference norm")->required();
    bdDrift->add_option("--eps", eps, "metric closeness");
    CLI::App* bdOne = bd->add_subcommand("oneform-count", "1-form small-eigenvalue budget");
    int b1x = 0, dimm = 0, dimx = 0, b1m = 0;
    bdOne->add_option("--b1x", b1x)->required();
    bdOne->add_option("--dimm", dimm)->required();
    bdOne->add_option("--dimx", dimx)->required();
    bdOne->add_option("--b1m", b1m)->required();
    CLI::App* bdPar = bd->add_subcommand("parallel-count", "invariant parallel-form budget");
    std::string parAlgebra = "abelian-3", parAction = "trivial";
    int parP = 1;
    bdPar->add_option("--algebra", parAlgebra);
    bdPar->add_option("--action", parAction);
    bdPar->add_option("--p", parP);
    bd->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;  // 0 for --help, 1 for usage errors
    }

    try {
        if (list->parsed()) {
            for (const auto& s : bundled_scenarios())
                std::cout << s.name << "\n    claim [" << s.claimId << "]: " << s.claim << "\n";
            return 0;
        }
        if (scan->parsed()) {
            if (scenarioName.empty() && filePath.empty())
                throw CLI::ValidationError("scan requires --scenario or --file");
            return runScan(scenarioName, filePath, tValues, pValues, k, cutoff, tol, format, outPath);
        }
        if (spectrumCmd->parsed()) {
            if (manifold.empty() == algebra.empty())
                throw CLI::ValidationError("spectrum requires exactly one of --manifold, --algebra");
            return runSpectrum(manifold, algebra, action, specP, specK, specCutoff, specTol,
                               specFormat, specOut);
        }
        if (ss->parsed()) {
            if (sheafName.empty() && ssComplex.empty() && ssFile.empty())
                throw CLI::ValidationError("ss requires --sheaf, --complex or --file");
            return runSs(sheafName, ssComplex, ssFile, ssFormat, ssOut);
        }
        if (gy->parsed()) return runGysin(gyComplex, gyFile, gyChi, gyP, gyFormat, gyOut);
        if (bd->parsed()) {
            if (bdGap->parsed()) {
                auto thr = gap_threshold(gi);
                if (thr) std::cout << "threshold " << *thr << "\n";
                else std::cout << "no certificate\n";
                return 0;
            }
            if (bdDrift->parsed()) {
                PerturbationResult res = perturbation_check({s1, s2, opnorm, eps});
                std::cout << (res.satisfied ? "satisfied" : "violated") << " worst-margin "
                          << res.worstMargin << "\n";
                return res.satisfied ? 0 : 2;
            }
            if (bdOne->parsed()) {
                std::cout << one_form_budget(b1x, dimm, dimx, b1m) << "\n";
                return 0;
            }
            if (bdPar->parsed()) {
                NilLieAlgebra g = named_algebra(parAlgebra);
                CEComplex ce = ce_complex(g, Eigen::MatrixXd::Identity(g.n, g.n));
                InvariantSubcomplex inv = invariant_subcomplex(ce, named_action(parAction, g.n));
                std::cout << parallel_form_budget(inv.dims, parP) << "\n";
                return 0;
            }
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

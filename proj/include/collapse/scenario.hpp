#pragma once

#include "collapse/sheaf_ss.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace collapse {

/// A reproducible batch run binding registry models to one checkable claim.
struct Scenario {
    std::string name;
    std::string model;             // registry key or key family
    std::vector<double> tValues;   // collapse parameters, all > 0
    std::vector<int> pValues;      // form degrees
    int k = 1;                     // eigenvalue count per grid point
    double cutoff = 0;             // optional initial enumeration cutoff
    double clusterTol = 0;         // optional eigenvalue clustering tolerance
    std::string claimId;           // which acceptance check the run feeds
    std::string claim;             // human-readable statement of the expectation

    void validate() const;
};

struct ResultRow {
    std::string scenario;
    double t = 1;
    int p = 0;
    int j = 1;        // >= 1
    double lambda = 0;
    std::string source;
};

std::vector<Scenario> bundled_scenarios();
const Scenario& find_scenario(const std::string& name);

std::vector<ResultRow> run_scenario(const Scenario& s);

struct ClaimOutcome {
    bool pass = false;
    std::string detail;
};

/// Evaluates the scenario's claim; recomputes reference quantities as needed.
ClaimOutcome evaluate_claim(const Scenario& s, const std::vector<ResultRow>& rows);

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& os);
void emit_json(const std::vector<ResultRow>& rows, std::ostream& os);
std::vector<ResultRow> parse_json_rows(std::istream& is);
void emit(const std::vector<ResultRow>& rows, const std::string& format, const std::string& path);

Scenario scenario_from_json(std::istream& is);

/// User complexes: {"vertices": n, "simplices": [[...], ...],
///                  "edge_weights": [[u, v, w], ...], "cochain2": [[a,b,c,value], ...]}
struct UserComplex {
    SimplicialComplexData complex;
    LocalSystemZ2 system;
    std::optional<EulerCocycle> chi;
};
UserComplex user_complex_from_json(std::istream& is);

}  // namespace collapse

#pragma once

#include <optional>
#include <vector>

namespace collapse {

/// Inputs for the spectral-gap certificate. The constants A and C depend only
/// on the total dimension but are not pinned numerically anywhere; they are
/// explicit inputs and never defaulted.
struct GapInputs {
    double A = 0;         // > 0
    double C = 0;         // > 0
    double diamZ = 0;     // fiber diameter
    double normR = 0;     // curvature sup norm
    double normPi = 0;    // second fundamental form sup norm
    double normT = 0;     // affine-bundle curvature sup norm
    double normTFM = 0;   // frame-bundle curvature sup norm

    void validate() const;
};

/// ( sqrt(A diamZ^-2 - C (normR + normPi^2 + normT^2)) - C normTFM )^2
/// when both the radicand and the difference are positive; no certificate
/// otherwise.
std::optional<double> gap_threshold(const GapInputs& g);

struct PerturbationInputs {
    std::vector<double> spectrum1;  // ascending, nonnegative
    std::vector<double> spectrum2;
    double opNorm = 0;  // || T A'_1 T^-1 - A'_2 ||
    double eps = 0;     // metric closeness parameter

    void validate() const;
};

struct PerturbationResult {
    bool satisfied = false;
    double worstMargin = 0;  // min over j of (bound - deviation)
};

/// Square-root eigenvalue drift test:
/// |sqrt(l_j1) - sqrt(l_j2)| <= (2 + sqrt 2) opNorm + (e^eps - 1) sqrt(l_j1).
PerturbationResult perturbation_check(const PerturbationInputs& p);

/// Small-eigenvalue count bound for the 1-form Laplacian:
/// min(b1X + dimM - dimX, b1M + dimM).
int one_form_budget(int b1X, int dimM, int dimX, int b1M);

/// Small-eigenvalue count bound from invariant parallel forms: dim of the
/// degree-p invariant exterior space.
int parallel_form_budget(const std::vector<int>& invariantDims, int p);

}  // namespace collapse

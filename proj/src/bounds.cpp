#include "collapse/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace collapse {

void GapInputs::validate() const {
    if (A <= 0 || C <= 0) throw std::invalid_argument("GapInputs: A and C must be positive");
    if (diamZ <= 0) throw std::invalid_argument("GapInputs: fiber diameter must be positive");
    if (normR < 0 || normPi < 0 || normT < 0 || normTFM < 0)
        throw std::invalid_argument("GapInputs: norms must be nonnegative");
}

std::optional<double> gap_threshold(const GapInputs& g) {
    g.validate();
    double radicand = g.A / (g.diamZ * g.diamZ) - g.C * (g.normR + g.normPi * g.normPi + g.normT * g.normT);
    if (radicand <= 0) return std::nullopt;
    double s = std::sqrt(radicand) - g.C * g.normTFM;
    if (s <= 0) return std::nullopt;
    return s * s;
}

void PerturbationInputs::validate() const {
    if (spectrum1.size() != spectrum2.size())
        throw std::invalid_argument("PerturbationInputs: spectrum length mismatch");
    if (opNorm < 0 || eps < 0)
        throw std::invalid_argument("PerturbationInputs: opNorm and eps must be nonnegative");
    auto checkAscending = [](const std::vector<double>& v) {
        for (size_t i = 0; i < v.size(); ++i) {
            if (v[i] < 0) throw std::invalid_argument("PerturbationInputs: negative eigenvalue");
            if (i > 0 && v[i] < v[i - 1])
                throw std::invalid_argument("PerturbationInputs: spectrum not ascending");
        }
    };
    checkAscending(spectrum1);
    checkAscending(spectrum2);
}

PerturbationResult perturbation_check(const PerturbationInputs& p) {
    p.validate();
    constexpr double kDriftConstant = 2.0 + 1.4142135623730951;
    PerturbationResult out;
    out.satisfied = true;
    out.worstMargin = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < p.spectrum1.size(); ++j) {
        double s1 = std::sqrt(p.spectrum1[j]);
        double s2 = std::sqrt(p.spectrum2[j]);
        double bound = kDriftConstant * p.opNorm + (std::exp(p.eps) - 1.0) * s1;
        double margin = bound - std::abs(s1 - s2);
        out.worstMargin = std::min(out.worstMargin, margin);
        if (margin < 0) out.satisfied = false;
    }
    if (p.spectrum1.empty()) out.worstMargin = 0;
    return out;
}

int one_form_budget(int b1X, int dimM, int dimX, int b1M) {
    if (dimX < 0 || dimX > dimM) throw std::invalid_argument("one_form_budget: need 0 <= dimX <= dimM");
    if (b1X < 0 || b1M < 0) throw std::invalid_argument("one_form_budget: negative Betti number");
    int viaLimit = b1X + dimM - dimX;
    int viaManifold = b1M + dimM;
    if (b1X <= b1M && viaLimit > viaManifold)
        throw std::logic_error("one_form_budget: bound chain violated");
    return std::min(viaLimit, viaManifold);
}

int parallel_form_budget(const std::vector<int>& invariantDims, int p) {
    if (p < 0 || p >= int(invariantDims.size())) return 0;
    return invariantDims[p];
}

}  // namespace collapse

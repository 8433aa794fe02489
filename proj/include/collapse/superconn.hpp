#pragma once

#include "collapse/flat_spectra.hpp"
#include "collapse/graded.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace collapse {

/// Flat degree-1 superconnection over a circle: a graded fiber complex
/// (V, a0, h), a grading-preserving monodromy commuting with a0, the base
/// length, a Fourier cutoff and a constant orbit-volume weight folded into h.
struct SuperconnData {
    GradedVectorSpace fiber;
    std::vector<Eigen::MatrixXd> a0;         // a0[q]: dim(q+1) x dim(q)
    std::vector<Eigen::MatrixXd> h;          // SPD per degree
    std::vector<Eigen::MatrixXd> monodromy;  // invertible, per degree
    double baseLength = 2.0 * 3.14159265358979323846;
    int fourierCutoff = 12;
    double weight = 1.0;

    void validate() const;   // throws on shape/flatness/SPD violations
    int topDegree() const { return fiber.top() + 1; }
};

bool monodromy_orthogonal(const SuperconnData& s);

/// Real Fourier-mode cochain complex of the circle model. Requires an
/// involutive (or identity) monodromy; identity gram by construction.
struct FourierModel {
    CochainComplex complex;
    double certifiedBelow = 0;  // eigenvalues below this bound are complete

    struct Element {
        int baseForm;   // 0 or 1 (dtheta factor)
        int fiberDeg;
        int frameIdx;   // column of the per-degree orthonormal frame
        int trig;       // 0 const, 1 cos, 2 sin
        int modeIndex;  // fourier index k
        double nu;      // momentum
    };
    std::vector<std::vector<Element>> elements;        // per total degree
    std::vector<Eigen::MatrixXd> frames;               // h-orthonormal, per fiber degree
    std::vector<std::vector<int>> frameSigns;          // monodromy eigenvalue per frame column
    std::vector<Eigen::MatrixXd> orthoTransforms;      // L^T per degree (h = L L^T)
};

FourierModel fourier_model(const SuperconnData& s);

/// Second-order finite-difference model on a twisted periodic grid.
CochainComplex fd_model(const SuperconnData& s, int gridPoints);

/// k smallest eigenvalues of the superconnection Laplacian in total degree p.
/// Orthogonal monodromy: exact Fourier block diagonalization; otherwise
/// central differences with Richardson extrapolation over two grids.
SpectrumReport circle_spectrum(const SuperconnData& s, int p, int k);

/// All eigenvalues strictly below lambdaMax (orthogonal monodromy only).
SpectrumReport circle_spectrum_below(const SuperconnData& s, int p, double lambdaMax);

struct MonodromyCohomology {
    std::vector<int> fiberBetti;              // H^q(a0), exact
    std::vector<std::array<int, 2>> e2;       // e2[q] = { ker, coker } of (induced monodromy - 1)
    std::vector<int> totalBetti;              // dim H^p of the superconnection complex
};

MonodromyCohomology monodromy_cohomology(const SuperconnData& s);

/// Circle model with the base involution theta -> -theta covered by an
/// involutive grading-preserving fiber map.
struct Z2EquivariantData {
    SuperconnData data;
    std::vector<Eigen::MatrixXd> involution;  // per degree

    void validate() const;
};

/// Basic Laplacian spectrum on the interval quotient; twist +1 restricts to
/// invariant sections, twist -1 to anti-invariant-lifted ones.
SpectrumReport z2_basic_spectrum(const Z2EquivariantData& z, int p, int k, int twist);

struct ThresholdComparison {
    struct Pair {
        double manifold;
        double model;
    };
    std::vector<Pair> pairs;                         // j-aligned, below threshold
    double maxRelDeviation = 0;
    std::optional<double> firstUnmatchedManifold;    // first manifold value with no model partner
    int matchedModelCount = 0;
};

/// Eigenvalue comparison between the circle-model operator and the p-form
/// Laplacian of a flat mapping torus, below a threshold.
ThresholdComparison threshold_compare(const SuperconnData& s, const BieberbachData& m, int p,
                                      double threshold, double matchTol = 1e-8);

/// Fiber-torus model: V = exterior algebra of the fiber dual, a0 = 0,
/// gram from the metric t^2 * I, monodromy induced by the automorphism phi.
SuperconnData torus_fiber_superconnection(int fiberDim, const Eigen::MatrixXi& phi, double t,
                                          double baseLength, int fourierCutoff);

}  // namespace collapse

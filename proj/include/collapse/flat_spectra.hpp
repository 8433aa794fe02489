#pragma once

#include "collapse/graded.hpp"
#include "collapse/rational.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace collapse {

/// Affine deck transformation in lattice coordinates: y -> rot y + trans,
/// with rot integral and trans rational (taken mod the integer lattice).
struct AffineElement {
    Eigen::MatrixXi rot;
    std::vector<Rat> trans;
};

/// Compact flat manifold R^n / Gamma presented by a lattice, a flat metric
/// and holonomy generators. Everything is stored in lattice coordinates:
/// the lattice is Z^n, `metric` is the Gram matrix of the lattice basis.
struct BieberbachData {
    int n = 0;
    Eigen::MatrixXd basis;               // ambient lattice basis (bookkeeping only)
    Eigen::MatrixXd metric;              // SPD, lattice coordinates
    std::vector<AffineElement> holonomy; // generators, identity omitted

    /// Ambient presentation: rotations orthogonal w.r.t. `metric`, translations
    /// already in fundamental-domain (lattice) coordinates.
    static BieberbachData fromAmbient(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& metric,
                                      const std::vector<std::pair<Eigen::MatrixXd, std::vector<Rat>>>& holonomy);

    /// Full deck group of the covering torus (affine classes mod Z^n).
    std::vector<AffineElement> deckGroup(int cap = 64) const;

    /// Metric compatibility, finite closure, torsion-freeness. Throws on failure.
    void validate() const;
};

/// One dual-lattice eigenvalue shell with exact invariant multiplicities.
struct ModeBlock {
    double eigenvalue = 0;                // 4 pi^2 |mu|^2
    std::vector<Eigen::VectorXi> modes;   // dual-lattice vectors in the shell
    std::vector<int> multiplicity;        // per form degree 0..n
};

struct HodgeSpectrumOptions {
    double initialCutoff = 0;  // 0: choose from k and the metric
    int maxDoublings = 6;
    double clusterTol = 1e-8;
};

/// All shells with eigenvalue <= 4 pi^2 R^2, ascending; exact multiplicities.
std::vector<ModeBlock> enumerate_modes(const BieberbachData& b, double cutoffR);

/// k smallest eigenvalues of the p-form Laplacian with exact multiplicities;
/// whole shells are reported, so the count can exceed k. The enumeration is
/// exhaustive below the cutoff, which auto-escalates until k values are
/// certified or the doubling limit is hit ("cutoff-insufficient").
SpectrumReport hodge_spectrum(const BieberbachData& b, int p, int k,
                              const HodgeSpectrumOptions& opts = {});

/// All (eigenvalue, multiplicity) pairs with eigenvalue < lambdaMax, certified complete.
SpectrumReport spectrum_below(const BieberbachData& b, int p, double lambdaMax,
                              double clusterTol = 1e-8);

/// Multiplicities of eigenvalue zero per degree (= Betti numbers).
std::vector<int> zero_mode_multiplicities(const BieberbachData& b);

/// S^1 x (t . fiber) with block metric diag(length^2, t^2 . fiber metric).
BieberbachData product_with_scaled_fiber(double baseLength, const BieberbachData& fiber, double t);

/// Flat mapping torus of a finite-order metric-preserving lattice automorphism;
/// the base circle has length `baseLength`, the fiber metric is scaled by t^2.
BieberbachData mapping_torus(const BieberbachData& fiber, const Eigen::MatrixXi& phi,
                             double baseLength, double t);

/// Registry: "t2", "t3", "klein", "g6", "s1xg6(t)", "maptorus-minusI(t)".
BieberbachData named_manifold(const std::string& name);
std::vector<std::string> manifold_registry_names();

}  // namespace collapse

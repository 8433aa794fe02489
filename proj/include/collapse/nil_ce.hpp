#pragma once

#include "collapse/graded.hpp"
#include "collapse/rational.hpp"

#include <string>
#include <vector>

namespace collapse {

/// Nilpotent Lie algebra in a fixed ordered basis.
/// bracket [e_i, e_j] = sum_k c(k)(i,j) e_k with c(k) antisymmetric.
struct NilLieAlgebra {
    int n = 0;
    std::vector<MatQ> c;  // c[k] is n x n

    MatQ bracket(const MatQ& x, const MatQ& y) const;  // column vectors
    void validate() const;  // antisymmetry, Jacobi, nilpotency, all exact
};

/// Finite group acting on the algebra, given by generators.
struct GroupActionF {
    std::vector<MatQ> generators;
};

/// Closure of the generated group; throws if the cap is exceeded.
std::vector<MatQ> closeGroup(const std::vector<MatQ>& generators, int cap = 64);

bool isBracketAutomorphism(const NilLieAlgebra& g, const MatQ& m);

/// Exterior-algebra complex of the dual space with the induced metric data.
struct CEComplex {
    NilLieAlgebra algebra;
    Eigen::MatrixXd metric;             // SPD inner product on the algebra
    RationalCochainComplex rational;    // exact differential on the dual exterior algebra
    CochainComplex complex;             // float differential + determinantal gram
};

CEComplex ce_complex(const NilLieAlgebra& g, const Eigen::MatrixXd& metric);

/// F-invariant subcomplex carved out by the averaging projector.
struct InvariantSubcomplex {
    std::vector<MatQ> basis;            // invariant basis per degree (columns)
    RationalCochainComplex rational;    // restricted differential, exact
    CochainComplex complex;             // restricted F-averaged gram, float
    std::vector<int> dims;
};

InvariantSubcomplex invariant_subcomplex(const CEComplex& ce, const GroupActionF& f,
                                         int groupCap = 64);

/// True iff there is no nonzero invariant parallel k-form for any k in
/// [kLow, kHigh], i.e. the invariant exterior dims vanish on the range.
bool parallel_form_criterion(const CEComplex& ce, const GroupActionF& f, int kLow, int kHigh,
                             int groupCap = 64);

/// Direction-wise rescaling of the metric; weight w_i multiplies the squared
/// length of basis direction i.
CEComplex scale_metric(const CEComplex& ce, const std::vector<double>& weights);

/// Named algebras: "abelian-<n>", "heisenberg-3".
NilLieAlgebra named_algebra(const std::string& name);

/// Named holonomy actions: "trivial", "minus-identity", "hw-z2xz2".
GroupActionF named_action(const std::string& name, int dimension);

}  // namespace collapse

#pragma once

#include "collapse/rational.hpp"

#include <Eigen/Dense>

#include <map>
#include <tuple>
#include <vector>

namespace collapse {

struct GradedVectorSpace {
    std::vector<int> dims;

    int dim(int q) const { return (q >= 0 && q < int(dims.size())) ? dims[q] : 0; }
    int top() const { return int(dims.size()) - 1; }
    int total() const;
    void validate() const;  // throws on negative entries
};

/// Finite cochain complex over the reals with per-degree inner products.
/// d[q] maps degree q to degree q+1 and has shape dim(q+1) x dim(q).
struct CochainComplex {
    GradedVectorSpace spaces;
    std::vector<Eigen::MatrixXd> d;
    std::vector<Eigen::MatrixXd> gram;

    static CochainComplex withIdentityGram(GradedVectorSpace spaces,
                                           std::vector<Eigen::MatrixXd> d);
    void validateShapes() const;
};

/// Exact-arithmetic twin of CochainComplex; used wherever the answer is an
/// integer (ranks, Betti numbers, spectral sequences).
struct RationalCochainComplex {
    GradedVectorSpace spaces;
    std::vector<MatQ> d;

    CochainComplex toFloat() const;  // identity gram
    void validateShapes() const;
};

struct SpectrumReport {
    int degree = 0;
    std::vector<double> eigenvalues;    // strictly increasing after clustering
    std::vector<int> multiplicities;
    double tolerance = 1e-8;

    int count() const;
    std::vector<double> expanded() const;  // eigenvalues repeated by multiplicity
    void validate() const;
};

/// Cluster an ascending list of eigenvalues by relative tolerance; values
/// below absFloor of the largest magnitude are merged by absolute distance.
SpectrumReport clusterEigenvalues(int degree, const std::vector<double>& ascending,
                                  double relTol = 1e-8, double absFloor = 0.0);

bool check_complex(const CochainComplex& c);
bool check_complex(const RationalCochainComplex& c);

/// Matrix pair (K, G) of the Dirichlet quadratic form
/// |d x|^2 + |d^* x|^2 at degree p; eigenvalues solve K x = lambda G x.
struct LaplacianPair {
    Eigen::MatrixXd stiffness;
    Eigen::MatrixXd gram;
};

LaplacianPair laplacian(const CochainComplex& c, int p);

/// k smallest eigenvalues of the degree-p Laplacian, ascending, clustered.
SpectrumReport spectrum(const CochainComplex& c, int p, int k, double clusterTol = 1e-8);

/// Exact Betti numbers per degree.
std::vector<int> cohomology_dims(const RationalCochainComplex& c);

/// Filtration given per basis vector; the differential must not decrease it.
struct FilteredComplex {
    RationalCochainComplex complex;
    std::vector<std::vector<int>> filtration;  // filtration[q][i] >= 0

    void validate() const;
    int maxFiltration() const;
};

struct SpectralPages {
    int rMax = 1;
    std::map<std::tuple<int, int, int>, int> pages;  // (r, p, q) -> dim, nonzero only
    std::map<std::pair<int, int>, int> infinity;     // (p, q) -> dim

    int dim(int r, int p, int q) const;
    int dimInfinity(int p, int q) const;
    std::vector<int> infinityTotals(int maxDegree) const;
};

SpectralPages spectral_pages(const FilteredComplex& f, int rMax);

}  // namespace collapse

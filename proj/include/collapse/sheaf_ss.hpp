#pragma once

#include "collapse/graded.hpp"
#include "collapse/rational.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace collapse {

/// Finite simplicial complex, simplices as ascending vertex tuples.
struct SimplicialComplexData {
    int vertexCount = 0;
    std::vector<std::vector<std::vector<int>>> simplices;  // simplices[k]: (k+1)-tuples

    int topDimension() const { return int(simplices.size()) - 1; }
    int simplexIndex(int k, const std::vector<int>& verts) const;
    void validate() const;  // faces present, boundary squares to zero
};

/// Flat real line bundle as +-1 weights on edges; the product around every
/// 2-simplex boundary must be +1.
struct LocalSystemZ2 {
    std::map<std::pair<int, int>, int> edgeWeight;  // ascending pairs -> +-1

    static LocalSystemZ2 trivial();
    int weight(int u, int v) const;  // defaults to +1
    void validate(const SimplicialComplexData& x) const;
};

/// Rational 2-cochain with coefficients in the local system.
struct EulerCocycle {
    std::vector<Rat> values;  // per 2-simplex

    static EulerCocycle zero(const SimplicialComplexData& x);
    void validateClosed(const SimplicialComplexData& x, const LocalSystemZ2& s) const;
};

/// Twisted simplicial coboundary matrices (exact).
std::vector<MatQ> coboundaries(const SimplicialComplexData& x, const LocalSystemZ2& s);

/// Betti numbers of H^*(X; local system), exact.
std::vector<int> cohomology_local(const SimplicialComplexData& x, const LocalSystemZ2& s);

/// Rank of cup multiplication by chi: H^{p-1}(X; O) -> H^{p+1}(X; R), exact.
int euler_mult_rank(const SimplicialComplexData& x, const LocalSystemZ2& s,
                    const EulerCocycle& chi, int p);

/// Nonvanishing of the Gysin multiplication in one of the two slots feeding
/// degree p; the necessary condition for small p-form eigenvalues under
/// codimension-one collapse.
bool gysin_criterion(const SimplicialComplexData& x, const LocalSystemZ2& s,
                     const EulerCocycle& chi, int p);

/// b_p(X) + b_{p-1}(X; O): the small-eigenvalue budget for circle-bundle collapse.
int small_eig_budget(const SimplicialComplexData& x, const LocalSystemZ2& s, int p);

/// Sheaf on a closed interval with one interior stratum and two endpoint
/// strata; restriction maps point from the endpoint stalks into the interior.
struct StratifiedIntervalSheaf {
    GradedVectorSpace interior;
    GradedVectorSpace end0, end1;
    std::vector<MatQ> restrict0;  // per degree: interior-dim x end0-dim
    std::vector<MatQ> restrict1;

    void validate() const;
    int topDegree() const;
};

struct E2Table {
    std::map<std::pair<int, int>, int> dims;  // (p, q) -> dim, nonzero entries

    int dim(int p, int q) const;
    std::vector<int> totals(int maxDegree) const;  // sum over p+q = n
};

/// Two-chart Cech cohomology of the interval sheaf, per fiber degree.
E2Table interval_sheaf_e2(const StratifiedIntervalSheaf& sh);

/// The same data as a filtered total complex (for cross-checking against
/// spectral_pages).
FilteredComplex filtered_complex_of(const StratifiedIntervalSheaf& sh);

/// Registry: "circle", "s2-tetra", "t2-min".
SimplicialComplexData named_complex(const std::string& name);
/// Bundled interval sheaf: "interval-ex5", "interval-constant".
StratifiedIntervalSheaf named_interval_sheaf(const std::string& name);

}  // namespace collapse

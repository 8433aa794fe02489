#include "collapse/graded.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace collapse {

int GradedVectorSpace::total() const {
    return std::accumulate(dims.begin(), dims.end(), 0);
}

void GradedVectorSpace::validate() const {
    for (int d : dims)
        if (d < 0) throw std::invalid_argument("GradedVectorSpace: negative dimension");
}

CochainComplex CochainComplex::withIdentityGram(GradedVectorSpace spaces,
                                                std::vector<Eigen::MatrixXd> d) {
    CochainComplex c;
    c.spaces = std::move(spaces);
    c.d = std::move(d);
    for (int q = 0; q <= c.spaces.top(); ++q)
        c.gram.push_back(Eigen::MatrixXd::Identity(c.spaces.dim(q), c.spaces.dim(q)));
    c.validateShapes();
    return c;
}

void CochainComplex::validateShapes() const {
    spaces.validate();
    if (int(gram.size()) != spaces.top() + 1)
        throw std::invalid_argument("CochainComplex: gram block count mismatch");
    for (int q = 0; q <= spaces.top(); ++q) {
        if (gram[q].rows() != spaces.dim(q) || gram[q].cols() != spaces.dim(q))
            throw std::invalid_argument("CochainComplex: gram shape mismatch");
    }
    for (int q = 0; q < int(d.size()); ++q) {
        if (d[q].rows() != spaces.dim(q + 1) || d[q].cols() != spaces.dim(q))
            throw std::invalid_argument("CochainComplex: differential shape mismatch");
    }
}

void RationalCochainComplex::validateShapes() const {
    spaces.validate();
    for (int q = 0; q < int(d.size()); ++q) {
        if (d[q].rows() != spaces.dim(q + 1) || d[q].cols() != spaces.dim(q))
            throw std::invalid_argument("RationalCochainComplex: differential shape mismatch");
    }
}

CochainComplex RationalCochainComplex::toFloat() const {
    std::vector<Eigen::MatrixXd> dd;
    dd.reserve(d.size());
    for (const MatQ& m : d) dd.push_back(m.toDouble());
    return CochainComplex::withIdentityGram(spaces, std::move(dd));
}

int SpectrumReport::count() const {
    return std::accumulate(multiplicities.begin(), multiplicities.end(), 0);
}

std::vector<double> SpectrumReport::expanded() const {
    std::vector<double> out;
    for (size_t i = 0; i < eigenvalues.size(); ++i)
        out.insert(out.end(), multiplicities[i], eigenvalues[i]);
    return out;
}

void SpectrumReport::validate() const {
    if (eigenvalues.size() != multiplicities.size())
        throw std::invalid_argument("SpectrumReport: length mismatch");
    for (size_t i = 0; i < eigenvalues.size(); ++i) {
        if (multiplicities[i] <= 0) throw std::invalid_argument("SpectrumReport: nonpositive multiplicity");
        if (i > 0 && eigenvalues[i] <= eigenvalues[i - 1])
            throw std::invalid_argument("SpectrumReport: not strictly increasing");
    }
}

SpectrumReport clusterEigenvalues(int degree, const std::vector<double>& ascending,
                                  double relTol, double absFloor) {
    SpectrumReport rep;
    rep.degree = degree;
    rep.tolerance = relTol;
    size_t i = 0;
    while (i < ascending.size()) {
        size_t j = i + 1;
        double sum = ascending[i];
        while (j < ascending.size()) {
            double gapTol = relTol * std::max(std::abs(ascending[j]), std::abs(ascending[i])) + absFloor;
            if (ascending[j] - ascending[j - 1] > gapTol) break;
            sum += ascending[j];
            ++j;
        }
        rep.eigenvalues.push_back(sum / double(j - i));
        rep.multiplicities.push_back(int(j - i));
        i = j;
    }
    return rep;
}

bool check_complex(const CochainComplex& c) {
    c.validateShapes();
    for (int q = 0; q + 1 < int(c.d.size()); ++q) {
        Eigen::MatrixXd comp = c.d[q + 1] * c.d[q];
        double scale = c.d[q + 1].norm() * c.d[q].norm();
        if (comp.norm() > scale * 1e-12 + 1e-300) return false;
    }
    return true;
}

bool check_complex(const RationalCochainComplex& c) {
    c.validateShapes();
    for (int q = 0; q + 1 < int(c.d.size()); ++q)
        if (!(c.d[q + 1] * c.d[q]).isZero()) return false;
    return true;
}

namespace {

Eigen::MatrixXd diffBlock(const CochainComplex& c, int q) {
    if (q >= 0 && q < int(c.d.size())) return c.d[q];
    return Eigen::MatrixXd::Zero(c.spaces.dim(q + 1), c.spaces.dim(q));
}

void requireSpd(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("gram matrix is not symmetric positive definite");
}

}  // namespace

LaplacianPair laplacian(const CochainComplex& c, int p) {
    c.validateShapes();
    int n = c.spaces.dim(p);
    LaplacianPair out{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Identity(n, n)};
    if (n == 0) return out;
    out.gram = c.gram[p];

    Eigen::MatrixXd up = diffBlock(c, p);  // degree p -> p+1
    if (up.rows() > 0) out.stiffness += up.transpose() * c.gram[p + 1] * up;

    Eigen::MatrixXd down = diffBlock(c, p - 1);  // degree p-1 -> p
    if (p >= 1 && down.cols() > 0) {
        Eigen::LLT<Eigen::MatrixXd> llt(c.gram[p - 1]);
        requireSpd(llt);
        // G_p D G_{p-1}^{-1} D^T G_p
        Eigen::MatrixXd gd = out.gram * down;
        out.stiffness += gd * llt.solve(gd.transpose());
    }
    out.stiffness = 0.5 * (out.stiffness + out.stiffness.transpose().eval());
    return out;
}

SpectrumReport spectrum(const CochainComplex& c, int p, int k, double clusterTol) {
    LaplacianPair lp = laplacian(c, p);
    int n = int(lp.stiffness.rows());
    if (n == 0 || k <= 0) {
        SpectrumReport rep;
        rep.degree = p;
        rep.tolerance = clusterTol;
        return rep;
    }
    if (k > n) throw std::invalid_argument("spectrum: k exceeds the degree dimension");

    Eigen::LLT<Eigen::MatrixXd> llt(lp.gram);
    requireSpd(llt);
    Eigen::MatrixXd l = llt.matrixL();
    Eigen::MatrixXd b = l.triangularView<Eigen::Lower>().solve(lp.stiffness);
    b = l.triangularView<Eigen::Lower>().solve(b.transpose().eval());
    b = 0.5 * (b + b.transpose().eval());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("spectrum: eigensolver failed");
    std::vector<double> vals(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(vals.begin(), vals.end());
    vals.resize(k);
    double scale = std::max(1.0, lp.stiffness.norm());
    return clusterEigenvalues(p, vals, clusterTol, clusterTol * scale * 1e-4);
}

std::vector<int> cohomology_dims(const RationalCochainComplex& c) {
    c.validateShapes();
    if (!check_complex(c)) throw std::invalid_argument("cohomology_dims: d^2 != 0");
    int top = c.spaces.top();
    std::vector<int> betti(top + 1, 0);
    std::vector<int> rk(top + 2, 0);
    for (int q = 0; q <= top; ++q) {
        if (q < int(c.d.size()) && c.d[q].rows() > 0 && c.d[q].cols() > 0) rk[q] = c.d[q].rank();
        else rk[q] = 0;
    }
    for (int q = 0; q <= top; ++q) {
        int kerDim = c.spaces.dim(q) - rk[q];
        int imDim = (q >= 1) ? rk[q - 1] : 0;
        betti[q] = kerDim - imDim;
    }
    return betti;
}

void FilteredComplex::validate() const {
    complex.validateShapes();
    if (int(filtration.size()) != complex.spaces.top() + 1)
        throw std::invalid_argument("FilteredComplex: filtration degree count mismatch");
    for (int q = 0; q <= complex.spaces.top(); ++q) {
        if (int(filtration[q].size()) != complex.spaces.dim(q))
            throw std::invalid_argument("FilteredComplex: filtration length mismatch");
        for (int v : filtration[q])
            if (v < 0) throw std::invalid_argument("FilteredComplex: negative filtration");
    }
    // d must not decrease filtration, checked entry-wise on generators
    for (int q = 0; q < int(complex.d.size()); ++q) {
        const MatQ& m = complex.d[q];
        for (int j = 0; j < m.cols(); ++j)
            for (int i = 0; i < m.rows(); ++i)
                if (m(i, j) != 0 && filtration[q + 1][i] < filtration[q][j])
                    throw std::invalid_argument("FilteredComplex: differential decreases filtration");
    }
}

int FilteredComplex::maxFiltration() const {
    int m = 0;
    for (const auto& f : filtration)
        for (int v : f) m = std::max(m, v);
    return m;
}

int SpectralPages::dim(int r, int p, int q) const {
    auto it = pages.find({r, p, q});
    return it == pages.end() ? 0 : it->second;
}

int SpectralPages::dimInfinity(int p, int q) const {
    auto it = infinity.find({p, q});
    return it == infinity.end() ? 0 : it->second;
}

std::vector<int> SpectralPages::infinityTotals(int maxDegree) const {
    std::vector<int> totals(maxDegree + 1, 0);
    for (const auto& [pq, d] : infinity) {
        int n = pq.first + pq.second;
        if (n >= 0 && n <= maxDegree) totals[n] += d;
    }
    return totals;
}

namespace {

// Columns of degree n with filtration >= p, and the corresponding picker.
std::vector<int> filterIndices(const FilteredComplex& f, int degree, int minFilt) {
    std::vector<int> idx;
    if (degree < 0 || degree > f.complex.spaces.top()) return idx;
    for (int i = 0; i < f.complex.spaces.dim(degree); ++i)
        if (f.filtration[degree][i] >= minFilt) idx.push_back(i);
    return idx;
}

MatQ diffQ(const FilteredComplex& f, int degree) {
    if (degree >= 0 && degree < int(f.complex.d.size())) return f.complex.d[degree];
    return MatQ(f.complex.spaces.dim(degree + 1), f.complex.spaces.dim(degree));
}

// Basis (columns, in full degree-n coordinates) of
// Z_r^{p,q} = { x in F^p C^n : d x in F^{p+r} C^{n+1} },  n = p + q.
MatQ cycleBasis(const FilteredComplex& f, int r, int p, int n) {
    int dimN = f.complex.spaces.dim(n);
    std::vector<int> cols = filterIndices(f, n, p);
    if (cols.empty()) return MatQ(dimN, 0);
    std::vector<int> lowRows;
    for (int i = 0; i < f.complex.spaces.dim(n + 1); ++i)
        if (f.filtration[n + 1][i] < p + r) lowRows.push_back(i);

    MatQ sub = diffQ(f, n).rowsSubset(lowRows).columns(cols);
    MatQ ker = sub.nullspaceBasis();
    MatQ out(dimN, ker.cols());
    for (int j = 0; j < ker.cols(); ++j)
        for (int i = 0; i < int(cols.size()); ++i) out(cols[i], j) = ker(i, j);
    return out;
}

}  // namespace

SpectralPages spectral_pages(const FilteredComplex& f, int rMax) {
    if (rMax < 1) throw std::invalid_argument("spectral_pages: rMax must be >= 1");
    f.validate();

    SpectralPages out;
    out.rMax = rMax;
    int maxFilt = f.maxFiltration();
    int rStable = maxFilt + 2;  // beyond this every Z_r and boundary term is stationary
    int topDeg = f.complex.spaces.top();

    auto pageDim = [&](int r, int p, int q) -> int {
        int n = p + q;
        if (n < 0 || n > topDeg) return 0;
        MatQ z = cycleBasis(f, r, p, n);
        if (z.cols() == 0) return 0;
        MatQ zInner = cycleBasis(f, r - 1, p + 1, n);          // Z_{r-1}^{p+1, q-1}
        MatQ zBelow = cycleBasis(f, r - 1, p - r + 1, n - 1);  // Z_{r-1}^{p-r+1, q+r-2}
        MatQ dzBelow = (n >= 1 && zBelow.cols() > 0) ? diffQ(f, n - 1) * zBelow
                                                     : MatQ(f.complex.spaces.dim(n), 0);
        // the boundary subspace sits inside Z_r, so the quotient dim is a difference
        return z.cols() - rankOfConcat({zInner, dzBelow});
    };

    for (int r = 1; r <= rMax; ++r)
        for (int p = 0; p <= maxFilt; ++p)
            for (int n = 0; n <= topDeg; ++n) {
                int q = n - p;
                int d = pageDim(std::min(r, rStable), p, q);
                if (d != 0) out.pages[{r, p, q}] = d;
            }

    for (int p = 0; p <= maxFilt; ++p)
        for (int n = 0; n <= topDeg; ++n) {
            int q = n - p;
            int d = pageDim(rStable, p, q);
            if (d != 0) out.infinity[{p, q}] = d;
        }
    return out;
}

}  // namespace collapse

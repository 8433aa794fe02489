#include "collapse/sheaf_ss.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace collapse {

int SimplicialComplexData::simplexIndex(int k, const std::vector<int>& verts) const {
    if (k < 0 || k > topDimension()) return -1;
    const auto& list = simplices[k];
    auto it = std::lower_bound(list.begin(), list.end(), verts);
    if (it == list.end() || *it != verts) return -1;
    return int(it - list.begin());
}

void SimplicialComplexData::validate() const {
    if (vertexCount <= 0) throw std::invalid_argument("SimplicialComplexData: no vertices");
    if (simplices.empty() || int(simplices[0].size()) != vertexCount)
        throw std::invalid_argument("SimplicialComplexData: vertex list must enumerate all vertices");
    for (int k = 0; k <= topDimension(); ++k) {
        std::set<std::vector<int>> seen;
        for (const auto& s : simplices[k]) {
            if (int(s.size()) != k + 1)
                throw std::invalid_argument("SimplicialComplexData: simplex arity mismatch");
            if (!std::is_sorted(s.begin(), s.end()) ||
                std::adjacent_find(s.begin(), s.end()) != s.end())
                throw std::invalid_argument("SimplicialComplexData: vertices must be strictly ascending");
            for (int v : s)
                if (v < 0 || v >= vertexCount)
                    throw std::invalid_argument("SimplicialComplexData: vertex out of range");
            if (!seen.insert(s).second)
                throw std::invalid_argument("SimplicialComplexData: duplicate simplex");
        }
        if (!std::is_sorted(simplices[k].begin(), simplices[k].end()))
            throw std::invalid_argument("SimplicialComplexData: simplices must be sorted");
        if (k >= 1)
            for (const auto& s : simplices[k])
                for (int drop = 0; drop <= k; ++drop) {
                    std::vector<int> face;
                    for (int i = 0; i <= k; ++i)
                        if (i != drop) face.push_back(s[i]);
                    if (simplexIndex(k - 1, face) < 0)
                        throw std::invalid_argument("SimplicialComplexData: missing face");
                }
    }
    // boundary-of-boundary vanishes: implied by the signed face structure,
    // verified on the untwisted coboundaries
    RationalCochainComplex c;
    for (int k = 0; k <= topDimension(); ++k) c.spaces.dims.push_back(int(simplices[k].size()));
    c.d = coboundaries(*this, LocalSystemZ2::trivial());
    if (!check_complex(c)) throw std::invalid_argument("SimplicialComplexData: boundary does not square to zero");
}

LocalSystemZ2 LocalSystemZ2::trivial() { return LocalSystemZ2{}; }

int LocalSystemZ2::weight(int u, int v) const {
    if (u == v) return 1;
    auto key = std::minmax(u, v);
    auto it = edgeWeight.find({key.first, key.second});
    return it == edgeWeight.end() ? 1 : it->second;
}

void LocalSystemZ2::validate(const SimplicialComplexData& x) const {
    for (const auto& [edge, w] : edgeWeight) {
        if (w != 1 && w != -1) throw std::invalid_argument("LocalSystemZ2: weights must be +-1");
        if (x.simplexIndex(1, {edge.first, edge.second}) < 0)
            throw std::invalid_argument("LocalSystemZ2: weight on a missing edge");
    }
    if (x.topDimension() >= 2)
        for (const auto& t : x.simplices[2]) {
            int prod = weight(t[0], t[1]) * weight(t[1], t[2]) * weight(t[0], t[2]);
            if (prod != 1)
                throw std::invalid_argument("LocalSystemZ2: cocycle condition fails on a 2-simplex");
        }
}

EulerCocycle EulerCocycle::zero(const SimplicialComplexData& x) {
    EulerCocycle chi;
    if (x.topDimension() >= 2) chi.values.assign(x.simplices[2].size(), Rat(0));
    return chi;
}

std::vector<MatQ> coboundaries(const SimplicialComplexData& x, const LocalSystemZ2& s) {
    std::vector<MatQ> d;
    for (int k = 0; k < x.topDimension(); ++k) {
        MatQ dk(int(x.simplices[k + 1].size()), int(x.simplices[k].size()));
        for (int row = 0; row < int(x.simplices[k + 1].size()); ++row) {
            const auto& tau = x.simplices[k + 1][row];
            for (int drop = 0; drop <= k + 1; ++drop) {
                std::vector<int> face;
                for (int i = 0; i <= k + 1; ++i)
                    if (i != drop) face.push_back(tau[i]);
                int col = x.simplexIndex(k, face);
                int sign = (drop % 2 == 0) ? 1 : -1;
                // dropping the base vertex transports the value along the first edge
                int transport = (drop == 0) ? s.weight(tau[0], tau[1]) : 1;
                dk(row, col) += Rat(sign * transport);
            }
        }
        d.push_back(dk);
    }
    return d;
}

std::vector<int> cohomology_local(const SimplicialComplexData& x, const LocalSystemZ2& s) {
    x.validate();
    s.validate(x);
    RationalCochainComplex c;
    for (int k = 0; k <= x.topDimension(); ++k) c.spaces.dims.push_back(int(x.simplices[k].size()));
    c.d = coboundaries(x, s);
    return cohomology_dims(c);
}

namespace {

// Front-face/back-face cup product of an O-valued (p-1)-cochain with an
// O-valued 2-cocycle; the two local-system indices contract after the back
// value is transported to the front base vertex.
MatQ cupWithChi(const SimplicialComplexData& x, const LocalSystemZ2& s, const EulerCocycle& chi,
                int p) {
    int rows = int(x.simplices[p + 1].size());
    int cols = int(x.simplices[p - 1].size());
    MatQ m(rows, cols);
    for (int row = 0; row < rows; ++row) {
        const auto& sigma = x.simplices[p + 1][row];
        std::vector<int> front(sigma.begin(), sigma.begin() + p);
        std::vector<int> back(sigma.begin() + (p - 1), sigma.end());
        int fi = x.simplexIndex(p - 1, front);
        int bi = x.simplexIndex(2, back);
        int transport = s.weight(sigma[0], sigma[p - 1]);
        m(row, fi) += Rat(transport) * chi.values[bi];
    }
    return m;
}

}  // namespace

void EulerCocycle::validateClosed(const SimplicialComplexData& x, const LocalSystemZ2& s) const {
    if (x.topDimension() < 2) {
        if (!values.empty()) throw std::invalid_argument("EulerCocycle: no 2-simplices");
        return;
    }
    if (int(values.size()) != int(x.simplices[2].size()))
        throw std::invalid_argument("EulerCocycle: value count mismatch");
    if (x.topDimension() < 3) return;  // coboundary lives in degree 3
    std::vector<MatQ> d = coboundaries(x, s);
    MatQ v(int(values.size()), 1);
    for (int i = 0; i < int(values.size()); ++i) v(i, 0) = values[i];
    if (!(d[2] * v).isZero()) throw std::invalid_argument("EulerCocycle: not closed");
}

int euler_mult_rank(const SimplicialComplexData& x, const LocalSystemZ2& s, const EulerCocycle& chi,
                    int p) {
    x.validate();
    s.validate(x);
    chi.validateClosed(x, s);
    if (p - 1 < 0 || p + 1 > x.topDimension()) return 0;
    if (x.topDimension() < 2) return 0;

    std::vector<MatQ> dTwisted = coboundaries(x, s);
    std::vector<MatQ> dPlain = coboundaries(x, LocalSystemZ2::trivial());

    // cocycle representatives of H^{p-1}(X; O)
    MatQ cocycles = (p - 1 < int(dTwisted.size()))
                        ? dTwisted[p - 1].nullspaceBasis()
                        : MatQ::identity(int(x.simplices[p - 1].size()));
    if (cocycles.cols() == 0) return 0;

    MatQ image = cupWithChi(x, s, chi, p) * cocycles;
    MatQ coboundariesReal = (p >= 0 && p < int(dPlain.size()))
                                ? dPlain[p]
                                : MatQ(int(x.simplices[p + 1].size()), 0);
    int base = coboundariesReal.cols() > 0 ? coboundariesReal.rank() : 0;
    return rankOfConcat({image, coboundariesReal}) - base;
}

bool gysin_criterion(const SimplicialComplexData& x, const LocalSystemZ2& s, const EulerCocycle& chi,
                     int p) {
    return euler_mult_rank(x, s, chi, p) > 0 || euler_mult_rank(x, s, chi, p - 1) > 0;
}

int small_eig_budget(const SimplicialComplexData& x, const LocalSystemZ2& s, int p) {
    std::vector<int> plain = cohomology_local(x, LocalSystemZ2::trivial());
    std::vector<int> twisted = cohomology_local(x, s);
    int bp = (p >= 0 && p < int(plain.size())) ? plain[p] : 0;
    int bq = (p - 1 >= 0 && p - 1 < int(twisted.size())) ? twisted[p - 1] : 0;
    return bp + bq;
}

void StratifiedIntervalSheaf::validate() const {
    interior.validate();
    end0.validate();
    end1.validate();
    int top = topDegree();
    if (int(restrict0.size()) < top + 1 || int(restrict1.size()) < top + 1)
        throw std::invalid_argument("StratifiedIntervalSheaf: restriction map count mismatch");
    for (int q = 0; q <= top; ++q) {
        if (restrict0[q].rows() != interior.dim(q) || restrict0[q].cols() != end0.dim(q))
            throw std::invalid_argument("StratifiedIntervalSheaf: restriction shape (endpoint 0)");
        if (restrict1[q].rows() != interior.dim(q) || restrict1[q].cols() != end1.dim(q))
            throw std::invalid_argument("StratifiedIntervalSheaf: restriction shape (endpoint 1)");
    }
}

int StratifiedIntervalSheaf::topDegree() const {
    return std::max({interior.top(), end0.top(), end1.top()});
}

int E2Table::dim(int p, int q) const {
    auto it = dims.find({p, q});
    return it == dims.end() ? 0 : it->second;
}

std::vector<int> E2Table::totals(int maxDegree) const {
    std::vector<int> t(maxDegree + 1, 0);
    for (const auto& [pq, d] : dims) {
        int n = pq.first + pq.second;
        if (n >= 0 && n <= maxDegree) t[n] += d;
    }
    return t;
}

E2Table interval_sheaf_e2(const StratifiedIntervalSheaf& sh) {
    sh.validate();
    E2Table out;
    for (int q = 0; q <= sh.topDegree(); ++q) {
        // two-chart Cech complex: S0 + S1 -> W, (a, b) -> r0 a - r1 b
        MatQ diff = sh.restrict0[q].hcat(sh.restrict1[q] * Rat(-1));
        int rank = (diff.rows() > 0 && diff.cols() > 0) ? diff.rank() : 0;
        int h0 = sh.end0.dim(q) + sh.end1.dim(q) - rank;
        int h1 = sh.interior.dim(q) - rank;
        if (h0 > 0) out.dims[{0, q}] = h0;
        if (h1 > 0) out.dims[{1, q}] = h1;
    }
    return out;
}

FilteredComplex filtered_complex_of(const StratifiedIntervalSheaf& sh) {
    sh.validate();
    int top = sh.topDegree();
    FilteredComplex f;
    // total degree n combines (p=0, q=n) chart sections with (p=1, q=n-1) overlap sections
    for (int n = 0; n <= top + 1; ++n) {
        int chart = (n <= top) ? sh.end0.dim(n) + sh.end1.dim(n) : 0;
        int overlap = (n >= 1) ? sh.interior.dim(n - 1) : 0;
        f.complex.spaces.dims.push_back(chart + overlap);
        std::vector<int> filt(chart, 0);
        filt.insert(filt.end(), overlap, 1);
        f.filtration.push_back(filt);
    }
    for (int n = 0; n <= top; ++n) {
        int rows = f.complex.spaces.dim(n + 1);
        int cols = f.complex.spaces.dim(n);
        MatQ d(rows, cols);
        // chart part of degree n maps into the overlap part of degree n+1
        int chartCols = (n <= top) ? sh.end0.dim(n) + sh.end1.dim(n) : 0;
        int rowOffset = (n + 1 <= top) ? sh.end0.dim(n + 1) + sh.end1.dim(n + 1) : 0;
        for (int c = 0; c < sh.end0.dim(n); ++c)
            for (int r = 0; r < sh.interior.dim(n); ++r)
                d(rowOffset + r, c) = sh.restrict0[n](r, c);
        for (int c = 0; c < sh.end1.dim(n); ++c)
            for (int r = 0; r < sh.interior.dim(n); ++r)
                d(rowOffset + r, sh.end0.dim(n) + c) = -sh.restrict1[n](r, c);
        (void)chartCols;
        f.complex.d.push_back(d);
    }
    f.validate();
    return f;
}

namespace {

SimplicialComplexData circleComplex() {
    SimplicialComplexData x;
    x.vertexCount = 3;
    x.simplices = {{{0}, {1}, {2}}, {{0, 1}, {0, 2}, {1, 2}}};
    return x;
}

SimplicialComplexData tetrahedronBoundary() {
    SimplicialComplexData x;
    x.vertexCount = 4;
    x.simplices = {{{0}, {1}, {2}, {3}},
                   {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}},
                   {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};
    return x;
}

SimplicialComplexData minimalTorus() {
    // 7-vertex triangulation: faces {i, i+1, i+3} and {i, i+2, i+3} mod 7
    SimplicialComplexData x;
    x.vertexCount = 7;
    x.simplices.resize(3);
    for (int v = 0; v < 7; ++v) x.simplices[0].push_back({v});
    std::set<std::vector<int>> edges, faces;
    for (int i = 0; i < 7; ++i) {
        std::vector<int> f1{i, (i + 1) % 7, (i + 3) % 7};
        std::vector<int> f2{i, (i + 2) % 7, (i + 3) % 7};
        for (auto f : {f1, f2}) {
            std::sort(f.begin(), f.end());
            faces.insert(f);
            edges.insert({f[0], f[1]});
            edges.insert({f[0], f[2]});
            edges.insert({f[1], f[2]});
        }
    }
    x.simplices[1].assign(edges.begin(), edges.end());
    x.simplices[2].assign(faces.begin(), faces.end());
    return x;
}

}  // namespace

SimplicialComplexData named_complex(const std::string& name) {
    if (name == "circle") return circleComplex();
    if (name == "s2-tetra") return tetrahedronBoundary();
    if (name == "t2-min") return minimalTorus();
    throw std::invalid_argument("named_complex: unknown name '" + name + "'");
}

StratifiedIntervalSheaf named_interval_sheaf(const std::string& name) {
    StratifiedIntervalSheaf sh;
    if (name == "interval-ex5") {
        // interior stalks R, R^2, R in degrees 0..2; endpoint stalks R, R, 0
        // with complementary line inclusions in degree 1
        sh.interior.dims = {1, 2, 1};
        sh.end0.dims = {1, 1, 0};
        sh.end1.dims = {1, 1, 0};
        sh.restrict0 = {MatQ(1, 1, {Rat(1)}), MatQ(2, 1, {Rat(1), Rat(0)}), MatQ(1, 0)};
        sh.restrict1 = {MatQ(1, 1, {Rat(1)}), MatQ(2, 1, {Rat(0), Rat(1)}), MatQ(1, 0)};
        return sh;
    }
    if (name == "interval-constant") {
        sh.interior.dims = {1};
        sh.end0.dims = {1};
        sh.end1.dims = {1};
        sh.restrict0 = {MatQ(1, 1, {Rat(1)})};
        sh.restrict1 = {MatQ(1, 1, {Rat(1)})};
        return sh;
    }
    throw std::invalid_argument("named_interval_sheaf: unknown name '" + name + "'");
}

}  // namespace collapse

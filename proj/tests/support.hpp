#pragma once

#include "collapse/graded.hpp"
#include "collapse/superconn.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace collapse::testing {

using Rng = std::mt19937_64;

/// Random cochain complex with d^2 = 0 exactly, built from elementary
/// two-term pieces and conjugated by well-conditioned changes of basis.
inline CochainComplex randomComplex(Rng& rng, int maxDegrees = 4, int maxDim = 6) {
    std::uniform_int_distribution<int> degDist(2, maxDegrees);
    std::uniform_int_distribution<int> dimDist(1, maxDim);
    std::uniform_real_distribution<double> scaleDist(0.2, 3.0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    int top = degDist(rng);
    GradedVectorSpace spaces;
    for (int q = 0; q <= top; ++q) spaces.dims.push_back(dimDist(rng));

    std::vector<Eigen::MatrixXd> d;
    std::vector<int> used(top + 1, 0);  // slots consumed by incoming arrows
    for (int q = 0; q < top; ++q) {
        int nq = spaces.dim(q), nq1 = spaces.dim(q + 1);
        Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(nq1, nq);
        int freeSrc = nq - used[q];
        int arrows = std::uniform_int_distribution<int>(0, std::min(freeSrc, nq1))(rng);
        for (int a = 0; a < arrows; ++a) dq(a, used[q] + a) = scaleDist(rng);
        used[q + 1] = arrows;
        d.push_back(dq);
    }
    // conjugate by invertible maps; compositions stay exactly zero
    std::vector<Eigen::MatrixXd> s(top + 1);
    for (int q = 0; q <= top; ++q) {
        int n = spaces.dim(q);
        Eigen::MatrixXd r(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r(i, j) = 0.3 * unit(rng);
        s[q] = Eigen::MatrixXd::Identity(n, n) + r;
    }
    for (int q = 0; q < top; ++q) d[q] = s[q + 1] * d[q] * s[q].inverse();

    CochainComplex c;
    c.spaces = spaces;
    c.d = d;
    for (int q = 0; q <= top; ++q) {
        int n = spaces.dim(q);
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = 0.4 * unit(rng);
        c.gram.push_back(Eigen::MatrixXd::Identity(n, n) + a.transpose() * a);
    }
    c.validateShapes();
    return c;
}

/// Rational filtered complex with a valid filtration, exact d^2 = 0.
inline FilteredComplex randomFilteredComplex(Rng& rng, int maxDegrees = 3, int maxDim = 5,
                                             int maxFilt = 3) {
    std::uniform_int_distribution<int> degDist(2, maxDegrees);
    std::uniform_int_distribution<int> dimDist(1, maxDim);
    std::uniform_int_distribution<int> filtDist(0, maxFilt);
    std::uniform_int_distribution<int> entryDist(-2, 2);

    int top = degDist(rng);
    GradedVectorSpace spaces;
    for (int q = 0; q <= top; ++q) spaces.dims.push_back(dimDist(rng));

    std::vector<std::vector<int>> filt;
    for (int q = 0; q <= top; ++q) {
        std::vector<int> f(spaces.dim(q));
        for (int& v : f) v = filtDist(rng);
        filt.push_back(f);
    }

    std::vector<MatQ> d;
    std::vector<int> used(top + 1, 0);
    for (int q = 0; q < top; ++q) {
        int nq = spaces.dim(q), nq1 = spaces.dim(q + 1);
        MatQ dq(nq1, nq);
        int freeSrc = nq - used[q];
        int arrows = std::uniform_int_distribution<int>(0, std::min(freeSrc, nq1))(rng);
        for (int a = 0; a < arrows; ++a) {
            int src = used[q] + a, dst = a;
            if (filt[q + 1][dst] < filt[q][src]) filt[q + 1][dst] = filt[q][src];
            dq(dst, src) = Rat(1 + std::uniform_int_distribution<int>(0, 2)(rng));
        }
        used[q + 1] = arrows;
        d.push_back(dq);
    }
    // filtration-preserving change of basis: e_j may spill into e_i when filt_i >= filt_j
    std::vector<MatQ> s(top + 1), sInv(top + 1);
    for (int q = 0; q <= top; ++q) {
        int n = spaces.dim(q);
        MatQ m = MatQ::identity(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && filt[q][i] >= filt[q][j]) m(i, j) = entryDist(rng);
        // make it unimodular triangular-ish: retry until invertible
        auto inv = m.inverse();
        while (!inv) {
            m = MatQ::identity(n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j && filt[q][i] > filt[q][j]) m(i, j) = entryDist(rng);
            inv = m.inverse();
        }
        s[q] = m;
        sInv[q] = *inv;
    }
    for (int q = 0; q < top; ++q) d[q] = s[q + 1] * d[q] * sInv[q];

    FilteredComplex f;
    f.complex.spaces = spaces;
    f.complex.d = d;
    f.filtration = filt;
    f.validate();
    return f;
}

/// Superconnection with zero-square a0, global +-1 monodromy and identity h.
inline SuperconnData randomSuperconnection(Rng& rng, int maxTop = 3, int maxDim = 4) {
    std::uniform_int_distribution<int> degDist(1, maxTop);
    std::uniform_int_distribution<int> dimDist(1, maxDim);
    std::uniform_real_distribution<double> scaleDist(0.3, 2.0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    int top = degDist(rng);
    SuperconnData s;
    for (int q = 0; q <= top; ++q) s.fiber.dims.push_back(dimDist(rng));
    double sign = (rng() % 2 == 0) ? 1.0 : -1.0;

    std::vector<int> used(top + 1, 0);
    for (int q = 0; q < top; ++q) {
        int nq = s.fiber.dim(q), nq1 = s.fiber.dim(q + 1);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nq1, nq);
        int arrows = std::uniform_int_distribution<int>(0, std::min(nq - used[q], nq1))(rng);
        for (int v = 0; v < arrows; ++v) a(v, used[q] + v) = scaleDist(rng);
        used[q + 1] = arrows;
        s.a0.push_back(a);
    }
    // conjugate by signed permutations: orthogonal, and exact in floating
    // point, so the rational ranks seen downstream match the construction
    std::vector<Eigen::MatrixXd> qmat(top + 1);
    for (int q = 0; q <= top; ++q) {
        int n = s.fiber.dim(q);
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) p(perm[i], i) = (rng() % 2) ? 1.0 : -1.0;
        qmat[q] = p;
    }
    for (int q = 0; q < top; ++q) s.a0[q] = qmat[q + 1] * s.a0[q] * qmat[q].transpose();
    (void)unit;

    for (int q = 0; q <= top; ++q) {
        int n = s.fiber.dim(q);
        s.h.push_back(Eigen::MatrixXd::Identity(n, n));
        s.monodromy.push_back(sign * Eigen::MatrixXd::Identity(n, n));
    }
    s.baseLength = 2.0 + 4.0 * std::uniform_real_distribution<double>(0, 1)(rng);
    s.fourierCutoff = 3;
    s.validate();
    return s;
}

/// Operator norm of the difference a0 - b0 block-wise (identity gram).
inline double superconnDifferenceNorm(const SuperconnData& a, const SuperconnData& b) {
    double n = 0;
    for (size_t q = 0; q < a.a0.size(); ++q) {
        Eigen::MatrixXd diff = a.a0[q] - b.a0[q];
        if (diff.size() > 0)
            n = std::max(n, diff.jacobiSvd().singularValues().coeff(0));
    }
    return n;
}

}  // namespace collapse::testing

#include "collapse/nil_ce.hpp"

#include <doctest.h>

#include <random>

using namespace collapse;

namespace {

Eigen::MatrixXd identity(int n) { return Eigen::MatrixXd::Identity(n, n); }

NilLieAlgebra filiform4() {
    // [e1,e2] = e3, [e1,e3] = e4
    NilLieAlgebra g = named_algebra("abelian-4");
    g.c[2](0, 1) = 1;
    g.c[2](1, 0) = -1;
    g.c[3](0, 2) = 1;
    g.c[3](2, 0) = -1;
    return g;
}

}  // namespace

TEST_CASE("ce_complex: abelian algebra has a zero differential") {
    CEComplex ce = ce_complex(named_algebra("abelian-3"), identity(3));
    CHECK(ce.rational.spaces.dims == std::vector<int>{1, 3, 3, 1});
    for (const MatQ& d : ce.rational.d) CHECK(d.isZero());
    CHECK(cohomology_dims(ce.rational) == std::vector<int>{1, 3, 3, 1});
}

TEST_CASE("ce_complex: heisenberg differential and cohomology") {
    CEComplex ce = ce_complex(named_algebra("heisenberg-3"), identity(3));
    // d e^3 = -e^1 ^ e^2, nothing else
    CHECK(ce.rational.d[0].isZero());
    MatQ d1 = ce.rational.d[1];
    CHECK(d1(0, 2) == Rat(-1));  // monomial e^{12} is first in lex order
    CHECK(d1(0, 0) == 0);
    CHECK(d1(1, 2) == 0);
    CHECK(check_complex(ce.rational));
    CHECK(cohomology_dims(ce.rational) == std::vector<int>{1, 2, 2, 1});
}

TEST_CASE("ce_complex: heisenberg Laplacian spectrum from the explicit 3x3 matrices") {
    CEComplex ce = ce_complex(named_algebra("heisenberg-3"), identity(3));
    // oracle: with the identity metric, Delta_1 = diag(0, 0, 1) in the dual basis
    Eigen::MatrixXd d1 = ce.complex.d[1];
    Eigen::MatrixXd delta1 = d1.transpose() * d1;  // d0 = 0
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(delta1);
    SpectrumReport rep = spectrum(ce.complex, 1, 3);
    std::vector<double> got = rep.expanded();
    REQUIRE(got.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(es.eigenvalues()[i]).epsilon(1e-12));
    CHECK(got[0] == doctest::Approx(0));
    CHECK(got[1] == doctest::Approx(0));
    CHECK(got[2] == doctest::Approx(1));
}

TEST_CASE("invalid structure constants are rejected") {
    NilLieAlgebra bad = named_algebra("abelian-3");
    bad.c[2](0, 1) = 1;  // not antisymmetric
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    // sl2-like constants break nilpotency: [e,f]=h, [h,e]=2e, [h,f]=-2f
    NilLieAlgebra sl2 = named_algebra("abelian-3");
    sl2.c[2](0, 1) = 1;
    sl2.c[2](1, 0) = -1;
    sl2.c[0](2, 0) = 2;
    sl2.c[0](0, 2) = -2;
    sl2.c[1](2, 1) = -2;
    sl2.c[1](1, 2) = 2;
    CHECK_THROWS(sl2.validate());
}

TEST_CASE("invariant_subcomplex: trivial action returns the whole complex") {
    CEComplex ce = ce_complex(named_algebra("heisenberg-3"), identity(3));
    InvariantSubcomplex inv = invariant_subcomplex(ce, named_action("trivial", 3));
    CHECK(inv.dims == std::vector<int>{1, 3, 3, 1});
}

TEST_CASE("invariant_subcomplex: diagonal sign actions") {
    CEComplex ce3 = ce_complex(named_algebra("abelian-3"), identity(3));
    InvariantSubcomplex hw = invariant_subcomplex(ce3, named_action("hw-z2xz2", 3));
    CHECK(hw.dims == std::vector<int>{1, 0, 0, 1});
    CHECK(cohomology_dims(hw.rational) == std::vector<int>{1, 0, 0, 1});

    CEComplex ce2 = ce_complex(named_algebra("abelian-2"), identity(2));
    InvariantSubcomplex minus = invariant_subcomplex(ce2, named_action("minus-identity", 2));
    CHECK(minus.dims == std::vector<int>{1, 0, 1});
}

TEST_CASE("invariant_subcomplex rejects non-automorphisms") {
    CEComplex ce = ce_complex(named_algebra("heisenberg-3"), identity(3));
    GroupActionF f;
    MatQ swap(3, 3);
    swap(0, 2) = 1;  // e1 <-> e3 does not preserve the bracket
    swap(1, 1) = 1;
    swap(2, 0) = 1;
    f.generators.push_back(swap);
    CHECK_THROWS_AS(invariant_subcomplex(ce, f), std::invalid_argument);
}

TEST_CASE("group closure cap") {
    // an infinite-order integer automorphism of the abelian algebra
    MatQ shear = MatQ::identity(2);
    shear(0, 1) = 1;
    CHECK_THROWS_AS(closeGroup({shear}, 64), std::invalid_argument);
}

TEST_CASE("parallel_form_criterion on the bundled data") {
    CEComplex ce3 = ce_complex(named_algebra("abelian-3"), identity(3));
    CHECK(parallel_form_criterion(ce3, named_action("hw-z2xz2", 3), 1, 2));

    CEComplex ce2 = ce_complex(named_algebra("abelian-2"), identity(2));
    CHECK_FALSE(parallel_form_criterion(ce2, named_action("trivial", 2), 1, 1));

    CEComplex h3 = ce_complex(named_algebra("heisenberg-3"), identity(3));
    CHECK_FALSE(parallel_form_criterion(h3, named_action("trivial", 3), 3, 3));
}

TEST_CASE("scale_metric: unit weights are the identity, nonpositive weights rejected") {
    CEComplex ce = ce_complex(named_algebra("heisenberg-3"), identity(3));
    CEComplex same = scale_metric(ce, {1, 1, 1});
    for (int q = 0; q <= 3; ++q)
        CHECK((same.complex.gram[q] - ce.complex.gram[q]).norm() == doctest::Approx(0));
    CHECK_THROWS_AS(scale_metric(ce, {1, -1, 1}), std::invalid_argument);

    CEComplex ab = ce_complex(named_algebra("abelian-3"), identity(3));
    CEComplex abScaled = scale_metric(ab, {0.3, 2.0, 5.0});
    for (const auto& d : abScaled.complex.d) CHECK(d.norm() == doctest::Approx(0));
}

TEST_CASE("uniform scaling law: nonzero eigenvalues scale by 1/t^2") {
    CEComplex ce = ce_complex(named_algebra("heisenberg-3"), identity(3));
    for (double t : {0.5, 0.25, 2.0}) {
        CEComplex scaled = scale_metric(ce, {t * t, t * t, t * t});
        for (int q = 0; q <= 3; ++q) {
            std::vector<double> base = spectrum(ce.complex, q, ce.complex.spaces.dim(q)).expanded();
            std::vector<double> sc =
                spectrum(scaled.complex, q, scaled.complex.spaces.dim(q)).expanded();
            REQUIRE(base.size() == sc.size());
            for (size_t i = 0; i < base.size(); ++i) {
                if (base[i] < 1e-12) CHECK(sc[i] < 1e-10);
                else CHECK(sc[i] == doctest::Approx(base[i] / (t * t)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("poincare duality of CE cohomology for nilpotent algebras") {
    std::mt19937_64 rng(23);
    std::vector<NilLieAlgebra> algebras{named_algebra("abelian-2"), named_algebra("abelian-4"),
                                        named_algebra("heisenberg-3"), filiform4()};
    for (const auto& g : algebras) {
        std::vector<int> betti = cohomology_dims(ce_complex(g, identity(g.n)).rational);
        for (int q = 0; q <= g.n; ++q) CHECK(betti[q] == betti[g.n - q]);
    }
}

TEST_CASE("averaging projector: invariant complex closed under d, exactly, many instances") {
    std::mt19937_64 rng(29);
    int checked = 0;
    for (int iter = 0; iter < 100; ++iter) {
        // vary algebra, action and a random integer change of basis
        NilLieAlgebra g = (iter % 3 == 0)   ? named_algebra("heisenberg-3")
                          : (iter % 3 == 1) ? named_algebra("abelian-3")
                                            : filiform4();
        GroupActionF f;
        if (g.n == 3) {
            // signed diagonal bracket automorphisms
            int s1 = (rng() % 2) ? 1 : -1, s2 = (rng() % 2) ? 1 : -1;
            MatQ m(3, 3);
            m(0, 0) = s1;
            m(1, 1) = s2;
            m(2, 2) = s1 * s2;  // [e1,e2] = e3 forces the product on e3
            f.generators.push_back(m);
        } else {
            MatQ m = MatQ::identity(4) * Rat(-1);
            // -I is an automorphism only when the bracket vanishes... use signs
            // compatible with [e1,e2]=e3, [e1,e3]=e4: s3 = s1 s2, s4 = s1 s3
            int s1 = (rng() % 2) ? 1 : -1, s2 = (rng() % 2) ? 1 : -1;
            m = MatQ(4, 4);
            m(0, 0) = s1;
            m(1, 1) = s2;
            m(2, 2) = s1 * s2;
            m(3, 3) = s1 * s1 * s2;
            f.generators.push_back(m);
        }
        Eigen::MatrixXd metric = identity(g.n);
        CEComplex ce = ce_complex(g, metric);
        InvariantSubcomplex inv = invariant_subcomplex(ce, f);
        CHECK(check_complex(inv.rational));  // restricted differential squares to zero, exactly
        // the restriction step already verifies closure under d; count instances
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("averaging projector is idempotent and self-adjoint for the averaged gram") {
    CEComplex ce = ce_complex(named_algebra("abelian-3"), identity(3));
    std::vector<MatQ> group = closeGroup(named_action("hw-z2xz2", 3).generators, 64);
    CHECK(group.size() == 4);
    for (int q = 0; q <= 3; ++q) {
        int dim = binomial(3, q);
        MatQ proj(dim, dim);
        for (const MatQ& g : group) {
            auto inv = g.inverse();
            proj = proj + exteriorPower(inv->transpose(), q);
        }
        proj = proj * Rat(1, int(group.size()));
        CHECK(proj * proj == proj);
        // identity metric is already invariant here, so self-adjointness is symmetry
        CHECK(proj == proj.transpose());
    }
}

TEST_CASE("registry rejects unknown names") {
    CHECK_THROWS_AS(named_algebra("borel-2"), std::invalid_argument);
    CHECK_THROWS_AS(named_action("hw-z2xz2", 2), std::invalid_argument);
}

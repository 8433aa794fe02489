#include "collapse/superconn.hpp"

#include <doctest.h>

#include "collapse/nil_ce.hpp"
#include "support.hpp"

#include <numbers>

using namespace collapse;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFourPiSq = kTwoPi * kTwoPi;

SuperconnData trivialLine(double phi, double ell, int cutoff) {
    SuperconnData s;
    s.fiber.dims = {1};
    s.h = {Eigen::MatrixXd::Identity(1, 1)};
    Eigen::MatrixXd m(1, 1);
    m << phi;
    s.monodromy = {m};
    s.baseLength = ell;
    s.fourierCutoff = cutoff;
    return s;
}

SuperconnData heisenbergFiber(double ell, int cutoff) {
    CEComplex ce = ce_complex(named_algebra("heisenberg-3"), Eigen::MatrixXd::Identity(3, 3));
    SuperconnData s;
    s.fiber = ce.complex.spaces;
    s.a0 = ce.complex.d;
    s.h = ce.complex.gram;
    for (int q = 0; q <= 3; ++q)
        s.monodromy.push_back(Eigen::MatrixXd::Identity(s.fiber.dim(q), s.fiber.dim(q)));
    s.baseLength = ell;
    s.fourierCutoff = cutoff;
    return s;
}

}  // namespace

TEST_CASE("periodic and antiperiodic line spectra") {
    SpectrumReport rep = circle_spectrum(trivialLine(1.0, kTwoPi, 6), 0, 5);
    std::vector<double> expect{0, 1, 1, 4, 4};
    std::vector<double> got = rep.expanded();
    REQUIRE(got.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-12));

    SpectrumReport rep2 = circle_spectrum(trivialLine(-1.0, kTwoPi, 6), 0, 4);
    std::vector<double> expect2{0.25, 0.25, 2.25, 2.25};
    std::vector<double> got2 = rep2.expanded();
    REQUIRE(got2.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(got2[i] == doctest::Approx(expect2[i]).epsilon(1e-12));
}

TEST_CASE("flatness violations are rejected") {
    SuperconnData s;
    s.fiber.dims = {1, 1};
    s.a0 = {Eigen::MatrixXd::Ones(1, 1)};
    s.h = {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)};
    Eigen::MatrixXd one(1, 1), two(1, 1);
    one << 1;
    two << 2;
    s.monodromy = {one, two};  // does not commute with a0
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("mapping-torus fiber model: kernel dims equal monodromy cohomology") {
    Eigen::MatrixXi minusI = -Eigen::MatrixXi::Identity(2, 2);
    SuperconnData s = torus_fiber_superconnection(2, minusI, 1.0, kTwoPi, 5);
    MonodromyCohomology mc = monodromy_cohomology(s);
    CHECK(mc.fiberBetti == std::vector<int>{1, 2, 1});
    CHECK(mc.totalBetti == std::vector<int>{1, 1, 1, 1});
    for (int p = 0; p <= 3; ++p) {
        SpectrumReport rep = circle_spectrum(s, p, 6);
        int kernel = 0;
        for (size_t i = 0; i < rep.eigenvalues.size(); ++i)
            if (rep.eigenvalues[i] < 1e-8) kernel += rep.multiplicities[i];
        CHECK(kernel == mc.totalBetti[p]);
    }
}

TEST_CASE("trivial monodromy torus fiber gives three-torus Betti numbers") {
    Eigen::MatrixXi id2 = Eigen::MatrixXi::Identity(2, 2);
    MonodromyCohomology mc = monodromy_cohomology(torus_fiber_superconnection(2, id2, 1.0, kTwoPi, 4));
    CHECK(mc.totalBetti == std::vector<int>{1, 3, 3, 1});
}

TEST_CASE("heisenberg fiber with trivial monodromy: convolution with the circle") {
    MonodromyCohomology mc = monodromy_cohomology(heisenbergFiber(kTwoPi, 4));
    CHECK(mc.fiberBetti == std::vector<int>{1, 2, 2, 1});
    CHECK(mc.totalBetti == std::vector<int>{1, 3, 4, 3, 1});
}

TEST_CASE("euler characteristic of the circle model vanishes") {
    testing::Rng rng(31);
    for (int iter = 0; iter < 100; ++iter) {
        SuperconnData s = testing::randomSuperconnection(rng);
        MonodromyCohomology mc = monodromy_cohomology(s);
        int chi = 0;
        for (size_t p = 0; p < mc.totalBetti.size(); ++p)
            chi += (p % 2 == 0 ? 1 : -1) * mc.totalBetti[p];
        CHECK(chi == 0);
        // counting bound: total cohomology equals the sum of the E2 column dims
        for (size_t p = 0; p < mc.totalBetti.size(); ++p) {
            int bound = 0;
            if (p < mc.e2.size()) bound += mc.e2[p][0];
            if (p >= 1) bound += mc.e2[p - 1][1];
            CHECK(mc.totalBetti[p] == bound);
        }
    }
}

TEST_CASE("floating kernel of the circle model matches the exact cohomology") {
    testing::Rng rng(37);
    for (int iter = 0; iter < 30; ++iter) {
        SuperconnData s = testing::randomSuperconnection(rng, 2, 3);
        s.fourierCutoff = 2;
        MonodromyCohomology mc = monodromy_cohomology(s);
        for (int p = 0; p < int(mc.totalBetti.size()); ++p) {
            int want = mc.totalBetti[p];
            SpectrumReport rep = circle_spectrum(s, p, std::max(want + 2, 3));
            int kernel = 0;
            for (size_t i = 0; i < rep.eigenvalues.size(); ++i)
                if (rep.eigenvalues[i] < 1e-8) kernel += rep.multiplicities[i];
            CHECK(kernel == want);
        }
    }
}

TEST_CASE("fourier model is a complex and reproduces the sector spectra") {
    FourierModel fm = fourier_model(trivialLine(1.0, kTwoPi, 2));
    CHECK(check_complex(fm.complex));
    SpectrumReport rep = spectrum(fm.complex, 0, 5);
    std::vector<double> expect{0, 1, 1, 4, 4};
    std::vector<double> got = rep.expanded();
    REQUIRE(got.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-12));

    Eigen::MatrixXi minusI = -Eigen::MatrixXi::Identity(2, 2);
    FourierModel fm2 = fourier_model(torus_fiber_superconnection(2, minusI, 0.5, kTwoPi, 3));
    CHECK(check_complex(fm2.complex));
}

TEST_CASE("fd model cross-checks the fourier path on the overlap") {
    SuperconnData s = trivialLine(-1.0, kTwoPi, 6);
    std::vector<double> exact = circle_spectrum(s, 0, 3).expanded();

    std::vector<double> coarse = spectrum(fd_model(s, 64), 0, 3).expanded();
    std::vector<double> mid = spectrum(fd_model(s, 128), 0, 3).expanded();
    std::vector<double> fine = spectrum(fd_model(s, 256), 0, 3).expanded();
    for (int i = 0; i < 3; ++i) {
        // Richardson ratio ~ 4 certifies second order
        double ratio = (coarse[i] - mid[i]) / (mid[i] - fine[i]);
        CHECK(ratio == doctest::Approx(4.0).epsilon(0.08));
        double extrap = (4.0 * fine[i] - mid[i]) / 3.0;
        CHECK(extrap == doctest::Approx(exact[i]).epsilon(1e-5));
    }
}

TEST_CASE("non-orthogonal monodromy goes down the fd path") {
    SuperconnData s = trivialLine(2.0, kTwoPi, 6);
    CHECK_FALSE(monodromy_orthogonal(s));
    SpectrumReport rep = circle_spectrum(s, 0, 2);
    std::vector<double> got = rep.expanded();
    REQUIRE(got.size() == 2);
    // transcendental oracle: with f(2pi) = 2 f(0) the eigenvalue equation for
    // the adjoint-square reduces to cos(2 pi w) = 4/5, lambda = w^2
    double w = std::acos(0.8) / kTwoPi;
    CHECK(got[0] == doctest::Approx(w * w).epsilon(1e-4));
    CHECK(got[1] == doctest::Approx((1.0 - w) * (1.0 - w)).epsilon(1e-4));
    // the fourier-only entry points refuse
    CHECK_THROWS_AS(circle_spectrum_below(s, 0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(fourier_model(s), std::invalid_argument);
}

TEST_CASE("z2 basic spectra: interval boundary conditions") {
    Z2EquivariantData z;
    z.data = trivialLine(1.0, kTwoPi, 8);
    z.involution = {Eigen::MatrixXd::Identity(1, 1)};

    std::vector<double> neumann = z2_basic_spectrum(z, 0, 4, +1).expanded();
    std::vector<double> dirichlet = z2_basic_spectrum(z, 0, 4, -1).expanded();
    std::vector<double> oneForms = z2_basic_spectrum(z, 1, 3, +1).expanded();
    std::vector<double> expectN{0, 1, 4, 9}, expectD{1, 4, 9, 16}, expect1{1, 4, 9};
    for (int i = 0; i < 4; ++i) {
        CHECK(neumann[i] == doctest::Approx(expectN[i]).epsilon(1e-12));
        CHECK(dirichlet[i] == doctest::Approx(expectD[i]).epsilon(1e-12));
    }
    for (int i = 0; i < 3; ++i) CHECK(oneForms[i] == doctest::Approx(expect1[i]).epsilon(1e-12));

    CHECK_THROWS_AS(z2_basic_spectrum(z, 0, 3, 2), std::invalid_argument);
}

// Dirichlet-Neumann bracketing. The domain-inclusion argument lives on
// functions; for higher total degrees the two twists trade places (on the
// trivial line the absolute 1-form spectrum {1,4,9} already sits above the
// relative one {0,1,4,9}), so the interleaving is asserted at p = 0.
TEST_CASE("z2 twists interleave on functions: invariant below anti-invariant") {
    testing::Rng rng(41);
    for (int iter = 0; iter < 100; ++iter) {
        SuperconnData s = testing::randomSuperconnection(rng, 2, 3);
        s.fourierCutoff = 6;
        s.monodromy.clear();
        for (int q = 0; q <= s.fiber.top(); ++q)
            s.monodromy.push_back(Eigen::MatrixXd::Identity(s.fiber.dim(q), s.fiber.dim(q)));
        Z2EquivariantData z;
        z.data = s;
        for (int q = 0; q <= s.fiber.top(); ++q)
            z.involution.push_back(Eigen::MatrixXd::Identity(s.fiber.dim(q), s.fiber.dim(q)));
        int k = 4;
        std::vector<double> plus = z2_basic_spectrum(z, 0, k, +1).expanded();
        std::vector<double> minus = z2_basic_spectrum(z, 0, k, -1).expanded();
        size_t m = std::min(plus.size(), minus.size());
        REQUIRE(m > 0);
        for (size_t j = 0; j < m; ++j) CHECK(plus[j] <= minus[j] + 1e-9);
    }
}

TEST_CASE("z2 validation rejects incompatible involutions") {
    Z2EquivariantData z;
    z.data = trivialLine(1.0, kTwoPi, 4);
    Eigen::MatrixXd notInv(1, 1);
    notInv << 2;
    z.involution = {notInv};
    CHECK_THROWS_AS(z.validate(), std::invalid_argument);
}

TEST_CASE("threshold_compare: exact match below the fiber scale for flat mapping tori") {
    for (bool flip : {false, true}) {
        Eigen::MatrixXi phi = Eigen::MatrixXi::Identity(2, 2);
        if (flip) phi = -phi;
        for (double t : {1.0, 0.25}) {
            SuperconnData s = torus_fiber_superconnection(2, phi, t, kTwoPi, 8);
            BieberbachData m = mapping_torus(BieberbachData{2, Eigen::MatrixXd::Identity(2, 2),
                                                            Eigen::MatrixXd::Identity(2, 2),
                                                            {}},
                                             phi, kTwoPi, t);
            double threshold = 1.2 * kFourPiSq / (t * t);
            ThresholdComparison cmp = threshold_compare(s, m, 1, threshold);
            REQUIRE(cmp.firstUnmatchedManifold.has_value());
            CHECK(*cmp.firstUnmatchedManifold == doctest::Approx(kFourPiSq / (t * t)).epsilon(1e-9));
            for (const auto& pr : cmp.pairs) {
                if (pr.manifold >= *cmp.firstUnmatchedManifold) break;
                CHECK(pr.manifold ==
                      doctest::Approx(pr.model).epsilon(1e-8).scale(std::max(1.0, pr.manifold)));
            }
        }
    }
}

TEST_CASE("threshold_compare: degenerate threshold and fiber mismatch") {
    Eigen::MatrixXi id2 = Eigen::MatrixXi::Identity(2, 2);
    SuperconnData s = torus_fiber_superconnection(2, id2, 1.0, kTwoPi, 4);
    BieberbachData m = mapping_torus(named_manifold("t2"), id2, kTwoPi, 1.0);
    CHECK(threshold_compare(s, m, 0, 0.0).pairs.empty());

    SuperconnData wrong = torus_fiber_superconnection(1, Eigen::MatrixXi::Identity(1, 1), 1.0,
                                                      kTwoPi, 4);
    CHECK_THROWS_AS(threshold_compare(wrong, m, 0, 1.0), std::invalid_argument);
}

TEST_CASE("cutoff certification refuses to fake deep spectra") {
    // fewer retained modes than requested eigenvalues
    SuperconnData s = trivialLine(1.0, kTwoPi, 1);
    CHECK_THROWS_WITH_AS(circle_spectrum(s, 0, 5), doctest::Contains("cutoff-insufficient"),
                         std::runtime_error);
    // a large fiber differential pushes everything above the certified band
    SuperconnData shifted;
    shifted.fiber.dims = {1, 1};
    Eigen::MatrixXd big(1, 1);
    big << 10.0;
    shifted.a0 = {big};
    shifted.h = {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)};
    shifted.monodromy = shifted.h;
    shifted.baseLength = kTwoPi;
    shifted.fourierCutoff = 2;
    CHECK_THROWS_WITH_AS(circle_spectrum(shifted, 0, 3), doctest::Contains("cutoff-insufficient"),
                         std::runtime_error);
}

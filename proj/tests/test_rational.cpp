#include "collapse/rational.hpp"

#include <doctest.h>

#include <random>

using namespace collapse;

TEST_CASE("rank and nullspace of a rational matrix") {
    MatQ m(3, 4,
           {Rat(1), Rat(2), Rat(0), Rat(1),
            Rat(0), Rat(1), Rat(1), Rat(0),
            Rat(1), Rat(3), Rat(1), Rat(1)});  // row3 = row1 + row2
    CHECK(m.rank() == 2);
    MatQ ker = m.nullspaceBasis();
    CHECK(ker.cols() == 2);
    CHECK((m * ker).isZero());
}

TEST_CASE("solve returns exact solutions and detects inconsistency") {
    MatQ a(2, 2, {Rat(1), Rat(2), Rat(3), Rat(4)});
    MatQ rhs(2, 1, {Rat(1), Rat(1)});
    auto x = a.solve(rhs);
    REQUIRE(x.has_value());
    CHECK((a * *x - rhs).isZero());

    MatQ sing(2, 2, {Rat(1), Rat(2), Rat(2), Rat(4)});
    MatQ bad(2, 1, {Rat(1), Rat(0)});
    CHECK_FALSE(sing.solve(bad).has_value());
    CHECK_FALSE(sing.inverse().has_value());
    CHECK(a.inverse().has_value());
}

TEST_CASE("double entries convert exactly") {
    Eigen::MatrixXd m(1, 2);
    m << 0.1, 1.0 / 3.0;
    MatQ q = MatQ::fromDouble(m);
    CHECK(q(0, 0) == Rat(0.1));          // the double 0.1, not 1/10
    CHECK(q(0, 0) != Rat(1, 10));
    CHECK(q.toDouble()(0, 1) == m(0, 1));
}

TEST_CASE("exterior power: trace and multiplicativity") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> entry(-3, 3);
    for (int iter = 0; iter < 20; ++iter) {
        int n = 3 + int(rng() % 2);
        MatQ a(n, n), b(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = entry(rng), b(i, j) = entry(rng);
        for (int q = 0; q <= n; ++q) {
            MatQ lhs = exteriorPower(a * b, q);
            MatQ rhs = exteriorPower(a, q) * exteriorPower(b, q);
            CHECK(lhs == rhs);
        }
        // top power is the determinant
        MatQ det = exteriorPower(a, n);
        CHECK(det.rows() == 1);
    }
}

TEST_CASE("lexicographic subsets are sorted and complete") {
    auto subs = lexSubsets(4, 2);
    REQUIRE(subs.size() == 6);
    CHECK(subs.front() == std::vector<int>{0, 1});
    CHECK(subs.back() == std::vector<int>{2, 3});
    CHECK(std::is_sorted(subs.begin(), subs.end()));
    CHECK(lexSubsets(3, 0).size() == 1);
    CHECK(binomial(5, 2) == 10);
}

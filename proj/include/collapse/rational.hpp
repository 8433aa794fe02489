#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Dense>

#include <initializer_list>
#include <optional>
#include <vector>

namespace collapse {

using Rat = boost::multiprecision::cpp_rational;

/// Dense matrix over exact rationals. Everything that must be an exact
/// integer in the end (ranks, Betti numbers, spectral-sequence dims) goes
/// through this type; floating point is reserved for spectra.
class MatQ {
public:
    MatQ() = default;
    MatQ(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}
    MatQ(int rows, int cols, std::initializer_list<Rat> entries);

    static MatQ identity(int n);
    static MatQ zero(int rows, int cols) { return MatQ(rows, cols); }
    static MatQ columnVector(const std::vector<Rat>& v);
    static MatQ fromDouble(const Eigen::MatrixXd& m);  // exact, no rounding
    static MatQ fromInt(const Eigen::MatrixXi& m);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Rat& operator()(int r, int c) { return a_[size_t(r) * cols_ + c]; }
    const Rat& operator()(int r, int c) const { return a_[size_t(r) * cols_ + c]; }

    MatQ operator*(const MatQ& o) const;
    MatQ operator+(const MatQ& o) const;
    MatQ operator-(const MatQ& o) const;
    MatQ operator*(const Rat& s) const;
    bool operator==(const MatQ& o) const;

    MatQ transpose() const;
    bool isZero() const;
    bool isIdentity() const;

    /// Column-wise concatenation [this | o]; row counts must agree.
    MatQ hcat(const MatQ& o) const;
    MatQ columns(const std::vector<int>& idx) const;
    MatQ rowsSubset(const std::vector<int>& idx) const;

    int rank() const;
    /// Columns span ker(this).
    MatQ nullspaceBasis() const;
    /// Indices of a maximal independent column set (RREF pivots).
    std::vector<int> pivotColumns() const;
    /// Columns of this that form a basis of the column space.
    MatQ columnSpaceBasis() const;
    /// Exact solve this * X = rhs, free variables set to zero.
    /// Empty result if the system is inconsistent.
    std::optional<MatQ> solve(const MatQ& rhs) const;
    std::optional<MatQ> inverse() const;

    Eigen::MatrixXd toDouble() const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<Rat> a_;
};

/// rank of [a | b | ...] without forming copies by hand.
int rankOfConcat(const std::vector<MatQ>& blocks);

/// q-th compound (exterior power) matrix in the lexicographic monomial basis.
MatQ exteriorPower(const MatQ& m, int q);

/// Lexicographically ordered q-element subsets of {0,...,n-1}.
std::vector<std::vector<int>> lexSubsets(int n, int q);

int binomial(int n, int k);

}  // namespace collapse

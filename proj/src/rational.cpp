#include "collapse/rational.hpp"

#include <stdexcept>

namespace collapse {

MatQ::MatQ(int rows, int cols, std::initializer_list<Rat> entries) : MatQ(rows, cols) {
    if (int(entries.size()) != rows * cols)
        throw std::invalid_argument("MatQ: initializer size mismatch");
    std::copy(entries.begin(), entries.end(), a_.begin());
}

MatQ MatQ::identity(int n) {
    MatQ m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

MatQ MatQ::columnVector(const std::vector<Rat>& v) {
    MatQ m(int(v.size()), 1);
    for (int i = 0; i < int(v.size()); ++i) m(i, 0) = v[i];
    return m;
}

MatQ MatQ::fromDouble(const Eigen::MatrixXd& m) {
    MatQ out(int(m.rows()), int(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out(i, j) = Rat(m(i, j));
    return out;
}

MatQ MatQ::fromInt(const Eigen::MatrixXi& m) {
    MatQ out(int(m.rows()), int(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

MatQ MatQ::operator*(const MatQ& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("MatQ: product shape mismatch");
    MatQ out(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const Rat& x = (*this)(i, k);
            if (x == 0) continue;
            for (int j = 0; j < o.cols_; ++j) out(i, j) += x * o(k, j);
        }
    return out;
}

MatQ MatQ::operator+(const MatQ& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("MatQ: sum shape mismatch");
    MatQ out(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] + o.a_[i];
    return out;
}

MatQ MatQ::operator-(const MatQ& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("MatQ: diff shape mismatch");
    MatQ out(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] - o.a_[i];
    return out;
}

MatQ MatQ::operator*(const Rat& s) const {
    MatQ out(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] * s;
    return out;
}

bool MatQ::operator==(const MatQ& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
}

MatQ MatQ::transpose() const {
    MatQ out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

bool MatQ::isZero() const {
    for (const Rat& x : a_)
        if (x != 0) return false;
    return true;
}

bool MatQ::isIdentity() const {
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            if ((*this)(i, j) != Rat(i == j ? 1 : 0)) return false;
    return true;
}

MatQ MatQ::hcat(const MatQ& o) const {
    if (rows_ != o.rows_) throw std::invalid_argument("MatQ: hcat row mismatch");
    MatQ out(rows_, cols_ + o.cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j);
        for (int j = 0; j < o.cols_; ++j) out(i, cols_ + j) = o(i, j);
    }
    return out;
}

MatQ MatQ::columns(const std::vector<int>& idx) const {
    MatQ out(rows_, int(idx.size()));
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < int(idx.size()); ++j) out(i, j) = (*this)(i, idx[j]);
    return out;
}

MatQ MatQ::rowsSubset(const std::vector<int>& idx) const {
    MatQ out(int(idx.size()), cols_);
    for (int i = 0; i < int(idx.size()); ++i)
        for (int j = 0; j < cols_; ++j) out(i, j) = (*this)(idx[i], j);
    return out;
}

namespace {

// In-place reduced row echelon form; returns pivot column indices.
std::vector<int> rref(MatQ& m) {
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
        int pr = -1;
        for (int r = row; r < m.rows(); ++r)
            if (m(r, col) != 0) { pr = r; break; }
        if (pr < 0) continue;
        if (pr != row)
            for (int j = 0; j < m.cols(); ++j) std::swap(m(pr, j), m(row, j));
        Rat inv = Rat(1) / m(row, col);
        for (int j = col; j < m.cols(); ++j) m(row, j) *= inv;
        for (int r = 0; r < m.rows(); ++r) {
            if (r == row || m(r, col) == 0) continue;
            Rat f = m(r, col);
            for (int j = col; j < m.cols(); ++j) m(r, j) -= f * m(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

}  // namespace

int MatQ::rank() const {
    MatQ work = *this;
    return int(rref(work).size());
}

MatQ MatQ::nullspaceBasis() const {
    MatQ work = *this;
    std::vector<int> pivots = rref(work);
    std::vector<bool> isPivot(cols_, false);
    for (int p : pivots) isPivot[p] = true;
    std::vector<int> freeCols;
    for (int c = 0; c < cols_; ++c)
        if (!isPivot[c]) freeCols.push_back(c);
    MatQ basis(cols_, int(freeCols.size()));
    for (int j = 0; j < int(freeCols.size()); ++j) {
        int fc = freeCols[j];
        basis(fc, j) = 1;
        for (int i = 0; i < int(pivots.size()); ++i) basis(pivots[i], j) = -work(i, fc);
    }
    return basis;
}

std::vector<int> MatQ::pivotColumns() const {
    MatQ work = *this;
    return rref(work);
}

MatQ MatQ::columnSpaceBasis() const {
    return columns(pivotColumns());
}

std::optional<MatQ> MatQ::solve(const MatQ& rhs) const {
    if (rhs.rows() != rows_) throw std::invalid_argument("MatQ: solve shape mismatch");
    MatQ aug = hcat(rhs);
    std::vector<int> pivots = rref(aug);
    for (int p : pivots)
        if (p >= cols_) return std::nullopt;  // pivot in the rhs block: inconsistent
    MatQ x(cols_, rhs.cols());
    for (int i = 0; i < int(pivots.size()); ++i)
        for (int j = 0; j < rhs.cols(); ++j) x(pivots[i], j) = aug(i, cols_ + j);
    return x;
}

std::optional<MatQ> MatQ::inverse() const {
    if (rows_ != cols_) return std::nullopt;
    auto x = solve(identity(rows_));
    if (!x) return std::nullopt;
    if (!((*this) * (*x)).isIdentity()) return std::nullopt;  // singular
    return x;
}

Eigen::MatrixXd MatQ::toDouble() const {
    Eigen::MatrixXd out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out(i, j) = double((*this)(i, j).convert_to<double>());
    return out;
}

int rankOfConcat(const std::vector<MatQ>& blocks) {
    int rows = 0, cols = 0;
    for (const MatQ& b : blocks) {
        if (b.cols() == 0) continue;
        rows = b.rows();
        cols += b.cols();
    }
    if (cols == 0) return 0;
    MatQ all(rows, cols);
    int at = 0;
    for (const MatQ& b : blocks) {
        if (b.cols() == 0) continue;
        if (b.rows() != rows) throw std::invalid_argument("rankOfConcat: row mismatch");
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < b.cols(); ++j) all(i, at + j) = b(i, j);
        at += b.cols();
    }
    return all.rank();
}

int binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return int(r);
}

std::vector<std::vector<int>> lexSubsets(int n, int q) {
    std::vector<std::vector<int>> out;
    if (q < 0 || q > n) return out;
    std::vector<int> cur(q);
    for (int i = 0; i < q; ++i) cur[i] = i;
    while (true) {
        out.push_back(cur);
        int i = q - 1;
        while (i >= 0 && cur[i] == n - q + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < q; ++j) cur[j] = cur[j - 1] + 1;
    }
    if (q == 0) { out.clear(); out.push_back({}); }
    return out;
}

MatQ exteriorPower(const MatQ& m, int q) {
    if (m.rows() != m.cols()) throw std::invalid_argument("exteriorPower: square matrix required");
    int n = m.rows();
    auto subs = lexSubsets(n, q);
    int d = int(subs.size());
    MatQ out(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            // minor determinant over rows subs[i], cols subs[j]
            MatQ sub(q, q);
            for (int a = 0; a < q; ++a)
                for (int b = 0; b < q; ++b) sub(a, b) = m(subs[i][a], subs[j][b]);
            // Laplace-free: small q, do Gaussian determinant
            Rat det = 1;
            for (int c = 0; c < q; ++c) {
                int pr = -1;
                for (int r = c; r < q; ++r)
                    if (sub(r, c) != 0) { pr = r; break; }
                if (pr < 0) { det = 0; break; }
                if (pr != c) {
                    for (int cc = 0; cc < q; ++cc) std::swap(sub(pr, cc), sub(c, cc));
                    det = -det;
                }
                det *= sub(c, c);
                Rat inv = Rat(1) / sub(c, c);
                for (int r = c + 1; r < q; ++r) {
                    if (sub(r, c) == 0) continue;
                    Rat f = sub(r, c) * inv;
                    for (int cc = c; cc < q; ++cc) sub(r, cc) -= f * sub(c, cc);
                }
            }
            out(i, j) = det;
        }
    return out;
}

}  // namespace collapse

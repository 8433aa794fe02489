#include "collapse/nil_ce.hpp"

#include <algorithm>
#include <stdexcept>

namespace collapse {

MatQ NilLieAlgebra::bracket(const MatQ& x, const MatQ& y) const {
    MatQ out(n, 1);
    for (int k = 0; k < n; ++k) {
        Rat v = 0;
        for (int i = 0; i < n; ++i) {
            if (x(i, 0) == 0) continue;
            for (int j = 0; j < n; ++j) {
                if (y(j, 0) == 0 || c[k](i, j) == 0) continue;
                v += c[k](i, j) * x(i, 0) * y(j, 0);
            }
        }
        out(k, 0) = v;
    }
    return out;
}

void NilLieAlgebra::validate() const {
    if (int(c.size()) != n) throw std::invalid_argument("NilLieAlgebra: structure tensor size mismatch");
    for (int k = 0; k < n; ++k) {
        if (c[k].rows() != n || c[k].cols() != n)
            throw std::invalid_argument("NilLieAlgebra: structure block shape mismatch");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (c[k](i, j) != -c[k](j, i))
                    throw std::invalid_argument("NilLieAlgebra: structure constants not antisymmetric");
    }
    // Jacobi: [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j] = 0
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    Rat s = 0;
                    for (int m = 0; m < n; ++m)
                        s += c[m](i, j) * c[l](m, k) + c[m](j, k) * c[l](m, i) +
                             c[m](k, i) * c[l](m, j);
                    if (s != 0) throw std::invalid_argument("NilLieAlgebra: Jacobi identity fails");
                }
    // lower central series must reach zero
    MatQ layer = MatQ::identity(n);
    for (int step = 0; step <= n; ++step) {
        // span of [e_i, v] over basis e_i and columns v of layer
        MatQ next(n, 0);
        for (int i = 0; i < n; ++i) {
            MatQ ei(n, 1);
            ei(i, 0) = 1;
            for (int v = 0; v < layer.cols(); ++v) {
                MatQ col = layer.columns({v});
                next = next.hcat(bracket(ei, col));
            }
        }
        MatQ basis = next.cols() > 0 ? next.columnSpaceBasis() : MatQ(n, 0);
        if (basis.cols() == 0) return;  // nilpotent
        if (basis.cols() == layer.cols() && step > 0) break;
        layer = basis;
    }
    throw std::invalid_argument("NilLieAlgebra: lower central series does not terminate");
}

bool isBracketAutomorphism(const NilLieAlgebra& g, const MatQ& m) {
    if (m.rows() != g.n || m.cols() != g.n) return false;
    if (!m.inverse()) return false;
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j) {
            MatQ gi = m.columns({i});
            MatQ gj = m.columns({j});
            MatQ lhs = g.bracket(gi, gj);
            MatQ eij(g.n, 1);
            for (int k = 0; k < g.n; ++k) eij(k, 0) = g.c[k](i, j);
            if (!(lhs - m * eij).isZero()) return false;
        }
    return true;
}

std::vector<MatQ> closeGroup(const std::vector<MatQ>& generators, int cap) {
    int n = generators.empty() ? 0 : generators[0].rows();
    std::vector<MatQ> elements{MatQ::identity(n)};
    auto contains = [&](const MatQ& m) {
        return std::any_of(elements.begin(), elements.end(), [&](const MatQ& e) { return e == m; });
    };
    std::vector<MatQ> frontier = elements;
    while (!frontier.empty()) {
        std::vector<MatQ> next;
        for (const MatQ& e : frontier)
            for (const MatQ& g : generators) {
                MatQ p = g * e;
                if (!contains(p)) {
                    elements.push_back(p);
                    next.push_back(p);
                    if (int(elements.size()) > cap)
                        throw std::invalid_argument("closeGroup: group order exceeds cap");
                }
            }
        frontier = std::move(next);
    }
    return elements;
}

namespace {

int monomialIndex(const std::vector<std::vector<int>>& subs, const std::vector<int>& key) {
    auto it = std::lower_bound(subs.begin(), subs.end(), key);
    if (it == subs.end() || *it != key) throw std::logic_error("monomialIndex: missing subset");
    return int(it - subs.begin());
}

// Insert indices a < b into the monomial I \ {I[t]}; returns sign or 0.
int wedgeInsert(const std::vector<int>& base, int a, int b, std::vector<int>& out) {
    for (int v : base)
        if (v == a || v == b) return 0;
    out = base;
    int sign = 1;
    auto insertOne = [&](int x) {
        int pos = int(std::lower_bound(out.begin(), out.end(), x) - out.begin());
        sign *= (pos % 2 == 0) ? 1 : -1;
        out.insert(out.begin() + pos, x);
    };
    // insert b then a so signs compose as e^a ^ e^b ^ base
    insertOne(b);
    insertOne(a);
    return sign;
}

}  // namespace

CEComplex ce_complex(const NilLieAlgebra& g, const Eigen::MatrixXd& metric) {
    g.validate();
    if (metric.rows() != g.n || metric.cols() != g.n)
        throw std::invalid_argument("ce_complex: metric shape mismatch");

    CEComplex ce;
    ce.algebra = g;
    ce.metric = metric;

    int n = g.n;
    GradedVectorSpace spaces;
    for (int q = 0; q <= n; ++q) spaces.dims.push_back(binomial(n, q));

    std::vector<MatQ> d;
    for (int q = 0; q < n; ++q) {
        auto src = lexSubsets(n, q);
        auto dst = lexSubsets(n, q + 1);
        MatQ dq(int(dst.size()), int(src.size()));
        for (int col = 0; col < int(src.size()); ++col) {
            const auto& mono = src[col];
            for (int t = 0; t < q; ++t) {
                std::vector<int> rest;
                for (int u = 0; u < q; ++u)
                    if (u != t) rest.push_back(mono[u]);
                int k = mono[t];
                // d e^k = - sum_{a<b} c^k_{ab} e^a ^ e^b, inserted with Koszul sign
                int koszul = (t % 2 == 0) ? 1 : -1;
                for (int a = 0; a < n; ++a)
                    for (int b = a + 1; b < n; ++b) {
                        if (g.c[k](a, b) == 0) continue;
                        std::vector<int> target;
                        int s = wedgeInsert(rest, a, b, target);
                        if (s == 0) continue;
                        dq(monomialIndex(dst, target), col) -= Rat(koszul * s) * g.c[k](a, b);
                    }
            }
        }
        d.push_back(dq);
    }

    ce.rational.spaces = spaces;
    ce.rational.d = d;
    if (!check_complex(ce.rational)) throw std::logic_error("ce_complex: d^2 != 0");

    CochainComplex cd;
    cd.spaces = spaces;
    for (const MatQ& m : d) cd.d.push_back(m.toDouble());
    Eigen::MatrixXd dual = metric.inverse();
    for (int q = 0; q <= n; ++q)
        cd.gram.push_back(exteriorPower(MatQ::fromDouble(dual), q).toDouble());
    cd.validateShapes();
    ce.complex = cd;
    return ce;
}

namespace {

// Left action of a group element on the dual exterior algebra.
MatQ dualActionOnForms(const MatQ& g, int q) {
    auto inv = g.inverse();
    if (!inv) throw std::invalid_argument("group element is singular");
    return exteriorPower(inv->transpose(), q);
}

}  // namespace

InvariantSubcomplex invariant_subcomplex(const CEComplex& ce, const GroupActionF& f, int groupCap) {
    for (const MatQ& g : f.generators)
        if (!isBracketAutomorphism(ce.algebra, g))
            throw std::invalid_argument("invariant_subcomplex: generator is not a bracket automorphism");
    int n = ce.algebra.n;
    std::vector<MatQ> group = f.generators.empty() ? std::vector<MatQ>{MatQ::identity(n)}
                                                   : closeGroup(f.generators, groupCap);

    InvariantSubcomplex out;
    out.rational.spaces.dims.clear();

    std::vector<MatQ> bases;
    std::vector<Eigen::MatrixXd> avgGram;
    for (int q = 0; q <= n; ++q) {
        int dimq = binomial(n, q);
        MatQ proj(dimq, dimq);
        Eigen::MatrixXd gbar = Eigen::MatrixXd::Zero(dimq, dimq);
        for (const MatQ& g : group) {
            MatQ rho = dualActionOnForms(g, q);
            proj = proj + rho;
            Eigen::MatrixXd rhod = rho.toDouble();
            gbar += rhod.transpose() * ce.complex.gram[q] * rhod;
        }
        proj = proj * (Rat(1) / Rat(int(group.size())));
        gbar /= double(group.size());
        MatQ basis = proj.columnSpaceBasis();
        bases.push_back(basis);
        avgGram.push_back(gbar);
        out.dims.push_back(basis.cols());
    }

    out.basis = bases;
    out.rational.spaces.dims = out.dims;
    for (int q = 0; q < n; ++q) {
        MatQ image = ce.rational.d[q] * bases[q];
        auto coords = bases[q + 1].solve(image);
        if (!coords) throw std::logic_error("invariant_subcomplex: differential leaves the invariant space");
        out.rational.d.push_back(*coords);
    }

    CochainComplex cd;
    cd.spaces = out.rational.spaces;
    for (const MatQ& m : out.rational.d) cd.d.push_back(m.toDouble());
    for (int q = 0; q <= n; ++q) {
        Eigen::MatrixXd b = bases[q].toDouble();
        cd.gram.push_back(b.transpose() * avgGram[q] * b);
    }
    cd.validateShapes();
    out.complex = cd;
    return out;
}

bool parallel_form_criterion(const CEComplex& ce, const GroupActionF& f, int kLow, int kHigh,
                             int groupCap) {
    InvariantSubcomplex inv = invariant_subcomplex(ce, f, groupCap);
    for (int k = std::max(kLow, 0); k <= kHigh; ++k) {
        int d = (k < int(inv.dims.size())) ? inv.dims[k] : 0;
        if (d != 0) return false;
    }
    return true;
}

CEComplex scale_metric(const CEComplex& ce, const std::vector<double>& weights) {
    if (int(weights.size()) != ce.algebra.n)
        throw std::invalid_argument("scale_metric: weight count mismatch");
    Eigen::VectorXd s(ce.algebra.n);
    for (int i = 0; i < ce.algebra.n; ++i) {
        if (weights[i] <= 0) throw std::invalid_argument("scale_metric: weights must be positive");
        s[i] = std::sqrt(weights[i]);
    }
    Eigen::MatrixXd scaled = s.asDiagonal() * ce.metric * s.asDiagonal();
    return ce_complex(ce.algebra, scaled);
}

NilLieAlgebra named_algebra(const std::string& name) {
    auto abelian = [](int n) {
        NilLieAlgebra g;
        g.n = n;
        g.c.assign(n, MatQ(n, n));
        return g;
    };
    if (name.rfind("abelian-", 0) == 0) {
        int n = std::stoi(name.substr(8));
        if (n < 1 || n > 8) throw std::invalid_argument("named_algebra: abelian dimension out of range");
        return abelian(n);
    }
    if (name == "heisenberg-3") {
        NilLieAlgebra g = abelian(3);
        g.c[2](0, 1) = 1;   // [e1, e2] = e3
        g.c[2](1, 0) = -1;
        return g;
    }
    throw std::invalid_argument("named_algebra: unknown name '" + name + "'");
}

GroupActionF named_action(const std::string& name, int dimension) {
    GroupActionF f;
    auto diag = [&](std::initializer_list<int> signs) {
        MatQ m(dimension, dimension);
        int i = 0;
        for (int s : signs) m(i, i) = s, ++i;
        return m;
    };
    if (name == "trivial") return f;
    if (name == "minus-identity") {
        MatQ m(dimension, dimension);
        for (int i = 0; i < dimension; ++i) m(i, i) = -1;
        f.generators.push_back(m);
        return f;
    }
    if (name == "hw-z2xz2") {
        if (dimension != 3) throw std::invalid_argument("named_action: hw-z2xz2 needs dimension 3");
        f.generators.push_back(diag({1, -1, -1}));
        f.generators.push_back(diag({-1, 1, -1}));
        return f;
    }
    throw std::invalid_argument("named_action: unknown name '" + name + "'");
}

}  // namespace collapse

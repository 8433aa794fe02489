#include "collapse/flat_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace collapse {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<Rat> modOne(const std::vector<Rat>& v) {
    std::vector<Rat> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        Rat r = v[i];
        Rat fl = Rat(boost::multiprecision::numerator(r) / boost::multiprecision::denominator(r));
        if (r < 0 && fl * boost::multiprecision::denominator(r) != boost::multiprecision::numerator(r))
            fl -= 1;
        out[i] = r - fl;
    }
    return out;
}

bool sameElement(const AffineElement& a, const AffineElement& b) {
    return a.rot == b.rot && modOne(a.trans) == modOne(b.trans);
}

AffineElement compose(const AffineElement& a, const AffineElement& b) {
    AffineElement out;
    out.rot = a.rot * b.rot;
    out.trans.assign(a.trans.size(), Rat(0));
    for (int i = 0; i < a.rot.rows(); ++i) {
        Rat v = a.trans[i];
        for (int j = 0; j < a.rot.cols(); ++j)
            if (a.rot(i, j) != 0) v += Rat(a.rot(i, j)) * b.trans[j];
        out.trans[i] = v;
    }
    out.trans = modOne(out.trans);
    return out;
}

MatQ rotQ(const Eigen::MatrixXi& r) { return MatQ::fromInt(r); }

// No solution x of (I - rot) x = trans + k, k integral, means the affine map
// is fixed-point free on the torus.
bool fixedPointFree(const AffineElement& e) {
    int n = e.rot.rows();
    MatQ a = MatQ::identity(n) - rotQ(e.rot);
    // bound the integer offsets from x in [0,1)^n
    std::vector<int> lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
        Rat rowLo = -e.trans[i], rowHi = -e.trans[i];
        for (int j = 0; j < n; ++j) {
            Rat c = a(i, j);
            if (c > 0) rowHi += c;
            else rowLo += c;
        }
        lo[i] = int(std::floor(rowLo.convert_to<double>())) - 1;
        hi[i] = int(std::ceil(rowHi.convert_to<double>())) + 1;
    }
    std::vector<int> k(n, 0);
    std::function<bool(int)> scan = [&](int pos) -> bool {
        if (pos == n) {
            MatQ rhs(n, 1);
            for (int i = 0; i < n; ++i) rhs(i, 0) = e.trans[i] + k[i];
            return a.solve(rhs).has_value();  // consistent -> fixed point exists
        }
        for (k[pos] = lo[pos]; k[pos] <= hi[pos]; ++k[pos])
            if (scan(pos + 1)) return true;
        return false;
    };
    return !scan(0);
}

}  // namespace

BieberbachData BieberbachData::fromAmbient(
    const Eigen::MatrixXd& basis, const Eigen::MatrixXd& metric,
    const std::vector<std::pair<Eigen::MatrixXd, std::vector<Rat>>>& holonomy) {
    BieberbachData b;
    b.n = int(basis.rows());
    b.basis = basis;
    b.metric = basis.transpose() * metric * basis;
    Eigen::MatrixXd binv = basis.inverse();
    for (const auto& [r, v] : holonomy) {
        Eigen::MatrixXd latticeRot = binv * r * basis;
        Eigen::MatrixXi ri(b.n, b.n);
        for (int i = 0; i < b.n; ++i)
            for (int j = 0; j < b.n; ++j) {
                double x = latticeRot(i, j);
                ri(i, j) = int(std::lround(x));
                if (std::abs(x - ri(i, j)) > 1e-9)
                    throw std::invalid_argument("BieberbachData: holonomy does not preserve the lattice");
            }
        b.holonomy.push_back({ri, v});
    }
    b.validate();
    return b;
}

std::vector<AffineElement> BieberbachData::deckGroup(int cap) const {
    AffineElement id{Eigen::MatrixXi::Identity(n, n), std::vector<Rat>(n, Rat(0))};
    std::vector<AffineElement> elements{id};
    auto contains = [&](const AffineElement& e) {
        return std::any_of(elements.begin(), elements.end(),
                           [&](const AffineElement& x) { return sameElement(x, e); });
    };
    std::vector<AffineElement> frontier = elements;
    while (!frontier.empty()) {
        std::vector<AffineElement> next;
        for (const auto& e : frontier)
            for (const auto& g : holonomy) {
                AffineElement p = compose(g, e);
                if (!contains(p)) {
                    elements.push_back(p);
                    next.push_back(p);
                    if (int(elements.size()) > cap)
                        throw std::invalid_argument("BieberbachData: holonomy group exceeds cap");
                }
            }
        frontier = std::move(next);
    }
    return elements;
}

void BieberbachData::validate() const {
    if (n <= 0) throw std::invalid_argument("BieberbachData: empty");
    if (metric.rows() != n || metric.cols() != n)
        throw std::invalid_argument("BieberbachData: metric shape");
    Eigen::LLT<Eigen::MatrixXd> llt(metric);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("BieberbachData: metric not SPD");
    for (const auto& e : holonomy) {
        if (e.rot.rows() != n || e.rot.cols() != n || int(e.trans.size()) != n)
            throw std::invalid_argument("BieberbachData: holonomy shape");
        Eigen::MatrixXd r = e.rot.cast<double>();
        double dev = (r.transpose() * metric * r - metric).norm();
        if (dev > 1e-9 * metric.norm())
            throw std::invalid_argument("BieberbachData: holonomy is not a metric isometry");
    }
    std::vector<AffineElement> group = deckGroup();
    for (const auto& e : group) {
        if (e.rot == Eigen::MatrixXi::Identity(n, n)) continue;
        if (!fixedPointFree(e))
            throw std::invalid_argument("BieberbachData: holonomy element fixes a point (torsion)");
    }
}

namespace {

// Fincke-Pohst style enumeration of m in Z^n with m^T Q m <= bound, Q SPD.
void enumerateEllipsoid(const Eigen::MatrixXd& q, double bound,
                        std::vector<Eigen::VectorXi>& out) {
    int n = int(q.rows());
    Eigen::LLT<Eigen::MatrixXd> llt(q);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("enumerateEllipsoid: not SPD");
    Eigen::MatrixXd u = llt.matrixU();  // q = U^T U
    Eigen::VectorXi m = Eigen::VectorXi::Zero(n);
    // recurse from the last coordinate: |sum_j U_ij m_j|^2 accumulates
    std::function<void(int, double, const Eigen::VectorXd&)> rec =
        [&](int i, double used, const Eigen::VectorXd& partial) {
            if (i < 0) {
                out.push_back(m);
                return;
            }
            double remain = bound - used;
            if (remain < -1e-12) return;
            double uii = u(i, i);
            double center = -partial[i] / uii;
            double radius = std::sqrt(std::max(remain, 0.0)) / uii;
            int loBound = int(std::ceil(center - radius - 1e-9));
            int hiBound = int(std::floor(center + radius + 1e-9));
            for (int v = loBound; v <= hiBound; ++v) {
                m[i] = v;
                double term = uii * v + partial[i];
                Eigen::VectorXd nextPartial = partial;
                for (int r = 0; r < i; ++r) nextPartial[r] += u(r, i) * v;
                rec(i - 1, used + term * term, nextPartial);
            }
            m[i] = 0;
        };
    rec(n - 1, 0.0, Eigen::VectorXd::Zero(n));
}

struct DeckAction {
    Eigen::MatrixXi modeMap;         // (rot^T)^{-1}, integral
    std::vector<Rat> phaseShift;     // rot^{-1} trans
    std::vector<double> formTrace;   // tr Lambda^p(modeMap), p = 0..n
};

std::vector<DeckAction> deckActions(const BieberbachData& b) {
    std::vector<DeckAction> out;
    for (const auto& e : b.deckGroup()) {
        DeckAction a;
        MatQ rq = rotQ(e.rot);
        auto invQ = rq.inverse();
        if (!invQ) throw std::invalid_argument("holonomy rotation is singular");
        MatQ mm = invQ->transpose();
        a.modeMap.resize(b.n, b.n);
        for (int i = 0; i < b.n; ++i)
            for (int j = 0; j < b.n; ++j) {
                Rat v = mm(i, j);
                if (boost::multiprecision::denominator(v) != 1)
                    throw std::invalid_argument("holonomy is not lattice-integral");
                a.modeMap(i, j) = int(v.convert_to<long long>());
            }
        MatQ shift = (*invQ) * MatQ::columnVector(e.trans);
        for (int i = 0; i < b.n; ++i) a.phaseShift.push_back(shift(i, 0));
        for (int p = 0; p <= b.n; ++p) {
            MatQ ext = exteriorPower(mm, p);
            Rat tr = 0;
            for (int i = 0; i < ext.rows(); ++i) tr += ext(i, i);
            a.formTrace.push_back(tr.convert_to<double>());
        }
        out.push_back(a);
    }
    return out;
}

std::vector<int> shellMultiplicities(const BieberbachData& b,
                                     const std::vector<Eigen::VectorXi>& shell,
                                     const std::vector<DeckAction>& actions) {
    int order = int(actions.size());
    std::vector<std::complex<double>> charSum(b.n + 1, 0.0);
    for (const auto& a : actions) {
        std::complex<double> fixedPhases = 0.0;
        for (const auto& m : shell) {
            if (a.modeMap * m != m) continue;
            Rat x = 0;
            for (int i = 0; i < b.n; ++i)
                if (m[i] != 0) x += Rat(m[i]) * a.phaseShift[i];
            double frac = x.convert_to<double>();
            fixedPhases += std::exp(std::complex<double>(0.0, -kTwoPi * frac));
        }
        for (int p = 0; p <= b.n; ++p) charSum[p] += fixedPhases * a.formTrace[p];
    }
    std::vector<int> mult(b.n + 1, 0);
    for (int p = 0; p <= b.n; ++p) {
        double v = charSum[p].real() / order;
        int r = int(std::lround(v));
        if (std::abs(charSum[p].imag()) > 1e-6 * order || std::abs(v - r) > 1e-6)
            throw std::runtime_error("shellMultiplicities: character sum is not integral");
        mult[p] = r;
    }
    return mult;
}

}  // namespace

std::vector<ModeBlock> enumerate_modes(const BieberbachData& b, double cutoffR) {
    Eigen::MatrixXd dual = b.metric.inverse();
    dual = 0.5 * (dual + dual.transpose().eval());
    std::vector<Eigen::VectorXi> modes;
    enumerateEllipsoid(dual, cutoffR * cutoffR * (1 + 1e-12), modes);

    std::vector<std::pair<double, Eigen::VectorXi>> valued;
    valued.reserve(modes.size());
    for (const auto& m : modes) {
        Eigen::VectorXd md = m.cast<double>();
        valued.push_back({kTwoPi * kTwoPi * md.dot(dual * md), m});
    }
    std::sort(valued.begin(), valued.end(),
              [](const auto& a, const auto& c) { return a.first < c.first; });

    std::vector<DeckAction> actions = deckActions(b);
    std::vector<ModeBlock> blocks;
    size_t i = 0;
    while (i < valued.size()) {
        size_t j = i + 1;
        while (j < valued.size() &&
               valued[j].first - valued[j - 1].first <= 1e-10 * std::max(1.0, valued[i].first))
            ++j;
        ModeBlock blk;
        double sum = 0;
        for (size_t u = i; u < j; ++u) {
            blk.modes.push_back(valued[u].second);
            sum += valued[u].first;
        }
        blk.eigenvalue = sum / double(j - i);
        blk.multiplicity = shellMultiplicities(b, blk.modes, actions);
        blocks.push_back(std::move(blk));
        i = j;
    }
    return blocks;
}

namespace {

SpectrumReport reportFromBlocks(const std::vector<ModeBlock>& blocks, int p, double maxLambda,
                                double clusterTol) {
    std::vector<double> vals;
    std::vector<int> mults;
    for (const auto& blk : blocks) {
        if (blk.eigenvalue >= maxLambda) break;
        int m = (p >= 0 && p < int(blk.multiplicity.size())) ? blk.multiplicity[p] : 0;
        if (m > 0) {
            vals.push_back(blk.eigenvalue);
            mults.push_back(m);
        }
    }
    SpectrumReport rep;
    rep.degree = p;
    rep.tolerance = clusterTol;
    rep.eigenvalues = std::move(vals);
    rep.multiplicities = std::move(mults);
    rep.validate();
    return rep;
}

}  // namespace

SpectrumReport hodge_spectrum(const BieberbachData& b, int p, int k, const HodgeSpectrumOptions& opts) {
    b.validate();
    if (p < 0 || p > b.n) {
        SpectrumReport rep;
        rep.degree = p;
        rep.tolerance = opts.clusterTol;
        return rep;
    }
    double r = opts.initialCutoff;
    if (r <= 0) {
        // volume heuristic: count of dual modes below R grows like R^n sqrt(det metric)
        double det = std::max(b.metric.determinant(), 1e-30);
        r = std::pow(double(2 * k + 8) / std::sqrt(det), 1.0 / b.n) + 1.0;
    }
    for (int attempt = 0; attempt <= opts.maxDoublings; ++attempt, r *= 2) {
        std::vector<ModeBlock> blocks = enumerate_modes(b, r);
        SpectrumReport rep = reportFromBlocks(blocks, p, kTwoPi * kTwoPi * r * r, opts.clusterTol);
        if (rep.count() >= k) {
            // trim to whole shells covering k values
            SpectrumReport out;
            out.degree = p;
            out.tolerance = opts.clusterTol;
            int have = 0;
            for (size_t i = 0; i < rep.eigenvalues.size() && have < k; ++i) {
                out.eigenvalues.push_back(rep.eigenvalues[i]);
                out.multiplicities.push_back(rep.multiplicities[i]);
                have += rep.multiplicities[i];
            }
            return out;
        }
    }
    throw std::runtime_error("cutoff-insufficient: fewer than k eigenvalues certified below cutoff");
}

SpectrumReport spectrum_below(const BieberbachData& b, int p, double lambdaMax, double clusterTol) {
    b.validate();
    if (p < 0 || p > b.n || lambdaMax <= 0) {
        SpectrumReport rep;
        rep.degree = p;
        rep.tolerance = clusterTol;
        return rep;
    }
    double r = std::sqrt(lambdaMax) / kTwoPi + 1e-9;
    return reportFromBlocks(enumerate_modes(b, r), p, lambdaMax, clusterTol);
}

std::vector<int> zero_mode_multiplicities(const BieberbachData& b) {
    std::vector<Eigen::VectorXi> zero{Eigen::VectorXi::Zero(b.n)};
    return shellMultiplicities(b, zero, deckActions(b));
}

BieberbachData product_with_scaled_fiber(double baseLength, const BieberbachData& fiber, double t) {
    if (t <= 0 || baseLength <= 0)
        throw std::invalid_argument("product_with_scaled_fiber: positive parameters required");
    BieberbachData out;
    out.n = fiber.n + 1;
    out.basis = Eigen::MatrixXd::Identity(out.n, out.n);
    out.metric = Eigen::MatrixXd::Zero(out.n, out.n);
    out.metric(0, 0) = baseLength * baseLength;
    out.metric.bottomRightCorner(fiber.n, fiber.n) = t * t * fiber.metric;
    for (const auto& e : fiber.holonomy) {
        AffineElement lift;
        lift.rot = Eigen::MatrixXi::Identity(out.n, out.n);
        lift.rot.bottomRightCorner(fiber.n, fiber.n) = e.rot;
        lift.trans.assign(out.n, Rat(0));
        for (int i = 0; i < fiber.n; ++i) lift.trans[i + 1] = e.trans[i];
        out.holonomy.push_back(lift);
    }
    return out;
}

BieberbachData mapping_torus(const BieberbachData& fiber, const Eigen::MatrixXi& phi,
                             double baseLength, double t) {
    if (t <= 0 || baseLength <= 0)
        throw std::invalid_argument("mapping_torus: positive parameters required");
    if (phi.rows() != fiber.n || phi.cols() != fiber.n)
        throw std::invalid_argument("mapping_torus: automorphism shape mismatch");
    Eigen::MatrixXd pd = phi.cast<double>();
    if ((pd.transpose() * fiber.metric * pd - fiber.metric).norm() > 1e-9 * fiber.metric.norm())
        throw std::invalid_argument("mapping_torus: automorphism does not preserve the fiber metric");
    int order = 0;
    Eigen::MatrixXi power = Eigen::MatrixXi::Identity(fiber.n, fiber.n);
    for (int i = 1; i <= 24; ++i) {
        power = power * phi;
        if (power == Eigen::MatrixXi::Identity(fiber.n, fiber.n)) {
            order = i;
            break;
        }
    }
    if (order == 0)
        throw std::invalid_argument("mapping_torus: automorphism has infinite order (not flat)");

    BieberbachData out;
    out.n = fiber.n + 1;
    out.basis = Eigen::MatrixXd::Identity(out.n, out.n);
    out.metric = Eigen::MatrixXd::Zero(out.n, out.n);
    double period = order * baseLength;  // lattice period in the base direction
    out.metric(0, 0) = period * period;
    out.metric.bottomRightCorner(fiber.n, fiber.n) = t * t * fiber.metric;

    AffineElement screw;
    screw.rot = Eigen::MatrixXi::Identity(out.n, out.n);
    screw.rot.bottomRightCorner(fiber.n, fiber.n) = phi;
    screw.trans.assign(out.n, Rat(0));
    screw.trans[0] = Rat(1, order);
    out.holonomy.push_back(screw);

    for (const auto& e : fiber.holonomy) {
        AffineElement lift;
        lift.rot = Eigen::MatrixXi::Identity(out.n, out.n);
        lift.rot.bottomRightCorner(fiber.n, fiber.n) = e.rot;
        lift.trans.assign(out.n, Rat(0));
        for (int i = 0; i < fiber.n; ++i) lift.trans[i + 1] = e.trans[i];
        out.holonomy.push_back(lift);
    }
    return out;
}

namespace {

BieberbachData flatTorus(int n) {
    BieberbachData b;
    b.n = n;
    b.basis = Eigen::MatrixXd::Identity(n, n);
    b.metric = Eigen::MatrixXd::Identity(n, n);
    return b;
}

BieberbachData kleinBottle() {
    BieberbachData b = flatTorus(2);
    AffineElement e;
    e.rot.resize(2, 2);
    e.rot << 1, 0, 0, -1;
    e.trans = {Rat(1, 2), Rat(0)};
    b.holonomy.push_back(e);
    return b;
}

BieberbachData hantzscheWendt() {
    BieberbachData b = flatTorus(3);
    auto mk = [](int s1, int s2, int s3, Rat t1, Rat t2, Rat t3) {
        AffineElement e;
        e.rot = Eigen::MatrixXi::Zero(3, 3);
        e.rot(0, 0) = s1;
        e.rot(1, 1) = s2;
        e.rot(2, 2) = s3;
        e.trans = {t1, t2, t3};
        return e;
    };
    b.holonomy.push_back(mk(1, -1, -1, Rat(1, 2), Rat(1, 2), Rat(0)));
    b.holonomy.push_back(mk(-1, 1, -1, Rat(0), Rat(1, 2), Rat(1, 2)));
    return b;
}

std::optional<double> parseParam(const std::string& name, const std::string& prefix) {
    if (name.rfind(prefix + "(", 0) != 0 || name.back() != ')') return std::nullopt;
    return std::stod(name.substr(prefix.size() + 1, name.size() - prefix.size() - 2));
}

}  // namespace

BieberbachData named_manifold(const std::string& name) {
    if (name == "t2") return flatTorus(2);
    if (name == "t3") return flatTorus(3);
    if (name == "klein") return kleinBottle();
    if (name == "g6") return hantzscheWendt();
    if (auto t = parseParam(name, "s1xg6"))
        return product_with_scaled_fiber(kTwoPi, hantzscheWendt(), *t);
    if (auto t = parseParam(name, "maptorus-minusI")) {
        Eigen::MatrixXi phi(2, 2);
        phi << -1, 0, 0, -1;
        return mapping_torus(flatTorus(2), phi, kTwoPi, *t);
    }
    throw std::invalid_argument("named_manifold: unknown name '" + name + "'");
}

std::vector<std::string> manifold_registry_names() {
    return {"t2", "t3", "klein", "g6", "s1xg6(t)", "maptorus-minusI(t)"};
}

}  // namespace collapse

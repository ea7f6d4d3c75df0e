#include "qsg/agw.hpp"

#include "internal.hpp"

#include <cmath>

namespace qsg {

using namespace detail;

namespace {

const char* kDecomposition = "g = exp(i B♯(μ)) admits a unique decomposition g = ll†";
const char* kEquivariant = "G-equivariant with respect to the coadjoint action";
const char* kBeta = "β = (1/2i) H(E*B^ℂ(θ, θ†))";

std::string fixtureName(int n) { return "agw-su" + std::to_string(n); }

// exp of a Hermitian matrix through its eigendecomposition.
Mat expHermitian(const Mat& S) {
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    const Eigen::VectorXd ev = es.eigenvalues().array().exp();
    return es.eigenvectors() * ev.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
}

DualGroupElement choleskyUnimodular(const Mat& P) {
    Eigen::LLT<Mat> llt(P);
    if (llt.info() != Eigen::Success) throw std::domain_error("emap: Cholesky factorization lost positivity");
    Mat L = llt.matrixL();
    const int n = static_cast<int>(L.rows());
    double logDet = 0;
    for (int j = 0; j < n; ++j) {
        const double d = L(j, j).real();
        if (!(d > 0)) throw std::domain_error("emap: non-positive diagonal");
        logDet += std::log(d);
    }
    L *= std::exp(-logDet / n);
    return DualGroupElement{L};
}

Point linPoint(const Vec& v) {
    Point p;
    p.v = v;
    return p;
}

Vec ballSample(Rng& rng, int d, double radius) {
    const Vec u = rng.normalVec(d);
    return u.normalized() * radius * std::pow(rng.uniform(), 1.0 / d);
}

}  // namespace

double dualGroupResidual(const DualGroupElement& e) {
    const Mat& l = e.l;
    const int n = static_cast<int>(l.rows());
    double r = 0;
    cd det = 1;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) r = std::max(r, std::abs(l(i, j)));
        r = std::max(r, std::abs(l(i, i).imag()));
        if (!(l(i, i).real() > 0)) r = std::max(r, 1.0);
        det *= l(i, i);
    }
    return std::max(r, std::abs(det - 1.0));
}

DualGroupElement emap(const Vec& mu, int n) {
    if (!mu.allFinite()) throw std::domain_error("emap: non-finite input");
    const Mat X = algebraFromCoords(mu, n);
    const Mat S = cd(0, 1) * X;
    return choleskyUnimodular(expHermitian(0.5 * (S + S.adjoint())));
}

DualGroupElement dressing(const Mat& g, const DualGroupElement& l) {
    const Mat M = g * l.l;
    const Mat P = M * M.adjoint();
    return choleskyUnimodular(0.5 * (P + P.adjoint()));
}

Vec coadjoint(const Mat& g, const Vec& mu) {
    const int n = static_cast<int>(g.rows());
    return coordsOf(Ad(g, algebraFromCoords(mu, n)));
}

Mat dualMaurerCartan(const Vec& mu, const Vec& v, int n, const Numerics& nm) {
    const double h = nm.fdStep;
    auto at = [&](double e) { return emap(mu + e * v, n).l; };
    const Mat dl = (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
    const Mat l = at(0);
    return l.triangularView<Eigen::Lower>().solve(dl);
}

KForm alphaForm(int n, const Numerics& nm) {
    return KForm{2, [n, nm](const Point& p, const std::vector<Vec>& vs) {
                     const Mat A = dualMaurerCartan(p.v, vs[0], n, nm);
                     const Mat C = dualMaurerCartan(p.v, vs[1], n, nm);
                     return -(A * C.adjoint()).trace().imag();
                 }};
}

KForm homotopyOperator(const KForm& a, int M) {
    const int k = a.degree;
    if (k < 1) throw std::invalid_argument("homotopyOperator: degree must be positive");
    return KForm{k - 1, [a, k, M](const Point& p, const std::vector<Vec>& vs) {
                     std::vector<Vec> args{p.v};
                     args.insert(args.end(), vs.begin(), vs.end());
                     double sum = 0;
                     for (int j = 0; j < M; ++j) {
                         const double t = (j + 0.5) / M;
                         sum += std::pow(t, k - 1) * a(linPoint(t * p.v), args);
                     }
                     return sum / M;
                 }};
}

KForm betaForm(int n, int M, const Numerics& nm) { return homotopyOperator(alphaForm(n, nm), M); }

// ---------- checks ----------

CheckReport checkEmapReconstruction(int n, const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const int d = suDim(n);
    auto cols = runMulti(opt.samples, 2, [&](int i) {
        Rng rng = Rng::stream(opt.seed, fixtureName(n) + "/emap", i);
        const Vec mu = rng.normalVec(d);
        const DualGroupElement l = emap(mu, n);
        const Mat S = cd(0, 1) * algebraFromCoords(mu, n);
        const double rec = (l.l * l.l.adjoint() - expHermitian(0.5 * (S + S.adjoint()))).norm();
        return std::vector<Sample>{{rec, true, false}, {dualGroupResidual(l), true, false}};
    });
    CheckReport rep = combine("emap_reconstruction", kDecomposition, fixtureName(n),
                              {aggregate("l_ldag", kDecomposition, fixtureName(n), 1e-10, cols[0]),
                               aggregate("dual_group_invariants", kDecomposition, fixtureName(n), 1e-10, cols[1])});
    rep.samples = opt.samples;
    rep.wallSeconds = seconds(t0);
    return rep;
}

CheckReport checkDressingEquivariance(int n, const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const int d = suDim(n);
    auto s = parallelMap<Sample>(opt.samples, std::function<Sample(int)>([&](int i) {
        Rng rng = Rng::stream(opt.seed, fixtureName(n) + "/equivariance", i);
        const Mat g = rng.haarSU(n);
        const Vec mu = rng.normalVec(d);
        const double r = (emap(coadjoint(g, mu), n).l - dressing(g, emap(mu, n)).l).norm();
        return Sample{r, true, false};
    }));
    CheckReport rep = aggregate("dressing_equivariance", kEquivariant, fixtureName(n), 1e-8, s, opt.nm.indeterminateCap);
    rep.wallSeconds = seconds(t0);
    return rep;
}

CheckReport checkDressingAction(int n, const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const int d = suDim(n);
    auto cols = runMulti(opt.samples, 2, [&](int i) {
        Rng rng = Rng::stream(opt.seed, fixtureName(n) + "/dressing", i);
        const Mat g1 = rng.haarSU(n), g2 = rng.haarSU(n);
        const DualGroupElement l = emap(rng.normalVec(d), n);
        const DualGroupElement l12 = dressing(g1 * g2, l);
        double r = (l12.l - dressing(g1, dressing(g2, l)).l).norm();
        r = std::max(r, (dressing(Mat::Identity(n, n), l).l - l.l).norm());
        return std::vector<Sample>{{r, true, false}, {dualGroupResidual(l12), true, false}};
    });
    CheckReport rep = combine("dressing_action", "the left dressing action on G*", fixtureName(n),
                              {aggregate("action_property", "the left dressing action on G*", fixtureName(n), 1e-9,
                                         cols[0]),
                               aggregate("dual_group_invariants", "the left dressing action on G*", fixtureName(n),
                                         1e-10, cols[1])});
    rep.samples = opt.samples;
    rep.wallSeconds = seconds(t0);
    return rep;
}

CheckReport checkEmapInjective(int n, const CheckOptions& opt, double separation) {
    const auto t0 = std::chrono::steady_clock::now();
    const int d = suDim(n);
    auto ratios = parallelMap<double>(opt.samples, std::function<double(int)>([&](int i) {
        Rng rng = Rng::stream(opt.seed, fixtureName(n) + "/injective", i);
        const Vec a = ballSample(rng, d, 2.0), b = ballSample(rng, d, 2.0);
        return (emap(a, n).l - emap(b, n).l).norm() / (a - b).norm();
    }));
    std::vector<Sample> s;
    double minRatio = std::numeric_limits<double>::infinity();
    for (double r : ratios) {
        minRatio = std::min(minRatio, r);
        s.push_back(Sample{std::max(0.0, separation - r), r >= separation, false});
    }
    CheckReport rep = aggregate("emap_injective", "E: 𝔤* → G*", fixtureName(n), 0.0, s, opt.nm.indeterminateCap);
    rep.setMetric("min_separation_ratio", minRatio);
    rep.setMetric("required_ratio", separation);
    rep.wallSeconds = seconds(t0);
    return rep;
}

CheckReport checkEmapDiagonal(const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    auto s = parallelMap<Sample>(opt.samples, std::function<Sample(int)>([&](int i) {
        Rng rng = Rng::stream(opt.seed, "agw-su2/diagonal", i);
        const double th = 3.0 * rng.normal();
        Mat X = Mat::Zero(2, 2);
        X(0, 0) = cd(0, th);
        X(1, 1) = cd(0, -th);
        // i X = diag(-th, th), so a = -th
        const double a = -th;
        Mat expected = Mat::Zero(2, 2);
        expected(0, 0) = std::exp(a / 2);
        expected(1, 1) = std::exp(-a / 2);
        return Sample{(emap(coordsOf(X), 2).l - expected).norm() / expected.norm(), true, false};
    }));
    CheckReport rep = aggregate("emap_diagonal", kDecomposition, "agw-su2", 1e-12, s, opt.nm.indeterminateCap);
    rep.wallSeconds = seconds(t0);
    return rep;
}

CheckReport checkBetaQuadrature(int n, const std::vector<int>& Ms, const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const int d = suDim(n);
    const int count = std::min(opt.samples, 20);
    std::vector<double> rms(Ms.size(), 0.0);
    auto rows = parallelMap<std::vector<double>>(count, std::function<std::vector<double>(int)>([&](int i) {
        Rng rng = Rng::stream(opt.seed, fixtureName(n) + "/beta-quadrature", i);
        const Point p = linPoint(rng.normalVec(d));
        const Vec v = rng.normalVec(d);
        std::vector<double> diffs;
        for (int M : Ms)
            diffs.push_back(std::abs(betaForm(n, M, opt.nm)(p, {v}) - betaForm(n, 2 * M, opt.nm)(p, {v})));
        return diffs;
    }));
    for (const auto& r : rows)
        for (std::size_t k = 0; k < Ms.size(); ++k) rms[k] += r[k] * r[k];
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = static_cast<int>(Ms.size());
    for (int k = 0; k < m; ++k) {
        rms[k] = std::sqrt(rms[k] / count);
        const double x = std::log(static_cast<double>(Ms[k])), y = std::log(rms[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double order = m >= 2 ? -(m * sxy - sx * sy) / (m * sxx - sx * sx) : std::nan("");
    const bool finite = std::isfinite(order);
    CheckReport rep = aggregate("beta_quadrature", kBeta, fixtureName(n), 0.3,
                                {Sample{finite ? std::abs(order - 2.0) : 1.0, finite, false}}, 1.0);
    rep.samples = count;
    rep.setMetric("fitted_order", order);
    for (int k = 0; k < m; ++k) rep.setMetric("diff_M" + std::to_string(Ms[k]), rms[k]);
    rep.wallSeconds = seconds(t0);
    return rep;
}

CheckReport checkBetaStructure(int n, const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const int d = suDim(n);
    const KForm beta = betaForm(n, 64, opt.nm);
    const KForm B = exteriorDerivativeForm(beta, opt.nm);
    const int count = std::min(opt.samples, 20);
    auto cols = runMulti(count, 2, [&](int i) {
        Rng rng = Rng::stream(opt.seed, fixtureName(n) + "/beta-structure", i);
        const Vec mu = rng.normalVec(d), v = rng.normalVec(d);
        const double cone = std::max(std::abs(beta(linPoint(Vec::Zero(d)), {v})),
                                     std::abs(beta(linPoint(mu), {mu})));
        const std::vector<Vec> w{rng.normalVec(d), rng.normalVec(d), rng.normalVec(d)};
        const double ddb = std::abs(exteriorDerivative(B, linPoint(mu), w, opt.nm));
        return std::vector<Sample>{{cone, true, false}, {ddb, true, false}};
    });
    CheckReport rep = combine("beta_structure", kBeta, fixtureName(n),
                              {aggregate("vanishes_on_ray", kBeta, fixtureName(n), 1e-12, cols[0]),
                               aggregate("d_of_B", "B = dβ", fixtureName(n), 1e-4, cols[1])});
    rep.samples = count;
    rep.wallSeconds = seconds(t0);
    return rep;
}

CheckReport checkHomotopyIdentity(int n, const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const int d = suDim(n);
    // quadrature error is O(M^-2) with a constant near 0.1 for su(3) at unit-scale mu
    const int M = 512;
    const KForm alpha = alphaForm(n, opt.nm);
    const KForm dH = exteriorDerivativeForm(homotopyOperator(alpha, M), opt.nm);
    const KForm Hd = homotopyOperator(exteriorDerivativeForm(alpha, opt.nm), M);
    const int count = std::min(opt.samples, 20);
    auto s = parallelMap<Sample>(count, std::function<Sample(int)>([&](int i) {
        Rng rng = Rng::stream(opt.seed, fixtureName(n) + "/homotopy", i);
        const Point p = linPoint(rng.normalVec(d));
        const std::vector<Vec> uv{rng.normalVec(d), rng.normalVec(d)};
        return Sample{std::abs(dH(p, uv) + Hd(p, uv) - alpha(p, uv)), true, false};
    }));
    CheckReport rep = aggregate("homotopy_identity", "H ... the standard homotopy operator for the de Rham differential",
                                fixtureName(n), 1e-4, s, opt.nm.indeterminateCap);
    rep.wallSeconds = seconds(t0);
    return rep;
}

std::vector<CheckReport> agwSuite(int n, const CheckOptions& opt) {
    std::vector<CheckReport> out{checkEmapReconstruction(n, opt), checkDressingEquivariance(n, opt),
                                 checkDressingAction(n, opt), checkEmapInjective(n, opt)};
    if (n == 2) out.push_back(checkEmapDiagonal(opt));
    out.push_back(checkBetaQuadrature(n, {8, 16, 32, 64}, opt));
    out.push_back(checkBetaStructure(n, opt));
    out.push_back(checkHomotopyIdentity(n, opt));
    return out;
}

}  // namespace qsg

#include "qsg/catalog.hpp"

#include <cmath>
#include <regex>

namespace qsg {

int parseGroupTag(const std::string& tag) {
    static const std::regex re(R"(SU\((\d+)\))");
    std::smatch m;
    if (!std::regex_match(tag, m, re)) throw std::invalid_argument("unsupported group tag: " + tag);
    const int n = std::stoi(m[1]);
    if (n < 2 || n > 4) throw std::invalid_argument("unsupported group tag: " + tag);
    return n;
}

SpectralFrame spectralFrame(const Mat& M) {
    const int n = static_cast<int>(M.rows());
    const Mat H = (M - M.adjoint()) / cd(0, 2);
    Eigen::SelfAdjointEigenSolver<Mat> es((H + H.adjoint()) / 2.0);
    SpectralFrame f;
    f.U = es.eigenvectors();
    const Mat D = f.U.adjoint() * M * f.U;
    f.lambda = D.diagonal();
    const Vec ev = es.eigenvalues();
    f.spread = ev(n - 1) - ev(0);
    return f;
}

double cartanThreeForm(const Mat& g, const Vec& u, const Vec& v, const Vec& w) {
    // (1/12)(theta, [theta, theta]) = 1/2 (theta(u), [theta(v), theta(w)]); bi-invariant so
    // right-trivialized coordinates may be used directly
    const int n = static_cast<int>(g.rows());
    (void)g;
    const Mat a = algebraFromCoords(u, n), b = algebraFromCoords(v, n), c = algebraFromCoords(w, n);
    return 0.5 * pairing(a, bracket(b, c));
}

double ammOmega(const Point& p, const Vec& u, const Vec& v) {
    const Mat& g = p.g[0];
    const Mat& x = p.g[1];
    const int n = static_cast<int>(g.rows());
    const int d = suDim(n);
    const Mat gi = inv(g), xi = inv(x);
    const Mat Xu = algebraFromCoords(u.head(d), n), Yu = algebraFromCoords(u.segment(d, d), n);
    const Mat Xv = algebraFromCoords(v.head(d), n), Yv = algebraFromCoords(v.segment(d, d), n);
    const Mat t1u = gi * Xu * g, t1v = gi * Xv * g;   // pr1* theta
    const Mat t2u = xi * Yu * x + Yu, t2v = xi * Yv * x + Yv;  // pr2* (theta + theta bar)
    const double first = pairing(x * t1u * xi, t1v) - pairing(x * t1v * xi, t1u);
    const double second = pairing(t1u, t2v) - pairing(t1v, t2u);
    return -0.5 * (first + second);
}

double cotangentOmega(const Point& p, const Vec& u, const Vec& v) {
    const Mat& g = p.g[0];
    const int n = static_cast<int>(g.rows());
    const int d = suDim(n);
    const Mat gi = inv(g);
    const Mat x1 = gi * algebraFromCoords(u.head(d), n) * g;
    const Mat x2 = gi * algebraFromCoords(v.head(d), n) * g;
    const Mat n1 = algebraFromCoords(u.tail(d), n), n2 = algebraFromCoords(v.tail(d), n);
    const Mat mu = algebraFromCoords(p.v, n);
    return -pairing(n1, x2) + pairing(n2, x1) + pairing(mu, bracket(x1, x2));
}

namespace {

int algebraRank(long size) {
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(size + 1))));
    if (n * n - 1 != size) throw std::invalid_argument("vector is not an su(n) coordinate vector");
    return n;
}

RMat adMatrix(const Mat& M) {
    const int n = static_cast<int>(M.rows());
    const auto& B = suBasis(n);
    RMat A(B.size(), B.size());
    for (std::size_t j = 0; j < B.size(); ++j) A.col(static_cast<int>(j)) = coordsOf(bracket(B[j], M));
    return A;
}

Point groupPoint(std::vector<Mat> gs) {
    Point p;
    p.g = std::move(gs);
    p.v = Vec(0);
    return p;
}

Point vecPoint(const Vec& v) {
    Point p;
    p.v = v;
    return p;
}

Mat traceZeroSU2(Rng& rng) {
    const Mat U = rng.haarSU(2);
    Mat D = Mat::Zero(2, 2);
    D(0, 0) = cd(0, 1);
    D(1, 1) = cd(0, -1);
    return U * D * U.adjoint();
}

// orbit lift / retraction for conjugation on normal matrices
Mat conjugator(const Mat& m0, const Mat& y) {
    const int n = static_cast<int>(m0.rows());
    const SpectralFrame fm = spectralFrame(m0), fy = spectralFrame(y);
    if (fm.spread < 1e-9) return Mat::Identity(n, n);
    Mat g = fy.U * fm.U.adjoint();
    g *= std::pow(g.determinant(), -1.0 / n);
    return g;
}

Mat orbitProject(const Mat& m0, const Mat& y) {
    const SpectralFrame fm = spectralFrame(m0), fy = spectralFrame(y);
    if (fm.spread < 1e-9) return m0;
    return fy.U * fm.lambda.asDiagonal() * fy.U.adjoint();
}

}  // namespace

double kksForm(const Vec& mu, const Vec& u, const Vec& v) {
    const int n = algebraRank(mu.size());
    const Mat M = algebraFromCoords(mu, n);
    const RMat A = adMatrix(M);
    Eigen::CompleteOrthogonalDecomposition<RMat> cod(A.rows(), A.cols());
    cod.setThreshold(1e-10);
    cod.compute(A);
    const Vec xu = cod.solve(u), xv = cod.solve(v);
    return pairing(M, bracket(algebraFromCoords(xu, n), algebraFromCoords(xv, n)));
}

CatalogEntry makeAMM(const std::string& groupTag) {
    const int n = parseGroupTag(groupTag);
    const int d = suDim(n);
    CatalogEntry e;
    e.name = "amm-su" + std::to_string(n);
    e.kind = "amm";
    e.groupN = n;
    e.anchor = "is a quasi-symplectic groupoid";
    GroupoidModel& G = e.G;
    G.name = e.name;
    G.arrowDim = 2 * d;
    G.objectDim = d;
    G.arrowLayout = {2, 0, 0};
    G.objectLayout = {1, 0, 0};
    G.source = [](const Point& a) { return groupPoint({Ad(a.g[0], a.g[1])}); };
    G.target = [](const Point& a) { return groupPoint({a.g[1]}); };
    G.inverse = [](const Point& a) { return groupPoint({inv(a.g[0]), Ad(a.g[0], a.g[1])}); };
    G.unit = [n](const Point& m) { return groupPoint({Mat::Identity(n, n), m.g[0]}); };
    G.multiply = [](const Point& a, const Point& b) { return groupPoint({a.g[0] * b.g[0], b.g[1]}); };
    G.sampleObject = [n](Rng& rng) { return groupPoint({rng.haarSU(n)}); };
    G.arrowWithTarget = [n](const Point& m, Rng& rng) { return groupPoint({rng.haarSU(n), m.g[0]}); };
    if (n == 2) {
        G.specialObjects.push_back([](Rng& rng) { return groupPoint({traceZeroSU2(rng)}); });
        G.specialObjects.push_back([](Rng& rng) { return groupPoint({traceZeroSU2(rng)}); });
        G.specialObjects.push_back([](Rng&) { return groupPoint({Mat::Identity(2, 2)}); });
        G.specialObjects.push_back([](Rng&) { return groupPoint({Mat(-Mat::Identity(2, 2))}); });
    }
    e.C.omega = KForm{2, [](const Point& p, const std::vector<Vec>& vs) { return ammOmega(p, vs[0], vs[1]); }};
    e.C.Omega = KForm{3, [](const Point& p, const std::vector<Vec>& vs) {
                          return cartanThreeForm(p.g[0], vs[0], vs[1], vs[2]);
                      }};
    e.orbitLift = [](const Point& m0, const Point& y) {
        return groupPoint({conjugator(m0.g[0], y.g[0]), m0.g[0]});
    };
    e.orbitRetract = [](const Point& m0, const Point& y) { return groupPoint({orbitProject(m0.g[0], y.g[0])}); };
    return e;
}

namespace {

GroupoidModel coadjointGroupoid(int n, const std::string& name) {
    const int d = suDim(n);
    GroupoidModel G;
    G.name = name;
    G.arrowDim = 2 * d;
    G.objectDim = d;
    G.arrowLayout = {1, d, 0};
    G.objectLayout = {0, d, 0};
    auto mk = [](const Mat& g, const Vec& mu) {
        Point p;
        p.g = {g};
        p.v = mu;
        return p;
    };
    G.source = [n](const Point& a) { return vecPoint(coordsOf(Ad(a.g[0], algebraFromCoords(a.v, n)))); };
    G.target = [](const Point& a) { return vecPoint(a.v); };
    G.inverse = [n, mk](const Point& a) {
        return mk(inv(a.g[0]), coordsOf(Ad(a.g[0], algebraFromCoords(a.v, n))));
    };
    G.unit = [n, mk](const Point& m) { return mk(Mat::Identity(n, n), m.v); };
    G.multiply = [mk](const Point& a, const Point& b) { return mk(a.g[0] * b.g[0], b.v); };
    G.sampleObject = [d](Rng& rng) { return vecPoint(rng.normalVec(d)); };
    G.arrowWithTarget = [n, mk](const Point& m, Rng& rng) { return mk(rng.haarSU(n), m.v); };
    G.specialObjects.push_back([d](Rng&) { return vecPoint(Vec::Zero(d)); });
    return G;
}

}  // namespace

CatalogEntry makeCotangent(const std::string& groupTag) {
    const int n = parseGroupTag(groupTag);
    CatalogEntry e;
    e.name = "cotangent-su" + std::to_string(n);
    e.kind = "cotangent";
    e.groupN = n;
    e.anchor = "standard cotangent symplectic structure";
    e.G = coadjointGroupoid(n, e.name);
    e.C.omega = KForm{2, [](const Point& p, const std::vector<Vec>& vs) { return cotangentOmega(p, vs[0], vs[1]); }};
    e.C.Omega = zeroForm(3);
    e.orbitLift = [n](const Point& m0, const Point& y) {
        Point x;
        x.g = {conjugator(algebraFromCoords(m0.v, n), algebraFromCoords(y.v, n))};
        x.v = m0.v;
        return x;
    };
    e.orbitRetract = [n](const Point& m0, const Point& y) {
        return vecPoint(coordsOf(orbitProject(algebraFromCoords(m0.v, n), algebraFromCoords(y.v, n))));
    };
    return e;
}

CatalogEntry makeZeroFormNegative(const std::string& groupTag) {
    CatalogEntry e = makeCotangent(groupTag);
    e.name = "zero-form-negative";
    e.G.name = e.name;
    e.kind = "negative";
    e.anchor = "clearly not quasi-symplectic";
    e.C.omega = zeroForm(2);
    e.C.Omega = zeroForm(3);
    e.expected.nondegenerate = false;
    return e;
}

CatalogEntry makePerturbedNegative(const std::string& groupTag, double eps) {
    CatalogEntry e = makeAMM(groupTag);
    const int n = e.groupN;
    e.name = "perturbed-negative";
    e.G.name = e.name;
    e.kind = "negative";
    e.anchor = "ω+Ω is a 3-cocycle";
    const Mat mu0 = suBasis(n).front() + 0.5 * suBasis(n).back();
    const KForm base = e.C.omega;
    e.C.omega = KForm{2, [base, mu0, eps, n](const Point& p, const std::vector<Vec>& vs) {
                          const Mat& g = p.g[0];
                          const Mat a = inv(g) * algebraFromCoords(vs[0].head(suDim(n)), n) * g;
                          const Mat b = inv(g) * algebraFromCoords(vs[1].head(suDim(n)), n) * g;
                          // Weighted to vanish to second order on the units, so the unit kernel data
                          // of the AMM form are untouched and only multiplicativity breaks.
                          const double w = (g - Mat::Identity(n, n)).squaredNorm();
                          return base(p, vs) + eps * w * pairing(mu0, bracket(a, b));
                      }};
    e.expected.cocycle = false;
    e.expected.unitInverse = false;
    return e;
}

CatalogEntry makePairKKS(const Vec& mu0) {
    const int n = algebraRank(mu0.size());
    const int d = suDim(n);
    if (n != 2) throw std::invalid_argument("pair groupoid fixture is defined for SU(2) orbits");
    CatalogEntry e;
    e.name = "pair-kks-su2";
    e.kind = "pair";
    e.groupN = n;
    e.anchor = "ω = pr₁*σ − pr₂*σ";
    GroupoidModel& G = e.G;
    G.name = e.name;
    G.arrowDim = 4;
    G.objectDim = 2;
    G.arrowLayout = {0, 2 * d, 0};
    G.objectLayout = {0, d, 0};
    G.source = [d](const Point& a) { return vecPoint(a.v.head(d)); };
    G.target = [d](const Point& a) { return vecPoint(a.v.tail(d)); };
    G.inverse = [d](const Point& a) { return vecPoint(concatVec(a.v.tail(d), a.v.head(d))); };
    G.unit = [](const Point& m) { return vecPoint(concatVec(m.v, m.v)); };
    G.multiply = [d](const Point& a, const Point& b) { return vecPoint(concatVec(a.v.head(d), b.v.tail(d))); };
    auto orbitPoint = [mu0, n](Rng& rng) {
        return vecPoint(coordsOf(Ad(rng.haarSU(n), algebraFromCoords(mu0, n))));
    };
    G.sampleObject = orbitPoint;
    G.arrowWithTarget = [orbitPoint](const Point& m, Rng& rng) {
        return vecPoint(concatVec(orbitPoint(rng).v, m.v));
    };
    auto orbitTangent = [](const Vec& mu) {
        // orthonormal complement of mu in R^3
        Eigen::JacobiSVD<RMat> svd(RMat(mu.transpose()), Eigen::ComputeFullV);
        return RMat(svd.matrixV().rightCols(2));
    };
    G.objectTangent = [orbitTangent](const Point& m) { return orbitTangent(m.v); };
    G.arrowTangent = [orbitTangent, d](const Point& a) {
        RMat B = RMat::Zero(2 * d, 4);
        B.block(0, 0, d, 2) = orbitTangent(a.v.head(d));
        B.block(d, 2, d, 2) = orbitTangent(a.v.tail(d));
        return B;
    };
    e.C.omega = KForm{2, [d](const Point& p, const std::vector<Vec>& vs) {
                          return kksForm(p.v.head(d), vs[0].head(d), vs[1].head(d)) -
                                 kksForm(p.v.tail(d), vs[0].tail(d), vs[1].tail(d));
                      }};
    e.C.Omega = zeroForm(3);
    return e;
}

KForm sampleGaugeForm(int n, double scale) {
    const Mat mu0 = suBasis(n).front() + 0.5 * suBasis(n).back();
    const Mat nu0 = suBasis(n)[1];
    return KForm{2, [n, mu0, nu0, scale](const Point& p, const std::vector<Vec>& vs) {
                     const Mat& x = p.g[0];
                     const Mat a = algebraFromCoords(vs[0], n), b = algebraFromCoords(vs[1], n);
                     const double f = 1.0 + 0.3 * x.trace().real();
                     const double h = 0.2 * x(0, 0).imag();
                     const Mat la = inv(x) * a * x, lb = inv(x) * b * x;
                     return scale * (f * pairing(mu0, bracket(a, b)) + h * pairing(nu0, bracket(la, lb)));
                 }};
}

KForm exactGaugeForm(int n, const Mat& mu0) {
    return KForm{2, [n, mu0](const Point& p, const std::vector<Vec>& vs) {
                     const Mat& g = p.g[0];
                     const Mat a = inv(g) * algebraFromCoords(vs[0], n) * g;
                     const Mat b = inv(g) * algebraFromCoords(vs[1], n) * g;
                     return -pairing(mu0, bracket(a, b));
                 }};
}

CatalogEntry gaugeTransform(const CatalogEntry& e, const KForm& B, std::optional<KForm> dB, const std::string& suffix,
                            const Numerics& nm) {
    CatalogEntry out = e;
    out.name = e.name + "-" + suffix;
    out.G.name = out.name;
    out.anchor = "ω' = ω + s*B − t*B";
    const KForm dBf = dB ? *dB : exteriorDerivativeForm(B, nm);
    out.C.omega = sumForms({{1.0, e.C.omega}, {1.0, coboundary0Form(e.G, B, nm)}});
    out.C.Omega = sumForms({{1.0, e.C.Omega}, {1.0, dBf}});
    return out;
}

Vec pointResidual(const Point& a, const Point& b) {
    std::vector<Vec> parts;
    int total = 0;
    for (std::size_t i = 0; i < a.g.size(); ++i) {
        parts.push_back(coordsOf(a.g[i] * inv(b.g[i])));
        total += static_cast<int>(parts.back().size());
    }
    parts.push_back(a.v - b.v);
    total += static_cast<int>(parts.back().size());
    Vec r(total + 1);
    int off = 0;
    for (const auto& p : parts) {
        r.segment(off, p.size()) = p;
        off += static_cast<int>(p.size());
    }
    r(total) = a.tags == b.tags ? 0.0 : 1.0;
    return r;
}

PullbackArrow splitPullbackArrow(const Point& a, const Layout& y, const Layout& g) {
    (void)g;
    auto [yy, r] = split(a, 2 * y.ng, 2 * y.nv, 2 * y.nt);
    auto [y1, y2] = split(yy, y.ng, y.nv, y.nt);
    return {y1, y2, r};
}

CatalogEntry pullbackGroupoid(const CatalogEntry& e, const PullbackSpec& Y, const Numerics& nm) {
    CatalogEntry out;
    out.name = e.name + "[" + Y.name + "]";
    out.kind = "pullback";
    out.groupN = e.groupN;
    out.anchor = "(Γ[Y] ⇉ Y, pr*ω + pr*Ω)";
    out.expected = e.expected;
    const GroupoidModel base = e.G;
    const Layout yl = Y.layout, gl = base.arrowLayout;
    GroupoidModel& G = out.G;
    G.name = out.name;
    G.objectDim = Y.dim;
    G.arrowDim = 2 * Y.dim + base.arrowDim - 2 * base.objectDim;
    G.arrowLayout = {2 * yl.ng + gl.ng, 2 * yl.nv + gl.nv, 2 * yl.nt + gl.nt};
    G.objectLayout = yl;
    auto parts = [yl, gl](const Point& a) { return splitPullbackArrow(a, yl, gl); };
    auto make = [](const Point& y1, const Point& y2, const Point& r) { return concat(concat(y1, y2), r); };
    G.source = [parts](const Point& a) { return parts(a).y1; };
    G.target = [parts](const Point& a) { return parts(a).y2; };
    G.inverse = [parts, make, base](const Point& a) {
        const auto p = parts(a);
        return make(p.y2, p.y1, base.inverse(p.r));
    };
    const Map phi = Y.phi;
    G.unit = [make, base, phi](const Point& y) { return make(y, y, base.unit(phi(y))); };
    G.multiply = [parts, make, base](const Point& a, const Point& b) {
        const auto p = parts(a), q = parts(b);
        return make(p.y1, q.y2, base.multiply(p.r, q.r));
    };
    G.sampleObject = Y.sample;
    auto preimage = Y.preimage;
    auto sampleY = Y.sample;
    auto solve = [preimage, sampleY, phi, nm](const Point& m, Rng& rng) {
        if (preimage) return preimage(m, rng);
        for (int attempt = 0; attempt < 8; ++attempt) {
            const NewtonResult r = newtonProject([&](const Point& y) { return pointResidual(phi(y), m); },
                                                 sampleY(rng), nm);
            if (r.converged) return r.point;
        }
        throw std::runtime_error("pullback: Newton projection did not converge");
    };
    G.arrowWithTarget = [base, solve, make, phi](const Point& y2, Rng& rng) {
        const Point r = base.arrowWithTarget(phi(y2), rng);
        const Point y1 = solve(base.source(r), rng);
        return make(y1, y2, r);
    };
    if (preimage)
        for (const auto& sp : base.specialObjects)
            G.specialObjects.push_back([sp, preimage](Rng& rng) { return preimage(sp(rng), rng); });
    G.specialFraction = base.specialFraction;
    auto yBasis = [Y](const Point& y) {
        return Y.tangent ? Y.tangent(y) : RMat(RMat::Identity(tangentDim(y), tangentDim(y)));
    };
    G.objectTangent = yBasis;
    G.arrowTangent = [parts, make, base, phi, yBasis, nm](const Point& a) {
        const auto p = parts(a);
        const Point y12 = concat(p.y1, p.y2);
        const RMat B = joinBasis(y12, p.r, joinBasis(p.y1, p.y2, yBasis(p.y1), yBasis(p.y2)), base.arrowBasis(p.r));
        auto lhs = [parts, phi](const Point& q) {
            const auto s = parts(q);
            return concat(phi(s.y1), phi(s.y2));
        };
        auto rhs = [parts, base](const Point& q) {
            const auto s = parts(q);
            return concat(base.source(s.r), base.target(s.r));
        };
        const RMat D = jacobian(lhs, a, B, nm) - jacobian(rhs, a, B, nm);
        const Subspace k = kernelOf(D, nm);
        return imageOf(B * k.basis, nm, 1.0).basis;
    };
    const KForm w = e.C.omega;
    out.C.omega = KForm{2, [parts, w](const Point& a, const std::vector<Vec>& vs) {
                            const auto p = parts(a);
                            const Point y12 = concat(p.y1, p.y2);
                            std::vector<Vec> rv;
                            for (const auto& v : vs) rv.push_back(splitTangent(y12, p.r, v).second);
                            return w(p.r, rv);
                        }};
    out.C.Omega = pullback(e.C.Omega, phi, nm);
    return out;
}

PullbackSpec doubleCoverSpec() {
    PullbackSpec Y;
    Y.name = "double-cover";
    Y.dim = 3;
    Y.layout = {0, 3, 1};
    Y.phi = [](const Point& y) {
        Point m;
        m.v = y.v;
        return m;
    };
    Y.sample = [](Rng& rng) {
        Point y;
        y.v = rng.normalVec(3);
        y.tags = {rng.uniform() < 0.5 ? 0 : 1};
        return y;
    };
    Y.preimage = [](const Point& m, Rng& rng) {
        Point y;
        y.v = m.v;
        y.tags = {rng.uniform() < 0.5 ? 0 : 1};
        return y;
    };
    return Y;
}

std::vector<std::string> catalogNames() {
    return {"amm-su2", "amm-su3", "cotangent-su2", "amm-su2-gauged", "zero-form-negative", "perturbed-negative",
            "pair-kks-su2", "cotangent-su2-double-cover"};
}

CatalogEntry catalogByName(const std::string& name) {
    if (name == "amm-su2") return makeAMM("SU(2)");
    if (name == "amm-su3") return makeAMM("SU(3)");
    if (name == "cotangent-su2") return makeCotangent("SU(2)");
    if (name == "amm-su2-gauged") {
        CatalogEntry e = gaugeTransform(makeAMM("SU(2)"), sampleGaugeForm(2));
        return e;
    }
    if (name == "zero-form-negative") return makeZeroFormNegative("SU(2)");
    if (name == "perturbed-negative") return makePerturbedNegative("SU(2)");
    if (name == "pair-kks-su2") {
        Vec mu0(3);
        mu0 << 0.3, -0.5, 0.8;
        return makePairKKS(mu0);
    }
    if (name == "cotangent-su2-double-cover") {
        CatalogEntry e = pullbackGroupoid(makeCotangent("SU(2)"), doubleCoverSpec());
        e.name = name;
        e.G.name = name;
        return e;
    }
    throw std::invalid_argument("unknown catalog entry: " + name);
}

}  // namespace qsg

#include "qsg/hamspace.hpp"

#include "internal.hpp"

#include <chrono>
#include <cmath>

namespace qsg {

using namespace detail;

RMat HamiltonianSpaceModel::basis(const Point& x) const {
    if (tangent) return tangent(x);
    return RMat::Identity(tangentDim(x), tangentDim(x));
}

RMat HamiltonianSpaceModel::gaugeBasis(const Point& x) const {
    if (gauge) return gauge(x);
    return RMat(tangentDim(x), 0);
}

Point HamiltonianSpaceModel::stratified(int i, Rng& rng) const {
    if (!specialPoints.empty() && specialFraction > 0) {
        const int period = std::max(1, static_cast<int>(std::lround(1.0 / specialFraction)));
        if (i % period == 0) return specialPoints[(i / period) % specialPoints.size()](rng);
    }
    return sample(rng);
}

GroupoidModel pointGroupoid() {
    GroupoidModel P;
    P.name = "point";
    auto pt = [](const Point&) { return Point{}; };
    P.source = pt;
    P.target = pt;
    P.inverse = pt;
    P.unit = pt;
    P.multiply = [](const Point&, const Point&) { return Point{}; };
    P.sampleObject = [](Rng&) { return Point{}; };
    P.arrowWithTarget = [](const Point&, Rng&) { return Point{}; };
    return P;
}

namespace {

HamiltonianSpaceModel baseSpace(const BimoduleModel& X) {
    HamiltonianSpaceModel H;
    H.dim = X.dim;
    H.layout = X.layout;
    H.omega = X.omega;
    H.sample = X.sample;
    H.specialPoints = X.specialPoints;
    H.tangent = X.tangent;
    H.retract = X.retract;
    H.gauge = X.gauge;
    return H;
}

}  // namespace

HamiltonianSpaceModel BimoduleModel::asSpace() const {
    HamiltonianSpaceModel H = baseSpace(*this);
    H.name = name;
    H.G = productGroupoid(Gl, Hr);
    H.C = productCocycle(Gl, Cl, Hr, oppositeCocycle(Cr));
    const Map r = rho, s = sigma;
    H.J = [r, s](const Point& x) { return concat(r(x), s(x)); };
    const Layout al = Gl.arrowLayout;
    const Map2 al2 = actLeft, ar2 = actRight;
    H.act = [al, al2, ar2](const Point& gh, const Point& x) {
        auto [g, h] = split(gh, al.ng, al.nv, al.nt);
        return al2(g, ar2(h, x));
    };
    return H;
}

HamiltonianSpaceModel BimoduleModel::leftSpace() const {
    HamiltonianSpaceModel H = baseSpace(*this);
    H.name = name + "/left";
    H.G = Gl;
    H.C = Cl;
    H.J = rho;
    H.act = actLeft;
    return H;
}

HamiltonianSpaceModel BimoduleModel::rightSpace() const {
    HamiltonianSpaceModel H = baseSpace(*this);
    H.name = name + "/right";
    H.G = Hr;
    H.C = oppositeCocycle(Cr);
    H.J = sigma;
    H.act = actRight;
    return H;
}

Vec infinitesimalAction(const HamiltonianSpaceModel& H, const Vec& xi, const Point& x, const Numerics& nm) {
    const Point e = H.G.unit(H.J(x));
    return curveVelocity([&](double t) { return H.act(chart(e, t * xi), x); }, nm);
}

RMat infinitesimalActionMatrix(const HamiltonianSpaceModel& H, const RMat& xis, const Point& x,
                               const Numerics& nm) {
    RMat out(tangentDim(x), xis.cols());
    for (int j = 0; j < xis.cols(); ++j) out.col(j) = infinitesimalAction(H, xis.col(j), x, nm);
    return out;
}

CheckReport checkActionAxioms(const HamiltonianSpaceModel& H, const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    auto s = parallelMap<Sample>(opt.samples, std::function<Sample(int)>([&](int i) {
        Rng rng = Rng::stream(opt.seed, H.name + "/action", i);
        const Point x = H.stratified(i, rng);
        const Point m = H.J(x);
        const Point r2 = H.G.arrowWithTarget(m, rng);
        const Point r1 = H.G.arrowWithTarget(H.G.source(r2), rng);
        double r = pointDistance(H.J(H.act(r2, x)), H.G.source(r2));
        r = std::max(r, pointDistance(H.act(H.G.unit(m), x), x));
        r = std::max(r, pointDistance(H.act(H.G.multiply(r1, r2), x), H.act(r1, H.act(r2, x))));
        return Sample{r, true, false};
    }));
    CheckReport rep = aggregate("action_axioms", "let J: X→P be a left Γ-space", H.name, 1e-9, s,
                                opt.nm.indeterminateCap);
    rep.wallSeconds = seconds(t0);
    return rep;
}

CheckReport checkCompatible(const HamiltonianSpaceModel& H, const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const Numerics& nm = opt.nm;
    auto cols = runMulti(opt.samples, 3, [&](int i) {
        Rng rng = Rng::stream(opt.seed, H.name + "/compatible", i);
        const Point x = H.stratified(i, rng);
        const Point m = H.J(x);
        const RMat T = H.basis(x);
        // (i) d w_X = J* Omega
        std::vector<Vec> v3;
        for (int k = 0; k < 3; ++k) v3.push_back(randomTangent(T, rng));
        const double dw = H.retract ? exteriorDerivativeRetracted(H.omega, H.retract, x, v3, nm)
                                    : exteriorDerivative(H.omega, x, v3, nm);
        const double r1 = std::abs(dw - H.C.Omega(m, pushAll(H.J, x, v3, nm)));

        // (ii) graph isotropy on the action groupoid; the kernel and the pushforward both come
        // from differences, so extrapolate
        Numerics nr = nm;
        nr.richardson = true;
        const Point r = H.G.arrowWithTarget(m, rng);
        const RMat Tr = H.G.arrowBasis(r);
        const RMat Dt = jacobian(H.G.target, r, Tr, nr);
        const RMat DJ = jacobian(H.J, x, T, nr);
        const RMat M = hstack(Dt, -DJ);
        const Subspace K = kernelOf(M, nm);
        double r2 = 0;
        bool ind = K.indeterminate;
        if (K.dim() > 0) {
            const Map onX = [&H](const Point& p) { return H.retract ? H.retract(p) : p; };
            const Point ax = H.act(r, x);
            std::vector<Vec> ur, ux, ua;
            for (int k = 0; k < 2; ++k) {
                const Vec c = K.basis * rng.normalVec(K.dim());
                const Vec vr = Tr * c.head(Tr.cols());
                const Vec vx = T * c.tail(T.cols());
                ur.push_back(vr);
                ux.push_back(vx);
                ua.push_back(curveVelocity(
                    [&](double e) { return H.act(chart(r, e * vr), onX(chart(x, e * vx))); }, nr));
            }
            r2 = std::abs(H.omega(ax, ua) - H.omega(x, ux) - H.C.omega(r, ur));
        }

        // (iii) moment identity w_X(xi^, v) = w(xi, e_* J_* v)
        const AlgebroidFiber A = algebroidFiber(H.G, m, nm);
        double r3 = 0;
        if (A.basis.dim() > 0) {
            const Vec xi = randomTangent(A.basis.basis, rng);
            const Vec v = randomTangent(T, rng);
            const Vec hat = infinitesimalAction(H, xi, x, nm);
            const Vec ev = differential(H.G.unit, m, differential(H.J, x, v, nm), nm);
            r3 = std::abs(H.omega(x, {hat, v}) - H.C.omega(A.unitArrow, {xi, ev}));
        }
        return std::vector<Sample>{{r1, true, false}, {r2, true, ind}, {r3, true, A.basis.indeterminate}};
    });
    std::vector<CheckReport> parts{
        aggregate("dw_minus_JOmega", "dω_X = J*Ω", H.name, opt.tolerance, cols[0], nm.indeterminateCap),
        aggregate("graph_isotropy", "J*(ω + Ω) = δω_X", H.name, opt.tolerance, cols[1], nm.indeterminateCap),
        aggregate("moment_identity", "J*ε*(ξ→(m) ⌟ ω) = ξ̂(x) ⌟ ω_X", H.name, opt.tolerance, cols[2],
                  nm.indeterminateCap)};
    CheckReport rep = combine("compatible", "dω_X = J*Ω", H.name, parts);
    rep.samples = opt.samples;
    rep.wallSeconds = seconds(t0);
    return rep;
}

namespace {

struct MinimalResult {
    int kerOmega = 0, kerA = 0, hatImage = 0, gaugeDim = 0, kerJcapKerOmega = 0, rankJ = 0, isotropy = 0,
        rankA = 0;
    double distance = 0;
    bool kernelIsOrbit = true, levelMeetsKernelTrivially = true, rankBoundHolds = true;
    bool indeterminate = false;
    bool pass = false;
};

MinimalResult minimalAt(const HamiltonianSpaceModel& H, const Point& x, const Numerics& nm) {
    MinimalResult r;
    const Point m = H.J(x);
    const int n = tangentDim(x);
    const RMat T = orthonormal(H.basis(x), nm);
    const RMat Gm = H.gaugeBasis(x);
    const Subspace gauge = spanOf(Gm, n, nm);
    r.gaugeDim = gauge.dim();

    const RMat W = gramMatrix(H.omega, x, T);
    const Subspace kw = kernelOf(W, nm);
    const Subspace kerW = spanOf(hstack(T * kw.basis, gauge.basis), n, nm);

    const UnitKernels U = unitKernels(H.G, H.C, m, nm);
    const RMat xis = U.A.basis.basis * U.kerA.basis;
    const RMat hats = infinitesimalActionMatrix(H, xis, x, nm);
    const Subspace hatSpan = spanOf(hstack(normalizedColumns(hats, 1e-9), gauge.basis), n, nm);

    r.kerOmega = kerW.dim() - r.gaugeDim;
    r.kerA = U.kerA.dim();
    r.hatImage = hatSpan.dim() - r.gaugeDim;
    r.distance = subspaceDistance(kerW, hatSpan);
    r.kernelIsOrbit = r.hatImage == r.kerA;

    const RMat DJ = jacobian(H.J, x, T, nm);
    const Subspace kj = kernelOf(DJ, nm);
    const Subspace kerJ = spanOf(T * kj.basis, n, nm);
    r.kerJcapKerOmega = subspaceIntersect(kerJ, kerW, nm).dim() - r.gaugeDim;
    r.levelMeetsKernelTrivially = r.kerJcapKerOmega == 0;

    // dim J_*(T_xX) <= rank A - dim A^x_x
    const RMat allHats = infinitesimalActionMatrix(H, U.A.basis.basis, x, nm);
    r.rankA = U.A.basis.dim();
    const int hatRank = spanOf(hstack(normalizedColumns(allHats, 1e-9), gauge.basis), n, nm).dim() - r.gaugeDim;
    r.isotropy = r.rankA - hatRank;
    r.rankJ = imageOf(DJ, nm).dim();
    r.rankBoundHolds = r.rankJ <= r.rankA - r.isotropy;

    r.indeterminate = kw.indeterminate || U.indeterminate || kj.indeterminate || kerW.indeterminate ||
                      hatSpan.indeterminate;
    r.pass = r.distance <= 1e-6 && r.kernelIsOrbit && r.levelMeetsKernelTrivially && r.rankBoundHolds;
    return r;
}

void recordMinimal(CheckReport& rep, const MinimalResult& r) {
    rep.setDim("ker_omega_X", r.kerOmega);
    rep.setDim("ker_A", r.kerA);
    rep.setDim("hat_image", r.hatImage);
    rep.setDim("ker_J_cap_ker_omega", r.kerJcapKerOmega);
    rep.setDim("rank_J", r.rankJ);
    rep.setDim("isotropy", r.isotropy);
    rep.setDim("rank_A", r.rankA);
    rep.setMetric("principal_angle", r.distance);
}

}  // namespace

CheckReport checkMinimalNondegeneracy(const HamiltonianSpaceModel& H, const Point& x, const Numerics& nm) {
    const MinimalResult r = minimalAt(H, x, nm);
    CheckReport rep = aggregate("minimal_nondegeneracy", "ker ω_X |_x = {ξ̂(x) | ξ ∈ A_{J(x)}", H.name, 1e-6,
                                {Sample{r.distance, r.pass, r.indeterminate}}, 1.0);
    if (r.indeterminate) rep.verdict = Verdict::Indeterminate;
    recordMinimal(rep, r);
    return rep;
}

CheckReport checkMinimalNondegeneracy(const HamiltonianSpaceModel& H, const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    auto rs = parallelMap<MinimalResult>(opt.samples, std::function<MinimalResult(int)>([&](int i) {
        Rng rng = Rng::stream(opt.seed, H.name + "/minimal", i);
        return minimalAt(H, H.stratified(i, rng), opt.nm);
    }));
    std::vector<Sample> s;
    long kmin = 1 << 30, kmax = -1;
    for (const auto& r : rs) {
        s.push_back(Sample{r.distance, r.pass, r.indeterminate});
        if (!r.indeterminate) {
            kmin = std::min<long>(kmin, r.kerOmega);
            kmax = std::max<long>(kmax, r.kerOmega);
        }
    }
    CheckReport rep = aggregate("minimal_nondegeneracy", "ker ω_X |_x = {ξ̂(x) | ξ ∈ A_{J(x)}", H.name, 1e-6, s,
                                opt.nm.indeterminateCap);
    if (kmax >= 0) {
        rep.setDim("ker_omega_X.min", kmin);
        rep.setDim("ker_omega_X.max", kmax);
    }
    int badA = 0, badB = 0, badBound = 0;
    for (const auto& r : rs) {
        badA += !r.kernelIsOrbit;
        badB += !r.levelMeetsKernelTrivially;
        badBound += !r.rankBoundHolds;
    }
    rep.setDim("kernel_orbit_count_failures", badA);
    rep.setDim("level_kernel_failures", badB);
    rep.setDim("rank_bound_failures", badBound);
    rep.wallSeconds = seconds(t0);
    return rep;
}

namespace {

struct OrthResult {
    double distance = 0;
    int lhs = 0, rhs = 0;
    bool indeterminate = false;
};

OrthResult orthogonalityAt(const HamiltonianSpaceModel& H, const Point& x, const Numerics& nm) {
    OrthResult r;
    const Point m = H.J(x);
    const int n = tangentDim(x);
    const RMat T = orthonormal(H.basis(x), nm);
    const Subspace gauge = spanOf(H.gaugeBasis(x), n, nm);
    const RMat W = gramMatrix(H.omega, x, T);
    const RMat DJ = jacobian(H.J, x, T, nm);
    const Subspace kj = kernelOf(DJ, nm);
    // c with c^T W d = 0 for all d in ker J_*
    Subspace orth;
    if (kj.dim() == 0) orth = fullSpace(static_cast<int>(T.cols()));
    else orth = kernelOf(RMat((W * kj.basis).transpose()), nm, std::max(W.norm(), 1e-300));
    const Subspace lhs = spanOf(hstack(T * orth.basis, gauge.basis), n, nm);
    const AlgebroidFiber A = algebroidFiber(H.G, m, nm);
    const RMat hats = infinitesimalActionMatrix(H, A.basis.basis, x, nm);
    const Subspace rhs = spanOf(hstack(normalizedColumns(hats, 1e-9), gauge.basis), n, nm);
    r.lhs = lhs.dim() - gauge.dim();
    r.rhs = rhs.dim() - gauge.dim();
    r.distance = subspaceDistance(lhs, rhs);
    r.indeterminate = kj.indeterminate || orth.indeterminate || lhs.indeterminate || rhs.indeterminate ||
                      A.basis.indeterminate;
    return r;
}

}  // namespace

CheckReport checkOrthogonalityIdentity(const HamiltonianSpaceModel& H, const Point& x, const Numerics& nm) {
    const OrthResult r = orthogonalityAt(H, x, nm);
    CheckReport rep = aggregate("orthogonality_identity", "(ker J_*)^{ω_X}={ξ̂(x)|∀ ξ∈A_{J(x)}}", H.name, 1e-6,
                                {Sample{r.distance, true, r.indeterminate}}, 1.0);
    if (r.indeterminate) rep.verdict = Verdict::Indeterminate;
    rep.setDim("orthogonal_of_ker_J", r.lhs);
    rep.setDim("infinitesimal_orbit", r.rhs);
    return rep;
}

CheckReport checkOrthogonalityIdentity(const HamiltonianSpaceModel& H, const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    auto rs = parallelMap<OrthResult>(opt.samples, std::function<OrthResult(int)>([&](int i) {
        Rng rng = Rng::stream(opt.seed, H.name + "/orthogonality", i);
        return orthogonalityAt(H, H.stratified(i, rng), opt.nm);
    }));
    std::vector<Sample> s;
    for (const auto& r : rs) s.push_back(Sample{r.distance, true, r.indeterminate});
    CheckReport rep = aggregate("orthogonality_identity", "(ker J_*)^{ω_X}={ξ̂(x)|∀ ξ∈A_{J(x)}}", H.name, 1e-6, s,
                                opt.nm.indeterminateCap);
    rep.wallSeconds = seconds(t0);
    return rep;
}

CheckReport checkBimoduleActions(const BimoduleModel& X, const CheckOptions& opt) {
    auto s = parallelMap<Sample>(opt.samples, std::function<Sample(int)>([&](int i) {
        Rng rng = Rng::stream(opt.seed, X.name + "/commute", i);
        const Point x = X.sample(rng);
        const Point g = X.Gl.arrowWithTarget(X.rho(x), rng);
        const Point h = X.Hr.arrowWithTarget(X.sigma(x), rng);
        const double r = pointDistance(X.actLeft(g, X.actRight(h, x)), X.actRight(h, X.actLeft(g, x)));
        return Sample{r, true, false};
    }));
    return aggregate("actions_commute", "the two actions commute", X.name, 1e-9, s, opt.nm.indeterminateCap);
}

BimoduleModel makeGroupoidBimodule(const CatalogEntry& e) {
    BimoduleModel X;
    const GroupoidModel G = e.G;
    X.name = e.name + "/bimodule";
    X.Gl = G;
    X.Hr = G;
    X.Cl = e.C;
    X.Cr = e.C;
    X.dim = G.arrowDim;
    X.layout = G.arrowLayout;
    X.rho = G.source;
    X.sigma = G.target;
    X.actLeft = G.multiply;
    X.actRight = [G](const Point& h, const Point& x) { return G.multiply(x, G.inverse(h)); };
    X.omega = e.C.omega;
    X.sample = [G](Rng& rng) { return G.arrowWithTarget(G.sampleObject(rng), rng); };
    X.sampleOverRho = [G](const Point& m, Rng& rng) { return G.arrowWithSource(m, rng); };
    X.sampleOverSigma = [G](const Point& n, Rng& rng) { return G.arrowWithTarget(n, rng); };
    for (const auto& sp : G.specialObjects)
        X.specialPoints.push_back([G, sp](Rng& rng) { return G.arrowWithTarget(sp(rng), rng); });
    X.tangent = G.arrowTangent;
    return X;
}

BimoduleModel reverseBimodule(const BimoduleModel& X) {
    BimoduleModel R = X;
    R.name = X.name + "-bar";
    std::swap(R.Gl, R.Hr);
    std::swap(R.Cl, R.Cr);
    std::swap(R.rho, R.sigma);
    std::swap(R.actLeft, R.actRight);
    std::swap(R.sampleOverRho, R.sampleOverSigma);
    const KForm w = X.omega;
    R.omega = KForm{2, [w](const Point& p, const std::vector<Vec>& vs) { return -w(p, vs); }};
    return R;
}

BimoduleModel asLeftBimodule(const HamiltonianSpaceModel& H) {
    BimoduleModel X;
    X.name = H.name;
    X.Gl = H.G;
    X.Cl = H.C;
    X.Hr = pointGroupoid();
    X.Cr = CocycleData{zeroForm(2), zeroForm(3)};
    X.dim = H.dim;
    X.layout = H.layout;
    X.rho = H.J;
    X.sigma = [](const Point&) { return Point{}; };
    X.actLeft = H.act;
    X.actRight = [](const Point&, const Point& x) { return x; };
    X.omega = H.omega;
    X.sample = H.sample;
    const auto smp = H.sample;
    X.sampleOverSigma = [smp](const Point&, Rng& rng) { return smp(rng); };
    X.specialPoints = H.specialPoints;
    X.tangent = H.tangent;
    X.retract = H.retract;
    X.gauge = H.gauge;
    return X;
}

HamiltonianSpaceModel makeLeftTranslationSpace(const CatalogEntry& e) {
    HamiltonianSpaceModel H;
    const GroupoidModel G = e.G;
    H.name = e.name + "/left-translation";
    H.G = G;
    H.C = e.C;
    H.dim = G.arrowDim;
    H.layout = G.arrowLayout;
    H.J = G.source;
    H.act = G.multiply;
    H.omega = e.C.omega;
    H.sample = [G](Rng& rng) { return G.arrowWithTarget(G.sampleObject(rng), rng); };
    for (const auto& sp : G.specialObjects)
        H.specialPoints.push_back([G, sp](Rng& rng) { return G.arrowWithTarget(sp(rng), rng); });
    H.tangent = G.arrowTangent;
    return H;
}

HamiltonianSpaceModel makeIgnoredFactorSpace(const CatalogEntry& e) {
    HamiltonianSpaceModel H;
    const GroupoidModel G = e.G;
    const Layout al = G.arrowLayout;
    H.name = e.name + "/ignored-factor";
    H.G = G;
    H.C = e.C;
    H.dim = G.arrowDim + G.objectDim;
    H.layout = {al.ng + G.objectLayout.ng, al.nv + G.objectLayout.nv, al.nt + G.objectLayout.nt};
    H.J = [G, al](const Point& z) { return G.source(split(z, al.ng, al.nv, al.nt).first); };
    H.act = [G, al](const Point& r, const Point& z) {
        auto [x, p] = split(z, al.ng, al.nv, al.nt);
        return concat(G.multiply(r, x), p);
    };
    H.omega = jointForm(e.C.omega, zeroForm(2), al);
    H.sample = [G](Rng& rng) {
        const Point x = G.arrowWithTarget(G.sampleObject(rng), rng);
        return concat(x, G.sampleObject(rng));
    };
    H.tangent = [G, al](const Point& z) {
        auto [x, p] = split(z, al.ng, al.nv, al.nt);
        return joinBasis(x, p, G.arrowBasis(x), G.objectBasis(p));
    };
    return H;
}

namespace {

struct SourceLift {
    RMat fiber;  // t-fiber tangent basis at x
    RMat S;      // s_* on fiber
    double threshold = 1e-8;
};

SourceLift sourceLift(const GroupoidModel& G, const Point& x, const Numerics& nm) {
    SourceLift L;
    const RMat T = G.arrowBasis(x);
    const Subspace k = kernelOf(jacobian(G.target, x, T, nm), nm);
    L.fiber = T * k.basis;
    L.S = jacobian(G.source, x, L.fiber, nm);
    L.threshold = nm.rankThreshold;
    return L;
}

Vec liftVector(const SourceLift& L, const Vec& u) {
    if (L.fiber.cols() == 0) return Vec::Zero(L.fiber.rows());
    // isotropy directions give FD-noise pivots; treat them as zero so normal components are dropped
    Eigen::CompleteOrthogonalDecomposition<RMat> cod(L.S.rows(), L.S.cols());
    cod.setThreshold(L.threshold);
    cod.compute(L.S);
    return L.fiber * cod.solve(u);
}

}  // namespace

KForm orbitForm(const CatalogEntry& e, const Point& m0, const Numerics& nm) {
    if (!e.orbitLift) throw std::invalid_argument("orbit form: entry has no orbit parametrization");
    const GroupoidModel G = e.G;
    const KForm w = e.C.omega;
    const auto lift = e.orbitLift;
    return KForm{2, [G, w, lift, m0, nm](const Point& y, const std::vector<Vec>& vs) {
                     const Point x = lift(m0, y);
                     const SourceLift L = sourceLift(G, x, nm);
                     return w(x, {liftVector(L, vs[0]), liftVector(L, vs[1])});
                 }};
}

HamiltonianSpaceModel makeOrbitSpace(const CatalogEntry& e, const Point& m0, const Numerics& nm) {
    HamiltonianSpaceModel H;
    const GroupoidModel G = e.G;
    H.name = e.name + "/orbit";
    H.G = G;
    H.C = e.C;
    H.layout = G.objectLayout;
    H.J = [](const Point& y) { return y; };
    H.act = [G](const Point& r, const Point&) { return G.source(r); };
    H.omega = orbitForm(e, m0, nm);
    H.sample = [G, m0](Rng& rng) { return G.source(G.arrowWithTarget(m0, rng)); };
    const auto lift = e.orbitLift;
    H.tangent = [G, lift, m0, nm](const Point& y) {
        const SourceLift L = sourceLift(G, lift(m0, y), nm);
        if (L.S.cols() == 0) return RMat(tangentDim(y), 0);
        return imageOf(L.S, nm).basis;
    };
    if (e.orbitRetract) {
        const auto ret = e.orbitRetract;
        H.retract = [ret, m0](const Point& y) { return ret(m0, y); };
    }
    H.dim = static_cast<int>(H.tangent(m0).cols());
    return H;
}

CheckReport checkOrbitDescent(const CatalogEntry& e, const Point& m0, const CheckOptions& opt) {
    const GroupoidModel& G = e.G;
    const Numerics& nm = opt.nm;
    const UnitKernels U = unitKernels(G, e.C, m0, nm);
    const Subspace iso = kernelOf(U.anchorOnA, nm);
    const RMat isoDirs = U.A.basis.basis * iso.basis;
    auto s = parallelMap<Sample>(opt.samples, std::function<Sample(int)>([&](int i) {
        Rng rng = Rng::stream(opt.seed, e.name + "/orbit-descent", i);
        const Point x = G.arrowWithTarget(m0, rng);
        const Point y = G.source(x);
        const SourceLift L = sourceLift(G, x, nm);
        if (L.S.cols() == 0) return Sample{0.0, true, false};
        const Subspace TO = imageOf(L.S, nm);
        if (TO.dim() == 0) return Sample{0.0, true, false};
        const Vec u = randomTangent(TO.basis, rng), v = randomTangent(TO.basis, rng);
        const Vec lu = liftVector(L, u), lv = liftVector(L, v);
        const double base = e.C.omega(x, {lu, lv});
        double r = 0;
        // a different lift at the same arrow
        const Subspace ks = kernelOf(L.S, nm);
        if (ks.dim() > 0) {
            const Vec k = L.fiber * (ks.basis * rng.normalVec(ks.dim()));
            r = std::max(r, std::abs(e.C.omega(x, {lu + k, lv}) - base));
        }
        // the lift at x k for an isotropy arrow k
        if (isoDirs.cols() > 0) {
            const Point k = chart(G.unit(m0), 0.7 * randomTangent(isoDirs, rng));
            const Point xk = G.multiply(x, k);
            r = std::max(r, pointDistance(G.source(xk), y));
            const SourceLift L2 = sourceLift(G, xk, nm);
            r = std::max(r, std::abs(e.C.omega(xk, {liftVector(L2, u), liftVector(L2, v)}) - base));
        }
        return Sample{r, true, false};
    }));
    return aggregate("orbit_descent", "ω|_{t^{-1}(m₀)} = s*ω_O", e.name, opt.tolerance, s, nm.indeterminateCap);
}

HamiltonianSpaceModel scaleForm(const HamiltonianSpaceModel& H, double c) {
    HamiltonianSpaceModel out = H;
    const KForm w = H.omega;
    out.omega = KForm{2, [w, c](const Point& p, const std::vector<Vec>& vs) { return c * w(p, vs); }};
    out.name = H.name + "*" + std::to_string(c).substr(0, 4);
    return out;
}

BimoduleModel withForm(const BimoduleModel& X, const KForm& w, const std::string& name) {
    BimoduleModel out = X;
    out.omega = w;
    out.name = name;
    return out;
}

CheckReport checkQuasiHamiltonianAxioms(const HamiltonianSpaceModel& H, const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    if (H.G.objectLayout.ng != 1 || H.G.arrowLayout.ng != 2 || H.G.objectLayout.nv != 0)
        throw std::invalid_argument("quasi-Hamiltonian axioms need a space over an AMM-type groupoid");
    const Numerics& nm = opt.nm;
    auto cols = runMulti(opt.samples, 3, [&](int i) {
        Rng rng = Rng::stream(opt.seed, H.name + "/qham", i);
        const Point x = H.stratified(i, rng);
        const Point m = H.J(x);
        const Mat& g = m.g[0];
        const int n = static_cast<int>(g.rows());
        const int d = suDim(n);
        const RMat T = H.basis(x);

        std::vector<Vec> v3;
        for (int k = 0; k < 3; ++k) v3.push_back(randomTangent(T, rng));
        const double dw = H.retract ? exteriorDerivativeRetracted(H.omega, H.retract, x, v3, nm)
                                    : exteriorDerivative(H.omega, x, v3, nm);
        const double b1 = std::abs(dw - H.C.Omega(m, pushAll(H.J, x, v3, nm)));

        // generating vector field of xi: d/de exp(-e xi).x
        auto generating = [&](const Vec& X) { return Vec(-infinitesimalAction(H, concatVec(X, Vec::Zero(d)), x, nm)); };
        const Vec X = rng.normalVec(d);
        const Vec v = randomTangent(T, rng);
        const Mat Y = algebraFromCoords(differential(H.J, x, v, nm), n);
        const double rhs = 0.5 * pairing(algebraFromCoords(X, n), Ad(inv(g), Y) + Y);
        const double b2 = std::abs(H.omega(x, {generating(X), v}) - rhs);

        // ker w_X = {xi_X : xi in ker(Ad_g + 1)}
        RMat AdP(d, d);
        const auto& B = suBasis(n);
        for (int j = 0; j < d; ++j) AdP.col(j) = coordsOf(Ad(g, B[j]));
        AdP += RMat::Identity(d, d);
        const Subspace kAd = kernelOf(AdP, nm, 2.0);
        const int nx = tangentDim(x);
        const Subspace gauge = spanOf(H.gaugeBasis(x), nx, nm);
        RMat gen(nx, kAd.dim());
        for (int j = 0; j < kAd.dim(); ++j) gen.col(j) = generating(kAd.basis.col(j));
        const Subspace rhsK = spanOf(hstack(normalizedColumns(gen, 1e-9), gauge.basis), nx, nm);
        const RMat To = orthonormal(T, nm);
        const Subspace kw = kernelOf(gramMatrix(H.omega, x, To), nm);
        const Subspace lhsK = spanOf(hstack(To * kw.basis, gauge.basis), nx, nm);
        const double b3 = subspaceDistance(lhsK, rhsK);
        return std::vector<Sample>{{b1, true, false},
                                   {b2, true, false},
                                   {b3, lhsK.dim() == rhsK.dim(), kAd.indeterminate || kw.indeterminate}};
    });
    std::vector<CheckReport> parts{
        aggregate("B1", "dω_X = J*Ω", H.name, opt.tolerance, cols[0], nm.indeterminateCap),
        aggregate("B2", "ξ̂ ⌟ ω_X = ½ J*(ξ, θ + θ̄)", H.name, opt.tolerance, cols[1], nm.indeterminateCap),
        aggregate("B3", "ξ ∈ ker(Ad_{J(x)}+1)", H.name, 1e-6, cols[2], nm.indeterminateCap)};
    CheckReport rep = combine("quasi_hamiltonian", "correspond exactly to quasi-Hamiltonian G spaces", H.name, parts);
    rep.samples = opt.samples;
    rep.wallSeconds = seconds(t0);
    return rep;
}

// ---------- fusion ----------

FusionResult fuseAt(const FusionSide& a, const FusionSide& b, const RMat& algebroid, const Numerics& nm) {
    FusionResult F;
    F.z = concat(a.x, b.x);
    const int n = tangentDim(F.z);
    const RMat Da = jacobian(a.moment, a.x, a.T, nm);
    const RMat Db = jacobian(b.moment, b.x, b.T, nm);
    const Subspace k = kernelOf(hstack(Da, -Db), nm);
    F.indeterminate = k.indeterminate;
    const RMat Ka = k.basis.topRows(a.T.cols()), Kb = k.basis.bottomRows(b.T.cols());
    const RMat blocks = joinBasis(a.x, b.x, a.T * Ka, b.T * Kb);
    const int kd = k.dim();
    F.fiberTangent = kd ? orthonormal(blocks.leftCols(kd) + blocks.rightCols(kd), nm) : RMat(n, 0);
    F.fiberDim = static_cast<int>(F.fiberTangent.cols());

    RMat O(n, algebroid.cols());
    for (int j = 0; j < algebroid.cols(); ++j)
        O.col(j) = joinTangent(a.x, b.x, a.orbit(algebroid.col(j)), b.orbit(algebroid.col(j)));
    RMat ga = RMat::Zero(n, 0);
    if (a.gauge.cols() > 0) ga = joinBasis(a.x, b.x, a.gauge, RMat(tangentDim(b.x), 0));
    RMat gb = RMat::Zero(n, 0);
    if (b.gauge.cols() > 0) gb = joinBasis(a.x, b.x, RMat(tangentDim(a.x), 0), b.gauge);
    const Subspace orbit = spanOf(hstack(hstack(normalizedColumns(O, 1e-9), ga), gb), n, nm);
    F.orbitDirs = orbit.basis;
    F.orbitDim = orbit.dim();
    F.indeterminate = F.indeterminate || orbit.indeterminate;

    Subspace fiber;
    fiber.basis = F.fiberTangent;
    fiber.ambientDim = n;
    const Subspace Q = complementIn(fiber, orbit, nm);
    F.quotient = Q.basis;
    F.quotientDim = Q.dim();

    F.form = jointForm(a.omega, b.omega, layoutOf(a.x), a.sign, b.sign);
    F.gram = gramMatrix(F.form, F.z, F.quotient);
    for (int i = 0; i < F.orbitDirs.cols(); ++i)
        for (int j = 0; j < F.fiberTangent.cols(); ++j)
            F.descentResidual =
                std::max(F.descentResidual, std::abs(F.form(F.z, {F.orbitDirs.col(i), F.fiberTangent.col(j)})));
    const double scale = std::max(gramMatrix(F.form, F.z, F.fiberTangent).norm(), nm.absFloor);
    const Subspace kg = kernelOf(F.gram, nm, scale);
    F.kernelDim = kg.dim();
    F.indeterminate = F.indeterminate || kg.indeterminate;

    // clean: the image of the fiber product equals one of the two images
    const int mdim = static_cast<int>(Da.rows());
    const Subspace ia = spanOf(Da, mdim, nm, -1), ib = spanOf(Db, mdim, nm, -1);
    const Subspace ifp = spanOf(kd ? RMat(Da * Ka) : RMat(mdim, 0), mdim, nm, -1);
    const bool eqA = subspaceDistance(ifp, ia) <= 1e-6;
    const bool eqB = subspaceDistance(ifp, ib) <= 1e-6;
    F.clean = eqA || eqB;
    if (!F.clean)
        F.cleanFailure = "clean condition fails: first image has dim " + std::to_string(ia.dim()) +
                         ", second image has dim " + std::to_string(ib.dim()) +
                         ", fiber-product image has dim " + std::to_string(ifp.dim()) +
                         "; neither image inclusion into the fiber-product image holds";
    return F;
}

namespace {

FusionSide rightSide(const BimoduleModel& X, const Point& x, const Point& m, const Numerics& nm) {
    FusionSide s;
    s.x = x;
    s.T = X.tangent ? X.tangent(x) : RMat(RMat::Identity(tangentDim(x), tangentDim(x)));
    s.moment = X.sigma;
    s.omega = X.omega;
    s.gauge = X.gauge ? X.gauge(x) : RMat(tangentDim(x), 0);
    const GroupoidModel H = X.Hr;
    const Map2 act = X.actRight;
    const Point e = H.unit(m);
    s.orbit = [act, e, x, nm](const Vec& xi) {
        return curveVelocity([&](double t) { return act(chart(e, t * xi), x); }, nm);
    };
    return s;
}

FusionSide leftSide(const BimoduleModel& Y, const Point& y, const Point& m, const Numerics& nm) {
    FusionSide s;
    s.x = y;
    s.T = Y.tangent ? Y.tangent(y) : RMat(RMat::Identity(tangentDim(y), tangentDim(y)));
    s.moment = Y.rho;
    s.omega = Y.omega;
    s.gauge = Y.gauge ? Y.gauge(y) : RMat(tangentDim(y), 0);
    const Map2 act = Y.actLeft;
    const Point e = Y.Gl.unit(m);
    s.orbit = [act, e, y, nm](const Vec& xi) {
        return curveVelocity([&](double t) { return act(chart(e, t * xi), y); }, nm);
    };
    return s;
}

FusionResult composeUnchecked(const BimoduleModel& X, const BimoduleModel& Y, const Point& x, const Point& y,
                              const Numerics& nm) {
    const Point m = X.sigma(x);
    if (pointDistance(m, Y.rho(y)) > 1e-6) throw std::domain_error("compose: sigma(x) differs from rho(y)");
    const AlgebroidFiber A = algebroidFiber(X.Hr, m, nm);
    return fuseAt(rightSide(X, x, m, nm), leftSide(Y, y, m, nm), A.basis.basis, nm);
}

}  // namespace

FusionResult composeBimodules(const BimoduleModel& X, const BimoduleModel& Y, const Point& x, const Point& y,
                              const Numerics& nm) {
    FusionResult F = composeUnchecked(X, Y, x, y, nm);
    if (!F.clean) throw std::domain_error(F.cleanFailure);
    return F;
}

BimoduleModel fusedBimodule(const BimoduleModel& X, const BimoduleModel& Y, const Numerics& nm) {
    BimoduleModel Z;
    Z.name = X.name + "∘" + Y.name;
    Z.Gl = X.Gl;
    Z.Cl = X.Cl;
    Z.Hr = Y.Hr;
    Z.Cr = Y.Cr;
    const Layout lx = X.layout;
    Z.layout = {lx.ng + Y.layout.ng, lx.nv + Y.layout.nv, lx.nt + Y.layout.nt};
    auto parts = [lx](const Point& z) { return split(z, lx.ng, lx.nv, lx.nt); };
    const Map xr = X.rho, ys = Y.sigma;
    Z.rho = [parts, xr](const Point& z) { return xr(parts(z).first); };
    Z.sigma = [parts, ys](const Point& z) { return ys(parts(z).second); };
    const Map2 xl = X.actLeft, yr = Y.actRight;
    Z.actLeft = [parts, xl](const Point& g, const Point& z) {
        auto [x, y] = parts(z);
        return concat(xl(g, x), y);
    };
    Z.actRight = [parts, yr](const Point& k, const Point& z) {
        auto [x, y] = parts(z);
        return concat(x, yr(k, y));
    };
    Z.omega = jointForm(X.omega, Y.omega, lx);
    const BimoduleModel Xc = X, Yc = Y;
    auto over = [Yc, nm](const Point& m, Rng& rng) {
        if (Yc.sampleOverRho) return Yc.sampleOverRho(m, rng);
        for (int attempt = 0; attempt < 8; ++attempt) {
            const NewtonResult r =
                newtonProject([&](const Point& y) { return pointResidual(Yc.rho(y), m); }, Yc.sample(rng), nm);
            if (r.converged) return r.point;
        }
        throw std::runtime_error("fused bimodule: Newton projection did not converge");
    };
    Z.sample = [Xc, Yc, over](Rng& rng) {
        if (!Yc.sampleOverRho && Xc.sampleOverSigma) {
            const Point y = Yc.sample(rng);
            return concat(Xc.sampleOverSigma(Yc.rho(y), rng), y);
        }
        const Point x = Xc.sample(rng);
        return concat(x, over(Xc.sigma(x), rng));
    };
    if (X.sampleOverRho)
        Z.sampleOverRho = [Xc, over](const Point& m, Rng& rng) {
            const Point x = Xc.sampleOverRho(m, rng);
            return concat(x, over(Xc.sigma(x), rng));
        };
    if (Y.sampleOverSigma && X.sampleOverSigma)
        Z.sampleOverSigma = [Xc, Yc](const Point& n, Rng& rng) {
            const Point y = Yc.sampleOverSigma(n, rng);
            return concat(Xc.sampleOverSigma(Yc.rho(y), rng), y);
        };
    Z.tangent = [Xc, Yc, parts, nm](const Point& z) {
        auto [x, y] = parts(z);
        return composeUnchecked(Xc, Yc, x, y, nm).fiberTangent;
    };
    Z.gauge = [Xc, Yc, parts, nm](const Point& z) {
        auto [x, y] = parts(z);
        return composeUnchecked(Xc, Yc, x, y, nm).orbitDirs;
    };
    if (X.retract || Y.retract) {
        const Map rx = X.retract, ry = Y.retract;
        Z.retract = [parts, rx, ry](const Point& z) {
            auto [x, y] = parts(z);
            return concat(rx ? rx(x) : x, ry ? ry(y) : y);
        };
    }
    Z.dim = X.dim + Y.dim - X.Hr.objectDim - (X.Hr.arrowDim - X.Hr.objectDim);
    return Z;
}

double fusedFormMismatch(const FusionResult& F, const Map& pi, const KForm& target, int pairs, Rng& rng,
                         const Numerics& nm) {
    if (F.fiberTangent.cols() == 0) return 0;
    const Point p = pi(F.z);
    double r = 0;
    for (int k = 0; k < pairs; ++k) {
        const Vec u = randomTangent(F.fiberTangent, rng), v = randomTangent(F.fiberTangent, rng);
        const double lhs = F.form(F.z, {u, v});
        const double rhs = target(p, {differential(pi, F.z, u, nm), differential(pi, F.z, v, nm)});
        r = std::max(r, std::abs(lhs - rhs));
    }
    return r;
}

double bisectionInvariance(const BimoduleModel& X, const BimoduleModel& Y, const Point& x, const Point& y,
                           const Map& bisection, int pairs, Rng& rng, const Numerics& nm) {
    const FusionResult F = composeUnchecked(X, Y, x, y, nm);
    const Layout lx = X.layout;
    const Map phi = [&](const Point& z) {
        auto [a, b] = split(z, lx.ng, lx.nv, lx.nt);
        return concat(X.actRight(bisection(X.sigma(a)), a), Y.actLeft(bisection(Y.rho(b)), b));
    };
    const Point z2 = phi(F.z);
    double r = 0;
    for (int k = 0; k < pairs; ++k) {
        const Vec u = randomTangent(F.fiberTangent, rng), v = randomTangent(F.fiberTangent, rng);
        const double lhs = F.form(F.z, {u, v});
        const double rhs = F.form(z2, {differential(phi, F.z, u, nm), differential(phi, F.z, v, nm)});
        r = std::max(r, std::abs(lhs - rhs));
    }
    return r;
}

// ---------- reduction ----------

ReducedPointCertificate reduceAtPoint(const HamiltonianSpaceModel& H, const Point& x, const Numerics& nm) {
    ReducedPointCertificate c;
    c.base = x;
    const Point m = H.J(x);
    const int n = tangentDim(x);
    const RMat T = orthonormal(H.basis(x), nm);
    const RMat DJ = jacobian(H.J, x, T, nm);
    const Subspace kj = kernelOf(DJ, nm);
    const Subspace level = spanOf(T * kj.basis, n, nm);

    const UnitKernels U = unitKernels(H.G, H.C, m, nm);
    const int pd = static_cast<int>(U.anchorOnA.rows());
    const Subspace imgJ = spanOf(DJ, pd, nm, -1);
    const Subspace imgA = spanOf(U.anchorOnA, pd, nm, -1);
    if (!contains(imgJ, imgA, 1e-6))
        throw std::domain_error("reduction: J_* T_xX does not contain the tangent space of the orbit");

    const Subspace isoK = kernelOf(U.anchorOnA, nm);
    const RMat isoXi = U.A.basis.basis * isoK.basis;
    const RMat hats = infinitesimalActionMatrix(H, isoXi, x, nm);
    const Subspace gauge = spanOf(H.gaugeBasis(x), n, nm);
    const Subspace orbit = spanOf(hstack(normalizedColumns(hats, 1e-9), gauge.basis), n, nm);
    c.free = orbit.dim() - gauge.dim() == isoK.dim();
    c.levelDim = level.dim() - gauge.dim();
    c.orbitDim = orbit.dim() - gauge.dim();

    const Subspace Q = complementIn(level, orbit, nm);
    c.representatives = Q.basis;
    c.reducedDim = Q.dim();
    for (int i = 0; i < orbit.dim(); ++i)
        for (int j = 0; j < level.dim(); ++j)
            c.wellDefinedResidual =
                std::max(c.wellDefinedResidual, std::abs(H.omega(x, {orbit.basis.col(i), level.basis.col(j)})));
    c.gram = gramMatrix(H.omega, x, Q.basis);
    const double scale = std::max(gramMatrix(H.omega, x, T).norm(), nm.absFloor);
    const Subspace kg = kernelOf(c.gram, nm, scale);
    c.kernelDim = kg.dim();
    c.indeterminate = kj.indeterminate || isoK.indeterminate || orbit.indeterminate || kg.indeterminate ||
                      U.indeterminate;
    c.verdict = c.indeterminate ? Verdict::Indeterminate
                                : (c.kernelDim == 0 && c.wellDefinedResidual <= 1e-6 ? Verdict::Pass
                                                                                                 : Verdict::Fail);
    return c;
}

ReducedPointCertificate certificateFromFusion(const FusionResult& F, const Numerics&) {
    ReducedPointCertificate c;
    c.base = F.z;
    c.levelDim = F.fiberDim;
    c.orbitDim = F.orbitDim;
    c.reducedDim = F.quotientDim;
    c.kernelDim = F.kernelDim;
    c.gram = F.gram;
    c.representatives = F.quotient;
    c.wellDefinedResidual = F.descentResidual;
    c.indeterminate = F.indeterminate;
    c.verdict = c.indeterminate ? Verdict::Indeterminate
                                : (c.kernelDim == 0 && c.wellDefinedResidual <= 1e-6 ? Verdict::Pass : Verdict::Fail);
    return c;
}

ReducedPointCertificate intertwiner(const HamiltonianSpaceModel& X1, const HamiltonianSpaceModel& X2,
                                    const Point& x1, const Point& x2, const Numerics& nm) {
    const Point m = X1.J(x1);
    if (pointDistance(m, X2.J(x2)) > 1e-6) throw std::domain_error("intertwiner: moments differ");
    auto side = [&](const HamiltonianSpaceModel& H, const Point& x, double sign) {
        FusionSide s;
        s.x = x;
        s.T = H.basis(x);
        s.moment = H.J;
        s.omega = H.omega;
        s.sign = sign;
        s.gauge = H.gaugeBasis(x);
        const HamiltonianSpaceModel Hc = H;
        s.orbit = [Hc, x, nm](const Vec& xi) { return infinitesimalAction(Hc, xi, x, nm); };
        return s;
    };
    const AlgebroidFiber A = algebroidFiber(X1.G, m, nm);
    const FusionResult F = fuseAt(side(X1, x1, 1.0), side(X2, x2, -1.0), A.basis.basis, nm);
    if (!F.clean) throw std::domain_error(F.cleanFailure);
    return certificateFromFusion(F, nm);
}

CheckReport certificateReport(const ReducedPointCertificate& c, const std::string& check, const std::string& anchor,
                              const std::string& fixture) {
    CheckReport rep = aggregate(check, anchor, fixture, 1e-6,
                                {Sample{c.wellDefinedResidual, c.kernelDim == 0, c.indeterminate}}, 1.0);
    if (c.indeterminate) rep.verdict = Verdict::Indeterminate;
    rep.setDim("level_dim", c.levelDim);
    rep.setDim("orbit_dim", c.orbitDim);
    rep.setDim("reduced_dim", c.reducedDim);
    rep.setDim("kernel_dim", c.kernelDim);
    rep.setDim("isotropy_acts_freely", c.free ? 1 : 0);
    return rep;
}

}  // namespace qsg

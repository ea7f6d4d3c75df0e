#include "qsg/groupoid.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace qsg {

namespace {

double seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void requireClose(const Point& a, const Point& b, const char* what) {
    if (pointDistance(a, b) > 1e-6) throw std::domain_error(what);
}

// Residual of v against the span of the orthonormal columns Q, relative to |v|.
double outsideSpan(const RMat& Q, const Vec& v) {
    const double n = v.norm();
    if (n == 0) return 0;
    if (Q.cols() == 0) return 1.0;
    return (v - Q * (Q.transpose() * v)).norm() / n;
}

RMat orthonormal(const RMat& M) {
    if (M.cols() == 0) return M;
    return imageOf(M, {}, 1.0).basis;
}

}  // namespace

RMat GroupoidModel::arrowBasis(const Point& a) const {
    if (arrowTangent) return arrowTangent(a);
    return RMat::Identity(tangentDim(a), tangentDim(a));
}

RMat GroupoidModel::objectBasis(const Point& m) const {
    if (objectTangent) return objectTangent(m);
    return RMat::Identity(tangentDim(m), tangentDim(m));
}

Point GroupoidModel::arrowWithSource(const Point& m, Rng& rng) const { return inverse(arrowWithTarget(m, rng)); }

Point GroupoidModel::stratifiedObject(int i, Rng& rng) const {
    if (!specialObjects.empty() && specialFraction > 0) {
        const int period = std::max(1, static_cast<int>(std::lround(1.0 / specialFraction)));
        if (i % period == 0) return specialObjects[(i / period) % specialObjects.size()](rng);
    }
    return sampleObject(rng);
}

Vec randomTangent(const RMat& basis, Rng& rng) {
    Vec v = basis * rng.normalVec(static_cast<int>(basis.cols()));
    const double n = v.norm();
    return n > 0 ? Vec(v / n) : v;
}

AlgebroidFiber algebroidFiber(const GroupoidModel& G, const Point& m, const Numerics& nm) {
    AlgebroidFiber A;
    A.base = m;
    A.unitArrow = G.unit(m);
    const RMat T = G.arrowBasis(A.unitArrow);
    const RMat Jt = jacobian(G.target, A.unitArrow, T, nm);
    const Subspace k = kernelOf(Jt, nm);
    A.basis = k;
    A.basis.basis = orthonormal(T * k.basis);
    A.basis.ambientDim = static_cast<int>(T.rows());
    A.targetResidual = (jacobian(G.target, A.unitArrow, A.basis.basis, nm)).norm();
    return A;
}

Vec rightInvariantField(const GroupoidModel& G, const Point& m, const Vec& xi, const Point& x, const Numerics& nm) {
    requireClose(G.source(x), m, "rightInvariantField: s(x) differs from the base point");
    const Point e = G.unit(m);
    return curveVelocity([&](double t) { return G.multiply(chart(e, t * xi), x); }, nm);
}

Vec leftInvariantField(const GroupoidModel& G, const Point& m, const Vec& xi, const Point& x, const Numerics& nm) {
    requireClose(G.target(x), m, "leftInvariantField: t(x) differs from the base point");
    const Point y = G.inverse(x);
    const Vec r = rightInvariantField(G, m, xi, y, nm);
    return -differential(G.inverse, y, r, nm);
}

Vec leftInvariantFieldDirect(const GroupoidModel& G, const Point& m, const Vec& xi, const Point& x,
                             const Numerics& nm) {
    requireClose(G.target(x), m, "leftInvariantField: t(x) differs from the base point");
    const Point e = G.unit(m);
    return -curveVelocity([&](double t) { return G.multiply(x, G.inverse(chart(e, t * xi))); }, nm);
}

Vec anchor(const GroupoidModel& G, const Point& m, const Vec& xi, const Numerics& nm) {
    const Point e = G.unit(m);
    const Vec v = xi - leftInvariantField(G, m, xi, e, nm);
    return differential(G.target, e, v, nm);
}

RMat anchorMatrix(const GroupoidModel& G, const Point& m, const RMat& xis, const Numerics& nm) {
    RMat out(tangentDim(m), xis.cols());
    for (int j = 0; j < xis.cols(); ++j) out.col(j) = anchor(G, m, xis.col(j), nm);
    return out;
}

RMat composableTangentBasis(const GroupoidModel& G, const Point& a, const Point& b, const Numerics& nm) {
    const RMat Ta = G.arrowBasis(a), Tb = G.arrowBasis(b);
    const RMat Jt = jacobian(G.target, a, Ta, nm);
    const RMat Js = jacobian(G.source, b, Tb, nm);
    RMat M(Jt.rows(), Ta.cols() + Tb.cols());
    M << Jt, -Js;
    const Subspace k = kernelOf(M, nm);
    const RMat Ka = k.basis.topRows(Ta.cols()), Kb = k.basis.bottomRows(Tb.cols());
    const RMat blocks = joinBasis(a, b, Ta * Ka, Tb * Kb);
    // columns of the two blocks describe the same vectors: add them
    const int d = static_cast<int>(k.basis.cols());
    return orthonormal(blocks.leftCols(d) + blocks.rightCols(d));
}

double coboundary0(const GroupoidModel& G, const KForm& alpha, const Point& x, const std::vector<Vec>& vs,
                   const Numerics& nm) {
    std::vector<Vec> sv, tv;
    for (const auto& v : vs) {
        sv.push_back(differential(G.source, x, v, nm));
        tv.push_back(differential(G.target, x, v, nm));
    }
    return alpha(G.source(x), sv) - alpha(G.target(x), tv);
}

KForm coboundary0Form(const GroupoidModel& G, const KForm& alpha, const Numerics& nm) {
    return KForm{alpha.degree, [G, alpha, nm](const Point& x, const std::vector<Vec>& vs) {
                     return coboundary0(G, alpha, x, vs, nm);
                 }};
}

double coboundary1(const GroupoidModel& G, const KForm& alpha, const Point& a, const Point& b,
                   const std::vector<Vec>& vs, const Numerics& nm) {
    std::vector<Vec> va, vb, vm;
    for (const auto& v : vs) {
        auto [ta, tb] = splitTangent(a, b, v);
        va.push_back(ta);
        vb.push_back(tb);
        vm.push_back(curveVelocity(
            [&](double e) { return G.multiply(chart(a, e * ta), chart(b, e * tb)); }, nm));
    }
    return alpha(a, va) - alpha(G.multiply(a, b), vm) + alpha(b, vb);
}

namespace {

template <class F>
std::vector<Sample> runSamples(int n, F f) {
    return parallelMap<Sample>(n, std::function<Sample(int)>(f));
}

template <class F>
std::vector<std::vector<Sample>> runMulti(int n, int parts, F f) {
    auto rows = parallelMap<std::vector<Sample>>(n, std::function<std::vector<Sample>(int)>(f));
    std::vector<std::vector<Sample>> cols(parts);
    for (auto& r : rows)
        for (int j = 0; j < parts; ++j) cols[j].push_back(r[j]);
    return cols;
}

}  // namespace

CheckReport checkGroupoidAxioms(const GroupoidModel& G, const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    auto s = runSamples(opt.samples, [&](int i) {
        Rng rng = Rng::stream(opt.seed, G.name + "/axioms", i);
        const Point m = G.stratifiedObject(i, rng);
        const Point e = G.unit(m);
        double r = std::max(pointDistance(G.source(e), m), pointDistance(G.target(e), m));
        const Point b = G.arrowWithTarget(m, rng);
        const Point a = G.arrowWithTarget(G.source(b), rng);
        const Point c = G.arrowWithSource(G.target(b), rng);
        const Point ab = G.multiply(a, b);
        r = std::max(r, pointDistance(G.source(ab), G.source(a)));
        r = std::max(r, pointDistance(G.target(ab), G.target(b)));
        r = std::max(r, pointDistance(G.multiply(ab, c), G.multiply(a, G.multiply(b, c))));
        r = std::max(r, pointDistance(G.multiply(a, G.inverse(a)), G.unit(G.source(a))));
        r = std::max(r, pointDistance(G.multiply(G.inverse(a), a), G.unit(G.target(a))));
        r = std::max(r, pointDistance(G.multiply(G.unit(G.source(a)), a), a));
        r = std::max(r, pointDistance(G.multiply(a, G.unit(G.target(a))), a));
        return Sample{r, true, false};
    });
    CheckReport rep = aggregate("groupoid_axioms", "Let Γ ⇉ Γ₀ be a Lie groupoid", G.name, 1e-10, s,
                                opt.nm.indeterminateCap);
    rep.setDim("dim_arrows", G.arrowDim);
    rep.setDim("dim_objects", G.objectDim);
    rep.wallSeconds = seconds(t0);
    return rep;
}

CheckReport checkCocycle(const GroupoidModel& G, const CocycleData& C, const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const Numerics& nm = opt.nm;
    auto cols = runMulti(opt.samples, 3, [&](int i) {
        Rng rng = Rng::stream(opt.seed, G.name + "/cocycle", i);
        const Point m = G.stratifiedObject(i, rng);
        const RMat P = G.objectBasis(m);
        std::vector<Vec> ov;
        for (int k = 0; k < 4; ++k) ov.push_back(randomTangent(P, rng));
        const double r1 = std::abs(exteriorDerivative(C.Omega, m, ov, nm));

        const Point x = G.arrowWithTarget(m, rng);
        const RMat T = G.arrowBasis(x);
        std::vector<Vec> av;
        for (int k = 0; k < 3; ++k) av.push_back(randomTangent(T, rng));
        const double r2 = std::abs(exteriorDerivative(C.omega, x, av, nm) - coboundary0(G, C.Omega, x, av, nm));

        const Point a = G.arrowWithTarget(G.source(x), rng);
        const RMat T2 = composableTangentBasis(G, a, x, nm);
        std::vector<Vec> pv{randomTangent(T2, rng), randomTangent(T2, rng)};
        const double r3 = std::abs(coboundary1(G, C.omega, a, x, pv, nm));
        return std::vector<Sample>{{r1, true, false}, {r2, true, false}, {r3, true, false}};
    });
    std::vector<CheckReport> parts{
        aggregate("dOmega", "dΩ =0", G.name, opt.tolerance, cols[0], nm.indeterminateCap),
        aggregate("domega_minus_delOmega", "dω=∂Ω", G.name, opt.tolerance, cols[1], nm.indeterminateCap),
        aggregate("delomega", "∂ω = 0", G.name, opt.tolerance, cols[2], nm.indeterminateCap)};
    CheckReport rep = combine("cocycle", "dΩ =0, dω=∂Ω", G.name, parts);
    rep.samples = opt.samples;
    rep.wallSeconds = seconds(t0);
    return rep;
}

CheckReport checkUnitInverseIdentities(const GroupoidModel& G, const CocycleData& C, const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const Numerics& nm = opt.nm;
    auto cols = runMulti(opt.samples, 5, [&](int i) {
        Rng rng = Rng::stream(opt.seed, G.name + "/unit-inverse", i);
        const Point m = G.stratifiedObject(i, rng);
        const Point e = G.unit(m);
        const RMat P = G.objectBasis(m);
        const Vec U = differential(G.unit, m, randomTangent(P, rng), nm);
        const Vec V = differential(G.unit, m, randomTangent(P, rng), nm);
        const double r1 = std::abs(C.omega(e, {U, V}));

        const Point x = G.arrowWithTarget(m, rng);
        const RMat T = G.arrowBasis(x);
        const Vec u = randomTangent(T, rng), v = randomTangent(T, rng);
        const double r2 = std::abs(C.omega(G.inverse(x), {differential(G.inverse, x, u, nm),
                                                          differential(G.inverse, x, v, nm)}) +
                                   C.omega(x, {u, v}));

        const Point sx = G.source(x), tx = G.target(x);
        const AlgebroidFiber As = algebroidFiber(G, sx, nm), At = algebroidFiber(G, tx, nm);
        const Vec xi = randomTangent(As.basis.basis, rng);
        const Vec eta = randomTangent(At.basis.basis, rng);
        const double r3 = std::abs(C.omega(x, {rightInvariantField(G, sx, xi, x, nm),
                                               leftInvariantField(G, tx, eta, x, nm)}));

        const Vec xi2 = randomTangent(As.basis.basis, rng);
        const Point y = G.arrowWithSource(tx, rng);
        const Point z = G.multiply(x, y);
        const double fx = C.omega(x, {rightInvariantField(G, sx, xi, x, nm), rightInvariantField(G, sx, xi2, x, nm)});
        const double fz = C.omega(z, {rightInvariantField(G, sx, xi, z, nm), rightInvariantField(G, sx, xi2, z, nm)});
        const double r4 = std::abs(fx - fz);

        const Point ix = G.inverse(x);
        const Vec lhs = differential(G.inverse, ix, rightInvariantField(G, tx, eta, ix, nm), nm);
        const double r5 = (lhs + leftInvariantFieldDirect(G, tx, eta, x, nm)).norm();
        return std::vector<Sample>{{r1, true, false}, {r2, true, false}, {r3, true, false},
                                   {r4, true, false}, {r5, true, false}};
    });
    std::vector<CheckReport> parts{
        aggregate("unit_pullback", "ε*ω= 0", G.name, opt.tolerance, cols[0], nm.indeterminateCap),
        aggregate("inverse_pullback", "i*ω= −ω", G.name, opt.tolerance, cols[1], nm.indeterminateCap),
        aggregate("mixed_pairing", "ω(ξ→, η←)= 0", G.name, opt.tolerance, cols[2], nm.indeterminateCap),
        aggregate("right_invariance", "right invariant function on Γ", G.name, opt.tolerance, cols[3],
                  nm.indeterminateCap),
        aggregate("inverse_of_right_field", "i_*ξ→=−ξ←", G.name, opt.tolerance, cols[4], nm.indeterminateCap)};
    CheckReport rep = combine("unit_inverse_identities", "ε*ω= 0 / i*ω= −ω / ω(ξ→, η→)=−ω(ξ←, η←)", G.name, parts);
    rep.samples = opt.samples;
    rep.wallSeconds = seconds(t0);
    return rep;
}

UnitKernels unitKernels(const GroupoidModel& G, const CocycleData& C, const Point& m, const Numerics& nm) {
    UnitKernels K;
    K.m = m;
    K.unitArrow = G.unit(m);
    const Point& e = K.unitArrow;
    K.arrowBasis = G.arrowBasis(e);
    K.objectBasis = G.objectBasis(m);
    K.unitTangents = jacobian(G.unit, m, K.objectBasis, nm);
    K.A = algebroidFiber(G, m, nm);
    K.gram = gramMatrix(C.omega, e, K.arrowBasis);
    const double scale = K.gram.norm();
    const RMat& T = K.arrowBasis;
    const RMat& Ab = K.A.basis.basis;
    RMat MA(T.cols(), Ab.cols()), MP(T.cols(), K.unitTangents.cols());
    for (int j = 0; j < T.cols(); ++j) {
        for (int i = 0; i < Ab.cols(); ++i) MA(j, i) = C.omega(e, {T.col(j), Ab.col(i)});
        for (int i = 0; i < K.unitTangents.cols(); ++i) MP(j, i) = C.omega(e, {T.col(j), K.unitTangents.col(i)});
    }
    K.kerA = kernelOf(MA, nm, scale);
    K.kerP = kernelOf(MP, nm, scale);
    K.kerFull = kernelOf(K.gram, nm, scale);
    K.anchorOnA = anchorMatrix(G, m, Ab, nm);
    K.indeterminate = K.kerA.indeterminate || K.kerP.indeterminate || K.kerFull.indeterminate ||
                      K.A.basis.indeterminate;
    return K;
}

NondegeneracyResult nondegeneracyAt(const GroupoidModel& G, const CocycleData& C, const Point& m,
                                    const Numerics& nm) {
    const UnitKernels K = unitKernels(G, C, m, nm);
    NondegeneracyResult r;
    r.dimKerA = K.kerA.dim();
    r.dimKerP = K.kerP.dim();
    const RMat AK = K.anchorOnA * K.kerA.basis;
    const Subspace img = imageOf(AK, nm, K.anchorOnA.norm());
    r.anchorKernel = r.dimKerA - img.dim();
    const RMat kerPamb = orthonormal(K.objectBasis * K.kerP.basis);
    for (int j = 0; j < AK.cols(); ++j)
        if (outsideSpan(kerPamb, AK.col(j)) > 1e-6 && AK.col(j).norm() > 1e-9) r.anchorIntoKerP = false;
    r.dimsBalanced = G.arrowDim == 2 * G.objectDim;
    r.indeterminate = K.indeterminate || img.indeterminate;
    r.pass = r.anchorKernel == 0 && r.dimsBalanced;
    return r;
}

namespace {

struct DimRange {
    long lo = 1L << 30, hi = -1;
    void add(long v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

void recordRange(CheckReport& rep, const std::string& k, const DimRange& d) {
    if (d.hi < 0) return;
    rep.setDim(k + ".min", d.lo);
    rep.setDim(k + ".max", d.hi);
}

}  // namespace

CheckReport checkNondegeneracy(const GroupoidModel& G, const CocycleData& C, const Point& m, const Numerics& nm) {
    const NondegeneracyResult r = nondegeneracyAt(G, C, m, nm);
    CheckReport rep = aggregate("nondegeneracy", "ker ω_m ∩ A_m → ker ω_m ∩ T_mP", G.name, 0.0,
                                {Sample{0.0, r.pass, r.indeterminate}}, 1.0);
    if (r.indeterminate) rep.verdict = Verdict::Indeterminate;
    rep.setDim("ker_A", r.dimKerA);
    rep.setDim("ker_TP", r.dimKerP);
    rep.setDim("anchor_kernel", r.anchorKernel);
    rep.setDim("dim_arrows", G.arrowDim);
    rep.setDim("dim_objects", G.objectDim);
    rep.setDim("anchor_into_ker_TP", r.anchorIntoKerP ? 1 : 0);
    return rep;
}

CheckReport checkNondegeneracy(const GroupoidModel& G, const CocycleData& C, const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<NondegeneracyResult> rs = parallelMap<NondegeneracyResult>(
        opt.samples, std::function<NondegeneracyResult(int)>([&](int i) {
            Rng rng = Rng::stream(opt.seed, G.name + "/nondegeneracy", i);
            return nondegeneracyAt(G, C, G.stratifiedObject(i, rng), opt.nm);
        }));
    std::vector<Sample> s;
    DimRange ka, kp, ak;
    for (const auto& r : rs) {
        s.push_back(Sample{0.0, r.pass, r.indeterminate});
        if (r.indeterminate) continue;
        ka.add(r.dimKerA);
        kp.add(r.dimKerP);
        ak.add(r.anchorKernel);
    }
    CheckReport rep = aggregate("nondegeneracy", "ker ω_m ∩ A_m → ker ω_m ∩ T_mP", G.name, 0.0, s,
                                opt.nm.indeterminateCap);
    recordRange(rep, "ker_A", ka);
    recordRange(rep, "ker_TP", kp);
    recordRange(rep, "anchor_kernel", ak);
    rep.setDim("dim_arrows", G.arrowDim);
    rep.setDim("dim_objects", G.objectDim);
    rep.wallSeconds = seconds(t0);
    return rep;
}

namespace {

struct PhiResult {
    int rows = 0, cols = 0, rank = 0;
    double cond = 0;
    bool identity = false;
    bool indeterminate = false;
    bool pass = false;
};

PhiResult phiAt(const GroupoidModel& G, const CocycleData& C, const Point& m, const Numerics& nm) {
    const UnitKernels K = unitKernels(G, C, m, nm);
    PhiResult r;
    const Subspace QP = complementIn(fullSpace(static_cast<int>(K.objectBasis.cols())), K.kerP, nm);
    const Subspace QA = complementIn(fullSpace(K.A.basis.dim()), K.kerA, nm);
    const RMat Vp = K.unitTangents * QP.basis;
    const RMat Xa = K.A.basis.basis * QA.basis;
    RMat phi(Vp.cols(), Xa.cols());
    for (int i = 0; i < Vp.cols(); ++i)
        for (int j = 0; j < Xa.cols(); ++j) phi(i, j) = C.omega(K.unitArrow, {Vp.col(i), Xa.col(j)});
    r.rows = static_cast<int>(phi.rows());
    r.cols = static_cast<int>(phi.cols());
    if (phi.size() > 0) {
        Eigen::JacobiSVD<RMat> svd(phi);
        const Vec sv = svd.singularValues();
        const RankInfo ri = decideRank(sv, K.gram.norm(), nm);
        r.rank = ri.rank;
        r.indeterminate = ri.indeterminate;
        r.cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    }
    r.identity = (K.kerA.dim() - K.kerP.dim()) == (G.arrowDim - 2 * G.objectDim);
    r.indeterminate = r.indeterminate || K.indeterminate;
    r.pass = r.rows == r.cols && r.rank == r.rows && r.identity;
    return r;
}

}  // namespace

CheckReport checkPhiIso(const GroupoidModel& G, const CocycleData& C, const Point& m, const Numerics& nm) {
    const PhiResult r = phiAt(G, C, m, nm);
    CheckReport rep = aggregate("phi_iso", "⟨φ[v], [ξ]⟩ = ⟨ω^b(v), ξ⟩", G.name, 0.0,
                                {Sample{0.0, r.pass, r.indeterminate}}, 1.0);
    if (r.indeterminate) rep.verdict = Verdict::Indeterminate;
    rep.setDim("phi_rows", r.rows);
    rep.setDim("phi_cols", r.cols);
    rep.setDim("phi_rank", r.rank);
    rep.setDim("dimension_identity", r.identity ? 1 : 0);
    rep.setMetric("condition_number", r.cond);
    return rep;
}

CheckReport checkPhiIso(const GroupoidModel& G, const CocycleData& C, const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    auto rs = parallelMap<PhiResult>(opt.samples, std::function<PhiResult(int)>([&](int i) {
                                         Rng rng = Rng::stream(opt.seed, G.name + "/phi", i);
                                         return phiAt(G, C, G.stratifiedObject(i, rng), opt.nm);
                                     }));
    std::vector<Sample> s;
    DimRange rows;
    double worstCond = 0;
    int identityFailures = 0;
    for (const auto& r : rs) {
        s.push_back(Sample{0.0, r.pass, r.indeterminate});
        if (r.indeterminate) continue;
        rows.add(r.rows);
        worstCond = std::max(worstCond, r.cond);
        if (!r.identity) ++identityFailures;
    }
    CheckReport rep = aggregate("phi_iso", "⟨φ[v], [ξ]⟩ = ⟨ω^b(v), ξ⟩", G.name, 0.0, s, opt.nm.indeterminateCap);
    recordRange(rep, "phi_size", rows);
    rep.setDim("dimension_identity_failures", identityFailures);
    rep.setMetric("max_condition_number", worstCond);
    rep.wallSeconds = seconds(t0);
    return rep;
}

namespace {

struct SplittingResult {
    int full = 0, kA = 0, kP = 0;
    double residual = 0;
    bool ok = false, indeterminate = false;
};

SplittingResult splittingAt(const GroupoidModel& G, const CocycleData& C, const Point& m, const Numerics& nm) {
    const UnitKernels K = unitKernels(G, C, m, nm);
    SplittingResult r;
    r.full = K.kerFull.dim();
    r.kA = K.kerA.dim();
    r.kP = K.kerP.dim();
    const RMat kerAamb = K.A.basis.basis * K.kerA.basis;
    const RMat kerPamb = K.unitTangents * K.kerP.basis;
    RMat both(kerAamb.rows(), kerAamb.cols() + kerPamb.cols());
    both << kerAamb, kerPamb;
    const Subspace sum = imageOf(both, nm, 1.0);
    const RMat fullAmb = orthonormal(K.arrowBasis * K.kerFull.basis);
    for (int j = 0; j < both.cols(); ++j) r.residual = std::max(r.residual, outsideSpan(fullAmb, both.col(j)));
    const bool directSum = sum.dim() == r.kA + r.kP;
    // anchor of kernel vectors lies in ker omega on unit tangents
    const RMat AK = K.anchorOnA * K.kerA.basis;
    const RMat kerPobj = orthonormal(K.objectBasis * K.kerP.basis);
    for (int j = 0; j < AK.cols(); ++j)
        if (AK.col(j).norm() > 1e-9) r.residual = std::max(r.residual, outsideSpan(kerPobj, AK.col(j)));
    // xi-> in the kernel iff xi<- in the kernel
    const RMat& Ab = K.A.basis.basis;
    RMat L(Ab.rows(), Ab.cols());
    for (int j = 0; j < Ab.cols(); ++j) L.col(j) = leftInvariantField(G, m, Ab.col(j), K.unitArrow, nm);
    RMat ML(K.arrowBasis.cols(), L.cols());
    for (int j = 0; j < K.arrowBasis.cols(); ++j)
        for (int i = 0; i < L.cols(); ++i) ML(j, i) = C.omega(K.unitArrow, {K.arrowBasis.col(j), L.col(i)});
    const Subspace kerL = kernelOf(ML, nm, K.gram.norm());
    r.residual = std::max(r.residual, subspaceDistance(kerL, K.kerA));
    r.indeterminate = K.indeterminate || sum.indeterminate || kerL.indeterminate;
    r.ok = r.full == r.kA + r.kP && directSum && kerL.dim() == r.kA;
    return r;
}

}  // namespace

CheckReport checkKernelSplitting(const GroupoidModel& G, const CocycleData& C, const Point& m, const Numerics& nm) {
    const SplittingResult r = splittingAt(G, C, m, nm);
    CheckReport rep = aggregate("kernel_splitting", "ker ω_m =(ker ω_m ∩ A_m) ⊕ (ker ω_m ∩ T_mP)", G.name, 1e-6,
                                {Sample{r.residual, r.ok, r.indeterminate}}, 1.0);
    if (r.indeterminate) rep.verdict = Verdict::Indeterminate;
    rep.setDim("ker_full", r.full);
    rep.setDim("ker_A", r.kA);
    rep.setDim("ker_TP", r.kP);
    return rep;
}

CheckReport checkKernelSplitting(const GroupoidModel& G, const CocycleData& C, const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    auto rs = parallelMap<SplittingResult>(opt.samples, std::function<SplittingResult(int)>([&](int i) {
                                           Rng rng = Rng::stream(opt.seed, G.name + "/kernel-splitting", i);
                                           return splittingAt(G, C, G.stratifiedObject(i, rng), opt.nm);
                                       }));
    std::vector<Sample> s;
    DimRange full;
    for (const auto& r : rs) {
        s.push_back(Sample{r.residual, r.ok, r.indeterminate});
        if (!r.indeterminate) full.add(r.full);
    }
    CheckReport rep = aggregate("kernel_splitting", "ker ω_m =(ker ω_m ∩ A_m) ⊕ (ker ω_m ∩ T_mP)", G.name, opt.tolerance, s,
                                opt.nm.indeterminateCap);
    recordRange(rep, "ker_full", full);
    rep.wallSeconds = seconds(t0);
    return rep;
}

GroupoidModel productGroupoid(const GroupoidModel& G, const GroupoidModel& H) {
    GroupoidModel P;
    P.name = G.name + "×" + H.name;
    P.arrowDim = G.arrowDim + H.arrowDim;
    P.objectDim = G.objectDim + H.objectDim;
    P.arrowLayout = {G.arrowLayout.ng + H.arrowLayout.ng, G.arrowLayout.nv + H.arrowLayout.nv,
                     G.arrowLayout.nt + H.arrowLayout.nt};
    P.objectLayout = {G.objectLayout.ng + H.objectLayout.ng, G.objectLayout.nv + H.objectLayout.nv,
                      G.objectLayout.nt + H.objectLayout.nt};
    const Layout al = G.arrowLayout, ol = G.objectLayout;
    auto lift = [al](const Map& f, const Map& g) {
        return Map([al, f, g](const Point& a) {
            auto [x, y] = split(a, al.ng, al.nv, al.nt);
            return concat(f(x), g(y));
        });
    };
    P.source = lift(G.source, H.source);
    P.target = lift(G.target, H.target);
    P.inverse = [al, G, H](const Point& a) {
        auto [x, y] = split(a, al.ng, al.nv, al.nt);
        return concat(G.inverse(x), H.inverse(y));
    };
    P.unit = [ol, G, H](const Point& m) {
        auto [x, y] = split(m, ol.ng, ol.nv, ol.nt);
        return concat(G.unit(x), H.unit(y));
    };
    P.multiply = [al, G, H](const Point& a, const Point& b) {
        auto [a1, a2] = split(a, al.ng, al.nv, al.nt);
        auto [b1, b2] = split(b, al.ng, al.nv, al.nt);
        return concat(G.multiply(a1, b1), H.multiply(a2, b2));
    };
    P.sampleObject = [G, H](Rng& rng) {
        Point x = G.sampleObject(rng);
        return concat(x, H.sampleObject(rng));
    };
    P.arrowWithTarget = [ol, G, H](const Point& m, Rng& rng) {
        auto [x, y] = split(m, ol.ng, ol.nv, ol.nt);
        Point a = G.arrowWithTarget(x, rng);
        return concat(a, H.arrowWithTarget(y, rng));
    };
    if (G.arrowTangent || H.arrowTangent)
        P.arrowTangent = [al, G, H](const Point& a) {
            auto [x, y] = split(a, al.ng, al.nv, al.nt);
            return joinBasis(x, y, G.arrowBasis(x), H.arrowBasis(y));
        };
    if (G.objectTangent || H.objectTangent)
        P.objectTangent = [ol, G, H](const Point& m) {
            auto [x, y] = split(m, ol.ng, ol.nv, ol.nt);
            return joinBasis(x, y, G.objectBasis(x), H.objectBasis(y));
        };
    return P;
}

namespace {

KForm splitSum(const KForm& f, const KForm& g, Layout l) {
    return KForm{f.degree, [f, g, l](const Point& p, const std::vector<Vec>& vs) {
                     auto [x, y] = split(p, l.ng, l.nv, l.nt);
                     std::vector<Vec> vx, vy;
                     for (const auto& v : vs) {
                         auto [a, b] = splitTangent(x, y, v);
                         vx.push_back(a);
                         vy.push_back(b);
                     }
                     return f(x, vx) + g(y, vy);
                 }};
}

}  // namespace

CocycleData productCocycle(const GroupoidModel& G, const CocycleData& CG, const GroupoidModel&, const CocycleData& CH) {
    return {splitSum(CG.omega, CH.omega, G.arrowLayout), splitSum(CG.Omega, CH.Omega, G.objectLayout)};
}

CocycleData oppositeCocycle(const CocycleData& C) {
    return {sumForms({{-1.0, C.omega}}), sumForms({{-1.0, C.Omega}})};
}

}  // namespace qsg

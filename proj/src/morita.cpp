#include "qsg/morita.hpp"

#include "internal.hpp"

namespace qsg {

using namespace detail;

namespace {

struct PrincipalWitness {
    double distance = 0;  // orbit vs fiber subspace mismatch
    bool rhoSubmersion = true, sigmaSubmersion = true;
    bool leftFree = true, rightFree = true;
    bool leftOrbitsFill = true, rightOrbitsFill = true;
    bool isotropyMatch = true, codimMatch = true;
    bool indeterminate = false;
    bool ok() const {
        return rhoSubmersion && sigmaSubmersion && leftFree && rightFree && leftOrbitsFill && rightOrbitsFill &&
               isotropyMatch && codimMatch;
    }
};

int anchorKernelDim(const GroupoidModel& G, const Point& m, const Numerics& nm, bool& ind) {
    const AlgebroidFiber A = algebroidFiber(G, m, nm);
    if (A.basis.dim() == 0) return 0;
    const RMat a = anchorMatrix(G, m, A.basis.basis, nm);
    const Subspace k = kernelOf(a, nm, std::max(1.0, a.norm()));
    ind = ind || k.indeterminate;
    return k.dim();
}

PrincipalWitness witnessAt(const BimoduleModel& X, const Point& x, const Numerics& nm) {
    PrincipalWitness w;
    const int n = tangentDim(x);
    const RMat T = orthonormal(fullBasis(X.tangent, x), nm);
    const Subspace gauge = spanOf(fullBasis(X.gauge ? X.gauge : [n](const Point&) { return RMat(n, 0); }, x), n, nm);
    const Point m = X.rho(x), k = X.sigma(x);
    const RMat Dr = jacobian(X.rho, x, T, nm), Ds = jacobian(X.sigma, x, T, nm);
    w.rhoSubmersion = imageOf(Dr, nm, 1.0).dim() == static_cast<int>(X.Gl.objectBasis(m).cols());
    w.sigmaSubmersion = imageOf(Ds, nm, 1.0).dim() == static_cast<int>(X.Hr.objectBasis(k).cols());

    const HamiltonianSpaceModel L = X.leftSpace(), R = X.rightSpace();
    const AlgebroidFiber AL = algebroidFiber(X.Gl, m, nm), AR = algebroidFiber(X.Hr, k, nm);
    const RMat hl = normalizedColumns(infinitesimalActionMatrix(L, AL.basis.basis, x, nm), 1e-9);
    const RMat hr = normalizedColumns(infinitesimalActionMatrix(R, AR.basis.basis, x, nm), 1e-9);
    const Subspace left = spanOf(hstack(hl, gauge.basis), n, nm);
    const Subspace right = spanOf(hstack(hr, gauge.basis), n, nm);
    w.leftFree = left.dim() - gauge.dim() == AL.basis.dim();
    w.rightFree = right.dim() - gauge.dim() == AR.basis.dim();

    const Subspace kerS = spanOf(T * kernelOf(Ds, nm).basis, n, nm);
    const Subspace kerR = spanOf(T * kernelOf(Dr, nm).basis, n, nm);
    const double dl = subspaceDistance(left, kerS), dr = subspaceDistance(right, kerR);
    w.leftOrbitsFill = dl <= 1e-6;
    w.rightOrbitsFill = dr <= 1e-6;
    w.distance = std::max(dl, dr);

    bool ind = false;
    const int il = anchorKernelDim(X.Gl, m, nm, ind), ir = anchorKernelDim(X.Hr, k, nm, ind);
    w.isotropyMatch = il == ir;
    const int cl = static_cast<int>(X.Gl.objectBasis(m).cols()) - (AL.basis.dim() - il);
    const int cr = static_cast<int>(X.Hr.objectBasis(k).cols()) - (AR.basis.dim() - ir);
    w.codimMatch = cl == cr;
    w.indeterminate = ind || left.indeterminate || right.indeterminate || kerS.indeterminate || kerR.indeterminate;
    return w;
}

}  // namespace

CheckReport checkMoritaBimodule(const EquivalenceBimodule& E, const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const BimoduleModel& X = E.X;
    auto ws = parallelMap<PrincipalWitness>(opt.samples, std::function<PrincipalWitness(int)>([&](int i) {
        Rng rng = Rng::stream(opt.seed, X.name + "/principal", i);
        Point x = X.sample(rng);
        if (!X.specialPoints.empty() && i % 10 == 0) x = X.specialPoints[(i / 10) % X.specialPoints.size()](rng);
        return witnessAt(X, x, opt.nm);
    }));
    std::vector<Sample> s;
    int fails[8] = {0};
    for (const auto& w : ws) {
        s.push_back(Sample{w.distance, w.ok(), w.indeterminate});
        const bool flags[8] = {w.rhoSubmersion, w.sigmaSubmersion, w.leftFree,       w.rightFree,
                               w.leftOrbitsFill, w.rightOrbitsFill, w.isotropyMatch, w.codimMatch};
        for (int j = 0; j < 8; ++j) fails[j] += !flags[j];
    }
    CheckReport principal = aggregate("principality", "locally trivial G-principal bundle", X.name, 1e-6, s,
                                      opt.nm.indeterminateCap);
    const char* names[8] = {"rho_submersion_failures",  "sigma_submersion_failures", "left_free_failures",
                            "right_free_failures",      "left_orbit_fiber_failures", "right_orbit_fiber_failures",
                            "isotropy_mismatch",        "orbit_codim_mismatch"};
    for (int j = 0; j < 8; ++j) principal.setDim(names[j], fails[j]);

    const long gap = X.Gl.arrowDim + X.Hr.arrowDim - 2L * X.dim;
    CheckReport dims = aggregate("dimension_identity", "dim G + dim H = 2 dim X", X.name, 0.0,
                                 {Sample{0.0, gap == 0, false}}, 1.0);
    dims.setDim("dimG_plus_dimH_minus_2dimX", gap);

    const HamiltonianSpaceModel H = X.asSpace();
    std::vector<CheckReport> parts{principal, dims, checkCompatible(H, opt), checkMinimalNondegeneracy(H, opt)};
    CheckReport rep = combine("morita_bimodule", E.anchor, X.name, parts);
    rep.samples = opt.samples;
    rep.notes.push_back("properness assumed: compact fixtures");
    rep.wallSeconds = seconds(t0);
    return rep;
}

EquivalenceBimodule makeIdentityEquivalence(const CatalogEntry& e) {
    return {makeGroupoidBimodule(e), "Morita equivalence is indeed an equivalence relation"};
}

EquivalenceBimodule makeGaugeEquivalence(const CatalogEntry& e, const CatalogEntry& gauged, const KForm& B,
                                         const Numerics& nm) {
    BimoduleModel X = makeGroupoidBimodule(e);
    X.name = gauged.name + "|" + e.name;
    X.Gl = gauged.G;
    X.Cl = gauged.C;
    X.omega = sumForms({{1.0, e.C.omega}, {1.0, pullback(B, e.G.source, nm)}});
    return {X, "let X = Γ and ω_X = ω + s*B"};
}

CatalogEntry pullbackWithField(const CatalogEntry& e, const PullbackSpec& Y, const KForm& B, std::optional<KForm> dB,
                               const Numerics& nm) {
    const CatalogEntry P = pullbackGroupoid(e, Y, nm);
    std::optional<KForm> negdB;
    if (dB) negdB = sumForms({{-1.0, *dB}});
    CatalogEntry out = gaugeTransform(P, sumForms({{-1.0, B}}), negdB, "B");
    out.name = P.name;
    out.G.name = P.name;
    return out;
}

namespace {

std::function<Point(const Point&, Rng&)> preimageSampler(const PullbackSpec& Y, const Numerics& nm) {
    if (Y.preimage) return Y.preimage;
    const Map phi = Y.phi;
    const auto sample = Y.sample;
    return [phi, sample, nm](const Point& m, Rng& rng) {
        for (int attempt = 0; attempt < 8; ++attempt) {
            const NewtonResult r =
                newtonProject([&](const Point& y) { return pointResidual(phi(y), m); }, sample(rng), nm);
            if (r.converged) return r.point;
        }
        throw std::runtime_error("pullback: Newton projection did not converge");
    };
}

// Tangent basis of {(a, b) : f(a) = g(b)}.
RMat fiberProductBasis(const Point& a, const Point& b, const RMat& Ta, const RMat& Tb, const Map& f, const Map& g,
                       const Numerics& nm) {
    const RMat Da = jacobian(f, a, Ta, nm), Db = jacobian(g, b, Tb, nm);
    const Subspace k = kernelOf(hstack(Da, -Db), nm);
    const int kd = k.dim();
    if (kd == 0) return RMat(tangentDim(a) + tangentDim(b), 0);
    const RMat blocks = joinBasis(a, b, Ta * k.basis.topRows(Ta.cols()), Tb * k.basis.bottomRows(Tb.cols()));
    return orthonormal(blocks.leftCols(kd) + blocks.rightCols(kd), nm);
}

}  // namespace

EquivalenceBimodule makePullbackEquivalence(const CatalogEntry& e, const CatalogEntry& pulled, const PullbackSpec& Y,
                                            const KForm& B, const Numerics& nm) {
    BimoduleModel X;
    const GroupoidModel G = e.G;
    const Layout gl = G.arrowLayout, yl = Y.layout;
    const Map phi = Y.phi;
    X.name = e.name + "|" + pulled.name;
    X.Gl = G;
    X.Cl = e.C;
    X.Hr = pulled.G;
    X.Cr = pulled.C;
    X.dim = G.arrowDim + Y.dim - G.objectDim;
    X.layout = addLayouts(gl, yl);
    auto parts = [gl](const Point& z) { return split(z, gl.ng, gl.nv, gl.nt); };
    X.rho = [G, parts](const Point& z) { return G.source(parts(z).first); };
    X.sigma = [parts](const Point& z) { return parts(z).second; };
    X.actLeft = [G, parts](const Point& g, const Point& z) {
        auto [r, y] = parts(z);
        return concat(G.multiply(g, r), y);
    };
    X.actRight = [G, parts, gl, yl](const Point& h, const Point& z) {
        auto [r, y] = parts(z);
        const PullbackArrow a = splitPullbackArrow(h, yl, gl);
        return concat(G.multiply(r, G.inverse(a.r)), a.y1);
    };
    X.omega = jointForm(e.C.omega, B, gl);
    const auto pre = preimageSampler(Y, nm);
    const auto ys = Y.sample;
    X.sample = [G, phi, ys](Rng& rng) {
        const Point y = ys(rng);
        return concat(G.arrowWithTarget(phi(y), rng), y);
    };
    X.sampleOverRho = [G, pre](const Point& m, Rng& rng) {
        const Point r = G.arrowWithSource(m, rng);
        return concat(r, pre(G.target(r), rng));
    };
    X.sampleOverSigma = [G, phi](const Point& y, Rng& rng) { return concat(G.arrowWithTarget(phi(y), rng), y); };
    const auto ytan = Y.tangent;
    X.tangent = [G, parts, phi, ytan, nm](const Point& z) {
        auto [r, y] = parts(z);
        return fiberProductBasis(r, y, G.arrowBasis(r), fullBasis(ytan, y), G.target, phi, nm);
    };
    return {X, "ω_X = p*ω"};
}

EquivalenceBimodule reverseEquivalence(const EquivalenceBimodule& E) {
    return {reverseBimodule(E.X), E.anchor};
}

EquivalenceBimodule composeEquivalences(const EquivalenceBimodule& A, const EquivalenceBimodule& B,
                                        const Numerics& nm) {
    return {fusedBimodule(A.X, B.X, nm), "Morita equivalence is indeed an equivalence relation"};
}

// ---------- strict homomorphisms ----------

CatalogEntry pointEntry() {
    CatalogEntry e;
    e.name = "point";
    e.anchor = "·⇉·";
    e.G = pointGroupoid();
    e.C = CocycleData{zeroForm(2), zeroForm(3)};
    e.kind = "point";
    return e;
}

namespace {

struct StrictSample {
    double hom = 0, form = 0;
    int kernel = 0;
    bool indeterminate = false;
};

}  // namespace

CheckReport checkStrictHomomorphism(const StrictHomomorphism& phi, const CatalogEntry& Ge, const CatalogEntry& He,
                                    const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const GroupoidModel &G = Ge.G, &H = He.G;
    const Numerics& nm = opt.nm;
    auto rs = parallelMap<StrictSample>(opt.samples, std::function<StrictSample(int)>([&](int i) {
        Rng rng = Rng::stream(opt.seed, phi.name + "/strict", i);
        StrictSample r;
        const Point m = G.stratifiedObject(i, rng);
        const Point a = G.arrowWithTarget(m, rng);
        const Point b = G.arrowWithSource(G.target(a), rng);
        const Point fa = phi.arrows(a);
        r.hom = std::max({pointDistance(H.source(fa), phi.objects(G.source(a))),
                          pointDistance(H.target(fa), phi.objects(G.target(a))),
                          pointDistance(phi.arrows(G.multiply(a, b)), H.multiply(fa, phi.arrows(b))),
                          pointDistance(phi.arrows(G.unit(m)), H.unit(phi.objects(m)))});
        const RMat Ta = G.arrowBasis(a);
        if (Ta.cols() > 0) {
            const Vec u = randomTangent(Ta, rng), v = randomTangent(Ta, rng);
            r.form = std::abs(He.C.omega(fa, pushAll(phi.arrows, a, {u, v}, nm)) - Ge.C.omega(a, {u, v}));
        }
        const RMat Tm = G.objectBasis(m);
        if (Tm.cols() > 0) {
            std::vector<Vec> w3;
            for (int k = 0; k < 3; ++k) w3.push_back(randomTangent(Tm, rng));
            r.form = std::max(r.form, std::abs(He.C.Omega(phi.objects(m), pushAll(phi.objects, m, w3, nm)) -
                                               Ge.C.Omega(m, w3)));
        }
        // xi in ker a_H with phi*(xi ⌟ w_H) = 0 must vanish
        const Point n = phi.objects(m);
        const UnitKernels U = unitKernels(H, He.C, n, nm);
        const Subspace ka = kernelOf(U.anchorOnA, nm, std::max(1.0, U.anchorOnA.norm()));
        r.indeterminate = ka.indeterminate;
        if (ka.dim() > 0) {
            const RMat xis = U.A.basis.basis * ka.basis;
            const Point e = G.unit(m);
            const RMat V = jacobian(phi.arrows, e, G.arrowBasis(e), nm);
            if (V.cols() == 0) {
                r.kernel = ka.dim();
            } else {
                RMat M(V.cols(), xis.cols());
                for (int p = 0; p < V.cols(); ++p)
                    for (int q = 0; q < xis.cols(); ++q) M(p, q) = He.C.omega(U.A.unitArrow, {xis.col(q), V.col(p)});
                const Subspace k = kernelOf(M, nm, 1.0);
                r.kernel = k.dim();
                r.indeterminate = r.indeterminate || k.indeterminate;
            }
        }
        return r;
    }));
    std::vector<Sample> hs, fs, ks;
    int kmax = 0;
    for (const auto& r : rs) {
        hs.push_back({r.hom, true, false});
        fs.push_back({r.form, true, false});
        ks.push_back({0.0, r.kernel == 0, r.indeterminate});
        kmax = std::max(kmax, r.kernel);
    }
    std::vector<CheckReport> parts{
        aggregate("homomorphism", "Lie groupoid homomorphism φ: G→H", phi.name, 1e-9, hs, nm.indeterminateCap),
        aggregate("form_pullback", "φ*(ω_H +Ω_H)=ω_G +Ω_G", phi.name, opt.tolerance, fs, nm.indeterminateCap),
        aggregate("isotropy_injective", "then ξ=0", phi.name, 0.0, ks, nm.indeterminateCap)};
    parts[2].setDim("max_kernel", kmax);
    CheckReport rep = combine("strict_homomorphism", "A strict homomorphism of quasi-symplectic groupoids", phi.name,
                              parts);
    rep.samples = opt.samples;
    rep.wallSeconds = seconds(t0);
    return rep;
}

BimoduleModel strictToGeneralized(const StrictHomomorphism& phi, const CatalogEntry& Ge, const CatalogEntry& He,
                                  const Numerics& nm) {
    BimoduleModel X;
    const GroupoidModel G = Ge.G, H = He.G;
    const Layout ol = G.objectLayout;
    const Map fa = phi.arrows, fo = phi.objects;
    X.name = phi.name + "/bimodule";
    X.Gl = G;
    X.Cl = Ge.C;
    X.Hr = H;
    X.Cr = He.C;
    X.dim = G.objectDim + H.arrowDim - H.objectDim;
    X.layout = addLayouts(ol, H.arrowLayout);
    auto parts = [ol](const Point& z) { return split(z, ol.ng, ol.nv, ol.nt); };
    X.rho = [parts](const Point& z) { return parts(z).first; };
    X.sigma = [H, parts](const Point& z) { return H.target(parts(z).second); };
    X.actLeft = [G, H, fa, parts](const Point& g, const Point& z) {
        return concat(G.source(g), H.multiply(fa(g), parts(z).second));
    };
    X.actRight = [H, parts](const Point& k, const Point& z) {
        auto [g0, h] = parts(z);
        return concat(g0, H.multiply(h, H.inverse(k)));
    };
    X.omega = jointForm(zeroForm(2), He.C.omega, ol, 0.0, 1.0);
    X.sample = [G, H, fo](Rng& rng) {
        const Point g0 = G.sampleObject(rng);
        return concat(g0, H.arrowWithSource(fo(g0), rng));
    };
    X.sampleOverRho = [H, fo](const Point& g0, Rng& rng) { return concat(g0, H.arrowWithSource(fo(g0), rng)); };
    X.tangent = [G, H, fo, parts, nm](const Point& z) {
        auto [g0, h] = parts(z);
        return fiberProductBasis(g0, h, G.objectBasis(g0), H.arrowBasis(h), fo, H.source, nm);
    };
    return X;
}

StrictHomomorphism identityHomomorphism(const CatalogEntry& e) {
    return {e.name + "/id", [](const Point& a) { return a; }, [](const Point& m) { return m; }};
}

StrictHomomorphism conjugationHomomorphism(const CatalogEntry& e, const Mat& k) {
    const Mat ki = inv(k);
    auto conj = [k, ki](const Point& p) {
        Point q = p;
        for (auto& g : q.g) g = k * g * ki;
        return q;
    };
    return {e.name + "/conj", conj, conj};
}

StrictHomomorphism pointInclusion(const CatalogEntry& H, const Point& m0) {
    const GroupoidModel G = H.G;
    return {H.name + "/point-inclusion", [G, m0](const Point&) { return G.unit(m0); },
            [m0](const Point&) { return m0; }};
}

// ---------- transfer ----------

HamiltonianSpaceModel transferHamiltonianSpace(const EquivalenceBimodule& E, const HamiltonianSpaceModel& F,
                                               const Numerics& nm) {
    const BimoduleModel Z = fusedBimodule(reverseBimodule(E.X), asLeftBimodule(F), nm);
    HamiltonianSpaceModel H = Z.leftSpace();
    H.name = F.name + "→" + E.X.Hr.name;
    H.dim = E.X.dim + F.dim - E.X.Gl.objectDim - (E.X.Gl.arrowDim - E.X.Gl.objectDim);
    return H;
}

HamiltonianSpaceModel gaugeShiftSpace(const HamiltonianSpaceModel& F, const CatalogEntry& gauged, const KForm& B,
                                      const Numerics& nm) {
    HamiltonianSpaceModel out = F;
    out.name = F.name + "+J*B";
    out.G = gauged.G;
    out.C = gauged.C;
    out.omega = sumForms({{1.0, F.omega}, {1.0, pullback(B, F.J, nm)}});
    return out;
}

CheckReport transferAgreement(const HamiltonianSpaceModel& Z, const Map& pi, const KForm& target,
                              const std::string& check, const CheckOptions& opt) {
    auto s = parallelMap<Sample>(opt.samples, std::function<Sample(int)>([&](int i) {
        Rng rng = Rng::stream(opt.seed, Z.name + "/" + check, i);
        const Point z = Z.sample(rng);
        const RMat T = Z.basis(z);
        if (T.cols() == 0) return Sample{0.0, true, false};
        const Point p = pi(z);
        double r = 0;
        for (int k = 0; k < 3; ++k) {
            const Vec u = randomTangent(T, rng), v = randomTangent(T, rng);
            r = std::max(r, std::abs(Z.omega(z, {u, v}) -
                                     target(p, {differential(pi, z, u, opt.nm), differential(pi, z, v, opt.nm)})));
        }
        return Sample{r, true, false};
    }));
    return aggregate(check, "unique (up to isomorphism)", Z.name, opt.tolerance, s, opt.nm.indeterminateCap);
}

CheckReport formAgreement(const HamiltonianSpaceModel& A, const HamiltonianSpaceModel& B, const std::string& check,
                          const CheckOptions& opt) {
    auto s = parallelMap<Sample>(opt.samples, std::function<Sample(int)>([&](int i) {
        Rng rng = Rng::stream(opt.seed, A.name + "/" + check, i);
        const Point x = A.stratified(i, rng);
        const RMat T = A.basis(x);
        double r = 0;
        for (int k = 0; k < 3 && T.cols() > 0; ++k) {
            const Vec u = randomTangent(T, rng), v = randomTangent(T, rng);
            r = std::max(r, std::abs(A.omega(x, {u, v}) - B.omega(x, {u, v})));
        }
        return Sample{r, true, false};
    }));
    return aggregate(check, "ω' = ω + s*B − t*B", A.name, opt.tolerance, s, opt.nm.indeterminateCap);
}

// ---------- pull-back correspondence ----------

PullbackCorrespondence correspondAlong(const CatalogEntry& e, const CatalogEntry& L, const Map& f,
                                       const PullbackSpec& Y, const KForm& B, const HamiltonianSpaceModel& M,
                                       const Numerics& nm) {
    PullbackCorrespondence P;
    P.base = e;
    P.groupoid = L;
    P.f = f;
    P.Y = Y;
    P.B = B;
    HamiltonianSpaceModel& N = P.N;
    const Layout yl = Y.layout;
    const Map phi = Y.phi;
    auto parts = [yl](const Point& z) { return split(z, yl.ng, yl.nv, yl.nt); };
    N.name = M.name + "[" + Y.name + "]";
    N.G = L.G;
    N.C = L.C;
    N.dim = Y.dim + M.dim - e.G.objectDim;
    N.layout = addLayouts(yl, M.layout);
    N.J = [parts](const Point& z) { return parts(z).first; };
    const GroupoidModel LG = L.G;
    const Map2 mact = M.act;
    N.act = [LG, f, mact, parts](const Point& a, const Point& z) {
        return concat(LG.source(a), mact(f(a), parts(z).second));
    };
    N.omega = jointForm(B, M.omega, yl, -1.0, 1.0);
    const auto pre = preimageSampler(Y, nm);
    const Map MJ = M.J;
    const auto ms = M.sample;
    N.sample = [ms, MJ, pre](Rng& rng) {
        const Point x = ms(rng);
        return concat(pre(MJ(x), rng), x);
    };
    for (const auto& sp : M.specialPoints)
        N.specialPoints.push_back([sp, MJ, pre](Rng& rng) {
            const Point x = sp(rng);
            return concat(pre(MJ(x), rng), x);
        });
    N.specialFraction = M.specialFraction;
    const auto ytan = Y.tangent;
    const auto mtan = M.tangent;
    N.tangent = [parts, ytan, mtan, phi, MJ, nm](const Point& z) {
        auto [y, x] = parts(z);
        return fiberProductBasis(y, x, fullBasis(ytan, y), fullBasis(mtan, x), phi, MJ, nm);
    };
    if (M.retract) {
        const Map mr = M.retract;
        N.retract = [parts, mr](const Point& z) {
            auto [y, x] = parts(z);
            return concat(y, mr(x));
        };
    }
    if (M.gauge) {
        const auto mg = M.gauge;
        N.gauge = [parts, mg](const Point& z) {
            auto [y, x] = parts(z);
            const RMat g = mg(x);
            return joinBasis(y, x, RMat(tangentDim(y), g.cols()), g);
        };
    }
    return P;
}

PullbackCorrespondence correspondViaPullback(const CatalogEntry& e, const PullbackSpec& Y, const KForm& B,
                                             const HamiltonianSpaceModel& M, std::optional<KForm> dB,
                                             const Numerics& nm) {
    const CatalogEntry L = pullbackWithField(e, Y, B, dB, nm);
    const Layout yl = Y.layout, gl = e.G.arrowLayout;
    const Map f = [yl, gl](const Point& a) { return splitPullbackArrow(a, yl, gl).r; };
    return correspondAlong(e, L, f, Y, B, M, nm);
}

CheckReport checkPullbackInverse(const PullbackCorrespondence& P, const HamiltonianSpaceModel& M,
                                 const CheckOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const Numerics& nm = opt.nm;
    const HamiltonianSpaceModel& N = P.N;
    const Layout yl = P.Y.layout;
    const KForm restored = sumForms({{1.0, N.omega}, {1.0, pullback(P.B, N.J, nm)}});
    auto cols = runMulti(opt.samples, 2, [&](int i) {
        Rng rng = Rng::stream(opt.seed, N.name + "/inverse", i);
        const Point z = N.stratified(i, rng);
        auto [y, x] = split(z, yl.ng, yl.nv, yl.nt);
        const RMat T = N.basis(z);
        // based directions: algebroid elements of L whose image under f is a unit direction
        const AlgebroidFiber A = algebroidFiber(P.groupoid.G, y, nm);
        const Point m = P.Y.phi(y);
        const RMat F = jacobian(P.f, A.unitArrow, A.basis.basis, nm);
        const Subspace units = spanOf(jacobian(P.base.G.unit, m, P.base.G.objectBasis(m), nm),
                                      static_cast<int>(F.rows()), nm);
        const RMat resid = F - units.basis * (units.basis.transpose() * F);
        const Subspace based = kernelOf(resid, nm, std::max(1.0, F.norm()));
        const RMat O = infinitesimalActionMatrix(N, A.basis.basis * based.basis, z, nm);
        double r1 = 0;
        for (int a = 0; a < O.cols(); ++a)
            for (int b = 0; b < T.cols(); ++b) r1 = std::max(r1, std::abs(restored(z, {O.col(a), T.col(b)})));
        double r2 = 0;
        for (int k = 0; k < 3 && T.cols() > 0; ++k) {
            const Vec u = randomTangent(T, rng), v = randomTangent(T, rng);
            const Vec ux = splitTangent(y, x, u).second, vx = splitTangent(y, x, v).second;
            r2 = std::max(r2, std::abs(restored(z, {u, v}) - M.omega(x, {ux, vx})));
        }
        return std::vector<Sample>{{r1, true, based.indeterminate}, {r2, true, false}};
    });
    std::vector<CheckReport> parts{
        aggregate("based_descent", "M is the quotient space N/Γ[Y]'", N.name, opt.tolerance, cols[0],
                  nm.indeterminateCap),
        aggregate("form_recovery", "π*ω_M = ω_N+ J̃*B", N.name, opt.tolerance, cols[1], nm.indeterminateCap)};
    CheckReport rep = combine("pullback_inverse", "π*ω_M = ω_N+ J̃*B", N.name, parts);
    rep.samples = opt.samples;
    rep.wallSeconds = seconds(t0);
    return rep;
}

CheckReport checkFieldPrimitive(const CatalogEntry& e, const PullbackSpec& Y, const KForm& B,
                                const CheckOptions& opt) {
    auto s = parallelMap<Sample>(opt.samples, std::function<Sample(int)>([&](int i) {
        Rng rng = Rng::stream(opt.seed, Y.name + "/primitive", i);
        const Point y = Y.sample(rng);
        const RMat T = fullBasis(Y.tangent, y);
        std::vector<Vec> w3;
        for (int k = 0; k < 3; ++k) w3.push_back(randomTangent(T, rng));
        const double dB = exteriorDerivative(B, y, w3, opt.nm);
        return Sample{std::abs(dB - e.C.Omega(Y.phi(y), pushAll(Y.phi, y, w3, opt.nm))), true, false};
    }));
    return aggregate("field_primitive", "φ*Ω=dB", Y.name, opt.tolerance, s, opt.nm.indeterminateCap);
}

CheckReport checkRelatedReductions(const PullbackCorrespondence& P, const HamiltonianSpaceModel& M,
                                   const std::vector<Point>& points, const CheckOptions& opt, const Map& lift) {
    std::vector<Sample> s;
    Rng rng = Rng::stream(opt.seed, P.N.name + "/related", 0);
    const auto pre = preimageSampler(P.Y, opt.nm);
    int dimMismatch = 0, verdictMismatch = 0, reducedDim = 0;
    for (const auto& x : points) {
        const Point z = concat(lift ? lift(M.J(x)) : pre(M.J(x), rng), x);
        const ReducedPointCertificate a = reduceAtPoint(M, x, opt.nm);
        const ReducedPointCertificate b = reduceAtPoint(P.N, z, opt.nm);
        const bool dimsOk = a.reducedDim == b.reducedDim && a.kernelDim == b.kernelDim;
        const bool verdictOk = a.verdict == b.verdict;
        dimMismatch += !dimsOk;
        verdictMismatch += !verdictOk;
        reducedDim = std::max(reducedDim, b.reducedDim);
        s.push_back(Sample{std::max(a.wellDefinedResidual, b.wellDefinedResidual), dimsOk && verdictOk,
                           a.indeterminate || b.indeterminate});
    }
    CheckReport rep = aggregate("related_reductions", "φ^{-1}(m)/G_m^m and ψ^{-1}(n)/H_n^n", P.N.name, 1e-6, s,
                                opt.nm.indeterminateCap);
    rep.setDim("dimension_mismatches", dimMismatch);
    rep.setDim("verdict_mismatches", verdictMismatch);
    rep.setDim("max_reduced_dim", reducedDim);
    return rep;
}

}  // namespace qsg

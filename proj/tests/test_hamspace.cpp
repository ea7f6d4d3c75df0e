#include "oracles.hpp"
#include "qsg/hamspace.hpp"

#include <gtest/gtest.h>

using namespace qsg;

namespace {

CheckOptions few(int n = 10) {
    CheckOptions o;
    o.samples = n;
    return o;
}

Point orbitBase(const CatalogEntry& e, int k) {
    Rng rng = Rng::stream(0, "test-orbit", k);
    return e.G.sampleObject(rng);
}

}  // namespace

TEST(OrbitSpaces, ConjugacyClassIsQuasiHamiltonian) {
    const CatalogEntry e = makeAMM("SU(2)");
    const HamiltonianSpaceModel O = makeOrbitSpace(e, orbitBase(e, 0));
    EXPECT_EQ(O.dim, 2);
    EXPECT_TRUE(checkActionAxioms(O, few()).passed());
    EXPECT_TRUE(checkCompatible(O, few()).passed());
    EXPECT_TRUE(checkMinimalNondegeneracy(O, few()).passed());
    EXPECT_TRUE(checkOrthogonalityIdentity(O, few()).passed());
    EXPECT_TRUE(checkQuasiHamiltonianAxioms(O, few()).passed());
    EXPECT_TRUE(checkOrbitDescent(e, orbitBase(e, 0), few()).passed());
}

TEST(OrbitSpaces, CoadjointOrbitFormIsKKS) {
    const CatalogEntry e = makeCotangent("SU(2)");
    const HamiltonianSpaceModel O = makeOrbitSpace(e, orbitBase(e, 1));
    Rng rng(37);
    for (int k = 0; k < 10; ++k) {
        const Point y = O.sample(rng);
        const Vec xi = rng.normalVec(3), eta = rng.normalVec(3);
        const Mat M = algebraFromCoords(y.v, 2);
        const Vec u = coordsOf(bracket(algebraFromCoords(xi, 2), M));
        const Vec v = coordsOf(bracket(algebraFromCoords(eta, 2), M));
        EXPECT_NEAR(O.omega(y, {u, v}), oracle::kks(y.v, xi, eta), 1e-6);
    }
}

TEST(Negatives, ScaledFormFailsCompatibility) {
    const CatalogEntry e = makeAMM("SU(2)");
    const HamiltonianSpaceModel O = makeOrbitSpace(e, orbitBase(e, 2));
    EXPECT_FALSE(checkCompatible(scaleForm(O, 2.0), few()).passed());
    EXPECT_FALSE(checkQuasiHamiltonianAxioms(scaleForm(O, 1.1), few()).passed());
}

TEST(Negatives, IgnoredFactorFailsOrthogonality) {
    const CatalogEntry e = makeCotangent("SU(2)");
    EXPECT_FALSE(checkOrthogonalityIdentity(makeIgnoredFactorSpace(e), few()).passed());
}

TEST(Bimodules, GroupoidIsABimoduleOverItself) {
    for (const char* g : {"SU(2)"}) {
        const CatalogEntry e = makeCotangent(g);
        const BimoduleModel X = makeGroupoidBimodule(e);
        EXPECT_EQ(X.dim, e.G.arrowDim);
        EXPECT_TRUE(checkBimoduleActions(X, few()).passed());
        EXPECT_TRUE(checkCompatible(X.asSpace(), few()).passed());
    }
}

TEST(Fusion, DoubleOfAMMHasQuotientDimensionSix) {
    const CatalogEntry e = makeAMM("SU(2)");
    const BimoduleModel X = makeGroupoidBimodule(e);
    Rng rng(41);
    for (int k = 0; k < 5; ++k) {
        const Point x = X.sample(rng);
        const Point y = X.sampleOverRho(X.sigma(x), rng);
        const FusionResult F = composeBimodules(X, X, x, y);
        EXPECT_TRUE(F.clean) << F.cleanFailure;
        EXPECT_EQ(F.quotientDim, 6);
        EXPECT_EQ(F.kernelDim, 0);
        EXPECT_LT(F.descentResidual, 1e-6);
    }
}

TEST(Reduction, CotangentReducesToCoadjointOrbit) {
    const CatalogEntry e = makeCotangent("SU(2)");
    const HamiltonianSpaceModel R = makeGroupoidBimodule(e).rightSpace();
    Rng rng(43);
    for (int k = 0; k < 5; ++k) {
        const Point m = e.G.sampleObject(rng);
        const Point x = e.G.arrowWithTarget(m, rng);
        const ReducedPointCertificate c = reduceAtPoint(R, x);
        EXPECT_EQ(c.verdict, Verdict::Pass);
        EXPECT_EQ(c.reducedDim, 2);
        EXPECT_EQ(c.kernelDim, 0);
    }
}

TEST(Reduction, IntertwinerOfOrbitWithItself) {
    const CatalogEntry e = makeCotangent("SU(2)");
    const HamiltonianSpaceModel O = makeOrbitSpace(e, orbitBase(e, 3));
    Rng rng(47);
    const Point x = O.sample(rng);
    const ReducedPointCertificate c = intertwiner(O, O, x, x);
    EXPECT_EQ(c.reducedDim, 0);
}

#include "qsg/morita.hpp"

#include <gtest/gtest.h>

using namespace qsg;

namespace {

CheckOptions few(int n = 8) {
    CheckOptions o;
    o.samples = n;
    return o;
}

}  // namespace

TEST(Morita, IdentityEquivalence) {
    for (const char* g : {"SU(2)"}) {
        EXPECT_TRUE(checkMoritaBimodule(makeIdentityEquivalence(makeAMM(g)), few()).passed());
        EXPECT_TRUE(checkMoritaBimodule(makeIdentityEquivalence(makeCotangent(g)), few()).passed());
    }
}

TEST(Morita, ReverseOfIdentityIsAnEquivalence) {
    const EquivalenceBimodule E = reverseEquivalence(makeIdentityEquivalence(makeCotangent("SU(2)")));
    EXPECT_TRUE(checkMoritaBimodule(E, few()).passed());
}

TEST(Morita, GaugeRoundTripReturnsTheForm) {
    Numerics rich;
    rich.richardson = true;
    const CatalogEntry amm = makeAMM("SU(2)");
    const KForm B = sampleGaugeForm(2);
    const CatalogEntry gauged = gaugeTransform(amm, B, std::nullopt, "gauged", rich);
    const KForm minusB = sumForms({{-1.0, B}});
    const CatalogEntry back = gaugeTransform(gauged, minusB, std::nullopt, "back", rich);
    Rng rng(53);
    for (int k = 0; k < 10; ++k) {
        const Point m = amm.G.sampleObject(rng);
        const Point x = amm.G.arrowWithTarget(m, rng);
        const RMat T = amm.G.arrowBasis(x);
        for (int a = 0; a < T.cols(); ++a)
            for (int b = a + 1; b < T.cols(); ++b)
                EXPECT_NEAR(back.C.omega(x, {T.col(a), T.col(b)}), amm.C.omega(x, {T.col(a), T.col(b)}), 1e-8);
    }
}

TEST(Morita, StrictHomomorphisms) {
    const CatalogEntry e = makeAMM("SU(2)");
    EXPECT_TRUE(checkStrictHomomorphism(identityHomomorphism(e), e, e, few()).passed());
    Rng rng(59);
    EXPECT_TRUE(checkStrictHomomorphism(conjugationHomomorphism(e, rng.haarSU(2)), e, e, few()).passed());
    // the point into a quasi-symplectic groupoid gives a degenerate bimodule
    Point e0;
    e0.g = {Mat::Identity(2, 2)};
    e0.v = Vec(0);
    const BimoduleModel X = strictToGeneralized(pointInclusion(e, e0), pointEntry(), e);
    EXPECT_FALSE(checkMinimalNondegeneracy(X.asSpace(), few()).passed());
}

TEST(Morita, DoubleCoverFieldIsAPrimitive) {
    const CatalogEntry e = makeCotangent("SU(2)");
    const PullbackSpec Y = doubleCoverSpec();
    // B = c . (u x v) is constant, so dB = 0 = phi*Omega
    Vec c(3);
    c << 0.3, -0.2, 0.5;
    const KForm B{2, [c](const Point&, const std::vector<Vec>& vs) { const Eigen::Vector3d a = vs[0].head<3>(), b = vs[1].head<3>();
        return c.dot(a.cross(b)); }};
    EXPECT_TRUE(checkFieldPrimitive(e, Y, B, few()).passed());
    const CatalogEntry pulled = pullbackWithField(e, Y, B, zeroForm(3));
    EXPECT_TRUE(checkCocycle(pulled.G, pulled.C, few()).passed());
}

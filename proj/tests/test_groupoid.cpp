#include "oracles.hpp"
#include "qsg/catalog.hpp"

#include <gtest/gtest.h>

using namespace qsg;

namespace {

CheckOptions few(int n = 20) {
    CheckOptions o;
    o.samples = n;
    return o;
}

Point groupAt(const Mat& x) {
    Point p;
    p.g = {x};
    p.v = Vec(0);
    return p;
}

}  // namespace

TEST(Groupoid, AxiomsHoldOnEveryPositiveEntry) {
    for (const auto& name : catalogNames()) {
        const CatalogEntry e = catalogByName(name);
        const CheckReport r = checkGroupoidAxioms(e.G, few());
        EXPECT_TRUE(r.passed()) << name << " residual " << r.maxResidual;
    }
}

TEST(Groupoid, CompositionRuleIsTargetOfFirstEqualsSourceOfSecond) {
    const CatalogEntry e = makeAMM("SU(2)");
    Rng rng(2);
    const Point m = e.G.sampleObject(rng);
    const Point b = e.G.arrowWithTarget(m, rng);
    const Point a = e.G.arrowWithTarget(e.G.source(b), rng);
    EXPECT_LT(pointDistance(e.G.target(a), e.G.source(b)), 1e-12);
    const Point ab = e.G.multiply(a, b);
    EXPECT_LT(pointDistance(e.G.target(ab), e.G.target(b)), 1e-12);
    EXPECT_LT(pointDistance(e.G.source(ab), e.G.source(a)), 1e-12);
}

TEST(Cocycle, AMMAndCotangentAreMultiplicative) {
    for (const char* name : {"amm-su2", "cotangent-su2", "amm-su3"}) {
        const CatalogEntry e = catalogByName(name);
        const CheckReport r = checkCocycle(e.G, e.C, few(10));
        EXPECT_TRUE(r.passed()) << name << " residual " << r.maxResidual;
        EXPECT_LE(r.maxResidual, 1e-6);
    }
}

TEST(Cocycle, PerturbedFormIsNotMultiplicative) {
    const CatalogEntry e = catalogByName("perturbed-negative");
    EXPECT_FALSE(checkCocycle(e.G, e.C, few(10)).passed());
}

TEST(Cocycle, UnitInverseIdentities) {
    for (const char* name : {"amm-su2", "cotangent-su2"}) {
        const CatalogEntry e = catalogByName(name);
        EXPECT_TRUE(checkUnitInverseIdentities(e.G, e.C, few()).passed()) << name;
    }
}

// Property: the kernel of omega on A_x matches the eigenvalue count of Ad_x at -1.
TEST(Kernels, AlgebroidKernelMatchesAdPlusOne) {
    const CatalogEntry e = makeAMM("SU(2)");
    Rng rng(19);
    for (int k = 0; k < 25; ++k) {
        const Mat x = k % 5 == 0 ? oracle::traceZeroSU2(rng) : rng.haarSU(2);
        const UnitKernels K = unitKernels(e.G, e.C, groupAt(x));
        ASSERT_FALSE(K.indeterminate);
        EXPECT_EQ(K.kerA.dim(), oracle::adPlusOneKernelDim(x)) << "tr x = " << x.trace();
    }
}

TEST(Kernels, CentralPointsOfSU2) {
    const CatalogEntry e = makeAMM("SU(2)");
    EXPECT_EQ(unitKernels(e.G, e.C, groupAt(Mat::Identity(2, 2))).kerA.dim(), 0);
    EXPECT_EQ(unitKernels(e.G, e.C, groupAt(-Mat::Identity(2, 2))).kerA.dim(), 0);
}

TEST(Nondegeneracy, DichotomyAtZero) {
    Point zero;
    zero.v = Vec::Zero(3);
    const CatalogEntry cot = makeCotangent("SU(2)");
    EXPECT_TRUE(nondegeneracyAt(cot.G, cot.C, zero).pass);
    const CatalogEntry neg = makeZeroFormNegative("SU(2)");
    const NondegeneracyResult r = nondegeneracyAt(neg.G, neg.C, zero);
    EXPECT_FALSE(r.pass);
    EXPECT_EQ(r.anchorKernel, 3);
}

TEST(Nondegeneracy, KernelSplittingAndPhiIso) {
    for (const char* name : {"amm-su2", "cotangent-su2"}) {
        const CatalogEntry e = catalogByName(name);
        EXPECT_TRUE(checkKernelSplitting(e.G, e.C, few()).passed()) << name;
        EXPECT_TRUE(checkPhiIso(e.G, e.C, few()).passed()) << name;
    }
}

TEST(Products, DimensionsAddAndOppositeStaysMultiplicative) {
    const CatalogEntry a = makeAMM("SU(2)"), c = makeCotangent("SU(2)");
    const GroupoidModel P = productGroupoid(a.G, c.G);
    EXPECT_EQ(P.arrowDim, a.G.arrowDim + c.G.arrowDim);
    EXPECT_EQ(P.objectDim, a.G.objectDim + c.G.objectDim);
    EXPECT_TRUE(checkGroupoidAxioms(P, few(5)).passed());
    EXPECT_TRUE(checkCocycle(P, productCocycle(a.G, a.C, c.G, c.C), few(5)).passed());
    EXPECT_TRUE(checkCocycle(a.G, oppositeCocycle(a.C), few(5)).passed());
}

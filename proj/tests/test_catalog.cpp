#include "oracles.hpp"
#include "qsg/catalog.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace qsg;

TEST(Catalog, NamesResolveAndUnknownNamesThrow) {
    for (const auto& name : catalogNames()) EXPECT_EQ(catalogByName(name).name, name);
    EXPECT_THROW(catalogByName("amm-su7"), std::invalid_argument);
    const auto names = catalogNames();
    for (const char* n : {"amm-su2", "cotangent-su2", "amm-su2-gauged", "zero-form-negative"})
        EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
}

TEST(Catalog, GroupTags) {
    EXPECT_EQ(parseGroupTag("SU(2)"), 2);
    EXPECT_EQ(parseGroupTag("SU(3)"), 3);
    EXPECT_THROW(parseGroupTag("SO(3)"), std::invalid_argument);
}

TEST(Catalog, EveryPositiveEntryHasBalancedDimensions) {
    for (const auto& name : catalogNames()) {
        const CatalogEntry e = catalogByName(name);
        if (e.kind == "negative") continue;
        EXPECT_EQ(e.G.arrowDim, 2 * e.G.objectDim) << name;
    }
}

TEST(Catalog, KKSMatchesBracketPairing) {
    Rng rng(23);
    for (int k = 0; k < 20; ++k) {
        const Vec mu = rng.normalVec(3), xi = rng.normalVec(3), eta = rng.normalVec(3);
        const Mat M = algebraFromCoords(mu, 2);
        // ad*_xi mu as a vector under the trace-form identification
        const Vec u = coordsOf(bracket(algebraFromCoords(xi, 2), M));
        const Vec v = coordsOf(bracket(algebraFromCoords(eta, 2), M));
        EXPECT_NEAR(kksForm(mu, u, v), oracle::kks(mu, xi, eta), 1e-10);
    }
}

TEST(Catalog, SpectralFrameDiagonalizes) {
    Rng rng(29);
    for (int n : {2, 3}) {
        const Mat g = rng.haarSU(n);
        const SpectralFrame F = spectralFrame(g);
        EXPECT_LT((F.U * F.lambda.asDiagonal() * F.U.adjoint() - g).norm(), 1e-10);
    }
}

TEST(Catalog, GaugeTransformStaysMultiplicative) {
    const CatalogEntry e = catalogByName("amm-su2-gauged");
    CheckOptions o;
    o.samples = 10;
    EXPECT_TRUE(checkCocycle(e.G, e.C, o).passed());
    EXPECT_TRUE(checkNondegeneracy(e.G, e.C, o).passed());
}

TEST(Catalog, ExactGaugeFormIsClosed) {
    Rng rng(31);
    const KForm B = exactGaugeForm(2, rng.randomAlgebra(2));
    Numerics nm;
    nm.richardson = true;
    Point p;
    p.g = {rng.haarSU(2)};
    p.v = Vec(0);
    EXPECT_NEAR(exteriorDerivative(B, p, {Vec::Unit(3, 0), Vec::Unit(3, 1), Vec::Unit(3, 2)}, nm), 0.0, 1e-7);
}

TEST(Catalog, PullbackAlongDoubleCoverIsQuasiSymplectic) {
    const CatalogEntry e = catalogByName("cotangent-su2-double-cover");
    CheckOptions o;
    o.samples = 8;
    EXPECT_TRUE(checkGroupoidAxioms(e.G, o).passed());
    EXPECT_TRUE(checkCocycle(e.G, e.C, o).passed());
    EXPECT_TRUE(checkNondegeneracy(e.G, e.C, o).passed());
}

TEST(Catalog, NegativeControlsDeclareTheirFailures) {
    EXPECT_FALSE(catalogByName("zero-form-negative").expected.nondegenerate);
    EXPECT_FALSE(catalogByName("perturbed-negative").expected.cocycle);
    EXPECT_TRUE(catalogByName("amm-su2").expected.cocycle);
}

#include "oracles.hpp"
#include "qsg/geom.hpp"

#include <gtest/gtest.h>

using namespace qsg;

TEST(Algebra, BasisIsOrthonormalForTraceForm) {
    for (int n : {2, 3}) {
        const auto& E = suBasis(n);
        ASSERT_EQ(static_cast<int>(E.size()), suDim(n));
        for (size_t i = 0; i < E.size(); ++i) {
            EXPECT_LT(algebraResidual(E[i]), 1e-14);
            for (size_t j = 0; j < E.size(); ++j) EXPECT_NEAR(pairing(E[i], E[j]), i == j ? 1.0 : 0.0, 1e-14);
        }
    }
}

TEST(Algebra, CoordinatesRoundTrip) {
    Rng rng(3);
    for (int n : {2, 3}) {
        const Vec c = rng.normalVec(suDim(n));
        EXPECT_LT((coordsOf(algebraFromCoords(c, n)) - c).norm(), 1e-14);
    }
}

TEST(Algebra, JacobiAndAdInvariance) {
    Rng rng(5);
    for (int n : {2, 3})
        for (int k = 0; k < 20; ++k) {
            const Mat X = rng.randomAlgebra(n), Y = rng.randomAlgebra(n), Z = rng.randomAlgebra(n);
            const Mat J = bracket(X, bracket(Y, Z)) + bracket(Y, bracket(Z, X)) + bracket(Z, bracket(X, Y));
            EXPECT_LT(J.norm(), 1e-12);
            const Mat g = rng.haarSU(n);
            EXPECT_NEAR(pairing(Ad(g, X), Ad(g, Y)), pairing(X, Y), 1e-12);
            EXPECT_NEAR(pairing(X, bracket(Y, Z)), pairing(bracket(X, Y), Z), 1e-12);
        }
}

TEST(Group, HaarSamplesAreSpecialUnitary) {
    Rng rng(7);
    for (int n : {2, 3})
        for (int k = 0; k < 50; ++k) EXPECT_LT(membershipResidual(rng.haarSU(n)), 1e-12);
}

TEST(Group, ExponentialMatchesTaylorOracle) {
    Rng rng(11);
    for (int n : {2, 3})
        for (int k = 0; k < 30; ++k) {
            const Mat X = rng.randomAlgebra(n, 2.0);
            EXPECT_LT((expm(X) - oracle::expTaylor(X)).norm(), 1e-12);
            EXPECT_LT(membershipResidual(expm(X)), 1e-12);
        }
    Rng r2(12);
    const Mat X = r2.randomAlgebra(2);
    EXPECT_LT((expm(X) - oracle::expSU2(X)).norm(), 1e-13);
}

TEST(Group, ExponentialRejectsNonAlgebraInput) {
    EXPECT_THROW(expm(Mat::Identity(2, 2)), std::domain_error);
}

TEST(Group, MaurerCartanRightTrivialization) {
    Rng rng(13);
    const Mat g = rng.haarSU(3);
    const Mat X = rng.randomAlgebra(3);
    const Mat V = X * g;
    EXPECT_LT((maurerCartan(g, V, Side::Right) - X).norm(), 1e-13);
    EXPECT_LT((maurerCartan(g, V, Side::Left) - Ad(inv(g), X)).norm(), 1e-12);
}

TEST(Rank, GapRule) {
    Numerics nm;
    Vec clear(3);
    clear << 1.0, 0.5, 1e-12;
    RankInfo r = decideRank(clear, -1, nm);
    EXPECT_EQ(r.rank, 2);
    EXPECT_FALSE(r.indeterminate);

    Vec blurred(3);
    blurred << 1.0, 2e-8, 5e-9;
    r = decideRank(blurred, -1, nm);
    EXPECT_EQ(r.rank, 2);
    EXPECT_TRUE(r.indeterminate);

    Vec full(2);
    full << 1.0, 0.9;
    EXPECT_FALSE(decideRank(full, -1, nm).indeterminate);
    EXPECT_EQ(decideRank(full, -1, nm).rank, 2);

    Vec zero = Vec::Zero(3);
    r = decideRank(zero, -1, nm);
    EXPECT_EQ(r.rank, 0);
    EXPECT_FALSE(r.indeterminate);
}

TEST(Subspaces, KernelImageIntersection) {
    RMat A(3, 3);
    A << 1, 2, 3, 2, 4, 6, 1, 0, 1;
    EXPECT_EQ(kernelOf(A).dim(), 1);
    EXPECT_EQ(imageOf(A).dim(), 2);
    EXPECT_LT((A * kernelOf(A).basis).norm(), 1e-12);

    Subspace xy, yz;
    xy.basis = RMat::Zero(3, 2);
    xy.basis(0, 0) = xy.basis(1, 1) = 1;
    xy.ambientDim = 3;
    yz.basis = RMat::Zero(3, 2);
    yz.basis(1, 0) = yz.basis(2, 1) = 1;
    yz.ambientDim = 3;
    const Subspace I = subspaceIntersect(xy, yz);
    ASSERT_EQ(I.dim(), 1);
    EXPECT_NEAR(std::abs(I.basis(1, 0)), 1.0, 1e-12);
    EXPECT_EQ(subspaceSum(xy, yz).dim(), 3);
    EXPECT_EQ(quotientDim(fullSpace(3), xy), 1);
    EXPECT_NEAR(subspaceDistance(xy, xy), 0.0, 1e-12);
    EXPECT_TRUE(contains(fullSpace(3), xy, 1e-12));
}

TEST(Forms, ExteriorDerivativeOfLinearOneForm) {
    // alpha = x0 dx1 - x2 dx0, d alpha = dx0 ^ dx1 + dx0 ^ dx2
    KForm a{1, [](const Point& p, const std::vector<Vec>& vs) { return p.v(0) * vs[0](1) - p.v(2) * vs[0](0); }};
    Point p;
    p.v = Vec::Zero(3);
    p.v << 0.3, -0.1, 0.7;
    const Vec e0 = Vec::Unit(3, 0), e1 = Vec::Unit(3, 1), e2 = Vec::Unit(3, 2);
    EXPECT_NEAR(exteriorDerivative(a, p, {e0, e1}), 1.0, 1e-8);
    EXPECT_NEAR(exteriorDerivative(a, p, {e0, e2}), 1.0, 1e-8);
    EXPECT_NEAR(exteriorDerivative(a, p, {e1, e2}), 0.0, 1e-8);
}

TEST(Forms, DSquaredVanishes) {
    KForm a{1, [](const Point& p, const std::vector<Vec>& vs) {
                const Vec& x = p.v;
                return std::sin(x(0)) * x(1) * vs[0](2) + x(2) * x(2) * vs[0](0) + std::exp(x(1)) * vs[0](1);
            }};
    Numerics nm;
    nm.richardson = true;
    nm.fdStep = 1e-3;
    const KForm da = exteriorDerivativeForm(a, nm);
    Point p;
    p.v = Vec::Zero(3);
    p.v << 0.2, 0.4, -0.3;
    EXPECT_NEAR(exteriorDerivative(da, p, {Vec::Unit(3, 0), Vec::Unit(3, 1), Vec::Unit(3, 2)}, nm), 0.0, 1e-6);
}

TEST(Forms, PullbackAlongLinearMap) {
    KForm w{2, [](const Point&, const std::vector<Vec>& vs) { return vs[0](0) * vs[1](1) - vs[0](1) * vs[1](0); }};
    // f(x) = 2x doubles the area form
    const Map f = [](const Point& p) {
        Point q = p;
        q.v = 2 * p.v;
        return q;
    };
    Point p;
    p.v = Vec::Zero(2);
    EXPECT_NEAR(pullback(w, f)(p, {Vec::Unit(2, 0), Vec::Unit(2, 1)}), 4.0, 1e-8);
}

TEST(Charts, ChartAtZeroIsIdentityAndVelocityRecovered) {
    Rng rng(17);
    Point p;
    p.g = {rng.haarSU(2)};
    p.v = rng.normalVec(2);
    EXPECT_LT(pointDistance(chart(p, Vec::Zero(5)), p), 1e-15);
    const Vec c = rng.normalVec(5);
    const Vec got = curveVelocity([&](double e) { return chart(p, e * c); });
    EXPECT_LT((got - c).norm(), 1e-7);
}

TEST(Newton, ProjectsOntoSphere) {
    Point p;
    p.v = Vec::Zero(3);
    p.v << 2.0, 0.1, 0.0;
    const auto F = [](const Point& q) {
        Vec r(1);
        r(0) = q.v.squaredNorm() - 1.0;
        return r;
    };
    const NewtonResult r = newtonProject(F, p);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.point.v.norm(), 1.0, 1e-12);
}

TEST(Sampling, StreamsAreReproducibleAndIndependent) {
    Rng a = Rng::stream(0, "x", 3), b = Rng::stream(0, "x", 3), c = Rng::stream(0, "x", 4), d = Rng::stream(1, "x", 3);
    const double va = a.normal();
    EXPECT_EQ(va, b.normal());
    EXPECT_NE(va, c.normal());
    EXPECT_NE(va, d.normal());
}

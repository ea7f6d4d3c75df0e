#include "oracles.hpp"
#include "qsg/loops.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qsg;

namespace {

DiscreteLoopAlgebra constantLoop(const Mat& X, int N) {
    DiscreteLoopAlgebra r;
    r.samples.assign(N, X);
    return r;
}

}  // namespace

TEST(Loops, ToleranceScalesWithInverseSquare) {
    EXPECT_DOUBLE_EQ(loopTolerance(16), 1e-3);
    EXPECT_DOUBLE_EQ(loopTolerance(32), 2.5e-4);
    EXPECT_DOUBLE_EQ(loopTolerance(8), 4e-3);
}

TEST(Loops, FittedOrderOfExactPowerLaw) {
    const std::vector<int> Ns{8, 16, 32, 64};
    std::vector<double> r;
    for (int N : Ns) r.push_back(3.0 / (double(N) * N));
    EXPECT_NEAR(fittedOrder(Ns, r), 2.0, 1e-12);
}

TEST(Loops, HolonomyOfConstantLoopIsExponential) {
    Rng rng(61);
    const Mat X = rng.randomAlgebra(2);
    for (int N : {4, 16}) EXPECT_LT((holonomy(constantLoop(X, N)) - oracle::expTaylor(X)).norm(), 1e-12);
    EXPECT_LT((holonomy(constantLoop(Mat::Zero(2, 2), 8)) - Mat::Identity(2, 2)).norm(), 1e-15);
}

TEST(Loops, HolonomyIsSpecialUnitary) {
    Rng rng(67);
    const FourierLoop X = randomFourierLoop(2, 2, 0.6, rng);
    EXPECT_LT(membershipResidual(holonomy(X.sample(32))), 1e-12);
}

TEST(Loops, HolonomyConvergesAtSecondOrder) {
    Rng rng(71);
    const FourierLoop X = randomFourierLoop(2, 2, 0.6, rng);
    const Mat ref = holonomy(X.sample(1024));
    std::vector<int> Ns{8, 16, 32, 64};
    std::vector<double> err;
    for (int N : Ns) err.push_back((holonomy(X.sample(N)) - ref).norm());
    EXPECT_NEAR(fittedOrder(Ns, err), 2.0, 0.3);
}

TEST(Loops, ConstantGaugeIsAdjoint) {
    Rng rng(73);
    const Mat g = rng.haarSU(2);
    const FourierLoop X = randomFourierLoop(2, 1, 0.5, rng);
    const DiscreteLoopAlgebra xi = X.sample(16);
    DiscreteLoopGroup G;
    G.samples.assign(16, g);
    const DiscreteLoopAlgebra out = gaugeAction(G, xi);
    for (int k = 0; k < 16; ++k) EXPECT_LT((out.samples[k] - Ad(g, xi.samples[k])).norm(), 1e-13);
}

TEST(Loops, LambdaIsAntisymmetric) {
    Rng rng(79);
    const DiscreteLoopAlgebra X = randomFourierLoop(2, 2, 0.5, rng).sample(16);
    const DiscreteLoopAlgebra Y = randomFourierLoop(2, 2, 0.5, rng).sample(16);
    EXPECT_NEAR(lambdaCocycle(X, Y), -lambdaCocycle(Y, X), 1e-12);
}

TEST(Loops, MuAtZeroApproachesClosedForm) {
    Rng rng(83);
    const Mat P = rng.randomAlgebra(2, 0.5), Q = rng.randomAlgebra(2, 0.5);
    const Mat R = rng.randomAlgebra(2, 0.5), S = rng.randomAlgebra(2, 0.5);
    const double exact = muAtZeroClosedForm(P, Q, R, S);
    std::vector<double> err;
    for (int N : {32, 64}) {
        DiscreteLoopAlgebra v1, v2, zero = constantLoop(Mat::Zero(2, 2), N);
        for (int k = 0; k < N; ++k) {
            const double s = double(k) / N;
            v1.samples.push_back(P + std::cos(2 * M_PI * s) * Q);
            v2.samples.push_back(R + std::sin(2 * M_PI * s) * S);
        }
        err.push_back(std::abs(muForm(zero, v1, v2) - exact));
    }
    EXPECT_LT(err[1], 1e-3);
    EXPECT_TRUE(err[1] < err[0] / 3 || err[1] < 1e-12);
}

TEST(Loops, LoopGroupoidFieldIdentityIsExact) {
    const LoopModel L = buildLoopGroupoid(2, 8);
    const LoopResiduals r = loopResiduals(L, 2, 0);
    EXPECT_LE(r.fieldIdentity, 1e-10);
    EXPECT_LE(r.lambdaAntisymmetry, 1e-10);
    EXPECT_LE(r.muAntisymmetry, 1e-10);
    EXPECT_EQ(L.groupoid.G.arrowDim, 2 * L.groupoid.G.objectDim);
}

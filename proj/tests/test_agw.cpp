#include "oracles.hpp"
#include "qsg/agw.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qsg;

namespace {

CheckOptions opts(int n) {
    CheckOptions o;
    o.samples = n;
    return o;
}

}  // namespace

TEST(EMap, LandsInTheDualGroupAndReconstructs) {
    Rng rng(89);
    for (int n : {2, 3})
        for (int k = 0; k < 20; ++k) {
            const Vec mu = rng.normalVec(suDim(n));
            const DualGroupElement l = emap(mu, n);
            EXPECT_LT(dualGroupResidual(l), 1e-12);
            const Mat target = oracle::expTaylor(cd(0, 1) * algebraFromCoords(mu, n));
            EXPECT_LT((l.l * l.l.adjoint() - target).norm(), 1e-10 * target.norm());
        }
    EXPECT_TRUE(checkEmapReconstruction(2, opts(50)).passed());
    EXPECT_TRUE(checkEmapReconstruction(3, opts(50)).passed());
}

TEST(EMap, DiagonalClosedForm) { EXPECT_TRUE(checkEmapDiagonal(opts(20)).passed()); }

TEST(EMap, DressingIsAnActionAndEMapIsEquivariant) {
    for (int n : {2, 3}) {
        EXPECT_TRUE(checkDressingAction(n, opts(30)).passed());
        EXPECT_TRUE(checkDressingEquivariance(n, opts(30)).passed());
    }
}

TEST(EMap, ZeroGoesToIdentity) {
    const DualGroupElement l = emap(Vec::Zero(3), 2);
    EXPECT_LT((l.l - Mat::Identity(2, 2)).norm(), 1e-14);
}

TEST(Homotopy, ConstantTwoFormHalves) {
    // H(a)_x(v) = int_0^1 t a(x, v) dt = a(x, v)/2 for constant a
    RMat A(3, 3);
    A << 0, 1, -2, -1, 0, 0.5, 2, -0.5, 0;
    const KForm a{2, [A](const Point&, const std::vector<Vec>& vs) { return vs[0].dot(A * vs[1]); }};
    const KForm H = homotopyOperator(a, 16);
    Point x;
    x.v = Vec::Zero(3);
    x.v << 0.3, -0.7, 1.1;
    const Vec v = Vec::Unit(3, 1);
    EXPECT_NEAR(H(x, {v}), 0.5 * x.v.dot(A * v), 1e-13);
}

TEST(Homotopy, BetaConvergesAtSecondOrder) {
    const CheckReport r = checkBetaQuadrature(2, {8, 16, 32}, opts(5));
    EXPECT_TRUE(r.passed());
    EXPECT_NEAR(r.metric("fitted_order"), 2.0, 0.3);
}

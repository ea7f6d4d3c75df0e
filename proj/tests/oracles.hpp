#pragma once
// Independent reference computations used by the tests. None of these go through the
// checker's rank or form machinery.

#include "qsg/geom.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace oracle {

// Matrix of Ad_x on su(n) in the orthonormal basis, built from traces only.
inline qsg::RMat adjointMatrix(const qsg::Mat& x) {
    const auto& E = qsg::suBasis(static_cast<int>(x.rows()));
    const int d = static_cast<int>(E.size());
    qsg::RMat A(d, d);
    const qsg::Mat xi = x.adjoint();
    for (int j = 0; j < d; ++j) {
        const qsg::Mat AdE = x * E[j] * xi;
        for (int i = 0; i < d; ++i) A(i, j) = -(E[i] * AdE).trace().real();
    }
    return A;
}

// dim ker(Ad_x + 1): number of eigenvalues of the orthogonal matrix Ad_x equal to -1.
inline int adPlusOneKernelDim(const qsg::Mat& x, double tol = 1e-6) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(adjointMatrix(x).cast<std::complex<double>>());
    int k = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()(i) + 1.0) < tol) ++k;
    return k;
}

// exp of X in su(2): X^2 = -a^2 I with a^2 = (X, X)/2.
inline qsg::Mat expSU2(const qsg::Mat& X) {
    const double a = std::sqrt(std::max(0.0, -(X * X).trace().real() / 2));
    const qsg::Mat I = qsg::Mat::Identity(2, 2);
    if (a < 1e-300) return I + X;
    return std::cos(a) * I + (std::sin(a) / a) * X;
}

// Scaling and squaring with a 24-term Taylor series; for any square matrix.
inline qsg::Mat expTaylor(const qsg::Mat& X) {
    int k = 0;
    while (X.norm() / std::ldexp(1.0, k) > 0.25) ++k;
    const qsg::Mat Y = X / std::ldexp(1.0, k);
    qsg::Mat term = qsg::Mat::Identity(X.rows(), X.cols()), sum = term;
    for (int j = 1; j <= 24; ++j) {
        term = term * Y / double(j);
        sum += term;
    }
    for (int i = 0; i < k; ++i) sum = sum * sum;
    return sum;
}

// <mu, [xi, eta]> with mu, xi, eta as su(2) coordinates; [e_i, e_j] = c eps_ijk e_k.
inline double kks(const qsg::Vec& mu, const qsg::Vec& xi, const qsg::Vec& eta) {
    const qsg::Mat B = qsg::bracket(qsg::algebraFromCoords(xi, 2), qsg::algebraFromCoords(eta, 2));
    return qsg::pairing(qsg::algebraFromCoords(mu, 2), B);
}

// Random SU(2) element with trace zero: exp of a random direction with angle pi/2.
inline qsg::Mat traceZeroSU2(qsg::Rng& rng) {
    qsg::Vec u = rng.normalVec(3);
    u /= u.norm();
    const qsg::Mat X = qsg::algebraFromCoords(u, 2);
    const double a = std::sqrt(-(X * X).trace().real() / 2);
    return expSU2((M_PI / 2 / a) * X);
}

}  // namespace oracle

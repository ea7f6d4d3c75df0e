#pragma once

#include "qsg/groupoid.hpp"

namespace qsg {

// Dual group of SU(n): lower-triangular complex matrices with positive diagonal and det 1.
struct DualGroupElement {
    Mat l;
};

// Largest of: strict upper part, non-real or non-positive diagonal, |det - 1|.
double dualGroupResidual(const DualGroupElement& l);

// mu in su(n)* given by coordinates in the orthonormal basis (identified with su(n) by the
// trace form). E(mu) = Cholesky factor of exp(i mu#), scaled to det 1.
// Throws std::domain_error if the factorization loses positivity.
DualGroupElement emap(const Vec& mu, int n);
// Lower-triangular factor of (g l)(g l)^dag, i.e. the AN part of g l.
DualGroupElement dressing(const Mat& g, const DualGroupElement& l);
// Coadjoint action in coordinates.
Vec coadjoint(const Mat& g, const Vec& mu);

// l^{-1} dl along the straight line mu + e v, by a fourth-order central difference.
Mat dualMaurerCartan(const Vec& mu, const Vec& v, int n, const Numerics& nm = {});

// alpha = (1/2i) E* B^C(theta, theta^dag) on su(n)*; alpha(u, v) = -Im tr(A C^dag) with
// A = theta(u), C = theta(v).
KForm alphaForm(int n, const Numerics& nm = {});

// Poincare homotopy operator on a vector space: (H a)_x(v...) = int_0^1 t^{k-1} a_{tx}(x, v...) dt,
// midpoint rule with M subdivisions.
KForm homotopyOperator(const KForm& a, int M);

// beta = H(alpha) with M quadrature nodes.
KForm betaForm(int n, int M = 64, const Numerics& nm = {});

// ---------- checks ----------
// |l l^dag - exp(i mu#)| and the dual-group invariants at random mu.
CheckReport checkEmapReconstruction(int n, const CheckOptions& opt);
// |E(Ad*_g mu) - dressing(g, E(mu))| at random (g, mu).
CheckReport checkDressingEquivariance(int n, const CheckOptions& opt);
// dressing(g1 g2, l) = dressing(g1, dressing(g2, l)) and dressing(e, l) = l.
CheckReport checkDressingAction(int n, const CheckOptions& opt);
// min |E(mu1) - E(mu2)| / |mu1 - mu2| over pairs in the ball of radius 2 is at least `separation`.
CheckReport checkEmapInjective(int n, const CheckOptions& opt, double separation = 1e-2);
// Closed form on diagonal su(2)*: E = diag(e^{a/2}, e^{-a/2}).
CheckReport checkEmapDiagonal(const CheckOptions& opt);
// |beta_M - beta_2M| for M = Ms; fitted order within 2 +- 0.3.
CheckReport checkBetaQuadrature(int n, const std::vector<int>& Ms, const CheckOptions& opt);
// beta vanishes at 0 and along the ray; d(d beta) = 0 within 1e-4.
CheckReport checkBetaStructure(int n, const CheckOptions& opt);
// d H a + H d a = a for a = alpha within 1e-4.
CheckReport checkHomotopyIdentity(int n, const CheckOptions& opt);

std::vector<CheckReport> agwSuite(int n, const CheckOptions& opt);

}  // namespace qsg

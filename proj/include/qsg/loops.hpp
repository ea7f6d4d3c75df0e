#pragma once

#include "qsg/morita.hpp"

namespace qsg {

// N samples r_0..r_{N-1} at s_k = k/N. A path (periodic = false) carries one more sample at s = 1.
struct DiscreteLoopAlgebra {
    std::vector<Mat> samples;
    bool periodic = true;
    int N() const { return periodic ? static_cast<int>(samples.size()) : static_cast<int>(samples.size()) - 1; }
};

struct DiscreteLoopGroup {
    std::vector<Mat> samples;
    int N() const { return static_cast<int>(samples.size()); }
    const Mat& base() const { return samples.front(); }
};

// Band-limited loop c + sum_m a_m cos(2 pi m s) + b_m sin(2 pi m s) in su(n); sampled at any N.
struct FourierLoop {
    Mat c;
    std::vector<Mat> a, b;
    Mat at(double s) const;
    DiscreteLoopAlgebra sample(int N) const;
};
FourierLoop randomFourierLoop(int n, int modes, double scale, Rng& rng);
// h exp(X(s)) sampled at N points.
DiscreteLoopGroup sampleLoopGroup(const Mat& h, const FourierLoop& X, int N);

Vec loopCoords(const DiscreteLoopAlgebra& r);
DiscreteLoopAlgebra loopFromCoords(const Vec& c, int n);

// Midpoint product of exp(ds * r(s_k + ds/2)) with midpoints by linear interpolation;
// prefix holonomies H_0 = e, ..., H_N = Hol(r); H^{-1} dH/ds = r.
std::vector<Mat> holonomyPath(const DiscreteLoopAlgebra& r);
Mat holonomy(const DiscreteLoopAlgebra& r);
// Right-trivialized variations dH_k H_k^{-1} of the prefix holonomies along the tangent loop v.
std::vector<Mat> holonomyVariation(const DiscreteLoopAlgebra& r, const DiscreteLoopAlgebra& v);

// Central difference on the periodic grid (one-sided second order at the ends of a path).
std::vector<Mat> loopDerivative(const std::vector<Mat>& f, bool periodic);
// g.xi = Ad_g xi - g' g^{-1}, projected onto su(n).
DiscreteLoopAlgebra gaugeAction(const DiscreteLoopGroup& g, const DiscreteLoopAlgebra& xi);

// 1/2 int <Hol_s* thetabar, d/ds Hol_s* thetabar> ds by the midpoint rule.
double muForm(const DiscreteLoopAlgebra& r, const DiscreteLoopAlgebra& v1, const DiscreteLoopAlgebra& v2);
// Value of mu at r = 0 for v1 = P + Q cos(2 pi s), v2 = R + S sin(2 pi s).
double muAtZeroClosedForm(const Mat& P, const Mat& Q, const Mat& R, const Mat& S);
// (1/2pi) int <X, Y'> ds with central differences.
double lambdaCocycle(const DiscreteLoopAlgebra& X, const DiscreteLoopAlgebra& Y);

// ---------- loop groupoid ----------
struct LoopModel {
    int n = 2, N = 16;
    CatalogEntry amm;
    CatalogEntry groupoid;   // LG x Lg over Lg
    PullbackSpec Y;          // Lg with phi = Hol
    Map f;                   // (g, r) -> (g_0, Hol r)
    KForm mu;                // on Lg
    KForm holOmega;          // Hol*Omega on Lg
    KForm B;                 // -mu: with these sign conventions Hol*Omega = -d mu, so dB = Hol*Omega
};

// Transformation groupoid of the gauge action; t(g, r) = r, s(g, r) = g.r.
// w' = f*w - s*B + t*B = f*w + del mu and Omega' = Hol*Omega - dB.
LoopModel buildLoopGroupoid(int n, int N, const Numerics& nm = {});

// (r1, r2, (g, x)) with g.r2 = r1 up to discretization -> (g(s), r2), g(s) solving
// g' = g r2 - r1 g with g(0) = g by exponential midpoint steps.
DiscreteLoopGroup tauLoop(const DiscreteLoopAlgebra& r1, const DiscreteLoopAlgebra& r2, const Mat& g0);

// ---------- identities at one discretization ----------
struct LoopResiduals {
    int N = 0;
    double holonomyError = 0;        // vs the N = 512 reference
    double gaugeAssociativity = 0;
    double gaugeEquivariance = 0;
    double holOmegaMinusDB = 0;      // Hol*Omega - dB = Hol*Omega + d mu
    double roundTrip = 0;            // w' + s*B on loop-orbit lifts vs the conjugacy-class form
    double fieldIdentity = 0;        // w' - f*w - del mu (construction exact)
    double delOmegaPrime = 0;        // del w' on composable pairs
    double dOmegaPrime = 0;          // d w' - del Omega'
    double tauRoundTrip = 0;
    double lambdaAntisymmetry = 0;
    double lambdaCocycleDefect = 0;
    double muAntisymmetry = 0;
    double muAtZeroError = 0;
};

// Largest residuals over `samples` band-limited data sets; the data for sample i depend
// only on (seed, i), so different N see the same continuous loops.
LoopResiduals loopResiduals(const LoopModel& L, int samples, std::uint64_t seed, const Numerics& nm = {});

struct ConvergenceRow {
    std::string quantity;
    std::vector<int> Ns;
    std::vector<double> residuals;
    double order = 0;   // minus the least-squares slope of log residual vs log N
};

struct ConvergenceStudy {
    std::vector<LoopResiduals> perN;      // max over samples
    std::vector<LoopResiduals> perNRms;   // RMS over samples; the rows are fitted to these
    std::vector<ConvergenceRow> rows;
    double fieldIdentityMax = 0;
};

ConvergenceStudy convergenceStudy(int n, const std::vector<int>& Ns, int samples, std::uint64_t seed,
                                  const Numerics& nm = {}, int workers = 0);
double fittedOrder(const std::vector<int>& Ns, const std::vector<double>& residuals);
// Orders within 2 +- 0.3 for the holonomy error, gauge associativity, Hol*Omega - d mu, round
// trip; the field identity at most 1e-10.
std::vector<CheckReport> convergenceReports(const ConvergenceStudy& study, const std::string& fixture);

// Tolerance for loop identities at grid size N: 1e-3 at N = 16, scaled by N^-2.
double loopTolerance(int N);

// Hamiltonian LG-space N = Lg x_G M with w_N = -J~*B + p*w_M. Compatibility at samples,
// the inverse direction, and reduced certificates at the given points of M (J(x) = e).
CheckReport ammLoopCorrespondence(const LoopModel& L, const HamiltonianSpaceModel& M,
                                  const std::vector<Point>& reductionPoints, const CheckOptions& opt);
PullbackCorrespondence loopCorrespondence(const LoopModel& L, const HamiltonianSpaceModel& M,
                                          const Numerics& nm = {});

}  // namespace qsg

#pragma once

#include "qsg/groupoid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qsg {

struct ExpectedVerdicts {
    bool cocycle = true;
    bool nondegenerate = true;
    bool unitInverse = true;  // the unit/inverse identities that follow from multiplicativity
};

struct CatalogEntry {
    std::string name;
    std::string anchor;  // quote of the statement the entry instantiates
    GroupoidModel G;
    CocycleData C;
    ExpectedVerdicts expected;
    int groupN = 0;  // n of SU(n) when the entry is built from a matrix group
    std::string kind;
    // For transformation groupoids of conjugation type: an arrow x with t(x) = m0
    // and s(x) = y for y in the orbit of m0, and a projection onto that orbit.
    std::function<Point(const Point& m0, const Point& y)> orbitLift;
    std::function<Point(const Point& m0, const Point& y)> orbitRetract;
    std::vector<std::string> notes;  // copied into every report on this entry
};

// SU(n) group tags: "SU(2)", "SU(3)", ...
int parseGroupTag(const std::string& tag);

// Conjugation-invariant spectral frame of a normal matrix: M = U diag(lambda) U^dag,
// ordered by the eigenvalues of (M - M^dag)/(2i).
struct SpectralFrame {
    Mat U;
    Eigen::VectorXcd lambda;
    double spread = 0;  // eigenvalue spread of the skew part
};
SpectralFrame spectralFrame(const Mat& M);

// AMM forms on G x G in right-trivialized coordinates.
double ammOmega(const Point& p, const Vec& u, const Vec& v);
double cartanThreeForm(const Mat& g, const Vec& u, const Vec& v, const Vec& w);
// Cotangent groupoid form at (g, mu): -<nu1, xi2> + <nu2, xi1> + <mu, [xi1, xi2]>, xi = g^{-1} dg.
double cotangentOmega(const Point& p, const Vec& u, const Vec& v);
// KKS pairing on the orbit through mu of tangent vectors u, v (ambient extension).
double kksForm(const Vec& mu, const Vec& u, const Vec& v);

CatalogEntry makeAMM(const std::string& groupTag);
CatalogEntry makeCotangent(const std::string& groupTag);
// Cotangent groupoid with omega replaced by 0: pre-quasi-symplectic, degenerate.
CatalogEntry makeZeroFormNegative(const std::string& groupTag);
// AMM with a non-multiplicative term added to omega, weighted by |g - 1|^2 so it vanishes
// to second order on the units.
CatalogEntry makePerturbedNegative(const std::string& groupTag, double eps = 0.5);
// Pair groupoid O x O over a coadjoint orbit of SU(2) with pr1*s - pr2*s.
CatalogEntry makePairKKS(const Vec& mu0);

// omega' = omega + s*B - t*B, Omega' = Omega + dB (dB by finite differences unless given).
CatalogEntry gaugeTransform(const CatalogEntry& e, const KForm& B, std::optional<KForm> dB = std::nullopt,
                            const std::string& suffix = "gauged", const Numerics& nm = {});
// Non-closed 2-form on SU(n) used for the gauged fixture.
KForm sampleGaugeForm(int n, double scale = 1.0);
// Closed 2-form d<mu0, theta> on SU(n).
KForm exactGaugeForm(int n, const Mat& mu0);

struct PullbackSpec {
    std::string name;
    Map phi;
    Layout layout;
    int dim = 0;
    std::function<Point(Rng&)> sample;
    // Optional exact preimage sampler; Newton projection is used otherwise.
    std::function<Point(const Point& m, Rng&)> preimage;
    std::function<RMat(const Point&)> tangent;
};
CatalogEntry pullbackGroupoid(const CatalogEntry& e, const PullbackSpec& Y, const Numerics& nm = {});
// Two sheets of su(2)* over su(2)*, sheet recorded as a tag.
PullbackSpec doubleCoverSpec();
// Splits a pullback arrow into (y1, y2, r).
struct PullbackArrow {
    Point y1, y2, r;
};
PullbackArrow splitPullbackArrow(const Point& a, const Layout& yLayout, const Layout& gLayout);

// Residual vector that vanishes iff a = b (group factors compared through a b^{-1}).
Vec pointResidual(const Point& a, const Point& b);

std::vector<std::string> catalogNames();
// Throws std::invalid_argument for unknown names.
CatalogEntry catalogByName(const std::string& name);

}  // namespace qsg

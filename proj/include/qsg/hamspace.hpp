#pragma once

#include "qsg/catalog.hpp"

namespace qsg {

// A left Gamma-space J: X -> P with a 2-form. act(r, x) is defined when t(r) = J(x)
// and lands in J^{-1}(s(r)).
struct HamiltonianSpaceModel {
    std::string name;
    GroupoidModel G;
    CocycleData C;
    int dim = 0;
    Layout layout;
    Map J;
    Map2 act;
    KForm omega;
    std::function<Point(Rng&)> sample;
    std::vector<std::function<Point(Rng&)>> specialPoints;
    double specialFraction = 0.1;
    std::function<RMat(const Point&)> tangent;  // empty: full chart
    Map retract;                                 // projection onto X when X sits inside its chart space
    // Directions along which the representation is redundant (quotient models);
    // they are added to both sides of every kernel comparison.
    std::function<RMat(const Point&)> gauge;

    RMat basis(const Point& x) const;
    RMat gaugeBasis(const Point& x) const;
    Point stratified(int i, Rng& rng) const;
};

// Left G-action, right H-action. actRight(h, x) = x h^{-1}, defined when t(h) = sigma(x).
struct BimoduleModel {
    std::string name;
    GroupoidModel Gl, Hr;
    CocycleData Cl, Cr;
    int dim = 0;
    Layout layout;
    Map rho, sigma;
    Map2 actLeft, actRight;
    KForm omega;
    std::function<Point(Rng&)> sample;
    std::function<Point(const Point& m, Rng&)> sampleOverRho;    // rho(x) = m; optional
    std::function<Point(const Point& n, Rng&)> sampleOverSigma;  // sigma(x) = n; optional
    std::vector<std::function<Point(Rng&)>> specialPoints;
    std::function<RMat(const Point&)> tangent;
    Map retract;
    std::function<RMat(const Point&)> gauge;

    // X as a Hamiltonian G x H-bar space with moment (rho, sigma).
    HamiltonianSpaceModel asSpace() const;
    // Restrictions to one side: the G-space (rho) and the H-bar space (sigma).
    HamiltonianSpaceModel leftSpace() const;
    HamiltonianSpaceModel rightSpace() const;
};

// The trivial groupoid over a point with zero forms.
GroupoidModel pointGroupoid();

Vec infinitesimalAction(const HamiltonianSpaceModel& H, const Vec& xi, const Point& x, const Numerics& nm = {});
RMat infinitesimalActionMatrix(const HamiltonianSpaceModel& H, const RMat& xis, const Point& x,
                               const Numerics& nm = {});

CheckReport checkActionAxioms(const HamiltonianSpaceModel& H, const CheckOptions& opt);
// dw_X = J*Omega, graph isotropy s*w_X - t*w_X = J*w on the action groupoid, and the moment identity.
CheckReport checkCompatible(const HamiltonianSpaceModel& H, const CheckOptions& opt);
CheckReport checkMinimalNondegeneracy(const HamiltonianSpaceModel& H, const Point& x, const Numerics& nm = {});
CheckReport checkMinimalNondegeneracy(const HamiltonianSpaceModel& H, const CheckOptions& opt);
CheckReport checkOrthogonalityIdentity(const HamiltonianSpaceModel& H, const Point& x, const Numerics& nm = {});
CheckReport checkOrthogonalityIdentity(const HamiltonianSpaceModel& H, const CheckOptions& opt);
// Kernel of the left/right commuting actions on sampled data.
CheckReport checkBimoduleActions(const BimoduleModel& X, const CheckOptions& opt);

// Gamma as a Gamma x Gamma-bar space, J = (s, t), (r1, r2).x = r1 x r2^{-1}.
BimoduleModel makeGroupoidBimodule(const CatalogEntry& e);
// The H-G bimodule X-bar with the actions swapped and form -w_X.
BimoduleModel reverseBimodule(const BimoduleModel& X);
// A left Gamma-space as a Gamma-point bimodule.
BimoduleModel asLeftBimodule(const HamiltonianSpaceModel& H);
// Gamma as a left Gamma-space through s only (left multiplication); satisfies the moment identity
// but is not Hamiltonian.
HamiltonianSpaceModel makeLeftTranslationSpace(const CatalogEntry& e);
// Gamma x P as a Gamma-space on the first factor with form pr1*omega: fails the orthogonality identity.
HamiltonianSpaceModel makeIgnoredFactorSpace(const CatalogEntry& e);

// Orbit of m0 with the descended form. Lifts are least-squares lifts through s.
HamiltonianSpaceModel makeOrbitSpace(const CatalogEntry& e, const Point& m0, const Numerics& nm = {});
KForm orbitForm(const CatalogEntry& e, const Point& m0, const Numerics& nm = {});
// Lift consistency of the orbit form: two lifts differing by an isotropy arrow and by ker s_*.
CheckReport checkOrbitDescent(const CatalogEntry& e, const Point& m0, const CheckOptions& opt);

// Copy of H with omega multiplied by c.
HamiltonianSpaceModel scaleForm(const HamiltonianSpaceModel& H, double c);
// Bimodule X viewed through a different form.
BimoduleModel withForm(const BimoduleModel& X, const KForm& w, const std::string& name);

// B1-B3 for spaces over an AMM-type groupoid, with the generating vector field
// xi_X(x) = d/de exp(-e xi).x.
CheckReport checkQuasiHamiltonianAxioms(const HamiltonianSpaceModel& H, const CheckOptions& opt);

// ---------- fusion ----------
struct FusionSide {
    Point x;
    RMat T;                                   // tangent basis at x
    Map moment;                               // map to the common object space
    KForm omega;
    double sign = 1.0;
    std::function<Vec(const Vec&)> orbit;     // algebroid vector at the common point -> tangent at x
    RMat gauge;                               // redundant directions at x (may have 0 columns)
};

struct FusionResult {
    Point z;                 // concat(x, y)
    RMat fiberTangent;       // joint chart coords, orthonormal
    RMat orbitDirs;          // orthonormal
    RMat quotient;           // orthonormal complement of orbitDirs in fiberTangent
    RMat gram;               // fused form on quotient
    KForm form;              // sign_x w_X + sign_y w_Y on joint coords
    double descentResidual = 0;
    int fiberDim = 0, orbitDim = 0, quotientDim = 0, kernelDim = 0;
    bool clean = true;
    std::string cleanFailure;
    bool indeterminate = false;
};

FusionResult fuseAt(const FusionSide& a, const FusionSide& b, const RMat& algebroid, const Numerics& nm = {});

// X x_H Y at a pair with sigma_X(x) = rho_Y(y). Throws std::domain_error when the clean condition fails.
FusionResult composeBimodules(const BimoduleModel& X, const BimoduleModel& Y, const Point& x, const Point& y,
                              const Numerics& nm = {});
// The fused G-K bimodule, represented on the fiber product with the H-orbit directions as gauge.
BimoduleModel fusedBimodule(const BimoduleModel& X, const BimoduleModel& Y, const Numerics& nm = {});

// Largest |w_Z(u, v) - w_T(pi_* u, pi_* v)| over random fiber-product tangents, where pi maps
// representatives into a target space T.
double fusedFormMismatch(const FusionResult& F, const Map& pi, const KForm& target, int pairs, Rng& rng,
                         const Numerics& nm = {});

// Invariance of the fused form under local bisections L of H (m -> L(m), t(L(m)) = m), acting by
// (x, y) -> (x L^{-1}, L y).
double bisectionInvariance(const BimoduleModel& X, const BimoduleModel& Y, const Point& x, const Point& y,
                           const Map& bisection, int pairs, Rng& rng, const Numerics& nm = {});

// ---------- reduction ----------
struct ReducedPointCertificate {
    Point base;
    int levelDim = 0;
    int orbitDim = 0;
    int reducedDim = 0;
    int kernelDim = 0;
    RMat gram;
    RMat representatives;     // chart coords of the complement used
    double wellDefinedResidual = 0;
    bool free = true;         // informational: isotropy acts with discrete stabilizers
    bool indeterminate = false;
    Verdict verdict = Verdict::Pass;
};

// J^{-1}(m)/Gamma_m^m at x, m = J(x). Reducing a bimodule on its second factor is
// reduceAtPoint(X.rightSpace(), x). The level set must meet the orbit of m cleanly
// (J_* T_xX contains the anchor image); otherwise std::domain_error.
ReducedPointCertificate reduceAtPoint(const HamiltonianSpaceModel& H, const Point& x, const Numerics& nm = {});
// (X1 x_P X2)/Gamma with w_1 - w_2.
ReducedPointCertificate intertwiner(const HamiltonianSpaceModel& X1, const HamiltonianSpaceModel& X2,
                                    const Point& x1, const Point& x2, const Numerics& nm = {});
ReducedPointCertificate certificateFromFusion(const FusionResult& F, const Numerics& nm = {});
CheckReport certificateReport(const ReducedPointCertificate& c, const std::string& check, const std::string& anchor,
                              const std::string& fixture);

}  // namespace qsg

#pragma once

#include "qsg/hamspace.hpp"

namespace qsg {

// A Hamiltonian G-H bimodule offered as a Morita equivalence. Principality is certified
// pointwise by checkMoritaBimodule; properness is assumed (compact fixtures).
struct EquivalenceBimodule {
    BimoduleModel X;
    std::string anchor;
};

// Witnesses at samples: rho, sigma submersions; both actions infinitesimally free;
// left orbits fill sigma-fibers and right orbits fill rho-fibers; isotropy and orbit
// codimensions agree at related points; dim G + dim H = 2 dim X; and the underlying
// bimodule is Hamiltonian (compatible, minimally nondegenerate).
CheckReport checkMoritaBimodule(const EquivalenceBimodule& E, const CheckOptions& opt);

EquivalenceBimodule makeIdentityEquivalence(const CatalogEntry& e);
// X = Gamma with w_X = w + s*B between Gamma_B (left) and Gamma (right).
EquivalenceBimodule makeGaugeEquivalence(const CatalogEntry& e, const CatalogEntry& gauged, const KForm& B,
                                         const Numerics& nm = {});
// Gamma[Y] with w' = pr*w - s*B + t*B and Omega' = phi*Omega - dB.
CatalogEntry pullbackWithField(const CatalogEntry& e, const PullbackSpec& Y, const KForm& B,
                               std::optional<KForm> dB = std::nullopt, const Numerics& nm = {});
// X = Gamma x_{t,P,phi} Y with w_X = (w, B) between Gamma (left) and Gamma[Y] (right).
EquivalenceBimodule makePullbackEquivalence(const CatalogEntry& e, const CatalogEntry& pulled, const PullbackSpec& Y,
                                            const KForm& B, const Numerics& nm = {});
EquivalenceBimodule reverseEquivalence(const EquivalenceBimodule& E);
EquivalenceBimodule composeEquivalences(const EquivalenceBimodule& A, const EquivalenceBimodule& B,
                                        const Numerics& nm = {});

// ---------- strict homomorphisms ----------
struct StrictHomomorphism {
    std::string name;
    Map arrows;
    Map objects;
};

// The groupoid over a point with zero forms.
CatalogEntry pointEntry();

// Groupoid-homomorphism residuals, phi*(w_H + Omega_H) = w_G + Omega_G, and injectivity of
// xi -> phi*(xi ⌟ w_H) on the anchor kernel of A_H.
CheckReport checkStrictHomomorphism(const StrictHomomorphism& phi, const CatalogEntry& G, const CatalogEntry& H,
                                    const CheckOptions& opt);
// X = G0 x_{phi,H0,s} H with w_X = restriction of (0, w_H).
BimoduleModel strictToGeneralized(const StrictHomomorphism& phi, const CatalogEntry& G, const CatalogEntry& H,
                                  const Numerics& nm = {});

StrictHomomorphism identityHomomorphism(const CatalogEntry& e);
// (g, x) -> (k g k^{-1}, k x k^{-1}) on an AMM-type entry.
StrictHomomorphism conjugationHomomorphism(const CatalogEntry& e, const Mat& k);
// The point groupoid into H at the unit of m0.
StrictHomomorphism pointInclusion(const CatalogEntry& H, const Point& m0);

// ---------- transfer of Hamiltonian spaces ----------
// X-bar x_G F as a Hamiltonian H-space, represented on the fiber product with G-orbit gauge.
HamiltonianSpaceModel transferHamiltonianSpace(const EquivalenceBimodule& E, const HamiltonianSpaceModel& F,
                                               const Numerics& nm = {});
// The same space over Gamma_B written in closed form: w_F + J*B.
HamiltonianSpaceModel gaugeShiftSpace(const HamiltonianSpaceModel& F, const CatalogEntry& gauged, const KForm& B,
                                      const Numerics& nm = {});

// Largest |w_Z(u, v) - w_T(pi_* u, pi_* v)| over sampled fiber-product points of Z and tangent pairs.
CheckReport transferAgreement(const HamiltonianSpaceModel& Z, const Map& pi, const KForm& target,
                              const std::string& check, const CheckOptions& opt);

// Largest |w_A(x; u, v) - w_B(x; u, v)| over sampled points and tangent pairs of A.
CheckReport formAgreement(const HamiltonianSpaceModel& A, const HamiltonianSpaceModel& B, const std::string& check,
                          const CheckOptions& opt);

// ---------- pull-back correspondence ----------
// L is a groupoid over Y with a homomorphism f: L -> Gamma covering phi: Y -> P
// (Gamma[Y] with f = pr, or a model identified with it).
struct PullbackCorrespondence {
    CatalogEntry base;          // Gamma
    CatalogEntry groupoid;      // L
    Map f;
    HamiltonianSpaceModel N;    // Y x_P M with w_N = -J~*B + p*w_M
    PullbackSpec Y;
    KForm B;
};

PullbackCorrespondence correspondViaPullback(const CatalogEntry& e, const PullbackSpec& Y, const KForm& B,
                                             const HamiltonianSpaceModel& M, std::optional<KForm> dB = std::nullopt,
                                             const Numerics& nm = {});
PullbackCorrespondence correspondAlong(const CatalogEntry& e, const CatalogEntry& L, const Map& f,
                                       const PullbackSpec& Y, const KForm& B, const HamiltonianSpaceModel& M,
                                       const Numerics& nm = {});
// Inverse direction: w_N + J~*B must be basic for the based subgroupoid (algebroid elements
// of L that f sends to unit directions) and must equal p*w_M. The residual is the larger defect.
CheckReport checkPullbackInverse(const PullbackCorrespondence& P, const HamiltonianSpaceModel& M,
                                 const CheckOptions& opt);
// |dB - phi*Omega| at samples of Y.
CheckReport checkFieldPrimitive(const CatalogEntry& e, const PullbackSpec& Y, const KForm& B,
                                const CheckOptions& opt);
// Reduced-space certificates of M at x and of N at (y, x) for phi(y) = J(x); dims and verdicts must agree.
// y comes from `lift` when given, else from the preimage sampler of Y.
CheckReport checkRelatedReductions(const PullbackCorrespondence& P, const HamiltonianSpaceModel& M,
                                   const std::vector<Point>& points, const CheckOptions& opt,
                                   const Map& lift = {});

}  // namespace qsg

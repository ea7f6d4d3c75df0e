#pragma once

#include "qsg/geom.hpp"
#include "qsg/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qsg {

struct Layout {
    int ng = 0;  // group factors
    int nv = 0;  // linear coordinates
    int nt = 0;  // discrete tags
};

// Executable Lie groupoid. Composability: m(a, b) is defined iff t(a) = s(b).
// multiply and the actions are smooth extensions to a neighborhood of the
// composable set, so their differentials along tangent vectors of that set are exact.
struct GroupoidModel {
    std::string name;
    int arrowDim = 0;
    int objectDim = 0;
    Layout arrowLayout, objectLayout;
    Map source, target, inverse, unit;
    Map2 multiply;
    std::function<Point(Rng&)> sampleObject;
    std::function<Point(const Point&, Rng&)> arrowWithTarget;  // t(a) = m
    // Special loci where kernel dimensions jump; mixed into samples.
    std::vector<std::function<Point(Rng&)>> specialObjects;
    double specialFraction = 0.1;
    // Tangent bases in chart coordinates; empty means the full chart.
    std::function<RMat(const Point&)> arrowTangent;
    std::function<RMat(const Point&)> objectTangent;

    RMat arrowBasis(const Point& a) const;
    RMat objectBasis(const Point& m) const;
    Point arrowWithSource(const Point& m, Rng& rng) const;  // s(a) = m
    Point stratifiedObject(int i, Rng& rng) const;
};

struct CocycleData {
    KForm omega;  // 2-form on arrows
    KForm Omega;  // 3-form on objects
};

struct AlgebroidFiber {
    Point base;
    Point unitArrow;
    Subspace basis;  // chart coordinates of T_{unit}Gamma
    double targetResidual = 0;
};

AlgebroidFiber algebroidFiber(const GroupoidModel& G, const Point& m, const Numerics& nm = {});

// xi is a vector at unit(m) tangent to the t-fiber; s(x) must equal m.
Vec rightInvariantField(const GroupoidModel& G, const Point& m, const Vec& xi, const Point& x,
                        const Numerics& nm = {});
// xi at unit(m) with t(x) = m; defined as -i_*(xi-> at i(x)).
Vec leftInvariantField(const GroupoidModel& G, const Point& m, const Vec& xi, const Point& x,
                       const Numerics& nm = {});
// Independent evaluation: -d/de m(x, i(gamma(e))).
Vec leftInvariantFieldDirect(const GroupoidModel& G, const Point& m, const Vec& xi, const Point& x,
                             const Numerics& nm = {});
Vec anchor(const GroupoidModel& G, const Point& m, const Vec& xi, const Numerics& nm = {});
RMat anchorMatrix(const GroupoidModel& G, const Point& m, const RMat& xis, const Numerics& nm = {});

// Tangent basis of the composable pairs at (a, b), as stacked chart coordinates of concat(a, b).
RMat composableTangentBasis(const GroupoidModel& G, const Point& a, const Point& b, const Numerics& nm = {});

// Simplicial coboundary: level 0 (s* - t*) of a form on objects evaluated on arrows.
double coboundary0(const GroupoidModel& G, const KForm& alpha, const Point& x, const std::vector<Vec>& vs,
                   const Numerics& nm = {});
KForm coboundary0Form(const GroupoidModel& G, const KForm& alpha, const Numerics& nm = {});
// Level 1 (pr1* - m* + pr2*) of a form on arrows at a composable pair; tangents are
// stacked chart coordinates of concat(a, b).
double coboundary1(const GroupoidModel& G, const KForm& alpha, const Point& a, const Point& b,
                   const std::vector<Vec>& vs, const Numerics& nm = {});

struct CheckOptions {
    int samples = 200;
    std::uint64_t seed = 0;
    double tolerance = 1e-6;
    Numerics nm;
};

CheckReport checkGroupoidAxioms(const GroupoidModel& G, const CheckOptions& opt);
CheckReport checkCocycle(const GroupoidModel& G, const CocycleData& C, const CheckOptions& opt);
CheckReport checkUnitInverseIdentities(const GroupoidModel& G, const CocycleData& C, const CheckOptions& opt);

// Kernel data of omega at a unit point.
struct UnitKernels {
    Point m, unitArrow;
    RMat arrowBasis;       // T_{unit}Gamma (chart coords)
    RMat objectBasis;      // T_mP (object chart coords)
    RMat unitTangents;     // unit_* objectBasis (arrow chart coords)
    AlgebroidFiber A;
    RMat gram;             // omega on arrowBasis
    Subspace kerA;         // coefficients w.r.t. A.basis
    Subspace kerP;         // coefficients w.r.t. objectBasis
    Subspace kerFull;      // coefficients w.r.t. arrowBasis
    RMat anchorOnA;        // anchor of A.basis columns, object chart coords
    bool indeterminate = false;
};
UnitKernels unitKernels(const GroupoidModel& G, const CocycleData& C, const Point& m, const Numerics& nm = {});

struct NondegeneracyResult {
    int dimKerA = 0, dimKerP = 0, anchorKernel = 0;
    bool anchorIntoKerP = true;
    bool dimsBalanced = true;  // dim Gamma = 2 dim P
    bool indeterminate = false;
    bool pass = false;
};
NondegeneracyResult nondegeneracyAt(const GroupoidModel& G, const CocycleData& C, const Point& m,
                                    const Numerics& nm = {});

CheckReport checkNondegeneracy(const GroupoidModel& G, const CocycleData& C, const Point& m,
                               const Numerics& nm = {});
CheckReport checkNondegeneracy(const GroupoidModel& G, const CocycleData& C, const CheckOptions& opt);
CheckReport checkPhiIso(const GroupoidModel& G, const CocycleData& C, const Point& m, const Numerics& nm = {});
CheckReport checkPhiIso(const GroupoidModel& G, const CocycleData& C, const CheckOptions& opt);
CheckReport checkKernelSplitting(const GroupoidModel& G, const CocycleData& C, const Point& m, const Numerics& nm = {});
CheckReport checkKernelSplitting(const GroupoidModel& G, const CocycleData& C, const CheckOptions& opt);

// Product groupoid G x H over G0 x H0 and the opposite cocycle (-omega, -Omega).
GroupoidModel productGroupoid(const GroupoidModel& G, const GroupoidModel& H);
CocycleData productCocycle(const GroupoidModel& G, const CocycleData& CG, const GroupoidModel& H,
                           const CocycleData& CH);
CocycleData oppositeCocycle(const CocycleData& C);

// Random unit tangent from a basis.
Vec randomTangent(const RMat& basis, Rng& rng);

}  // namespace qsg

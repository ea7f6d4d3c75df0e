#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsg {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Tunable numerical policy shared by every check.
struct Numerics {
    double fdStep = 1e-4;
    bool richardson = false;
    double rankThreshold = 1e-8;  // relative
    double minGap = 1e2;          // required spectral gap for a rank decision
    double absFloor = 1e-13;      // below this a whole matrix counts as zero
    double newtonTol = 1e-12;
    int newtonMaxIter = 50;
    double indeterminateCap = 0.05;
};

// ---------- Lie algebra su(n) ----------
// Orthonormal basis of su(n) for (X,Y) = -Re tr(XY).
const std::vector<Mat>& suBasis(int n);
inline int suDim(int n) { return n * n - 1; }
Mat algebraFromCoords(const Vec& c, int n);
Vec coordsOf(const Mat& X);  // orthogonal projection onto su(n)
double pairing(const Mat& X, const Mat& Y);
Mat bracket(const Mat& X, const Mat& Y);
Mat Ad(const Mat& g, const Mat& X);
Mat inv(const Mat& g);  // inverse; adjoint for unitary matrices

double membershipResidual(const Mat& g);  // ||g^dag g - I|| + |det g - 1|
double algebraResidual(const Mat& X);     // ||X + X^dag|| + |tr X|

Mat expm(const Mat& X);          // throws std::domain_error for non-algebra input
Mat expmUnchecked(const Mat& X);

enum class Side { Left, Right };
// theta = g^{-1} dg (Left) or dg g^{-1} (Right) applied to an ambient velocity V at g.
Mat maurerCartan(const Mat& g, const Mat& V, Side side);

// ---------- points and tangent vectors ----------
// A point of a product of SU(n) factors and a linear factor. Tangent vectors are
// coordinate vectors: for each group factor the su(n)-coordinates of X with
// velocity X*g, followed by the linear components.
struct Point {
    std::vector<Mat> g;
    Vec v;
    std::vector<int> tags;  // discrete data, e.g. the sheet of a disjoint union
};

struct TangentVector {
    Point base;
    Vec components;
};

int tangentDim(const Point& p);
Point concat(const Point& a, const Point& b);
// Split into (first ng group factors, first nv linear entries, first nt tags) and the rest.
std::pair<Point, Point> split(const Point& p, int ng, int nv, int nt = 0);
Vec concatVec(const Vec& a, const Vec& b);
// Tangent coordinates of concat(a, b) from those of a and b, and back.
Vec joinTangent(const Point& a, const Point& b, const Vec& ta, const Vec& tb);
std::pair<Vec, Vec> splitTangent(const Point& a, const Point& b, const Vec& t);
// Block matrix version of joinTangent for bases (columns).
RMat joinBasis(const Point& a, const Point& b, const RMat& A, const RMat& B);
double pointDistance(const Point& a, const Point& b);

// Ambient velocity of a tangent coordinate vector at p (group factors: X*g).
std::vector<Mat> ambientVelocity(const Point& p, const Vec& c);

// Normal-coordinate chart centered at p: exp(u_i) g_i, v + u_v.
Point chart(const Point& p, const Vec& u);
// Constant chart vector c pushed to the chart point with coordinates u.
Vec transport(const Point& p, const Vec& u, const Vec& c);

using Map = std::function<Point(const Point&)>;
using Map2 = std::function<Point(const Point&, const Point&)>;

// Tangent coordinates at target of the velocity of the curve q(e) at e = 0,
// estimated from q(h), q(-h), q(0).
Vec velocityCoords(const Point& plus, const Point& minus, const Point& center, double h);

Vec differential(const Map& f, const Point& p, const Vec& v, const Numerics& nm = {});
RMat jacobian(const Map& f, const Point& p, const RMat& basis, const Numerics& nm = {});

// Velocity at e = 0 of an arbitrary curve e -> q(e).
Vec curveVelocity(const std::function<Point(double)>& q, const Numerics& nm = {});

struct KForm {
    int degree = 0;
    std::function<double(const Point&, const std::vector<Vec>&)> eval;
    double operator()(const Point& p, const std::vector<Vec>& vs) const { return eval(p, vs); }
};

KForm zeroForm(int degree);
KForm pullback(const KForm& a, const Map& f, const Numerics& nm = {});
KForm sumForms(const std::vector<std::pair<double, KForm>>& terms);

double exteriorDerivative(const KForm& a, const Point& p, const std::vector<Vec>& vs,
                          const Numerics& nm = {});
KForm exteriorDerivativeForm(const KForm& a, const Numerics& nm = {});

// Exterior derivative on a submanifold through a retraction onto it; the chart is
// u -> retract(chart(p, u)) and constant fields are pushed forward by differences.
double exteriorDerivativeRetracted(const KForm& a, const Map& retract, const Point& p,
                                   const std::vector<Vec>& vs, const Numerics& nm = {});

// ---------- linear algebra ----------
struct RankInfo {
    int rank = 0;
    double gap = std::numeric_limits<double>::infinity();
    bool indeterminate = false;
};
RankInfo decideRank(const Vec& singular, double scale, const Numerics& nm = {});

struct Subspace {
    RMat basis;  // orthonormal columns
    int ambientDim = 0;
    double thresholdUsed = 0;
    double gap = std::numeric_limits<double>::infinity();
    bool indeterminate = false;
    int dim() const { return static_cast<int>(basis.cols()); }
};

Subspace kernelOf(const RMat& A, const Numerics& nm = {}, double scale = -1);
Subspace imageOf(const RMat& A, const Numerics& nm = {}, double scale = -1);
Subspace fullSpace(int n);
Subspace subspaceIntersect(const Subspace& a, const Subspace& b, const Numerics& nm = {});
Subspace subspaceImage(const RMat& M, const Subspace& a, const Numerics& nm = {});
Subspace subspaceSum(const Subspace& a, const Subspace& b, const Numerics& nm = {});
Subspace complementIn(const Subspace& a, const Subspace& b, const Numerics& nm = {});
int quotientDim(const Subspace& a, const Subspace& b, const Numerics& nm = {});
// Largest sine of the principal angles; 1 when dimensions differ.
double subspaceDistance(const Subspace& a, const Subspace& b);
bool contains(const Subspace& a, const Subspace& b, double tol);

// Kernel of the bilinear form restricted to span(basis); returns coefficient space.
RMat gramMatrix(const KForm& w, const Point& p, const RMat& basis);
Subspace kernelOfForm(const KForm& w, const Point& p, const RMat& basis, const Numerics& nm = {});

// Gauss-Newton projection onto {F = 0} in chart coordinates (min-norm steps).
struct NewtonResult {
    Point point;
    bool converged = false;
    int iterations = 0;
    double residual = 0;
};
NewtonResult newtonProject(const std::function<Vec(const Point&)>& F, const Point& start,
                           const Numerics& nm = {});

// ---------- random sampling ----------
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    static Rng stream(std::uint64_t seed, const std::string& name, std::uint64_t index);
    double normal() { return nd_(eng_); }
    double uniform() { return ud_(eng_); }
    Vec normalVec(int n);
    Mat haarSU(int n);
    Mat randomAlgebra(int n, double scale = 1.0);

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> nd_{0.0, 1.0};
    std::uniform_real_distribution<double> ud_{0.0, 1.0};
};

}  // namespace qsg

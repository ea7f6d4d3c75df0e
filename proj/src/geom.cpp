#include "qsg/geom.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace qsg {

namespace {

std::vector<Mat> buildSuBasis(int n) {
    std::vector<Mat> out;
    const cd I(0, 1);
    const double r = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            Mat a = Mat::Zero(n, n);
            a(j, k) = r;
            a(k, j) = -r;
            out.push_back(a);
            Mat b = Mat::Zero(n, n);
            b(j, k) = I * r;
            b(k, j) = I * r;
            out.push_back(b);
        }
    // diagonal generators i*H_k, H_k = diag(1,..,1,-k,0,..)/norm
    for (int k = 1; k < n; ++k) {
        Mat h = Mat::Zero(n, n);
        for (int j = 0; j < k; ++j) h(j, j) = I;
        h(k, k) = -I * static_cast<double>(k);
        const double nrm = std::sqrt(static_cast<double>(k + k * k));
        out.push_back(h / nrm);
    }
    return out;
}

}  // namespace

const std::vector<Mat>& suBasis(int n) {
    static std::mutex mu;
    static std::map<int, std::vector<Mat>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, buildSuBasis(n)).first;
    return it->second;
}

Mat algebraFromCoords(const Vec& c, int n) {
    const auto& B = suBasis(n);
    if (c.size() != static_cast<int>(B.size())) throw std::invalid_argument("algebra coordinate size");
    Mat X = Mat::Zero(n, n);
    for (std::size_t k = 0; k < B.size(); ++k) X += c(static_cast<int>(k)) * B[k];
    return X;
}

Vec coordsOf(const Mat& X) {
    const int n = static_cast<int>(X.rows());
    const auto& B = suBasis(n);
    Vec c(static_cast<int>(B.size()));
    for (std::size_t k = 0; k < B.size(); ++k) c(static_cast<int>(k)) = pairing(B[k], X);
    return c;
}

double pairing(const Mat& X, const Mat& Y) {
    // -Re tr(XY) without forming the product
    double s = 0;
    for (int i = 0; i < X.rows(); ++i)
        for (int j = 0; j < X.cols(); ++j) s += (X(i, j) * Y(j, i)).real();
    return -s;
}

Mat bracket(const Mat& X, const Mat& Y) { return X * Y - Y * X; }

Mat inv(const Mat& g) {
    if (g.rows() == 2) {
        const cd det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
        Mat r(2, 2);
        r << g(1, 1), -g(0, 1), -g(1, 0), g(0, 0);
        return r / det;
    }
    return g.inverse();
}

Mat Ad(const Mat& g, const Mat& X) { return g * X * inv(g); }

double membershipResidual(const Mat& g) {
    const int n = static_cast<int>(g.rows());
    return (g.adjoint() * g - Mat::Identity(n, n)).norm() + std::abs(g.determinant() - cd(1, 0));
}

double algebraResidual(const Mat& X) { return (X + X.adjoint()).norm() + std::abs(X.trace()); }

Mat expmUnchecked(const Mat& X) {
    const int n = static_cast<int>(X.rows());
    if (n == 1) return Mat::Constant(1, 1, std::exp(X(0, 0)));
    if (n == 2) {
        // X^2 = -det(X) I for traceless X
        const cd d = X(0, 0) * X(1, 1) - X(0, 1) * X(1, 0);
        const cd th = std::sqrt(d);
        cd c, s;
        if (std::abs(th) < 1e-6) {
            const cd t2 = d;
            c = 1.0 - t2 / 2.0 + t2 * t2 / 24.0;
            s = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
        } else {
            c = std::cos(th);
            s = std::sin(th) / th;
        }
        if (std::abs(X.trace()) > 1e-14) return X.exp();
        Mat r = s * X;
        r(0, 0) += c;
        r(1, 1) += c;
        return r;
    }
    return X.exp();
}

Mat expm(const Mat& X) {
    if (X.rows() != X.cols()) throw std::domain_error("expm: non-square input");
    if (algebraResidual(X) > 1e-9 * (1.0 + X.norm())) throw std::domain_error("expm: input is not in su(n)");
    return expmUnchecked(X);
}

Mat maurerCartan(const Mat& g, const Mat& V, Side side) {
    return side == Side::Left ? Mat(inv(g) * V) : Mat(V * inv(g));
}

int tangentDim(const Point& p) {
    int d = static_cast<int>(p.v.size());
    for (const auto& g : p.g) d += suDim(static_cast<int>(g.rows()));
    return d;
}

Point concat(const Point& a, const Point& b) {
    Point r;
    r.g = a.g;
    r.g.insert(r.g.end(), b.g.begin(), b.g.end());
    r.v = concatVec(a.v, b.v);
    r.tags = a.tags;
    r.tags.insert(r.tags.end(), b.tags.begin(), b.tags.end());
    return r;
}

std::pair<Point, Point> split(const Point& p, int ng, int nv, int nt) {
    Point a, b;
    a.g.assign(p.g.begin(), p.g.begin() + ng);
    b.g.assign(p.g.begin() + ng, p.g.end());
    a.v = p.v.head(nv);
    b.v = p.v.tail(p.v.size() - nv);
    a.tags.assign(p.tags.begin(), p.tags.begin() + nt);
    b.tags.assign(p.tags.begin() + nt, p.tags.end());
    return {a, b};
}

Vec concatVec(const Vec& a, const Vec& b) {
    Vec r(a.size() + b.size());
    r << a, b;
    return r;
}

double pointDistance(const Point& a, const Point& b) {
    if (a.g.size() != b.g.size() || a.v.size() != b.v.size()) return std::numeric_limits<double>::infinity();
    double d = (a.v - b.v).norm();
    for (std::size_t i = 0; i < a.g.size(); ++i) d += (a.g[i] - b.g[i]).norm();
    if (a.tags != b.tags) d += 1.0;
    return d;
}

std::vector<Mat> ambientVelocity(const Point& p, const Vec& c) {
    std::vector<Mat> out;
    int off = 0;
    for (const auto& g : p.g) {
        const int n = static_cast<int>(g.rows());
        out.push_back(algebraFromCoords(c.segment(off, suDim(n)), n) * g);
        off += suDim(n);
    }
    return out;
}

Point chart(const Point& p, const Vec& u) {
    Point q;
    q.tags = p.tags;
    q.g.reserve(p.g.size());
    int off = 0;
    for (const auto& g : p.g) {
        const int n = static_cast<int>(g.rows());
        q.g.push_back(expmUnchecked(algebraFromCoords(u.segment(off, suDim(n)), n)) * g);
        off += suDim(n);
    }
    q.v = p.v + u.segment(off, p.v.size());
    return q;
}

Vec transport(const Point& p, const Vec& u, const Vec& c) {
    // d/dt exp(u + t c) g, right-trivialized: sum_k ad_u^k c / (k+1)!
    Vec out = c;
    int off = 0;
    for (const auto& g : p.g) {
        const int n = static_cast<int>(g.rows());
        const int d = suDim(n);
        const Mat U = algebraFromCoords(u.segment(off, d), n);
        Mat term = algebraFromCoords(c.segment(off, d), n);
        Mat acc = term;
        for (int k = 1; k < 8; ++k) {
            term = bracket(U, term) / static_cast<double>(k + 1);
            acc += term;
        }
        out.segment(off, d) = coordsOf(acc);
        off += d;
    }
    return out;
}

Vec velocityCoords(const Point& plus, const Point& minus, const Point& center, double h) {
    Vec out(tangentDim(center));
    int off = 0;
    for (std::size_t i = 0; i < center.g.size(); ++i) {
        const Mat V = (plus.g[i] - minus.g[i]) / (2 * h);
        const Mat X = V * inv(center.g[i]);
        const int d = suDim(static_cast<int>(center.g[i].rows()));
        out.segment(off, d) = coordsOf(X);
        off += d;
    }
    out.tail(center.v.size()) = (plus.v - minus.v) / (2 * h);
    return out;
}

Vec curveVelocity(const std::function<Point(double)>& q, const Numerics& nm) {
    const double h = nm.fdStep;
    const Point c = q(0.0);
    Vec d1 = velocityCoords(q(h), q(-h), c, h);
    if (!nm.richardson) return d1;
    Vec d2 = velocityCoords(q(h / 2), q(-h / 2), c, h / 2);
    return (4 * d2 - d1) / 3;
}

Vec differential(const Map& f, const Point& p, const Vec& v, const Numerics& nm) {
    return curveVelocity([&](double e) { return f(chart(p, e * v)); }, nm);
}

RMat jacobian(const Map& f, const Point& p, const RMat& basis, const Numerics& nm) {
    const Point fp = f(p);
    RMat J(tangentDim(fp), basis.cols());
    for (int j = 0; j < basis.cols(); ++j) J.col(j) = differential(f, p, basis.col(j), nm);
    return J;
}

KForm zeroForm(int degree) {
    return KForm{degree, [](const Point&, const std::vector<Vec>&) { return 0.0; }};
}

KForm pullback(const KForm& a, const Map& f, const Numerics& nm) {
    return KForm{a.degree, [a, f, nm](const Point& p, const std::vector<Vec>& vs) {
                     std::vector<Vec> pushed;
                     pushed.reserve(vs.size());
                     for (const auto& v : vs) pushed.push_back(differential(f, p, v, nm));
                     return a(f(p), pushed);
                 }};
}

KForm sumForms(const std::vector<std::pair<double, KForm>>& terms) {
    const int deg = terms.empty() ? 0 : terms.front().second.degree;
    return KForm{deg, [terms](const Point& p, const std::vector<Vec>& vs) {
                     double s = 0;
                     for (const auto& [c, f] : terms)
                         if (c != 0.0) s += c * f(p, vs);
                     return s;
                 }};
}

namespace {

double centralDiff(const std::function<double(double)>& f, const Numerics& nm) {
    const double h = nm.fdStep;
    const double d1 = (f(h) - f(-h)) / (2 * h);
    if (!nm.richardson) return d1;
    const double d2 = (f(h / 2) - f(-h / 2)) / h;
    return (4 * d2 - d1) / 3;
}

}  // namespace

double exteriorDerivative(const KForm& a, const Point& p, const std::vector<Vec>& vs, const Numerics& nm) {
    const int k = static_cast<int>(vs.size());
    if (k != a.degree + 1) throw std::invalid_argument("exteriorDerivative: wrong number of tangents");
    double total = 0;
    for (int i = 0; i < k; ++i) {
        auto f = [&](double e) {
            const Vec u = e * vs[i];
            const Point q = chart(p, u);
            std::vector<Vec> rest;
            rest.reserve(k - 1);
            for (int j = 0; j < k; ++j)
                if (j != i) rest.push_back(transport(p, u, vs[j]));
            return a(q, rest);
        };
        total += ((i % 2) ? -1.0 : 1.0) * centralDiff(f, nm);
    }
    return total;
}

KForm exteriorDerivativeForm(const KForm& a, const Numerics& nm) {
    return KForm{a.degree + 1,
                 [a, nm](const Point& p, const std::vector<Vec>& vs) { return exteriorDerivative(a, p, vs, nm); }};
}

double exteriorDerivativeRetracted(const KForm& a, const Map& retract, const Point& p,
                                   const std::vector<Vec>& vs, const Numerics& nm) {
    const int k = static_cast<int>(vs.size());
    if (k != a.degree + 1) throw std::invalid_argument("exteriorDerivative: wrong number of tangents");
    auto psi = [&](const Vec& u) { return retract(chart(p, u)); };
    double total = 0;
    for (int i = 0; i < k; ++i) {
        auto f = [&](double e) {
            const Vec u = e * vs[i];
            const Point q = psi(u);
            std::vector<Vec> rest;
            for (int j = 0; j < k; ++j)
                if (j != i) rest.push_back(curveVelocity([&](double d) { return psi(u + d * vs[j]); }, nm));
            return a(q, rest);
        };
        total += ((i % 2) ? -1.0 : 1.0) * centralDiff(f, nm);
    }
    return total;
}

RankInfo decideRank(const Vec& s, double scale, const Numerics& nm) {
    RankInfo r;
    const int n = static_cast<int>(s.size());
    if (n == 0) return r;
    const double smax = s.maxCoeff();
    if (scale < 0) scale = smax;
    if (scale <= nm.absFloor) return r;
    const double thr = nm.rankThreshold * scale;
    for (int i = 0; i < n; ++i)
        if (s(i) > thr) ++r.rank;
    if (r.rank > 0 && r.rank < n) {
        const double disc = s(r.rank);
        r.gap = disc > 0 ? s(r.rank - 1) / disc : std::numeric_limits<double>::infinity();
        r.indeterminate = r.gap < nm.minGap;
    }
    return r;
}

namespace {

// singular values sorted descending with matching right/left vectors
struct Svd {
    Vec s;
    RMat U, V;
};

Svd svdFull(const RMat& A) {
    Eigen::JacobiSVD<RMat> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

}  // namespace

Subspace kernelOf(const RMat& A, const Numerics& nm, double scale) {
    Subspace out;
    out.ambientDim = static_cast<int>(A.cols());
    out.thresholdUsed = nm.rankThreshold;
    if (A.cols() == 0) {
        out.basis = RMat(0, 0);
        return out;
    }
    if (A.rows() == 0) {
        out.basis = RMat::Identity(A.cols(), A.cols());
        return out;
    }
    const Svd d = svdFull(A);
    Vec s = Vec::Zero(A.cols());
    s.head(d.s.size()) = d.s;
    const RankInfo r = decideRank(s, scale, nm);
    out.gap = r.gap;
    out.indeterminate = r.indeterminate;
    out.basis = d.V.rightCols(A.cols() - r.rank);
    return out;
}

Subspace imageOf(const RMat& A, const Numerics& nm, double scale) {
    Subspace out;
    out.ambientDim = static_cast<int>(A.rows());
    out.thresholdUsed = nm.rankThreshold;
    if (A.cols() == 0 || A.rows() == 0) {
        out.basis = RMat(A.rows(), 0);
        return out;
    }
    const Svd d = svdFull(A);
    const RankInfo r = decideRank(d.s, scale, nm);
    out.gap = r.gap;
    out.indeterminate = r.indeterminate;
    out.basis = d.U.leftCols(r.rank);
    return out;
}

Subspace fullSpace(int n) {
    Subspace s;
    s.ambientDim = n;
    s.basis = RMat::Identity(n, n);
    return s;
}

Subspace subspaceIntersect(const Subspace& a, const Subspace& b, const Numerics& nm) {
    Subspace out;
    out.ambientDim = a.ambientDim;
    out.thresholdUsed = nm.rankThreshold;
    if (a.dim() == 0 || b.dim() == 0) {
        out.basis = RMat(a.ambientDim, 0);
        out.indeterminate = a.indeterminate || b.indeterminate;
        return out;
    }
    RMat M(a.ambientDim, a.dim() + b.dim());
    M << a.basis, -b.basis;
    const Subspace k = kernelOf(M, nm, 1.0);
    const RMat coeff = k.basis.topRows(a.dim());
    Subspace img = imageOf(a.basis * coeff, nm, 1.0);
    img.indeterminate = img.indeterminate || k.indeterminate || a.indeterminate || b.indeterminate;
    img.gap = std::min(img.gap, k.gap);
    return img;
}

Subspace subspaceImage(const RMat& M, const Subspace& a, const Numerics& nm) {
    Subspace img = imageOf(M * a.basis, nm, M.cols() ? M.norm() : 1.0);
    img.indeterminate = img.indeterminate || a.indeterminate;
    return img;
}

Subspace subspaceSum(const Subspace& a, const Subspace& b, const Numerics& nm) {
    RMat M(a.ambientDim, a.dim() + b.dim());
    M << a.basis, b.basis;
    Subspace s = imageOf(M, nm, 1.0);
    s.indeterminate = s.indeterminate || a.indeterminate || b.indeterminate;
    return s;
}

Subspace complementIn(const Subspace& a, const Subspace& b, const Numerics& nm) {
    // vectors of a orthogonal to b
    if (b.dim() == 0) return a;
    const RMat P = b.basis.transpose() * a.basis;
    const Subspace k = kernelOf(P, nm, 1.0);
    Subspace out = imageOf(a.basis * k.basis, nm, 1.0);
    out.indeterminate = out.indeterminate || k.indeterminate || a.indeterminate || b.indeterminate;
    return out;
}

int quotientDim(const Subspace& a, const Subspace& b, const Numerics& nm) {
    return a.dim() - subspaceIntersect(a, b, nm).dim();
}

double subspaceDistance(const Subspace& a, const Subspace& b) {
    if (a.dim() != b.dim()) return 1.0;
    if (a.dim() == 0) return 0.0;
    const RMat r = b.basis - a.basis * (a.basis.transpose() * b.basis);
    Eigen::JacobiSVD<RMat> svd(r);
    return svd.singularValues()(0);
}

bool contains(const Subspace& a, const Subspace& b, double tol) {
    if (b.dim() == 0) return true;
    const RMat r = b.basis - a.basis * (a.basis.transpose() * b.basis);
    return r.norm() <= tol;
}

RMat gramMatrix(const KForm& w, const Point& p, const RMat& basis) {
    const int k = static_cast<int>(basis.cols());
    RMat G = RMat::Zero(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            G(i, j) = w(p, {basis.col(i), basis.col(j)});
            G(j, i) = -G(i, j);
        }
    return G;
}

Subspace kernelOfForm(const KForm& w, const Point& p, const RMat& basis, const Numerics& nm) {
    const RMat G = gramMatrix(w, p, basis);
    const Subspace k = kernelOf(G, nm);
    Subspace out = imageOf(basis * k.basis, nm, 1.0);
    out.gap = k.gap;
    out.indeterminate = k.indeterminate;
    return out;
}

NewtonResult newtonProject(const std::function<Vec(const Point&)>& F, const Point& start, const Numerics& nm) {
    NewtonResult r;
    r.point = start;
    const int n = tangentDim(start);
    for (int it = 0; it <= nm.newtonMaxIter; ++it) {
        const Vec f = F(r.point);
        r.residual = f.norm();
        r.iterations = it;
        if (r.residual <= nm.newtonTol) {
            r.converged = true;
            return r;
        }
        if (it == nm.newtonMaxIter) break;
        RMat J(f.size(), n);
        for (int j = 0; j < n; ++j) {
            const Vec e = Vec::Unit(n, j);
            const double h = nm.fdStep;
            J.col(j) = (F(chart(r.point, h * e)) - F(chart(r.point, -h * e))) / (2 * h);
        }
        Eigen::CompleteOrthogonalDecomposition<RMat> cod(J.rows(), J.cols());
        cod.setThreshold(nm.rankThreshold);
        cod.compute(J);
        const Vec step = cod.solve(-f);
        r.point = chart(r.point, step);
    }
    return r;
}

Rng Rng::stream(std::uint64_t seed, const std::string& name, std::uint64_t index) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 e(seq);
    return Rng(e());
}

Vec Rng::normalVec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = normal();
    return v;
}

Mat Rng::haarSU(int n) {
    Mat Z(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Z(i, j) = cd(normal(), normal()) / std::sqrt(2.0);
    Eigen::HouseholderQR<Mat> qr(Z);
    Mat Q = qr.householderQ();
    const Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        const cd d = R(j, j);
        Q.col(j) *= d / std::abs(d);
    }
    const cd det = Q.determinant();
    Q *= std::pow(det, -1.0 / n);
    return Q;
}

Mat Rng::randomAlgebra(int n, double scale) { return algebraFromCoords(scale * normalVec(suDim(n)), n); }

}  // namespace qsg

namespace qsg {

namespace {
int groupCoordDim(const Point& p) { return tangentDim(p) - static_cast<int>(p.v.size()); }
}  // namespace

Vec joinTangent(const Point& a, const Point& b, const Vec& ta, const Vec& tb) {
    const int ga = groupCoordDim(a), gb = groupCoordDim(b);
    const int va = static_cast<int>(a.v.size()), vb = static_cast<int>(b.v.size());
    Vec t(ga + gb + va + vb);
    t << ta.head(ga), tb.head(gb), ta.tail(va), tb.tail(vb);
    return t;
}

std::pair<Vec, Vec> splitTangent(const Point& a, const Point& b, const Vec& t) {
    const int ga = groupCoordDim(a), gb = groupCoordDim(b);
    const int va = static_cast<int>(a.v.size()), vb = static_cast<int>(b.v.size());
    Vec ta(ga + va), tb(gb + vb);
    ta << t.segment(0, ga), t.segment(ga + gb, va);
    tb << t.segment(ga, gb), t.segment(ga + gb + va, vb);
    return {ta, tb};
}

RMat joinBasis(const Point& a, const Point& b, const RMat& A, const RMat& B) {
    const int ga = groupCoordDim(a), gb = groupCoordDim(b);
    const int va = static_cast<int>(a.v.size()), vb = static_cast<int>(b.v.size());
    RMat M = RMat::Zero(ga + gb + va + vb, A.cols() + B.cols());
    M.block(0, 0, ga, A.cols()) = A.topRows(ga);
    M.block(ga + gb, 0, va, A.cols()) = A.bottomRows(va);
    M.block(ga, A.cols(), gb, B.cols()) = B.topRows(gb);
    M.block(ga + gb + va, A.cols(), vb, B.cols()) = B.bottomRows(vb);
    return M;
}

}  // namespace qsg

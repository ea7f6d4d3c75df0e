#pragma once
// Small helpers shared by the check modules.

#include "qsg/groupoid.hpp"

#include <chrono>

namespace qsg::detail {

inline double seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline RMat orthonormal(const RMat& M, const Numerics& nm = {}) {
    if (M.cols() == 0) return M;
    return imageOf(M, nm, -1).basis;
}

inline RMat hstack(const RMat& A, const RMat& B) {
    if (A.cols() == 0) return B;
    if (B.cols() == 0) return A;
    RMat M(A.rows(), A.cols() + B.cols());
    M << A, B;
    return M;
}

inline Subspace spanOf(const RMat& M, int ambient, const Numerics& nm, double scale = 1.0) {
    if (M.cols() == 0 || M.rows() == 0) {
        Subspace s;
        s.basis = RMat(ambient, 0);
        s.ambientDim = ambient;
        return s;
    }
    Subspace s = imageOf(M, nm, scale);
    s.ambientDim = ambient;
    return s;
}

// Columns scaled to unit length (columns below floor zeroed) so rank decisions share one scale.
inline RMat normalizedColumns(const RMat& M, double floor) {
    RMat out = M;
    for (int j = 0; j < M.cols(); ++j) {
        const double n = M.col(j).norm();
        if (n > floor) out.col(j) /= n;
        else out.col(j).setZero();
    }
    return out;
}

inline std::vector<Vec> pushAll(const Map& f, const Point& p, const std::vector<Vec>& vs, const Numerics& nm) {
    std::vector<Vec> out;
    for (const auto& v : vs) out.push_back(differential(f, p, v, nm));
    return out;
}

template <class F>
std::vector<std::vector<Sample>> runMulti(int n, int parts, F f) {
    auto rows = parallelMap<std::vector<Sample>>(n, std::function<std::vector<Sample>(int)>(f));
    std::vector<std::vector<Sample>> cols(parts);
    for (auto& r : rows)
        for (int j = 0; j < parts; ++j) cols[j].push_back(r[j]);
    return cols;
}

// a on the first factor (layout la) plus b on the second, with signs.
inline KForm jointForm(const KForm& a, const KForm& b, Layout la, double sa = 1.0, double sb = 1.0) {
    return KForm{2, [a, b, la, sa, sb](const Point& z, const std::vector<Vec>& vs) {
                     auto [x, y] = split(z, la.ng, la.nv, la.nt);
                     std::vector<Vec> vx, vy;
                     for (const auto& v : vs) {
                         auto [p, q] = splitTangent(x, y, v);
                         vx.push_back(p);
                         vy.push_back(q);
                     }
                     double r = 0;
                     if (sa != 0) r += sa * a(x, vx);
                     if (sb != 0) r += sb * b(y, vy);
                     return r;
                 }};
}

inline Layout layoutOf(const Point& p) {
    return {static_cast<int>(p.g.size()), static_cast<int>(p.v.size()), static_cast<int>(p.tags.size())};
}

inline Layout addLayouts(Layout a, Layout b) { return {a.ng + b.ng, a.nv + b.nv, a.nt + b.nt}; }

inline RMat fullBasis(const std::function<RMat(const Point&)>& tangent, const Point& x) {
    if (tangent) return tangent(x);
    return RMat::Identity(tangentDim(x), tangentDim(x));
}

}  // namespace qsg::detail

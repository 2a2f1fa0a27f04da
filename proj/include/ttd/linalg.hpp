#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <stdexcept>

#include "tensor.hpp"

namespace ttd {

/// Thin SVD a = u * diag(s) * v^T with s nonincreasing, u/v orthonormal columns.
struct SvdResult {
    Matrix u;
    Vector s;
    Matrix v;

    Matrix reconstruct() const { return u * s.asDiagonal() * v.transpose(); }
};

/// Largest SVD input seen since the last reset. Test instrumentation for the
/// complexity contract of the non-convex solver loop.
struct SvdSizeStats {
    Index max_rows = 0;
    Index max_cols = 0;
    long long max_cells = 0;

    void note(Index r, Index c) {
        max_rows  = std::max(max_rows, r);
        max_cols  = std::max(max_cols, c);
        max_cells = std::max(max_cells, static_cast<long long>(r) * c);
    }
    void reset() { *this = {}; }
};

inline SvdSizeStats &svd_stats() {
    static thread_local SvdSizeStats stats;
    return stats;
}

inline SvdResult thin_svd(const Matrix &a) {
    if (!a.allFinite()) throw std::invalid_argument("thin_svd: non-finite input");
    svd_stats().note(a.rows(), a.cols());
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw std::runtime_error("thin_svd: decomposition did not converge");
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

/// Sum of singular values.
inline double trace_norm(const Matrix &a) { return thin_svd(a).s.sum(); }

/// Soft-thresholded SVD kept in factored form; value() is the SVT result.
struct SoftThresholded {
    Matrix u;
    Vector s; // already shrunk, still nonincreasing
    Matrix v;

    Matrix value() const { return u * s.asDiagonal() * v.transpose(); }
};

inline SoftThresholded svt_factored(const Matrix &a, double threshold) {
    if (threshold < 0) throw std::invalid_argument("svt: negative threshold");
    SvdResult r = thin_svd(a);
    return {std::move(r.u), (r.s.array() - threshold).max(0.0).matrix(), std::move(r.v)};
}

/// Proximal operator of the trace norm: argmin_Z threshold*||Z||_tr + 1/2||Z-a||_F^2.
inline Matrix svt(const Matrix &a, double threshold) {
    return svt_factored(a, threshold).value();
}

/// argmax_{U^T U = I} trace(U^T a), the orthogonal Procrustes solution u_hat * v_hat^T.
inline Matrix procrustes(const Matrix &a) {
    SvdResult r = thin_svd(a);
    return r.u * r.v.transpose();
}

/// Count of singular values at or above rel_tol times the largest (0 for the
/// zero matrix). rel_tol 0.01 is the library-wide numerical-rank rule.
inline Index numerical_rank(const Vector &s, double rel_tol = 0.01) {
    if (s.size() == 0 || s(0) <= 0) return 0;
    const double cut = rel_tol * s(0);
    Index r          = 0;
    while (r < s.size() && s(r) >= cut) ++r;
    return r;
}

inline Index numerical_rank(const Matrix &a, double rel_tol = 0.01) {
    return numerical_rank(thin_svd(a).s, rel_tol);
}

} // namespace ttd

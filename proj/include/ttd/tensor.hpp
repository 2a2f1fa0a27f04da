#pragma once

#include <Eigen/Dense>

#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ttd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index  = Eigen::Index;
using Dims   = std::vector<Index>;

inline Index dim_product(const Dims &dims) {
    Index p = 1;
    for (Index d : dims) p *= d;
    return p;
}

/// Dense N-way tensor with first-index-fastest linearization: entry
/// (i_1,...,i_N) (0-based) lives at offset sum_k i_k * prod_{m<k} I_m.
/// Mode-0 unfolding is therefore a plain reshape of the buffer.
/// Immutable-by-convention value type; all operations below are pure.
class Tensor {
  public:
    Tensor() = default;

    explicit Tensor(Dims dims) : dims_(std::move(dims)) {
        data_ = Vector::Zero(checked_size(dims_));
    }

    Tensor(Dims dims, Vector data) : dims_(std::move(dims)), data_(std::move(data)) {
        if (data_.size() != checked_size(dims_))
            throw std::invalid_argument("Tensor: buffer length does not match extents");
        if (!data_.allFinite())
            throw std::invalid_argument("Tensor: non-finite entries");
    }

    Index order() const { return static_cast<Index>(dims_.size()); }
    const Dims &dims() const { return dims_; }
    Index dim(Index n) const { return dims_.at(static_cast<std::size_t>(n)); }
    Index size() const { return data_.size(); }

    const Vector &data() const { return data_; }
    Vector &data() { return data_; }

    double operator[](Index linear) const { return data_(linear); }
    double &operator[](Index linear) { return data_(linear); }

    /// Element access by 0-based multi-index.
    double at(const Dims &idx) const { return data_(offset(idx)); }
    double &at(const Dims &idx) { return data_(offset(idx)); }

    Index offset(const Dims &idx) const {
        if (idx.size() != dims_.size())
            throw std::invalid_argument("Tensor::at: index order mismatch");
        Index off = 0, stride = 1;
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            if (idx[k] < 0 || idx[k] >= dims_[k])
                throw std::out_of_range("Tensor::at: index out of range");
            off += idx[k] * stride;
            stride *= dims_[k];
        }
        return off;
    }

    double norm() const { return data_.norm(); }

    friend bool operator==(const Tensor &a, const Tensor &b) {
        return a.dims_ == b.dims_ && a.data_ == b.data_;
    }

  private:
    static Index checked_size(const Dims &dims) {
        if (dims.empty()) throw std::invalid_argument("Tensor: order must be >= 1");
        Index p = 1;
        for (Index d : dims) {
            if (d < 1) throw std::invalid_argument("Tensor: extents must be >= 1");
            p *= d;
        }
        return p;
    }

    Dims dims_;
    Vector data_;
};

namespace detail {

inline void check_mode(const Tensor &t, Index mode, const char *who) {
    if (mode < 0 || mode >= t.order())
        throw std::invalid_argument(std::string(who) + ": mode out of range");
}

// Extents below / above `mode` in linearization order.
inline std::pair<Index, Index> split_extents(const Dims &dims, Index mode) {
    Index lo = 1, hi = 1;
    for (Index k = 0; k < static_cast<Index>(dims.size()); ++k) {
        if (k < mode) lo *= dims[k];
        if (k > mode) hi *= dims[k];
    }
    return {lo, hi};
}

} // namespace detail

/// Mode-n unfolding: rows indexed by mode n, columns by the remaining modes
/// with lower modes varying fastest (column j = sum_{k!=n} i_k * J_k).
inline Matrix unfold(const Tensor &t, Index mode) {
    detail::check_mode(t, mode, "unfold");
    const Index rows     = t.dim(mode);
    const auto [lo, hi]  = detail::split_extents(t.dims(), mode);
    Matrix m(rows, lo * hi);
    const double *src = t.data().data();
    using StridedMap  = Eigen::Map<const Matrix, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
    for (Index b = 0; b < hi; ++b)
        m.middleCols(b * lo, lo) =
            StridedMap(src + b * lo * rows, rows, lo,
                       Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(1, lo));
    return m;
}

/// Inverse of unfold: refold(unfold(t, n), n, t.dims()) == t bit-for-bit.
inline Tensor refold(const Matrix &m, Index mode, const Dims &dims) {
    if (mode < 0 || mode >= static_cast<Index>(dims.size()))
        throw std::invalid_argument("refold: mode out of range");
    const Index rows    = dims[static_cast<std::size_t>(mode)];
    const auto [lo, hi] = detail::split_extents(dims, mode);
    if (m.rows() != rows || m.cols() != lo * hi)
        throw std::invalid_argument("refold: matrix shape does not match extents");
    Tensor t(dims);
    double *dst      = t.data().data();
    using StridedMap = Eigen::Map<Matrix, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
    for (Index b = 0; b < hi; ++b)
        StridedMap(dst + b * lo * rows, rows, lo,
                   Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(1, lo)) =
            m.middleCols(b * lo, lo);
    return t;
}

/// n-mode product t x_n u: replaces extent I_n by u.rows().
inline Tensor mode_product(const Tensor &t, const Matrix &u, Index mode) {
    detail::check_mode(t, mode, "mode_product");
    if (u.cols() != t.dim(mode))
        throw std::invalid_argument("mode_product: matrix columns must equal mode extent");
    Dims nd                              = t.dims();
    nd[static_cast<std::size_t>(mode)]   = u.rows();
    return refold(u * unfold(t, mode), mode, nd);
}

inline Matrix kronecker(const Matrix &a, const Matrix &b) {
    Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return k;
}

inline double inner(const Tensor &a, const Tensor &b) {
    if (a.dims() != b.dims())
        throw std::invalid_argument("inner: extents mismatch");
    return a.data().dot(b.data());
}

inline double frob_norm(const Tensor &t) { return t.norm(); }

/// core x_1 factors[0] x_2 ... x_N factors[N-1].
inline Tensor compose(const Tensor &core, const std::vector<Matrix> &factors) {
    if (static_cast<Index>(factors.size()) != core.order())
        throw std::invalid_argument("compose: one factor per mode required");
    Tensor x = core;
    for (Index n = 0; n < core.order(); ++n)
        x = mode_product(x, factors[static_cast<std::size_t>(n)], n);
    return x;
}

/// t x_1 factors[0]^T x_2 ... : multilinear projection onto the factor columns.
inline Tensor project(const Tensor &t, const std::vector<Matrix> &factors) {
    if (static_cast<Index>(factors.size()) != t.order())
        throw std::invalid_argument("project: one factor per mode required");
    Tensor x = t;
    for (Index n = 0; n < t.order(); ++n)
        x = mode_product(x, factors[static_cast<std::size_t>(n)].transpose(), n);
    return x;
}

/// Like project, but leaves mode `skip` untouched.
inline Tensor project_except(const Tensor &t, const std::vector<Matrix> &factors, Index skip) {
    Tensor x = t;
    for (Index n = 0; n < t.order(); ++n)
        if (n != skip) x = mode_product(x, factors[static_cast<std::size_t>(n)].transpose(), n);
    return x;
}

} // namespace ttd

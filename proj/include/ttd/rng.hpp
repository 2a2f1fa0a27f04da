#pragma once

#include <cstdint>
#include <random>

#include "tensor.hpp"

namespace ttd {

/// splitmix64 step; used to derive independent sub-stream seeds so that the
/// draws for one purpose (noise, factors, outliers, ...) do not shift when
/// another purpose consumes a different amount of randomness.
inline std::uint64_t splitmix64(std::uint64_t &state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d33a2cab85a2d3ULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    for (std::uint64_t i = 0; i <= stream; ++i) s = splitmix64(s);
    return std::mt19937_64(s);
}

/// I.i.d. standard normal entries, filled column-major for reproducibility.
inline Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64 &eng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = normal(eng);
    return m;
}

/// Random matrix with orthonormal columns (QR of a Gaussian draw).
inline Matrix random_orthonormal(Index rows, Index cols, std::mt19937_64 &eng) {
    Matrix g = gaussian_matrix(rows, cols, eng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
    // Fix the sign convention so the result is a deterministic function of g.
    Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    for (Index j = 0; j < cols; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    return q;
}

} // namespace ttd

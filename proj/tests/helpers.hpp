#pragma once

#include "ttd/rng.hpp"
#include "ttd/tensor.hpp"

namespace ttdtest {

inline ttd::Tensor random_tensor(const ttd::Dims &dims, std::mt19937_64 &eng) {
    return ttd::Tensor(dims, ttd::gaussian_matrix(ttd::dim_product(dims), 1, eng).col(0));
}

/// Random orthonormal-factor Tucker model of the given dims/ranks.
inline std::pair<ttd::Tensor, std::vector<ttd::Matrix>> random_tucker(const ttd::Dims &dims,
                                                                      const ttd::Dims &ranks,
                                                                      std::mt19937_64 &eng) {
    ttd::Tensor core = random_tensor(ranks, eng);
    std::vector<ttd::Matrix> factors;
    for (std::size_t n = 0; n < dims.size(); ++n)
        factors.push_back(ttd::random_orthonormal(dims[n], ranks[n], eng));
    return {std::move(core), std::move(factors)};
}

} // namespace ttdtest

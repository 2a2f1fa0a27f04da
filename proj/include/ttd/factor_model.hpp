#pragma once

#include <stdexcept>
#include <vector>

#include "tensor.hpp"

namespace ttd {

/// Tucker model: core (R_1..R_N) plus one I_n x R_n factor matrix per mode.
struct FactorModel {
    Tensor core;
    std::vector<Matrix> factors;

    Dims input_dims() const {
        Dims d;
        d.reserve(factors.size());
        for (const Matrix &u : factors) d.push_back(u.rows());
        return d;
    }

    Dims ranks() const {
        Dims r;
        r.reserve(factors.size());
        for (const Matrix &u : factors) r.push_back(u.cols());
        return r;
    }

    Tensor reconstruct() const { return compose(core, factors); }

    /// Max column-orthonormality defect over all factors.
    double orthonormality_defect() const {
        double worst = 0;
        for (const Matrix &u : factors) {
            Matrix g = u.transpose() * u;
            worst    = std::max(worst, (g - Matrix::Identity(u.cols(), u.cols())).norm());
        }
        return worst;
    }
};

} // namespace ttd

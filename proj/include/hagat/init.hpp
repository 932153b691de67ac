#pragma once

#include <cmath>
#include <random>

#include "hagat/ad/ops.hpp"

namespace hagat {

/// Uniform on [-r, r] with r = sqrt(6 / (rows + cols)).
inline ad::Matrix glorot_uniform(Eigen::Index rows, Eigen::Index cols, ad::Rng& rng) {
    const double r = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> u(-r, r);
    ad::Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
    }
    return m;
}

}  // namespace hagat

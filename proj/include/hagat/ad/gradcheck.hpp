#pragma once

#include <functional>
#include <span>
#include <string>

#include "hagat/ad/tape.hpp"

namespace hagat::ad {

/// Builds a scalar objective on the given tape from the current parameter values.
using Objective = std::function<Value(Tape&)>;

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::string worst_parameter;
    Eigen::Index worst_row = 0;
    Eigen::Index worst_col = 0;
    double analytic = 0.0;
    double numeric = 0.0;
};

/// Compares backward gradients against central differences
/// (f(x+eps) - f(x-eps)) / 2eps on every coordinate of `params`. The relative
/// error is |a - n| / max(|a|, |n|, 1e-8). Parameter gradients are zeroed on
/// entry and hold the analytic gradient on return.
GradCheckResult finite_diff_check(const Objective& f, std::span<Parameter* const> params, double eps);

/// Same with one step per parameter, for coordinates whose scale makes a
/// common step meaningless (a value of 1e10 does not move under +-1e-5).
/// `steps` must be positive and aligned with `params`.
GradCheckResult finite_diff_check(const Objective& f, std::span<Parameter* const> params,
                                  std::span<const double> steps);

}  // namespace hagat::ad

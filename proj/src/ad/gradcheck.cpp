#include "hagat/ad/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hagat/errors.hpp"

namespace hagat::ad {
namespace {

double evaluate(const Objective& f) {
    Tape tape;
    const double v = f(tape).item();
    if (!std::isfinite(v)) throw NumericError("finite_diff_check: objective is not finite");
    return v;
}

}  // namespace

GradCheckResult finite_diff_check(const Objective& f, std::span<Parameter* const> params, double eps) {
    if (!(eps >= 1e-7 && eps <= 1e-3)) throw ParameterError("finite_diff_check: eps must lie in [1e-7, 1e-3]");
    const std::vector<double> steps(params.size(), eps);
    return finite_diff_check(f, params, steps);
}

GradCheckResult finite_diff_check(const Objective& f, std::span<Parameter* const> params,
                                  std::span<const double> steps) {
    if (steps.size() != params.size()) throw ParameterError("finite_diff_check: one step per parameter required");
    for (const double h : steps) {
        if (!(h > 0.0 && std::isfinite(h))) throw ParameterError("finite_diff_check: steps must be positive");
    }
    for (Parameter* p : params) p->zero_grad();
    {
        Tape tape;
        Value loss = f(tape);
        if (!std::isfinite(loss.item())) throw NumericError("finite_diff_check: objective is not finite");
        tape.backward(loss);
    }

    GradCheckResult result;
    for (std::size_t k = 0; k < params.size(); ++k) {
        Parameter* p = params[k];
        const double eps = steps[k];
        for (Eigen::Index r = 0; r < p->value.rows(); ++r) {
            for (Eigen::Index c = 0; c < p->value.cols(); ++c) {
                const double orig = p->value(r, c);
                p->value(r, c) = orig + eps;
                const double up = evaluate(f);
                p->value(r, c) = orig - eps;
                const double down = evaluate(f);
                p->value(r, c) = orig;
                const double numeric = (up - down) / (2.0 * eps);
                const double analytic = p->grad(r, c);
                const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
                const double rel = std::abs(analytic - numeric) / denom;
                if (result.worst_parameter.empty() || rel > result.max_rel_error) {
                    result = {rel, p->name, r, c, analytic, numeric};
                }
            }
        }
    }
    return result;
}

}  // namespace hagat::ad

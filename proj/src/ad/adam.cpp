#include "hagat/ad/adam.hpp"

#include <cmath>

#include "hagat/errors.hpp"

namespace hagat::ad {

void adam_step(std::span<Parameter* const> params, AdamState& state, const AdamOptions& opts) {
    if (state.m.empty() && state.step == 0) {
        for (Parameter* p : params) {
            state.m.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
            state.v.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
        }
    }
    if (state.m.size() != params.size()) throw ContractError("adam_step: state does not match parameter list");
    ++state.step;
    const double bc1 = 1.0 - std::pow(opts.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(opts.beta2, static_cast<double>(state.step));
    for (std::size_t k = 0; k < params.size(); ++k) {
        Parameter& p = *params[k];
        Matrix& m = state.m[k];
        Matrix& v = state.v[k];
        if (m.rows() != p.value.rows() || m.cols() != p.value.cols()) {
            throw ContractError("adam_step: moment shape mismatch for " + p.name);
        }
        Matrix g = p.grad;
        if (opts.weight_decay != 0.0 && p.decay) g += opts.weight_decay * p.value;
        m = opts.beta1 * m + (1.0 - opts.beta1) * g;
        v = opts.beta2 * v + (1.0 - opts.beta2) * g.cwiseProduct(g);
        p.value.array() -= opts.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + opts.eps);
    }
}

}  // namespace hagat::ad

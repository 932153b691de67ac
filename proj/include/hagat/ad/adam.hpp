#pragma once

#include <span>
#include <vector>

#include "hagat/ad/tape.hpp"

namespace hagat::ad {

struct AdamOptions {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;  // L2 term added to the gradient, skipped for Parameter::decay == false
};

struct AdamState {
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    long step = 0;
};

/// One bias-corrected Adam update over `params`, reading `Parameter::grad`.
/// `state` is sized on first use and must keep the same parameter order.
void adam_step(std::span<Parameter* const> params, AdamState& state, const AdamOptions& opts);

}  // namespace hagat::ad

#include "hagat/harness/train.hpp"

#include <chrono>
#include <cmath>

#include "hagat/ad/adam.hpp"
#include "hagat/errors.hpp"

namespace hagat::harness {

void TrainConfig::validate() const {
    if (max_epochs < 1) throw ParameterError("max_epochs must be at least 1");
    if (patience < 1 || patience > max_epochs) throw ParameterError("patience must lie in [1, max_epochs]");
    if (repeats < 1) throw ParameterError("repeats must be at least 1");
    if (!(lr >= 0.0)) throw ParameterError("lr must be non-negative");
    if (!(weight_decay >= 0.0)) throw ParameterError("weight_decay must be non-negative");
}

double accuracy(const ad::Matrix& logits, std::span<const std::int32_t> labels, const graph::Mask& mask) {
    std::size_t hit = 0, total = 0;
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        if (!mask[i]) continue;
        Eigen::Index best = 0;
        logits.row(i).maxCoeff(&best);
        hit += best == labels[i] ? 1 : 0;
        ++total;
    }
    return total ? static_cast<double>(hit) / static_cast<double>(total) : 0.0;
}

TrainResult train_once(const graph::Dataset& dataset, const GraphContext& ctx, const TrainConfig& cfg,
                       const graph::Splits& splits, std::uint64_t seed) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    TrainResult r;
    r.config = cfg.model.resolved(dataset.num_classes);

    ad::Rng rng(seed);
    std::optional<ad::Matrix> prior;
    if (r.config.variant == Variant::label) {
        const graph::Mask* known = r.config.prior_labels == PriorLabels::train ? &splits.train : nullptr;
        prior = build_label_prior(dataset.labels, dataset.num_classes, known);
    }
    ModelParams params = init_model(r.config, dataset.feature_dim(), dataset.num_classes, rng, std::move(prior));
    const std::vector<ad::Parameter*> list = params.parameters();
    ad::AdamState state;
    ad::AdamOptions opts;
    opts.lr = cfg.lr;
    opts.weight_decay = cfg.weight_decay;

    int since_best = 0;
    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        for (ad::Parameter* p : list) p->zero_grad();
        try {
            ad::Tape tape;
            const ForwardResult f = forward(dataset, ctx, r.config, params, true, rng, tape);
            const ad::Value loss = ad::masked_cross_entropy(f.logits, dataset.labels, splits.train);
            const double l = loss.item();
            if (!std::isfinite(l)) throw DivergenceError("loss became non-finite at epoch " + std::to_string(epoch), epoch);
            r.train_loss.push_back(l);
            tape.backward(loss);
        } catch (const NumericError& e) {
            throw DivergenceError(std::string(e.what()) + " at epoch " + std::to_string(epoch), epoch);
        }
        ad::adam_step(list, state, opts);
        for (const ad::Parameter* p : list) {
            if (!p->value.allFinite()) {
                throw DivergenceError(p->name + " became non-finite at epoch " + std::to_string(epoch), epoch);
            }
        }

        ad::Tape tape;
        ForwardResult f;
        try {
            f = forward(dataset, ctx, r.config, params, false, rng, tape);
        } catch (const NumericError& e) {
            throw DivergenceError(std::string(e.what()) + " at epoch " + std::to_string(epoch), epoch);
        }
        if (!f.logits.data().allFinite()) {
            throw DivergenceError("logits became non-finite at epoch " + std::to_string(epoch), epoch);
        }
        const double val = accuracy(f.logits.data(), dataset.labels, splits.val);
        const double test = accuracy(f.logits.data(), dataset.labels, splits.test);
        r.val_curve.push_back(val);
        r.test_curve.push_back(test);
        if (r.best_epoch < 0 || val > r.best_val) {
            r.best_epoch = epoch;
            r.best_val = val;
            r.test_acc = test;
            r.params = params;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace hagat::harness

#pragma once

#include <cstdint>
#include <vector>

#include "hagat/graph/splits.hpp"
#include "hagat/model.hpp"

namespace hagat::harness {

struct TrainConfig {
    int max_epochs = 1000;
    int patience = 200;
    double lr = 0.01;
    double weight_decay = 5e-4;
    std::uint64_t seed = 0;
    int repeats = 10;
    graph::SplitSpec split;
    ModelConfig model;  // model.dropout is the dropout rate

    /// Throws ParameterError on broken invariants (patience <= max_epochs, repeats >= 1, ...).
    void validate() const;
};

struct TrainResult {
    ModelConfig config;  // resolved
    ModelParams params;  // at the best validation epoch
    std::vector<double> train_loss;
    std::vector<double> val_curve;   // validation accuracy after each epoch's update
    std::vector<double> test_curve;  // test accuracy after each epoch's update
    int best_epoch = -1;
    double best_val = 0.0;
    double test_acc = 0.0;  // test_curve[best_epoch]
    double seconds = 0.0;
};

double accuracy(const ad::Matrix& logits, std::span<const std::int32_t> labels, const graph::Mask& mask);

/// Full-batch training with Adam and early stopping on validation accuracy.
/// The first epoch reaching the maximum validation accuracy wins. Training
/// stops after `patience` epochs without improvement. Throws DivergenceError
/// carrying the epoch when the loss, the parameters or the logits stop being
/// finite.
TrainResult train_once(const graph::Dataset& dataset, const GraphContext& ctx, const TrainConfig& cfg,
                       const graph::Splits& splits, std::uint64_t seed);

}  // namespace hagat::harness

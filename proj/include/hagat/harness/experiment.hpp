#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hagat/harness/train.hpp"

namespace hagat::harness {

/// One layer's scaled pattern and self-loop weight.
struct Lap {
    ad::Matrix pattern;
    double self = 0.0;
};

std::vector<Lap> extract_laps(const ModelConfig& config, const ModelParams& params);

struct RepeatResult {
    std::uint64_t seed = 0;
    bool diverged = false;
    std::string error;      // set when diverged
    int failed_epoch = -1;  // set when diverged
    double test_acc = 0.0;
    double best_val = 0.0;
    int best_epoch = -1;
    int epochs = 0;
    double seconds = 0.0;
    std::vector<Lap> laps;
    std::vector<double> categories;  // column sums of S
    ad::Matrix preference;           // overall heterophily preference
    std::optional<TrainResult> result;  // kept when requested
};

struct RunReport {
    std::vector<RepeatResult> repeats;
    int completed = 0;  // repeats that did not diverge
    double mean_test = 0.0;
    double std_test = 0.0;  // population standard deviation
    double mean_val = 0.0;
    double wall_seconds = 0.0;
    bool flagged = false;  // some repeat diverged
};

/// Calls fn(0..n-1) on up to `jobs` threads. The first exception thrown is
/// rethrown after every worker finishes.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Repeat k trains with seed cfg.seed + k on a split drawn with that seed
/// (random modes) or on the shipped split. Divergent repeats are recorded,
/// excluded from the statistics and flag the report.
RunReport run_experiment(const graph::Dataset& dataset, const TrainConfig& cfg, int jobs = 1,
                         bool keep_results = false);

struct Grid {
    std::vector<double> lr{0.01, 0.005};
    std::vector<double> weight_decay{5e-4, 5e-5};
    std::vector<double> dropout{0.5, 0.6};
    std::vector<double> lambda{0.1, 1.0, 10.0};
};

struct GridCell {
    double lr = 0.0;
    double weight_decay = 0.0;
    double dropout = 0.0;
    double lambda = 0.0;
    bool diverged = false;
    double mean_val = 0.0;  // 0 when diverged
    double mean_test = 0.0;
    double std_test = 0.0;
};

struct GridResult {
    std::vector<GridCell> cells;  // in iteration order lr, weight_decay, dropout, lambda
    std::size_t best = 0;
    TrainConfig best_config;
};

/// Runs every cell with `base` otherwise unchanged. The best cell has the
/// highest mean validation accuracy; ties go to lower weight decay, then lower
/// learning rate, then the earlier cell. Divergent cells score 0 and are only
/// chosen when every cell diverged. Throws ParameterError on an empty grid.
GridResult grid_search(const graph::Dataset& dataset, const TrainConfig& base, const Grid& grid, int jobs = 1);

}  // namespace hagat::harness

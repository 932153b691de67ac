#include "hagat/harness/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "hagat/errors.hpp"

namespace hagat::harness {

std::vector<Lap> extract_laps(const ModelConfig& config, const ModelParams& params) {
    std::vector<Lap> out;
    if (!uses_pattern(config.variant)) return out;
    for (const auto& l : params.layers) {
        const double lambda = l.pattern.lambda;
        out.push_back({phi(l.pattern.omega.value, lambda, config.norm), phi(l.pattern.omega_sl.value, lambda, config.norm)(0, 0)});
    }
    return out;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!first) first = std::current_exception();
                    next = n;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

namespace {

RepeatResult run_repeat(const graph::Dataset& dataset, const GraphContext& ctx, const TrainConfig& cfg,
                        std::uint64_t seed, bool keep) {
    RepeatResult rr;
    rr.seed = seed;
    graph::SplitSpec spec = cfg.split;
    spec.seed = seed;
    const graph::Splits splits = graph::make_splits(dataset, spec);
    try {
        TrainResult t = train_once(dataset, ctx, cfg, splits, seed);
        rr.test_acc = t.test_acc;
        rr.best_val = t.best_val;
        rr.best_epoch = t.best_epoch;
        rr.epochs = static_cast<int>(t.val_curve.size());
        rr.seconds = t.seconds;
        rr.laps = extract_laps(t.config, t.params);
        if (uses_pattern(t.config.variant)) {
            const ad::Matrix s = infer_distribution(dataset, ctx, t.config, t.params);
            rr.categories = overall_categories(s);
            rr.preference = overall_preference(s, dataset.graph);
        }
        if (keep) rr.result = std::move(t);
    } catch (const DivergenceError& e) {
        rr.diverged = true;
        rr.error = e.what();
        rr.failed_epoch = e.epoch;
    } catch (const DegenerateWeightsError& e) {
        rr.diverged = true;
        rr.error = e.what();
    }
    return rr;
}

}  // namespace

RunReport run_experiment(const graph::Dataset& dataset, const TrainConfig& cfg, int jobs, bool keep_results) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const GraphContext ctx = make_context(dataset);
    RunReport report;
    report.repeats.resize(static_cast<std::size_t>(cfg.repeats));
    parallel_for(report.repeats.size(), jobs, [&](std::size_t k) {
        report.repeats[k] = run_repeat(dataset, ctx, cfg, cfg.seed + k, keep_results);
    });
    double sum = 0.0, sum_val = 0.0;
    for (const auto& r : report.repeats) {
        if (r.diverged) {
            report.flagged = true;
            continue;
        }
        ++report.completed;
        sum += r.test_acc;
        sum_val += r.best_val;
    }
    if (report.completed > 0) {
        report.mean_test = sum / report.completed;
        report.mean_val = sum_val / report.completed;
        double sq = 0.0;
        for (const auto& r : report.repeats) {
            if (!r.diverged) sq += (r.test_acc - report.mean_test) * (r.test_acc - report.mean_test);
        }
        report.std_test = std::sqrt(sq / report.completed);
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

GridResult grid_search(const graph::Dataset& dataset, const TrainConfig& base, const Grid& grid, int jobs) {
    if (grid.lr.empty() || grid.weight_decay.empty() || grid.dropout.empty() || grid.lambda.empty()) {
        throw ParameterError("grid_search: every axis needs at least one value");
    }
    base.validate();
    std::vector<TrainConfig> configs;
    GridResult out;
    for (double lr : grid.lr) {
        for (double wd : grid.weight_decay) {
            for (double dp : grid.dropout) {
                for (double lam : grid.lambda) {
                    TrainConfig c = base;
                    c.lr = lr;
                    c.weight_decay = wd;
                    c.model.dropout = dp;
                    c.model.lambda = lam;
                    configs.push_back(c);
                    out.cells.push_back({lr, wd, dp, lam});
                }
            }
        }
    }

    const GraphContext ctx = make_context(dataset);
    const std::size_t reps = static_cast<std::size_t>(base.repeats);
    std::vector<RepeatResult> runs(configs.size() * reps);
    parallel_for(runs.size(), jobs, [&](std::size_t k) {
        const TrainConfig& c = configs[k / reps];
        runs[k] = run_repeat(dataset, ctx, c, c.seed + k % reps, false);
    });

    for (std::size_t c = 0; c < configs.size(); ++c) {
        GridCell& cell = out.cells[c];
        double val = 0.0, test = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            const RepeatResult& rr = runs[c * reps + r];
            cell.diverged = cell.diverged || rr.diverged;
            val += rr.best_val;
            test += rr.test_acc;
        }
        if (cell.diverged) continue;
        cell.mean_val = val / reps;
        cell.mean_test = test / reps;
        double sq = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            const double d = runs[c * reps + r].test_acc - cell.mean_test;
            sq += d * d;
        }
        cell.std_test = std::sqrt(sq / reps);
    }

    auto better = [](const GridCell& a, const GridCell& b) {
        if (a.diverged != b.diverged) return !a.diverged;
        if (a.mean_val != b.mean_val) return a.mean_val > b.mean_val;
        if (a.weight_decay != b.weight_decay) return a.weight_decay < b.weight_decay;
        return a.lr < b.lr;
    };
    for (std::size_t c = 1; c < out.cells.size(); ++c) {
        if (better(out.cells[c], out.cells[out.best])) out.best = c;
    }
    out.best_config = configs[out.best];
    return out;
}

}  // namespace hagat::harness

#include "hagat/graph/splits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hagat/errors.hpp"

namespace hagat::graph {

SplitSpec SplitSpec::supervised(std::uint64_t seed) { return {SplitMode::supervised, 0.6, 0.2, 0.2, seed, 100}; }

SplitSpec SplitSpec::semi_supervised(std::uint64_t seed) {
    return {SplitMode::semi_supervised, 0.1, 0.1, 0.8, seed, 100};
}

SplitSpec SplitSpec::fixed_public() { return {SplitMode::fixed_public, 0.0, 0.0, 0.0, 0, 0}; }

SplitMode parse_split_mode(const std::string& s) {
    if (s == "supervised") return SplitMode::supervised;
    if (s == "semi" || s == "semi_supervised") return SplitMode::semi_supervised;
    if (s == "public" || s == "fixed_public") return SplitMode::fixed_public;
    throw ParameterError("unknown split mode '" + s + "'");
}

std::string to_string(SplitMode m) {
    switch (m) {
        case SplitMode::supervised: return "supervised";
        case SplitMode::semi_supervised: return "semi";
        case SplitMode::fixed_public: return "public";
    }
    return "?";
}

Splits make_splits(const Dataset& ds, const SplitSpec& spec) {
    const auto n = static_cast<std::size_t>(ds.num_nodes());
    if (spec.mode == SplitMode::fixed_public) {
        if (!ds.public_split) throw SplitError("dataset '" + ds.name + "' ships no split files");
        return *ds.public_split;
    }
    if (spec.train <= 0.0 || spec.val < 0.0 || spec.test < 0.0 ||
        std::abs(spec.train + spec.val + spec.test - 1.0) > 1e-9) {
        throw ParameterError("split fractions must be non-negative and sum to 1");
    }
    const auto n_train = static_cast<std::size_t>(std::floor(spec.train * static_cast<double>(n) + 1e-9));
    const auto n_val = static_cast<std::size_t>(std::floor(spec.val * static_cast<double>(n) + 1e-9));

    std::mt19937_64 rng(spec.seed);
    std::vector<NodeId> order(n);
    for (int attempt = 0; attempt <= spec.max_retries; ++attempt) {
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        Splits s{Mask(n, 0), Mask(n, 0), Mask(n, 0)};
        std::vector<std::uint8_t> present(ds.num_classes, 0);
        for (std::size_t k = 0; k < n; ++k) {
            const NodeId v = order[k];
            if (k < n_train) {
                s.train[v] = 1;
                present[ds.labels[v]] = 1;
            } else if (k < n_train + n_val) {
                s.val[v] = 1;
            } else {
                s.test[v] = 1;
            }
        }
        if (std::all_of(present.begin(), present.end(), [](auto p) { return p != 0; })) return s;
    }
    throw SplitError("could not place every class in the training split after " +
                     std::to_string(spec.max_retries) + " retries");
}

}  // namespace hagat::graph

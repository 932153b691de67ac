#pragma once

#include <cstdint>
#include <string>

#include "hagat/graph/dataset.hpp"

namespace hagat::graph {

enum class SplitMode { supervised, semi_supervised, fixed_public };

struct SplitSpec {
    SplitMode mode = SplitMode::supervised;
    double train = 0.6;
    double val = 0.2;
    double test = 0.2;
    std::uint64_t seed = 0;
    int max_retries = 100;

    /// 60/20/20 random per run.
    static SplitSpec supervised(std::uint64_t seed);
    /// 10/10/80 random per run.
    static SplitSpec semi_supervised(std::uint64_t seed);
    /// Masks shipped with the dataset.
    static SplitSpec fixed_public();
};

SplitMode parse_split_mode(const std::string& s);
std::string to_string(SplitMode m);

/// Random modes shuffle node ids and cut floor(train*N), floor(val*N), rest.
/// A random split whose training part misses a class is redrawn up to
/// `max_retries` times before SplitError.
Splits make_splits(const Dataset& ds, const SplitSpec& spec);

}  // namespace hagat::graph

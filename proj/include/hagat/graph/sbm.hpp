#pragma once

#include <cstdint>

#include "hagat/graph/dataset.hpp"

namespace hagat::graph {

/// Gaussian class-mean features: each class gets a mean vector drawn from
/// N(0, separation^2 I); a node's features are its class mean plus N(0, noise^2 I).
struct FeatureModel {
    int dim = 16;
    double separation = 1.0;
    double noise = 1.0;
};

/// Stochastic block model with `num_classes` blocks of `n_per_class` nodes.
/// Each unordered pair is linked independently with probability p_in (same
/// block) or p_out (different blocks). Node i belongs to block i / n_per_class.
/// Isolated nodes are kept.
Dataset sbm_generate(int n_per_class, int num_classes, double p_in, double p_out, const FeatureModel& features,
                     std::uint64_t seed);

/// p_in / (p_in + (C-1) p_out), the large-n expectation of the homophily
/// ratio for balanced blocks.
double sbm_expected_homophily(int num_classes, double p_in, double p_out);

}  // namespace hagat::graph

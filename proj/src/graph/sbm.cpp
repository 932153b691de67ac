#include "hagat/graph/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hagat/errors.hpp"

namespace hagat::graph {
namespace {

// Visits the successes of a Bernoulli(p) sequence of length `len` by
// geometric skipping, so sparse blocks cost O(successes).
template <typename F>
void bernoulli_hits(std::int64_t len, double p, std::mt19937_64& rng, F&& on_hit) {
    if (p <= 0.0 || len <= 0) return;
    if (p >= 1.0) {
        for (std::int64_t k = 0; k < len; ++k) on_hit(k);
        return;
    }
    std::geometric_distribution<std::int64_t> skip(p);
    for (std::int64_t k = skip(rng); k < len; k += 1 + skip(rng)) on_hit(k);
}

}  // namespace

Dataset sbm_generate(int n_per_class, int num_classes, double p_in, double p_out, const FeatureModel& features,
                     std::uint64_t seed) {
    if (n_per_class < 1 || num_classes < 1) throw ParameterError("sbm_generate: block sizes must be positive");
    if (!(p_in >= 0.0 && p_in <= 1.0 && p_out >= 0.0 && p_out <= 1.0)) {
        throw ParameterError("sbm_generate: probabilities must lie in [0, 1]");
    }
    if (features.dim < 1) throw ParameterError("sbm_generate: feature dimension must be positive");

    const NodeId n = n_per_class * num_classes;
    std::mt19937_64 rng(seed);

    Dataset ds;
    ds.name = "sbm";
    ds.num_classes = num_classes;
    ds.labels.resize(n);
    for (NodeId i = 0; i < n; ++i) ds.labels[i] = i / n_per_class;

    // Row i pairs with columns i+1..n-1; walk each row block-wise so the
    // probability is constant over a run.
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i < n; ++i) {
        for (int b = 0; b < num_classes; ++b) {
            const NodeId lo = std::max<NodeId>(i + 1, b * n_per_class);
            const NodeId hi = (b + 1) * n_per_class;
            if (lo >= hi) continue;
            const double p = ds.labels[i] == b ? p_in : p_out;
            bernoulli_hits(hi - lo, p, rng, [&](std::int64_t k) { edges.emplace_back(i, lo + static_cast<NodeId>(k)); });
        }
    }
    ds.source_edge_count = static_cast<EdgeIndex>(edges.size());
    ds.graph = SparseGraph::from_edges(n, edges, true);

    std::normal_distribution<double> gauss(0.0, 1.0);
    ad::Matrix means(num_classes, features.dim);
    for (Eigen::Index c = 0; c < means.rows(); ++c) {
        for (Eigen::Index k = 0; k < means.cols(); ++k) means(c, k) = features.separation * gauss(rng);
    }
    ds.features.resize(n, features.dim);
    for (NodeId i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < features.dim; ++k) {
            ds.features(i, k) = means(ds.labels[i], k) + features.noise * gauss(rng);
        }
    }
    return ds;
}

double sbm_expected_homophily(int num_classes, double p_in, double p_out) {
    const double denom = p_in + (num_classes - 1) * p_out;
    if (denom <= 0.0) throw UndefinedMeasureError("sbm_expected_homophily: no edges expected");
    return p_in / denom;
}

}  // namespace hagat::graph

#pragma once

#include <random>
#include <utility>
#include <vector>

#include "hagat/ad/ops.hpp"
#include "hagat/graph/dataset.hpp"

namespace hagat::test {

inline ad::Matrix uniform(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double lo = -1.0,
                          double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    ad::Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
    return m;
}

inline graph::SparseGraph undirected(graph::NodeId n, std::vector<std::pair<graph::NodeId, graph::NodeId>> edges) {
    return graph::SparseGraph::from_edges(n, edges, true);
}

inline graph::SparseGraph path(graph::NodeId n) {
    std::vector<std::pair<graph::NodeId, graph::NodeId>> e;
    for (graph::NodeId i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return undirected(n, e);
}

/// Dense adjacency of a graph (no self-loops).
inline ad::Matrix dense_adjacency(const graph::SparseGraph& g) {
    ad::Matrix a = ad::Matrix::Zero(g.num_nodes(), g.num_nodes());
    for (const auto& [u, v] : g.edges()) a(u, v) = 1.0;
    return a;
}

/// D^-1/2 (A + I) D^-1/2 computed densely.
inline ad::Matrix dense_normalized(const graph::SparseGraph& g) {
    ad::Matrix a = dense_adjacency(g) + ad::Matrix::Identity(g.num_nodes(), g.num_nodes());
    const Eigen::VectorXd d = a.rowwise().sum();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) /= std::sqrt(d(i) * d(j));
    }
    return a;
}

inline ad::Matrix dense(const graph::CsrMatrix& m) {
    ad::Matrix out = ad::Matrix::Zero(m.rows, m.cols);
    for (std::int64_t i = 0; i < m.rows; ++i) {
        for (auto e = m.offsets[i]; e < m.offsets[i + 1]; ++e) out(i, m.indices[e]) += m.values[e];
    }
    return out;
}

inline ad::Matrix row_softmax(const ad::Matrix& x) {
    ad::Matrix out = x;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double m = x.row(i).maxCoeff();
        double z = 0.0;
        for (Eigen::Index j = 0; j < x.cols(); ++j) z += std::exp(x(i, j) - m);
        for (Eigen::Index j = 0; j < x.cols(); ++j) out(i, j) = std::exp(x(i, j) - m) / z;
    }
    return out;
}

/// Finite-difference steps for model parameters: `eps` everywhere except the
/// parsing patterns, which enter the forward pass only through lambda * omega
/// and therefore get eps / lambda so the scaled value moves by eps.
inline std::vector<double> model_steps(const std::vector<ad::Parameter*>& params, double lambda, double eps) {
    std::vector<double> out;
    for (const ad::Parameter* p : params) {
        const bool pattern = p->name.ends_with(".omega") || p->name.ends_with(".omega_sl");
        out.push_back(pattern ? eps / lambda : eps);
    }
    return out;
}

}  // namespace hagat::test

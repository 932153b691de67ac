#pragma once

#include <string>
#include <vector>

#include "hagat/ad/ops.hpp"
#include "hagat/graph/csr.hpp"

namespace hagat {

enum class NormScheme { neighbor, mean, gcn, softmax };

NormScheme parse_norm(const std::string& s);
std::string to_string(NormScheme n);

/// Learnable t x t scoring table for (source category, target category) edge
/// types plus a self-loop score, one per layer. Both start at 1/lambda so the
/// scaled pattern is all ones. lambda > 0.
struct ParsingPattern {
    ad::Parameter omega;     // t x t
    ad::Parameter omega_sl;  // 1 x 1
    double lambda = 1.0;

    int categories() const { return static_cast<int>(omega.value.rows()); }
    std::vector<ad::Parameter*> parameters() { return {&omega, &omega_sl}; }
};

/// Parsing parameters are exempt from weight decay.
ParsingPattern init_pattern(int categories, double lambda, const std::string& prefix);

/// max(lambda * raw, 0) element-wise; lambda * raw under the softmax scheme.
ad::Value phi(const ad::Value& raw, double lambda, NormScheme scheme);
ad::Matrix phi(const ad::Matrix& raw, double lambda, NormScheme scheme);

/// w(e) = s_src(e)^T P s_dst(e) for every stored edge, as an E x 1 column.
ad::Value edge_weights(const ad::Value& s, const ad::Value& p, const graph::SparseGraph& graph);

/// The scalar self-loop weight repeated for all nodes, N x 1.
ad::Value self_loop_weights(const ad::Value& p_sl, graph::NodeId num_nodes);

struct Coefficients {
    ad::Value edge;  // E x 1, aligned with graph.col_indices()
    ad::Value self;  // N x 1
};

/// Turns raw weights into aggregation coefficients. With D_n = w_nn + sum of
/// w_nk over the stored edges of n:
///   neighbor  w_ij / D_j      mean  w_ij / D_i      gcn  w_ij / sqrt(D_i D_j)
///   softmax   exp(w_ij) / (exp(w_ii) + sum_k exp(w_ik))
/// Self coefficients use D_i. Throws DegenerateWeightsError when some D_n <= 0
/// and NumericError when some D_n is not finite.
Coefficients normalize(const ad::Value& w, const ad::Value& w_self, const graph::SparseGraph& graph,
                       NormScheme scheme);

/// The graph's structure as a CSR matrix with unit values.
graph::CsrMatrix structure(const graph::SparseGraph& graph);

/// sum over j in N(i) of alpha_ij t_j plus alpha_ii t_i for an already
/// transformed input t = H Theta, followed by ReLU when `activation`.
ad::Value propagate(const Coefficients& alpha, const graph::CsrMatrix& pattern, const ad::Value& transformed,
                    bool activation);

/// sum over j in N(i) of alpha_ij (H Theta)_j plus alpha_ii (H Theta)_i,
/// followed by ReLU when `activation`. `pattern` is structure(graph).
ad::Value aggregate(const Coefficients& alpha, const graph::CsrMatrix& pattern, const ad::Value& h,
                    const ad::Value& theta, bool activation);

}  // namespace hagat

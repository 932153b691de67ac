#include "hagat/attention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hagat/errors.hpp"

namespace hagat {

NormScheme parse_norm(const std::string& s) {
    if (s == "neighbor") return NormScheme::neighbor;
    if (s == "mean") return NormScheme::mean;
    if (s == "gcn") return NormScheme::gcn;
    if (s == "softmax") return NormScheme::softmax;
    throw ParameterError("unknown norm '" + s + "' (expected neighbor, mean, gcn or softmax)");
}

std::string to_string(NormScheme n) {
    switch (n) {
        case NormScheme::neighbor: return "neighbor";
        case NormScheme::mean: return "mean";
        case NormScheme::gcn: return "gcn";
        case NormScheme::softmax: return "softmax";
    }
    return "?";
}

ParsingPattern init_pattern(int categories, double lambda, const std::string& prefix) {
    if (categories < 1) throw ParameterError("parsing pattern needs at least one category");
    if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
    ParsingPattern p;
    p.omega = ad::Parameter(prefix + ".omega", ad::Matrix::Constant(categories, categories, 1.0 / lambda), false);
    p.omega_sl = ad::Parameter(prefix + ".omega_sl", ad::Matrix::Constant(1, 1, 1.0 / lambda), false);
    p.lambda = lambda;
    return p;
}

ad::Value phi(const ad::Value& raw, double lambda, NormScheme scheme) {
    const ad::Value scaled = ad::scale(raw, lambda);
    return scheme == NormScheme::softmax ? scaled : ad::relu(scaled);
}

ad::Matrix phi(const ad::Matrix& raw, double lambda, NormScheme scheme) {
    ad::Matrix out = lambda * raw;
    if (scheme != NormScheme::softmax) out = out.cwiseMax(0.0);
    return out;
}

ad::Value edge_weights(const ad::Value& s, const ad::Value& p, const graph::SparseGraph& graph) {
    if (p.rows() != p.cols() || s.cols() != p.rows()) {
        throw ParameterError("edge_weights: S has " + std::to_string(s.cols()) + " categories, pattern is " +
                             std::to_string(p.rows()) + "x" + std::to_string(p.cols()));
    }
    if (s.rows() != graph.num_nodes()) throw DimensionError("edge_weights: S rows do not match node count");
    const ad::Value q = ad::matmul(s, p);
    return ad::edge_dot(q, s, graph.edge_rows(), graph.col_indices());
}

ad::Value self_loop_weights(const ad::Value& p_sl, graph::NodeId num_nodes) {
    return ad::broadcast(p_sl, num_nodes, 1);
}

namespace {

void require_positive(const ad::Matrix& d) {
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        if (std::isnan(d(i, 0)) || std::isinf(d(i, 0))) {
            throw NumericError("node " + std::to_string(i) + " has a non-finite weighted degree");
        }
        if (!(d(i, 0) > 0.0)) {
            throw DegenerateWeightsError("node " + std::to_string(i) + " has a non-positive weighted degree (" +
                                             std::to_string(d(i, 0)) + ")",
                                         static_cast<long>(i));
        }
    }
}

}  // namespace

Coefficients normalize(const ad::Value& w, const ad::Value& w_self, const graph::SparseGraph& graph,
                       NormScheme scheme) {
    const auto n = graph.num_nodes();
    if (w.rows() != graph.num_edges() || w.cols() != 1) throw DimensionError("normalize: edge weights must be E x 1");
    if (w_self.rows() != n || w_self.cols() != 1) throw DimensionError("normalize: self weights must be N x 1");
    const auto& src = graph.edge_rows();
    const auto& dst = graph.col_indices();
    const auto& offsets = graph.row_offsets();
    ad::Tape& tape = *w.tape();

    if (scheme == NormScheme::softmax) {
        // A constant per-row shift leaves the ratios unchanged.
        const ad::Matrix& we = w.data();
        const ad::Matrix& ws = w_self.data();
        ad::Matrix shift(n, 1);
        ad::Matrix edge_shift(graph.num_edges(), 1);
        for (graph::NodeId i = 0; i < n; ++i) {
            double m = ws(i, 0);
            for (auto e = offsets[i]; e < offsets[i + 1]; ++e) m = std::max(m, we(e, 0));
            shift(i, 0) = m;
            for (auto e = offsets[i]; e < offsets[i + 1]; ++e) edge_shift(e, 0) = m;
        }
        const ad::Value e_edge = ad::exp(ad::sub(w, tape.constant(std::move(edge_shift))));
        const ad::Value e_self = ad::exp(ad::sub(w_self, tape.constant(std::move(shift))));
        const ad::Value z = ad::add(e_self, ad::segment_sum(e_edge, offsets));
        return {ad::div(e_edge, ad::gather_rows(z, src)), ad::div(e_self, z)};
    }

    const ad::Value deg = ad::add(w_self, ad::segment_sum(w, offsets));
    require_positive(deg.data());
    ad::Value edge;
    switch (scheme) {
        case NormScheme::neighbor: edge = ad::div(w, ad::gather_rows(deg, dst)); break;
        case NormScheme::mean: edge = ad::div(w, ad::gather_rows(deg, src)); break;
        default:
            edge = ad::div(w, ad::sqrt(ad::mul(ad::gather_rows(deg, src), ad::gather_rows(deg, dst))));
    }
    return {edge, ad::div(w_self, deg)};
}

graph::CsrMatrix structure(const graph::SparseGraph& graph) {
    graph::CsrMatrix m;
    m.rows = m.cols = graph.num_nodes();
    m.offsets = graph.row_offsets();
    m.indices = graph.col_indices();
    m.values.assign(m.indices.size(), 1.0);
    return m;
}

ad::Value propagate(const Coefficients& alpha, const graph::CsrMatrix& pattern, const ad::Value& ht,
                    bool activation) {
    if (pattern.rows != ht.rows() || alpha.self.rows() != ht.rows()) {
        throw DimensionError("propagate: coefficient and feature row counts differ");
    }
    const ad::Value out = ad::add(ad::spmm(pattern, alpha.edge, ht), ad::row_scale(ht, alpha.self));
    return activation ? ad::relu(out) : out;
}

ad::Value aggregate(const Coefficients& alpha, const graph::CsrMatrix& pattern, const ad::Value& h,
                    const ad::Value& theta, bool activation) {
    return propagate(alpha, pattern, ad::matmul(h, theta), activation);
}

}  // namespace hagat

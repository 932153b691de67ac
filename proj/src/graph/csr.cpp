#include "hagat/graph/csr.hpp"

#include <algorithm>
#include <string>

#include "hagat/errors.hpp"

namespace hagat::graph {

CsrMatrix CsrMatrix::identity(std::int64_t n) {
    CsrMatrix m;
    m.rows = n;
    m.cols = n;
    m.offsets.resize(n + 1);
    m.indices.resize(n);
    m.values.assign(n, 1.0);
    for (std::int64_t i = 0; i <= n; ++i) m.offsets[i] = i;
    for (std::int64_t i = 0; i < n; ++i) m.indices[i] = static_cast<NodeId>(i);
    return m;
}

SparseGraph SparseGraph::from_edges(NodeId num_nodes, std::span<const std::pair<NodeId, NodeId>> edges,
                                    bool symmetrize) {
    if (num_nodes < 0) throw ParameterError("negative node count");
    std::vector<std::pair<NodeId, NodeId>> list;
    list.reserve(symmetrize ? 2 * edges.size() : edges.size());
    for (const auto& [u, v] : edges) {
        if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes) {
            throw DataError("edge endpoint out of range: (" + std::to_string(u) + ", " + std::to_string(v) +
                            ") with " + std::to_string(num_nodes) + " nodes");
        }
        if (u == v) continue;
        list.emplace_back(u, v);
        if (symmetrize) list.emplace_back(v, u);
    }
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());

    SparseGraph g;
    g.num_nodes_ = num_nodes;
    g.row_offsets_.assign(num_nodes + 1, 0);
    g.col_indices_.reserve(list.size());
    for (const auto& [u, v] : list) {
        ++g.row_offsets_[u + 1];
        g.col_indices_.push_back(v);
    }
    for (NodeId i = 0; i < num_nodes; ++i) g.row_offsets_[i + 1] += g.row_offsets_[i];
    g.undirected_ = symmetrize;
    if (!symmetrize) {
        // A directed list may already be symmetric.
        bool sym = true;
        for (const auto& [u, v] : list) {
            if (!std::binary_search(list.begin(), list.end(), std::make_pair(v, u))) {
                sym = false;
                break;
            }
        }
        g.undirected_ = sym;
    }
    g.build_edge_rows();
    return g;
}

SparseGraph SparseGraph::from_csr(NodeId num_nodes, std::vector<EdgeIndex> row_offsets,
                                  std::vector<NodeId> col_indices, bool undirected,
                                  std::optional<std::vector<double>> edge_weights) {
    if (row_offsets.size() != static_cast<std::size_t>(num_nodes) + 1 || row_offsets.front() != 0 ||
        row_offsets.back() != static_cast<EdgeIndex>(col_indices.size())) {
        throw DataError("inconsistent CSR offsets");
    }
    if (edge_weights && edge_weights->size() != col_indices.size()) {
        throw DataError("edge weight count does not match edge count");
    }
    for (NodeId i = 0; i < num_nodes; ++i) {
        if (row_offsets[i + 1] < row_offsets[i]) throw DataError("CSR offsets not monotone");
        for (EdgeIndex e = row_offsets[i]; e < row_offsets[i + 1]; ++e) {
            const NodeId j = col_indices[e];
            if (j < 0 || j >= num_nodes) throw DataError("CSR column out of range");
            if (j == i) throw DataError("self-loop stored in edge list at node " + std::to_string(i));
            if (e > row_offsets[i] && col_indices[e - 1] >= j) {
                throw DataError("CSR columns unsorted or duplicated in row " + std::to_string(i));
            }
        }
    }
    SparseGraph g;
    g.num_nodes_ = num_nodes;
    g.row_offsets_ = std::move(row_offsets);
    g.col_indices_ = std::move(col_indices);
    g.edge_weights_ = std::move(edge_weights);
    g.undirected_ = undirected;
    g.build_edge_rows();
    if (undirected) {
        for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
            if (!g.has_edge(g.col_indices_[e], g.edge_rows_[e])) {
                throw DataError("graph flagged undirected but edge is missing its reverse");
            }
        }
    }
    return g;
}

void SparseGraph::build_edge_rows() {
    edge_rows_.resize(col_indices_.size());
    for (NodeId i = 0; i < num_nodes_; ++i) {
        for (EdgeIndex e = row_offsets_[i]; e < row_offsets_[i + 1]; ++e) edge_rows_[e] = i;
    }
}

std::span<const NodeId> SparseGraph::neighbors(NodeId i) const {
    return {col_indices_.data() + row_offsets_[i], static_cast<std::size_t>(degree(i))};
}

bool SparseGraph::has_edge(NodeId i, NodeId j) const {
    const auto row = neighbors(i);
    return std::binary_search(row.begin(), row.end(), j);
}

std::vector<std::pair<NodeId, NodeId>> SparseGraph::edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(col_indices_.size());
    for (EdgeIndex e = 0; e < num_edges(); ++e) out.emplace_back(edge_rows_[e], col_indices_[e]);
    return out;
}

SparseGraph SparseGraph::symmetrized() const {
    if (undirected_) return *this;
    const auto list = edges();
    return from_edges(num_nodes_, list, true);
}

SparseGraph SparseGraph::permuted(std::span<const NodeId> perm) const {
    if (perm.size() != static_cast<std::size_t>(num_nodes_)) throw DimensionError("permutation size mismatch");
    auto list = edges();
    for (auto& [u, v] : list) {
        u = perm[u];
        v = perm[v];
    }
    SparseGraph g = from_edges(num_nodes_, list, false);
    g.undirected_ = undirected_;
    return g;
}

bool SparseGraph::operator==(const SparseGraph& other) const {
    return num_nodes_ == other.num_nodes_ && row_offsets_ == other.row_offsets_ &&
           col_indices_ == other.col_indices_ && edge_weights_ == other.edge_weights_ &&
           undirected_ == other.undirected_;
}

}  // namespace hagat::graph

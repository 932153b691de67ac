#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace hagat::graph {

using NodeId = std::int32_t;
using EdgeIndex = std::int64_t;

/// Weighted sparse matrix in compressed-row form. Used for normalized
/// adjacencies (which carry explicit diagonals) and for sparse features.
struct CsrMatrix {
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::vector<EdgeIndex> offsets{0};
    std::vector<NodeId> indices;
    std::vector<double> values;

    std::int64_t nnz() const { return static_cast<std::int64_t>(indices.size()); }

    static CsrMatrix identity(std::int64_t n);
};

/// Unweighted (optionally weighted) adjacency in CSR form.
///
/// Column indices are sorted within each row, there are no duplicate entries
/// and no self-loops. When `undirected()` is true the edge set is symmetric.
/// Each stored entry (i, j) is one directed edge; an undirected pair is
/// stored twice.
class SparseGraph {
public:
    SparseGraph() = default;

    /// Builds from a list of (src, dst) pairs. Self-loops and duplicates are
    /// dropped. With `symmetrize` the reverse of every edge is added and the
    /// result is flagged undirected.
    static SparseGraph from_edges(NodeId num_nodes, std::span<const std::pair<NodeId, NodeId>> edges,
                                  bool symmetrize);

    /// Adopts raw CSR arrays, validating every structural invariant.
    static SparseGraph from_csr(NodeId num_nodes, std::vector<EdgeIndex> row_offsets,
                                std::vector<NodeId> col_indices, bool undirected,
                                std::optional<std::vector<double>> edge_weights = std::nullopt);

    NodeId num_nodes() const { return num_nodes_; }
    EdgeIndex num_edges() const { return static_cast<EdgeIndex>(col_indices_.size()); }
    bool undirected() const { return undirected_; }

    const std::vector<EdgeIndex>& row_offsets() const { return row_offsets_; }
    const std::vector<NodeId>& col_indices() const { return col_indices_; }
    const std::optional<std::vector<double>>& edge_weights() const { return edge_weights_; }

    /// Source node of every stored edge, aligned with col_indices().
    const std::vector<NodeId>& edge_rows() const { return edge_rows_; }

    std::span<const NodeId> neighbors(NodeId i) const;
    EdgeIndex degree(NodeId i) const { return row_offsets_[i + 1] - row_offsets_[i]; }
    bool has_edge(NodeId i, NodeId j) const;

    /// Edge list (each stored directed edge once).
    std::vector<std::pair<NodeId, NodeId>> edges() const;

    /// Adds reverse edges; identity on already-undirected graphs.
    SparseGraph symmetrized() const;

    /// Relabels node i to perm[i].
    SparseGraph permuted(std::span<const NodeId> perm) const;

    bool operator==(const SparseGraph& other) const;

private:
    void build_edge_rows();

    NodeId num_nodes_ = 0;
    std::vector<EdgeIndex> row_offsets_{0};
    std::vector<NodeId> col_indices_;
    std::optional<std::vector<double>> edge_weights_;
    std::vector<NodeId> edge_rows_;
    bool undirected_ = false;
};

}  // namespace hagat::graph

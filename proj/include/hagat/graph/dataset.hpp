#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hagat/ad/tape.hpp"
#include "hagat/graph/csr.hpp"

namespace hagat::graph {

using Mask = std::vector<std::uint8_t>;

struct Splits {
    Mask train;
    Mask val;
    Mask test;
};

std::size_t count(const Mask& m);

struct Dataset {
    std::string name;
    SparseGraph graph;
    ad::Matrix features;  // N x d, row i describes node i
    std::vector<std::int32_t> labels;
    int num_classes = 0;
    std::optional<Splits> public_split;  // read from split_*.txt when present

    bool source_directed = false;
    EdgeIndex source_edge_count = 0;  // edge lines in the source, before symmetrization

    NodeId num_nodes() const { return graph.num_nodes(); }
    Eigen::Index feature_dim() const { return features.cols(); }
    EdgeIndex undirected_pairs() const;

    /// Throws DataError on any broken invariant (label range, row alignment, ...).
    void validate() const;
};

struct LoadOptions {
    bool row_normalize = false;
};

/// Reads the canonical directory layout:
///   nodes.tsv    node_id <TAB> label <TAB> f_1 ... f_d
///   edges.tsv    src <TAB> dst
///   meta.json    {"name", "N", "d", "C", "directed", ...}
///   split_{train,val,test}.txt   optional, one node id per line
/// `format_id` must be "tsv".
Dataset load_dataset(const std::filesystem::path& dir, const std::string& format_id = "tsv",
                     const LoadOptions& opts = {});

/// Writes `ds` in the layout read by load_dataset. Edges are written once per
/// undirected pair when the graph is undirected.
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);

/// Scales each feature row to unit L1 norm (zero rows untouched).
void row_normalize(ad::Matrix& features);

/// Drops exact zeros.
CsrMatrix to_csr(const ad::Matrix& dense);

}  // namespace hagat::graph

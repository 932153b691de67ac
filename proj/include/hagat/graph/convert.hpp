#pragma once

#include <filesystem>
#include <string>

#include "hagat/graph/dataset.hpp"

namespace hagat::graph {

enum class RawSource {
    planetoid,  // ind.<name>.{x,tx,allx,y,ty,ally,graph,test.index}, or LINQS .content/.cites
    webkb,      // out1_node_feature_label.txt + out1_graph_edges.txt, or LINQS .content/.cites
    wiki,       // out1_* files with comma-separated dense features
    actor,      // out1_* files with comma-separated active feature indices
};

RawSource parse_raw_source(const std::string& s);

struct ConvertReport {
    std::string name;
    NodeId nodes = 0;
    Eigen::Index feature_dim = 0;
    int classes = 0;
    EdgeIndex raw_edges = 0;             // edge records in the source, duplicates and loops included
    EdgeIndex stored_directed_edges = 0;  // after symmetrization, loop and duplicate removal
    EdgeIndex undirected_pairs = 0;
    bool public_split = false;
};

/// Reads a raw benchmark directory into memory.
Dataset read_raw(const std::filesystem::path& raw_dir, RawSource source);

/// read_raw followed by save_dataset into `out_dir`.
ConvertReport convert(const std::filesystem::path& raw_dir, const std::filesystem::path& out_dir, RawSource source);

}  // namespace hagat::graph

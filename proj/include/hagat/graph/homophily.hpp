#pragma once

#include <cstdint>
#include <span>

#include "hagat/graph/csr.hpp"

namespace hagat::graph {

/// Mean over non-isolated nodes of the fraction of neighbors that share the
/// node's label. Throws UndefinedMeasureError when every node is isolated.
double homophily_ratio(const SparseGraph& graph, std::span<const std::int32_t> labels);

}  // namespace hagat::graph

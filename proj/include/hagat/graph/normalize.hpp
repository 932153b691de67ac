#pragma once

#include "hagat/graph/csr.hpp"

namespace hagat::graph {

/// Symmetric normalization D^-1/2 A D^-1/2. With `add_self_loops` the
/// adjacency is A + I and degrees count the loop, so diagonal entries are
/// 1/d_i. Isolated nodes without a self-loop get an empty row.
CsrMatrix normalized_adjacency(const SparseGraph& graph, bool add_self_loops);

}  // namespace hagat::graph

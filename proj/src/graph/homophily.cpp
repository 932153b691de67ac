#include "hagat/graph/homophily.hpp"

#include "hagat/errors.hpp"

namespace hagat::graph {

double homophily_ratio(const SparseGraph& graph, std::span<const std::int32_t> labels) {
    if (labels.size() != static_cast<std::size_t>(graph.num_nodes())) {
        throw DimensionError("homophily_ratio: one label per node required");
    }
    double total = 0.0;
    NodeId counted = 0;
    for (NodeId i = 0; i < graph.num_nodes(); ++i) {
        const auto nbrs = graph.neighbors(i);
        if (nbrs.empty()) continue;
        std::size_t same = 0;
        for (NodeId j : nbrs) same += labels[j] == labels[i] ? 1 : 0;
        total += static_cast<double>(same) / static_cast<double>(nbrs.size());
        ++counted;
    }
    if (counted == 0) throw UndefinedMeasureError("homophily_ratio: every node is isolated");
    return total / counted;
}

}  // namespace hagat::graph

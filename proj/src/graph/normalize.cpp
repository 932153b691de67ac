#include "hagat/graph/normalize.hpp"

#include <cmath>
#include <vector>

#include "hagat/errors.hpp"

namespace hagat::graph {

CsrMatrix normalized_adjacency(const SparseGraph& graph, bool add_self_loops) {
    if (!graph.undirected()) throw ParameterError("normalized_adjacency: graph must be undirected");
    const NodeId n = graph.num_nodes();
    std::vector<double> inv_sqrt(n, 0.0);
    for (NodeId i = 0; i < n; ++i) {
        const double d = static_cast<double>(graph.degree(i)) + (add_self_loops ? 1.0 : 0.0);
        inv_sqrt[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
    }
    CsrMatrix m;
    m.rows = n;
    m.cols = n;
    m.offsets.assign(n + 1, 0);
    m.indices.reserve(graph.num_edges() + (add_self_loops ? n : 0));
    m.values.reserve(m.indices.capacity());
    for (NodeId i = 0; i < n; ++i) {
        bool diag_done = !add_self_loops;
        for (NodeId j : graph.neighbors(i)) {
            if (!diag_done && j > i) {
                m.indices.push_back(i);
                m.values.push_back(inv_sqrt[i] * inv_sqrt[i]);
                diag_done = true;
            }
            m.indices.push_back(j);
            m.values.push_back(inv_sqrt[i] * inv_sqrt[j]);
        }
        if (!diag_done) {
            m.indices.push_back(i);
            m.values.push_back(inv_sqrt[i] * inv_sqrt[i]);
        }
        m.offsets[i + 1] = static_cast<EdgeIndex>(m.indices.size());
    }
    return m;
}

}  // namespace hagat::graph

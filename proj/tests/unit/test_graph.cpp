#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "hagat/errors.hpp"
#include "hagat/graph/dataset.hpp"
#include "hagat/graph/homophily.hpp"
#include "hagat/graph/normalize.hpp"
#include "hagat/graph/sbm.hpp"
#include "hagat/graph/splits.hpp"
#include "support.hpp"

using namespace hagat;
using namespace hagat::graph;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hagat_graph_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

fs::path toy_dir(const std::string& name) {
    const fs::path d = scratch(name);
    write(d / "meta.json", R"({"name": "toy", "N": 2, "d": 2, "C": 2, "directed": true})");
    write(d / "nodes.tsv", "1\t1\t0.5\t-1\n0\t0\t1\t2\n");
    write(d / "edges.tsv", "0\t1\n");
    return d;
}

}  // namespace

TEST(SparseGraph, EdgeListIsSortedDedupedAndLoopFree) {
    const std::vector<std::pair<NodeId, NodeId>> e{{2, 0}, {0, 1}, {0, 1}, {1, 1}, {0, 2}};
    const SparseGraph g = SparseGraph::from_edges(3, e, false);
    EXPECT_EQ(g.num_edges(), 3);
    EXPECT_FALSE(g.undirected());
    const auto n0 = g.neighbors(0);
    EXPECT_EQ(std::vector<NodeId>(n0.begin(), n0.end()), (std::vector<NodeId>{1, 2}));
    EXPECT_FALSE(g.has_edge(1, 1));
    const SparseGraph s = g.symmetrized();
    EXPECT_TRUE(s.undirected());
    EXPECT_EQ(s.num_edges(), 4);
    EXPECT_TRUE(s.has_edge(1, 0));
}

TEST(SparseGraph, SymmetricInputIsDetectedAsUndirected) {
    const std::vector<std::pair<NodeId, NodeId>> e{{0, 1}, {1, 0}};
    EXPECT_TRUE(SparseGraph::from_edges(2, e, false).undirected());
}

TEST(SparseGraph, RejectsBadInput) {
    const std::vector<std::pair<NodeId, NodeId>> e{{0, 3}};
    EXPECT_THROW(SparseGraph::from_edges(3, e, true), DataError);
    EXPECT_THROW(SparseGraph::from_csr(2, {0, 1, 1}, {0}, false), DataError);       // self-loop
    EXPECT_THROW(SparseGraph::from_csr(3, {0, 2, 2, 2}, {2, 1}, false), DataError);  // unsorted
    EXPECT_THROW(SparseGraph::from_csr(2, {0, 1, 1}, {1}, true), DataError);        // missing reverse
}

TEST(SparseGraph, PermutationRelabelsEdges) {
    const SparseGraph g = test::path(4);
    const std::vector<NodeId> perm{2, 0, 3, 1};
    const SparseGraph p = g.permuted(perm);
    for (const auto& [u, v] : g.edges()) EXPECT_TRUE(p.has_edge(perm[u], perm[v]));
    EXPECT_EQ(p.num_edges(), g.num_edges());
}

TEST(LoadDataset, TwoNodeToyIsSymmetrized) {
    const Dataset ds = load_dataset(toy_dir("toy"));
    EXPECT_EQ(ds.num_nodes(), 2);
    EXPECT_TRUE(ds.graph.has_edge(0, 1));
    EXPECT_TRUE(ds.graph.has_edge(1, 0));
    EXPECT_EQ(ds.undirected_pairs(), 1);
    EXPECT_EQ(ds.source_edge_count, 1);
    EXPECT_TRUE(ds.source_directed);
    EXPECT_EQ(ds.features(1, 1), -1.0);
    EXPECT_EQ(ds.labels, (std::vector<std::int32_t>{0, 1}));
    EXPECT_FALSE(ds.public_split);
}

TEST(LoadDataset, Errors) {
    EXPECT_THROW(load_dataset(scratch("missing") / "nothing"), IngestionError);
    {
        const fs::path d = toy_dir("nonodes");
        fs::remove(d / "nodes.tsv");
        EXPECT_THROW(load_dataset(d), IngestionError);
    }
    {
        const fs::path d = toy_dir("badlabel");
        write(d / "nodes.tsv", "0\t0\t1\t2\n1\t5\t0\t0\n");
        EXPECT_THROW(load_dataset(d), DataError);
    }
    {
        const fs::path d = toy_dir("dangling");
        write(d / "edges.tsv", "0\t7\n");
        EXPECT_THROW(load_dataset(d), DataError);
    }
    {
        const fs::path d = toy_dir("halfsplit");
        write(d / "split_train.txt", "0\n");
        EXPECT_THROW(load_dataset(d), IngestionError);
    }
    EXPECT_THROW(load_dataset(toy_dir("fmt"), "csv"), ParameterError);
}

TEST(LoadDataset, SaveLoadRoundTripIsExact) {
    Dataset ds = sbm_generate(10, 3, 0.3, 0.05, {}, 5);
    ds.name = "sbm";
    ds.public_split = make_splits(ds, SplitSpec::supervised(1));
    const fs::path d = scratch("roundtrip");
    save_dataset(ds, d);
    const Dataset back = load_dataset(d);
    EXPECT_EQ(back.graph, ds.graph);
    EXPECT_EQ(back.features, ds.features);
    EXPECT_EQ(back.labels, ds.labels);
    ASSERT_TRUE(back.public_split);
    EXPECT_EQ(back.public_split->train, ds.public_split->train);
    EXPECT_EQ(back.public_split->test, ds.public_split->test);
}

TEST(LoadDataset, RowNormalization) {
    LoadOptions opts;
    opts.row_normalize = true;
    const Dataset ds = load_dataset(toy_dir("rownorm"), "tsv", opts);
    EXPECT_DOUBLE_EQ(ds.features(0, 0), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(ds.features(1, 1), -1.0 / 1.5);
}

TEST(Homophily, TriangleWithEqualLabels) {
    const SparseGraph g = test::undirected(3, {{0, 1}, {1, 2}, {0, 2}});
    const std::vector<std::int32_t> y{4, 4, 4};
    EXPECT_EQ(homophily_ratio(g, y), 1.0);
}

TEST(Homophily, AlternatingFourCycle) {
    const SparseGraph g = test::undirected(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
    const std::vector<std::int32_t> y{0, 1, 0, 1};
    EXPECT_EQ(homophily_ratio(g, y), 0.0);
}

TEST(Homophily, IsolatedNodesAreSkipped) {
    // Node 0: 1/2 same, node 1: 0/1, node 2: 1/1; node 3 isolated.
    const SparseGraph g = test::undirected(4, {{0, 1}, {0, 2}});
    const std::vector<std::int32_t> y{0, 1, 0, 1};
    EXPECT_DOUBLE_EQ(homophily_ratio(g, y), (0.5 + 0.0 + 1.0) / 3.0);
    EXPECT_THROW(homophily_ratio(SparseGraph::from_edges(4, {}, true), y), UndefinedMeasureError);
}

TEST(NormalizedAdjacency, IsolatedNodeSelfLoopIsOne) {
    const CsrMatrix m = normalized_adjacency(SparseGraph::from_edges(1, {}, true), true);
    ASSERT_EQ(m.nnz(), 1);
    EXPECT_EQ(m.values[0], 1.0);
}

TEST(NormalizedAdjacency, TwoNodePathIsOneHalfEverywhere) {
    const ad::Matrix m = test::dense(normalized_adjacency(test::path(2), true));
    EXPECT_LT((m.array() - 0.5).abs().maxCoeff(), 1e-15);
}

TEST(NormalizedAdjacency, MatchesDenseOracle) {
    const SparseGraph g = test::undirected(6, {{0, 1}, {0, 2}, {0, 3}, {3, 4}, {4, 5}, {2, 4}});
    const CsrMatrix m = normalized_adjacency(g, true);
    EXPECT_TRUE(test::dense(m).isApprox(test::dense_normalized(g), 1e-15));
    for (std::int64_t i = 0; i < m.rows; ++i) {
        EXPECT_TRUE(std::is_sorted(m.indices.begin() + m.offsets[i], m.indices.begin() + m.offsets[i + 1]));
    }
    EXPECT_EQ(normalized_adjacency(g, false).nnz(), g.num_edges());
    EXPECT_THROW(normalized_adjacency(SparseGraph::from_edges(2, std::vector<std::pair<NodeId, NodeId>>{{0, 1}}, false), true),
                 ParameterError);
}

TEST(Splits, RandomModesHaveTheStatedSizesAndAreDisjoint) {
    const Dataset ds = sbm_generate(50, 4, 0.1, 0.02, {}, 3);
    for (const auto& [spec, tr, va] :
         {std::tuple{SplitSpec::supervised(7), 120u, 40u}, std::tuple{SplitSpec::semi_supervised(7), 20u, 20u}}) {
        const Splits s = make_splits(ds, spec);
        EXPECT_EQ(count(s.train), tr);
        EXPECT_EQ(count(s.val), va);
        EXPECT_EQ(count(s.train) + count(s.val) + count(s.test), 200u);
        std::set<int> cls;
        for (int i = 0; i < 200; ++i) {
            EXPECT_LE(s.train[i] + s.val[i] + s.test[i], 1);
            if (s.train[i]) cls.insert(ds.labels[i]);
        }
        EXPECT_EQ(cls.size(), 4u);
    }
}

TEST(Splits, SameSeedSameSplitDifferentSeedDifferentSplit) {
    const Dataset ds = sbm_generate(30, 3, 0.1, 0.02, {}, 3);
    EXPECT_EQ(make_splits(ds, SplitSpec::supervised(1)).train, make_splits(ds, SplitSpec::supervised(1)).train);
    EXPECT_NE(make_splits(ds, SplitSpec::supervised(1)).train, make_splits(ds, SplitSpec::supervised(2)).train);
}

TEST(Splits, PublicModeNeedsShippedMasks) {
    Dataset ds = sbm_generate(10, 2, 0.2, 0.1, {}, 3);
    EXPECT_THROW(make_splits(ds, SplitSpec::fixed_public()), SplitError);
    ds.public_split = make_splits(ds, SplitSpec::semi_supervised(5));
    EXPECT_EQ(make_splits(ds, SplitSpec::fixed_public()).train, ds.public_split->train);
}

TEST(Splits, ImpossibleClassCoverageFails) {
    Dataset ds = sbm_generate(10, 2, 0.2, 0.1, {}, 3);
    ds.labels.assign(20, 0);
    ds.labels[0] = 1;
    ds.num_classes = 2;
    SplitSpec spec = SplitSpec::semi_supervised(1);
    spec.max_retries = 0;
    // One node of class 1 lands in a 2-node training set with probability 1/10.
    bool failed = false;
    for (std::uint64_t seed = 0; seed < 20 && !failed; ++seed) {
        spec.seed = seed;
        try {
            make_splits(ds, spec);
        } catch (const SplitError&) {
            failed = true;
        }
    }
    EXPECT_TRUE(failed);
    EXPECT_THROW(parse_split_mode("random"), ParameterError);
    EXPECT_EQ(parse_split_mode("semi"), SplitMode::semi_supervised);
    EXPECT_EQ(parse_split_mode("public"), SplitMode::fixed_public);
}

TEST(Sbm, BlockLabelsAndNoSelfLoops) {
    const Dataset ds = sbm_generate(20, 3, 0.3, 0.05, {8, 2.0, 0.5}, 11);
    EXPECT_EQ(ds.num_nodes(), 60);
    EXPECT_EQ(ds.feature_dim(), 8);
    EXPECT_EQ(ds.num_classes, 3);
    EXPECT_TRUE(ds.graph.undirected());
    for (NodeId i = 0; i < 60; ++i) {
        EXPECT_EQ(ds.labels[i], i / 20);
        EXPECT_FALSE(ds.graph.has_edge(i, i));
    }
    EXPECT_EQ(sbm_generate(20, 3, 0.3, 0.05, {}, 11).graph, sbm_generate(20, 3, 0.3, 0.05, {}, 11).graph);
}

TEST(Sbm, EmpiricalHomophilyNearExpectation) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Dataset ds = sbm_generate(200, 3, 0.05, 0.01, {}, seed);
        EXPECT_NEAR(homophily_ratio(ds.graph, ds.labels), sbm_expected_homophily(3, 0.05, 0.01), 0.05);
    }
    EXPECT_DOUBLE_EQ(sbm_expected_homophily(2, 0.0, 0.1), 0.0);
    EXPECT_DOUBLE_EQ(sbm_expected_homophily(5, 0.2, 0.05), 0.5);
}

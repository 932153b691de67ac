#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "hagat/errors.hpp"
#include "hagat/graph/convert.hpp"
#include "hagat/graph/homophily.hpp"
#include "hagat/graph/pickle.hpp"

using namespace hagat;
namespace fs = std::filesystem;
namespace pk = hagat::graph::pickle;

namespace {

const fs::path kData = HAGAT_TEST_DATA;

nlohmann::json expected() {
    std::ifstream in(kData / "expected.json");
    return nlohmann::json::parse(in);
}

ad::Matrix to_matrix(const nlohmann::json& rows) {
    ad::Matrix m(rows.size(), rows.at(0).size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hagat_pickle_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST(Pickle, ArraysAndSparseMatricesAcrossProtocols) {
    const auto exp = expected().at("arrays");
    ASSERT_GT(exp.size(), 20u);
    for (auto it = exp.begin(); it != exp.end(); ++it) {
        SCOPED_TRACE(it.key());
        const ad::Matrix got = pk::array_or_sparse_to_dense(pk::load_file(kData / it.key()));
        EXPECT_EQ(got, to_matrix(it.value()));
    }
}

TEST(Pickle, DictAdjacency) {
    const auto adj = pk::to_adjacency(pk::load_file(kData / "adjacency_dict_p0.pkl"));
    ASSERT_EQ(adj.size(), 2u);
    EXPECT_EQ(adj[0].first, 0);
    EXPECT_EQ(adj[0].second, (std::vector<std::int64_t>{1, 2}));
    EXPECT_EQ(adj[1].first, 3);
}

TEST(Pickle, HandWrittenOpcodes) {
    // protocol 2: (1, -2, 'ab', True, None, 2.5) as a tuple built with MARK/TUPLE
    const char raw[] = "\x80\x02(K\x01J\xfe\xff\xff\xff" "X\x02\x00\x00\x00" "ab" "\x88N"
                       "G\x40\x04\x00\x00\x00\x00\x00\x00" "t.";
    const std::string bytes(raw, sizeof raw - 1);
    const pk::Ref r = pk::load(bytes);
    ASSERT_TRUE(r->is(pk::Object::Kind::tuple));
    ASSERT_EQ(r->items.size(), 6u);
    EXPECT_EQ(r->items[0]->integer, 1);
    EXPECT_EQ(r->items[1]->integer, -2);
    EXPECT_EQ(r->items[2]->text, "ab");
    EXPECT_TRUE(r->items[3]->is(pk::Object::Kind::boolean));
    EXPECT_TRUE(r->items[4]->is(pk::Object::Kind::none));
    EXPECT_EQ(r->items[5]->real, 2.5);
}

TEST(Pickle, MalformedInputIsAnIngestionError) {
    EXPECT_THROW(pk::load(std::string("\x80\x02K", 3)), IngestionError);
    EXPECT_THROW(pk::load(std::string("\x80\x02\xff.", 4)), IngestionError);
    EXPECT_THROW(pk::load_file(kData / "does_not_exist.pkl"), IngestionError);
    EXPECT_THROW(pk::to_dense(pk::load(std::string("K\x05.", 3))), IngestionError);
}

TEST(Convert, PlanetoidMatchesReferenceLoader) {
    for (const auto& [dir, key] : {std::pair{"planetoid_p2", "toy"}, std::pair{"planetoid_gap", "gappy"}}) {
        SCOPED_TRACE(key);
        const auto exp = expected().at(key);
        const graph::Dataset ds = graph::read_raw(kData / dir, graph::RawSource::planetoid);
        EXPECT_EQ(ds.name, key);
        EXPECT_EQ(ds.num_nodes(), exp.at("N").get<int>());
        EXPECT_EQ(ds.features, to_matrix(exp.at("features")));
        EXPECT_EQ(ds.labels, exp.at("labels").get<std::vector<std::int32_t>>());
        EXPECT_EQ(ds.graph.num_edges(), exp.at("stored_directed_edges").get<long>());
        EXPECT_EQ(ds.source_edge_count, exp.at("raw_edges").get<long>());
        EXPECT_TRUE(ds.graph.undirected());
        ASSERT_TRUE(ds.public_split);
        auto ids = [](const graph::Mask& m) {
            std::vector<int> out;
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (m[i]) out.push_back(static_cast<int>(i));
            }
            return out;
        };
        EXPECT_EQ(ids(ds.public_split->train), exp.at("train").get<std::vector<int>>());
        EXPECT_EQ(ids(ds.public_split->val), exp.at("val").get<std::vector<int>>());
        EXPECT_EQ(ids(ds.public_split->test), exp.at("test").get<std::vector<int>>());
    }
}

TEST(Convert, RoundTripsThroughCanonicalLayout) {
    const fs::path out = scratch("roundtrip");
    const auto report = graph::convert(kData / "planetoid_p2", out, graph::RawSource::planetoid);
    const graph::Dataset a = graph::read_raw(kData / "planetoid_p2", graph::RawSource::planetoid);
    const graph::Dataset b = graph::load_dataset(out);
    EXPECT_EQ(report.nodes, a.num_nodes());
    EXPECT_EQ(report.stored_directed_edges, 2 * report.undirected_pairs);
    EXPECT_EQ(a.graph, b.graph);
    EXPECT_EQ(a.features, b.features);
    EXPECT_EQ(a.labels, b.labels);
    ASSERT_TRUE(b.public_split);
    EXPECT_EQ(a.public_split->test, b.public_split->test);
    EXPECT_DOUBLE_EQ(graph::homophily_ratio(a.graph, a.labels), graph::homophily_ratio(b.graph, b.labels));
}

TEST(Convert, WikiFormat) {
    const graph::Dataset ds = graph::read_raw(kData / "wiki_toy", graph::RawSource::wiki);
    EXPECT_EQ(ds.num_nodes(), 4);
    EXPECT_EQ(ds.feature_dim(), 4);
    EXPECT_EQ(ds.num_classes, 2);
    EXPECT_EQ(ds.source_edge_count, 6);
    EXPECT_TRUE(ds.source_directed);
    // {0,1}, {1,2}, {2,3}, {0,2}; the loop on 3 and the reverse duplicate vanish.
    EXPECT_EQ(ds.graph.num_edges(), 8);
    EXPECT_EQ(ds.features(2, 2), 1.0);
    EXPECT_FALSE(ds.public_split);
}

TEST(Convert, ActorIndexFeatures) {
    const graph::Dataset ds = graph::read_raw(kData / "actor_toy", graph::RawSource::actor);
    EXPECT_EQ(ds.feature_dim(), 932);
    EXPECT_EQ(ds.features(0, 3), 1.0);
    EXPECT_EQ(ds.features(0, 10), 1.0);
    EXPECT_EQ(ds.features(2, 931), 1.0);
    EXPECT_EQ(ds.features.sum(), 5.0);
    EXPECT_EQ(ds.num_classes, 3);
}

TEST(Convert, LinqsFallback) {
    const graph::Dataset ds = graph::read_raw(kData / "linqs_toy", graph::RawSource::webkb);
    EXPECT_EQ(ds.num_nodes(), 3);
    EXPECT_EQ(ds.feature_dim(), 3);
    // Classes are numbered in sorted name order: AI = 0, Theory = 1.
    EXPECT_EQ(ds.labels, (std::vector<std::int32_t>{1, 0, 1}));
    EXPECT_EQ(ds.source_edge_count, 2);  // the link to an unknown paper is skipped
    EXPECT_EQ(ds.graph.num_edges(), 4);
}

TEST(Convert, MissingFilesAndUnknownSources) {
    EXPECT_THROW(graph::parse_raw_source("imdb"), ParameterError);
    EXPECT_THROW(graph::read_raw(kData / "nowhere", graph::RawSource::wiki), IngestionError);
    EXPECT_THROW(graph::read_raw(kData / "linqs_toy", graph::RawSource::wiki), IngestionError);
}

#include "hagat/graph/convert.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <string_view>

#include "hagat/errors.hpp"
#include "hagat/graph/pickle.hpp"

namespace hagat::graph {
namespace fs = std::filesystem;

RawSource parse_raw_source(const std::string& s) {
    if (s == "planetoid") return RawSource::planetoid;
    if (s == "webkb") return RawSource::webkb;
    if (s == "wiki") return RawSource::wiki;
    if (s == "actor" || s == "film") return RawSource::actor;
    throw ParameterError("unknown raw source '" + s + "' (expected planetoid, webkb, wiki or actor)");
}

namespace {

std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw IngestionError("cannot open " + p.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) out.push_back(std::move(line));
    }
    return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto end = s.find(sep, start);
        out.push_back(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (end == std::string_view::npos) return out;
        start = end + 1;
    }
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

template <typename T>
T number(std::string_view s, const fs::path& file) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw IngestionError(file.string() + ": cannot parse '" + std::string(s) + "'");
    }
    return v;
}

std::optional<fs::path> find_suffix(const fs::path& dir, const std::string& suffix) {
    std::vector<fs::path> hits;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
            hits.push_back(e.path());
        }
    }
    if (hits.empty()) return std::nullopt;
    std::sort(hits.begin(), hits.end());
    return hits.front();
}

std::int32_t argmax_row(const ad::Matrix& m, Eigen::Index r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < m.cols(); ++c) {
        if (m(r, c) > m(r, best)) best = c;
    }
    return static_cast<std::int32_t>(best);
}

void finish(Dataset& ds, std::vector<std::pair<NodeId, NodeId>>& edges, bool directed) {
    ds.source_directed = directed;
    ds.source_edge_count = static_cast<EdgeIndex>(edges.size());
    ds.graph = SparseGraph::from_edges(static_cast<NodeId>(ds.features.rows()), edges, true);
    int max_label = -1;
    for (auto l : ds.labels) max_label = std::max(max_label, static_cast<int>(l));
    ds.num_classes = max_label + 1;
    ds.validate();
}

Dataset read_planetoid_pickles(const fs::path& dir, const std::string& name) {
    auto part = [&](const std::string& key) { return dir / ("ind." + name + "." + key); };
    const ad::Matrix allx = pickle::array_or_sparse_to_dense(pickle::load_file(part("allx")));
    const ad::Matrix tx = pickle::array_or_sparse_to_dense(pickle::load_file(part("tx")));
    const ad::Matrix ally = pickle::to_dense(pickle::load_file(part("ally")));
    const ad::Matrix ty = pickle::to_dense(pickle::load_file(part("ty")));
    const ad::Matrix y = pickle::to_dense(pickle::load_file(part("y")));
    const auto adjacency = pickle::to_adjacency(pickle::load_file(part("graph")));

    std::vector<NodeId> reorder;
    for (const auto& l : read_lines(part("test.index"))) reorder.push_back(number<NodeId>(l, part("test.index")));
    if (reorder.empty()) throw DataError(part("test.index").string() + ": no test ids");
    if (static_cast<Eigen::Index>(reorder.size()) != tx.rows() || ty.rows() != tx.rows()) {
        throw DataError(name + ": test index, tx and ty disagree in length");
    }
    if (allx.cols() != tx.cols() || ally.cols() != ty.cols()) throw DataError(name + ": feature or label widths differ");
    std::vector<NodeId> sorted = reorder;
    std::sort(sorted.begin(), sorted.end());
    const NodeId lo = sorted.front(), hi = sorted.back();
    if (lo != allx.rows()) throw DataError(name + ": test ids must start right after allx");

    // Some test ids are absent (CiteSeer); their rows stay zero.
    const Eigen::Index span = hi - lo + 1;
    const Eigen::Index n = allx.rows() + span;
    ad::Matrix feats = ad::Matrix::Zero(n, allx.cols());
    ad::Matrix onehot = ad::Matrix::Zero(n, ally.cols());
    feats.topRows(allx.rows()) = allx;
    onehot.topRows(ally.rows()) = ally;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        feats.row(sorted[k]) = tx.row(static_cast<Eigen::Index>(k));
        onehot.row(sorted[k]) = ty.row(static_cast<Eigen::Index>(k));
    }
    const ad::Matrix old_feats = feats, old_onehot = onehot;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        feats.row(reorder[k]) = old_feats.row(sorted[k]);
        onehot.row(reorder[k]) = old_onehot.row(sorted[k]);
    }

    Dataset ds;
    ds.name = name;
    ds.features = std::move(feats);
    ds.labels.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) ds.labels[i] = argmax_row(onehot, i);

    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& [u, nbrs] : adjacency) {
        for (auto v : nbrs) {
            if (u < 0 || v < 0 || u >= n || v >= n) throw DataError(name + ": graph references node outside features");
            edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
        }
    }

    Splits s{Mask(n, 0), Mask(n, 0), Mask(n, 0)};
    const Eigen::Index n_train = y.rows();
    const Eigen::Index n_val = std::max<Eigen::Index>(0, std::min<Eigen::Index>(500, lo - n_train));
    for (Eigen::Index i = 0; i < n_train; ++i) s.train[i] = 1;
    for (Eigen::Index i = n_train; i < n_train + n_val; ++i) s.val[i] = 1;
    for (auto i : sorted) s.test[i] = 1;
    ds.public_split = std::move(s);
    finish(ds, edges, false);
    return ds;
}

// LINQS layout: <id> <features...> <label> per paper, and <cited> <citing> per link.
Dataset read_linqs(const fs::path& content, const fs::path& cites, bool directed) {
    const auto rows = read_lines(content);
    if (rows.empty()) throw IngestionError(content.string() + ": empty");
    std::map<std::string, NodeId> ids;
    std::map<std::string, std::int32_t> classes;
    std::vector<std::vector<std::string_view>> parsed;
    for (const auto& r : rows) {
        auto f = split_ws(r);
        if (f.size() < 3) throw IngestionError(content.string() + ": row with fewer than three fields");
        if (!parsed.empty() && f.size() != parsed.front().size()) throw IngestionError(content.string() + ": ragged rows");
        if (!ids.emplace(std::string(f.front()), static_cast<NodeId>(ids.size())).second) {
            throw DataError(content.string() + ": duplicate id " + std::string(f.front()));
        }
        classes.emplace(std::string(f.back()), 0);
        parsed.push_back(std::move(f));
    }
    std::int32_t next = 0;
    for (auto& [_, c] : classes) c = next++;

    Dataset ds;
    ds.name = content.stem().string();
    const auto n = static_cast<Eigen::Index>(parsed.size());
    const auto d = static_cast<Eigen::Index>(parsed.front().size() - 2);
    ds.features.resize(n, d);
    ds.labels.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& f = parsed[i];
        for (Eigen::Index k = 0; k < d; ++k) ds.features(i, k) = number<double>(f[k + 1], content);
        ds.labels[i] = classes.at(std::string(f.back()));
    }
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& l : read_lines(cites)) {
        const auto f = split_ws(l);
        if (f.size() < 2) throw IngestionError(cites.string() + ": expected two ids per line");
        auto a = ids.find(std::string(f[0]));
        auto b = ids.find(std::string(f[1]));
        if (a == ids.end() || b == ids.end()) continue;  // links to papers outside the corpus
        edges.emplace_back(b->second, a->second);
    }
    finish(ds, edges, directed);
    return ds;
}

// out1_node_feature_label.txt: header, then id <TAB> features <TAB> label.
Dataset read_geom(const fs::path& dir, bool index_features, bool directed) {
    const fs::path node_file = dir / "out1_node_feature_label.txt";
    const fs::path edge_file = dir / "out1_graph_edges.txt";
    auto rows = read_lines(node_file);
    if (rows.size() < 2) throw IngestionError(node_file.string() + ": no node rows");
    rows.erase(rows.begin());

    struct Row { NodeId id; std::vector<double> values; std::int32_t label; };
    std::vector<Row> parsed;
    Eigen::Index d = 0;
    for (const auto& r : rows) {
        const auto f = split(r, '\t');
        if (f.size() != 3) throw IngestionError(node_file.string() + ": expected id, features and label");
        Row row{number<NodeId>(f[0], node_file), {}, number<std::int32_t>(f[2], node_file)};
        if (!f[1].empty()) {
            for (auto v : split(f[1], ',')) row.values.push_back(number<double>(v, node_file));
        }
        if (index_features) {
            for (double v : row.values) d = std::max(d, static_cast<Eigen::Index>(v) + 1);
        } else {
            if (d != 0 && static_cast<Eigen::Index>(row.values.size()) != d) {
                throw IngestionError(node_file.string() + ": ragged feature rows");
            }
            d = static_cast<Eigen::Index>(row.values.size());
        }
        parsed.push_back(std::move(row));
    }
    if (index_features) d = std::max<Eigen::Index>(d, 932);  // film vocabulary size

    Dataset ds;
    ds.name = dir.filename().string();
    const auto n = static_cast<Eigen::Index>(parsed.size());
    ds.features = ad::Matrix::Zero(n, d);
    ds.labels.assign(n, -1);
    for (const auto& r : parsed) {
        if (r.id < 0 || r.id >= n) throw DataError(node_file.string() + ": node id out of range");
        if (ds.labels[r.id] != -1) throw DataError(node_file.string() + ": duplicate node id");
        ds.labels[r.id] = r.label;
        for (std::size_t k = 0; k < r.values.size(); ++k) {
            if (index_features) {
                ds.features(r.id, static_cast<Eigen::Index>(r.values[k])) = 1.0;
            } else {
                ds.features(r.id, static_cast<Eigen::Index>(k)) = r.values[k];
            }
        }
    }

    auto erows = read_lines(edge_file);
    if (!erows.empty()) erows.erase(erows.begin());
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& l : erows) {
        const auto f = split_ws(l);
        if (f.size() < 2) throw IngestionError(edge_file.string() + ": expected src and dst");
        const auto u = number<NodeId>(f[0], edge_file), v = number<NodeId>(f[1], edge_file);
        if (u < 0 || v < 0 || u >= n || v >= n) throw DataError(edge_file.string() + ": dangling edge endpoint");
        edges.emplace_back(u, v);
    }
    finish(ds, edges, directed);
    return ds;
}

}  // namespace

Dataset read_raw(const fs::path& raw_dir, RawSource source) {
    if (!fs::is_directory(raw_dir)) throw IngestionError("raw directory not found: " + raw_dir.string());
    const bool geom = fs::exists(raw_dir / "out1_node_feature_label.txt");
    switch (source) {
        case RawSource::planetoid: {
            if (auto x = find_suffix(raw_dir, ".allx")) {
                std::string name = x->filename().string();
                name = name.substr(4, name.size() - 4 - 5);  // strip "ind." and ".allx"
                return read_planetoid_pickles(raw_dir, name);
            }
            break;
        }
        case RawSource::webkb:
            if (geom) return read_geom(raw_dir, false, true);
            break;
        case RawSource::wiki:
            if (geom) return read_geom(raw_dir, false, true);
            throw IngestionError(raw_dir.string() + ": out1_node_feature_label.txt not found");
        case RawSource::actor:
            if (geom) return read_geom(raw_dir, true, true);
            throw IngestionError(raw_dir.string() + ": out1_node_feature_label.txt not found");
    }
    auto content = find_suffix(raw_dir, ".content");
    auto cites = find_suffix(raw_dir, ".cites");
    if (content && cites) return read_linqs(*content, *cites, source == RawSource::webkb);
    throw IngestionError(raw_dir.string() + ": no recognised raw files");
}

ConvertReport convert(const fs::path& raw_dir, const fs::path& out_dir, RawSource source) {
    Dataset ds = read_raw(raw_dir, source);
    save_dataset(ds, out_dir);
    ConvertReport r;
    r.name = ds.name;
    r.nodes = ds.num_nodes();
    r.feature_dim = ds.feature_dim();
    r.classes = ds.num_classes;
    r.raw_edges = ds.source_edge_count;
    r.stored_directed_edges = ds.graph.num_edges();
    r.undirected_pairs = ds.undirected_pairs();
    r.public_split = ds.public_split.has_value();
    return r;
}

}  // namespace hagat::graph

#include "hagat/graph/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hagat/errors.hpp"

namespace hagat::graph {
namespace fs = std::filesystem;
using json = nlohmann::json;

std::size_t count(const Mask& m) {
    std::size_t n = 0;
    for (auto v : m) n += v ? 1 : 0;
    return n;
}

EdgeIndex Dataset::undirected_pairs() const {
    EdgeIndex n = 0;
    for (const auto& [u, v] : graph.edges()) {
        if (u < v || !graph.has_edge(v, u)) ++n;
    }
    return n;
}

void Dataset::validate() const {
    const auto n = static_cast<std::size_t>(num_nodes());
    if (features.rows() != static_cast<Eigen::Index>(n)) throw DataError("feature rows do not match node count");
    if (labels.size() != n) throw DataError("label count does not match node count");
    if (num_classes < 1) throw DataError("dataset has no classes");
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] < 0 || labels[i] >= num_classes) {
            throw DataError("label " + std::to_string(labels[i]) + " of node " + std::to_string(i) + " out of range");
        }
    }
    if (public_split) {
        const Splits& s = *public_split;
        if (s.train.size() != n || s.val.size() != n || s.test.size() != n) throw DataError("split mask size mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            if (s.train[i] + s.val[i] + s.test[i] > 1) throw DataError("split masks overlap at node " + std::to_string(i));
        }
    }
}

namespace {

std::ifstream open_in(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw IngestionError("cannot open " + p.string());
    return in;
}

// Splits on tabs (and stray carriage returns) without allocating per field.
std::vector<std::string_view> fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= line.size()) {
        std::size_t end = line.find('\t', start);
        if (end == std::string_view::npos) end = line.size();
        std::string_view f = line.substr(start, end - start);
        while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.remove_suffix(1);
        out.push_back(f);
        start = end + 1;
    }
    return out;
}

template <typename T>
T parse_num(std::string_view s, const fs::path& file, std::size_t line_no) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw IngestionError(file.string() + ":" + std::to_string(line_no) + ": cannot parse '" + std::string(s) + "'");
    }
    return v;
}

Mask read_split(const fs::path& p, NodeId n) {
    Mask m(n, 0);
    std::ifstream in = open_in(p);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv(line);
        while (!sv.empty() && (sv.back() == '\r' || sv.back() == ' ')) sv.remove_suffix(1);
        if (sv.empty()) continue;
        const auto id = parse_num<NodeId>(sv, p, line_no);
        if (id < 0 || id >= n) throw DataError(p.string() + ": node id " + std::to_string(id) + " out of range");
        m[id] = 1;
    }
    return m;
}

}  // namespace

Dataset load_dataset(const fs::path& dir, const std::string& format_id, const LoadOptions& opts) {
    if (format_id != "tsv") throw ParameterError("unknown dataset format '" + format_id + "'");
    if (!fs::is_directory(dir)) throw IngestionError("dataset directory not found: " + dir.string());

    json meta;
    {
        std::ifstream in = open_in(dir / "meta.json");
        try {
            in >> meta;
        } catch (const json::exception& e) {
            throw IngestionError("meta.json: " + std::string(e.what()));
        }
    }
    Dataset ds;
    NodeId n = 0;
    Eigen::Index d = 0;
    try {
        ds.name = meta.value("name", dir.filename().string());
        n = meta.at("N").get<NodeId>();
        d = meta.at("d").get<Eigen::Index>();
        ds.num_classes = meta.at("C").get<int>();
        ds.source_directed = meta.value("directed", false);
    } catch (const json::exception& e) {
        throw IngestionError("meta.json: " + std::string(e.what()));
    }
    if (n < 0 || d < 0) throw DataError("meta.json: negative sizes");

    ds.features = ad::Matrix::Zero(n, d);
    ds.labels.assign(n, -1);
    std::vector<std::uint8_t> seen(n, 0);
    {
        const fs::path p = dir / "nodes.tsv";
        std::ifstream in = open_in(p);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line == "\r") continue;
            const auto f = fields(line);
            if (f.size() != static_cast<std::size_t>(d) + 2) {
                throw IngestionError(p.string() + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(d + 2) + " fields, found " + std::to_string(f.size()));
            }
            const auto id = parse_num<NodeId>(f[0], p, line_no);
            if (id < 0 || id >= n) throw DataError(p.string() + ": node id " + std::to_string(id) + " out of range");
            if (seen[id]) throw DataError(p.string() + ": node id " + std::to_string(id) + " listed twice");
            seen[id] = 1;
            ds.labels[id] = parse_num<std::int32_t>(f[1], p, line_no);
            for (Eigen::Index k = 0; k < d; ++k) ds.features(id, k) = parse_num<double>(f[k + 2], p, line_no);
        }
        for (NodeId i = 0; i < n; ++i) {
            if (!seen[i]) throw DataError(p.string() + ": node " + std::to_string(i) + " missing");
        }
    }

    std::vector<std::pair<NodeId, NodeId>> edges;
    {
        const fs::path p = dir / "edges.tsv";
        std::ifstream in = open_in(p);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line == "\r") continue;
            const auto f = fields(line);
            if (f.size() < 2) throw IngestionError(p.string() + ":" + std::to_string(line_no) + ": expected src and dst");
            const auto u = parse_num<NodeId>(f[0], p, line_no);
            const auto v = parse_num<NodeId>(f[1], p, line_no);
            if (u < 0 || v < 0 || u >= n || v >= n) {
                throw DataError(p.string() + ":" + std::to_string(line_no) + ": dangling edge endpoint");
            }
            edges.emplace_back(u, v);
        }
    }
    ds.source_edge_count = static_cast<EdgeIndex>(edges.size());
    ds.graph = SparseGraph::from_edges(n, edges, true);

    const fs::path tr = dir / "split_train.txt", va = dir / "split_val.txt", te = dir / "split_test.txt";
    if (fs::exists(tr) || fs::exists(va) || fs::exists(te)) {
        if (!(fs::exists(tr) && fs::exists(va) && fs::exists(te))) {
            throw IngestionError(dir.string() + ": split files must come as a train/val/test triple");
        }
        ds.public_split = Splits{read_split(tr, n), read_split(va, n), read_split(te, n)};
    }
    if (opts.row_normalize) row_normalize(ds.features);
    ds.validate();
    return ds;
}

namespace {

void write_double(std::ostream& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, ptr - buf);
}

void write_split(const Mask& m, const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot write " + p.string());
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i]) out << i << '\n';
    }
}

}  // namespace

void save_dataset(const Dataset& ds, const fs::path& dir) {
    ds.validate();
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "nodes.tsv");
        if (!out) throw IoError("cannot write " + (dir / "nodes.tsv").string());
        for (NodeId i = 0; i < ds.num_nodes(); ++i) {
            out << i << '\t' << ds.labels[i];
            for (Eigen::Index k = 0; k < ds.features.cols(); ++k) {
                out << '\t';
                write_double(out, ds.features(i, k));
            }
            out << '\n';
        }
    }
    {
        std::ofstream out(dir / "edges.tsv");
        if (!out) throw IoError("cannot write " + (dir / "edges.tsv").string());
        for (const auto& [u, v] : ds.graph.edges()) {
            if (ds.graph.undirected() && u > v) continue;
            out << u << '\t' << v << '\n';
        }
    }
    json meta = {{"name", ds.name},
                 {"N", ds.num_nodes()},
                 {"d", ds.features.cols()},
                 {"C", ds.num_classes},
                 {"directed", ds.source_directed},
                 {"source_edges", ds.source_edge_count},
                 {"stored_directed_edges", ds.graph.num_edges()},
                 {"undirected_pairs", ds.undirected_pairs()}};
    {
        std::ofstream out(dir / "meta.json");
        if (!out) throw IoError("cannot write meta.json");
        out << meta.dump(2) << '\n';
    }
    if (ds.public_split) {
        write_split(ds.public_split->train, dir / "split_train.txt");
        write_split(ds.public_split->val, dir / "split_val.txt");
        write_split(ds.public_split->test, dir / "split_test.txt");
    }
}

void row_normalize(ad::Matrix& features) {
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        const double s = features.row(i).cwiseAbs().sum();
        if (s > 0.0) features.row(i) /= s;
    }
}

CsrMatrix to_csr(const ad::Matrix& dense) {
    CsrMatrix m;
    m.rows = dense.rows();
    m.cols = dense.cols();
    m.offsets.assign(m.rows + 1, 0);
    for (Eigen::Index i = 0; i < dense.rows(); ++i) {
        for (Eigen::Index j = 0; j < dense.cols(); ++j) {
            const double v = dense(i, j);
            if (v != 0.0) {
                m.indices.push_back(static_cast<NodeId>(j));
                m.values.push_back(v);
            }
        }
        m.offsets[i + 1] = static_cast<EdgeIndex>(m.indices.size());
    }
    return m;
}

}  // namespace hagat::graph

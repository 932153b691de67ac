#include "hagat/harness/export.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "hagat/checkpoint.hpp"
#include "hagat/errors.hpp"

namespace hagat::harness {
namespace fs = std::filesystem;
using json = nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

double parse_double(std::string_view s, const fs::path& path) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw IngestionError(path.string() + ": cannot parse '" + std::string(s) + "'");
    }
    return v;
}

// White through orange to dark red.
std::string color(double v, double lo, double hi) {
    const double x = hi > lo ? (v - lo) / (hi - lo) : 0.5;
    const int r = static_cast<int>(255 - 75 * x);
    const int g = static_cast<int>(245 - 215 * x);
    const int b = static_cast<int>(235 - 205 * x);
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

constexpr int kCell = 64;
constexpr int kMargin = 40;

void cell(std::ostream& out, int x, int y, double v, double lo, double hi) {
    out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\"" << kCell << "\" fill=\""
        << color(v, lo, hi) << "\" stroke=\"#444\"/>\n";
    out << "<text class=\"value\" x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 4
        << "\" text-anchor=\"middle\" font-size=\"11\">" << format_double(v) << "</text>\n";
}

void write_svg(const fs::path& path, const ad::Matrix& m, const double* self, const std::string& title) {
    double lo = m.size() ? m.minCoeff() : 0.0, hi = m.size() ? m.maxCoeff() : 0.0;
    if (self) {
        lo = std::min(lo, *self);
        hi = std::max(hi, *self);
    }
    const int width = kMargin * 2 + static_cast<int>(m.cols()) * kCell + (self ? kCell + kMargin : 0);
    const int height = kMargin * 2 + static_cast<int>(m.rows()) * kCell;
    std::ofstream out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    out << "<text x=\"" << kMargin << "\" y=\"" << kMargin / 2 + 4 << "\" font-size=\"13\">" << title << "</text>\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out << "<text x=\"" << kMargin - 6 << "\" y=\"" << kMargin + r * kCell + kCell / 2 + 4
            << "\" text-anchor=\"end\" font-size=\"11\">T" << r + 1 << "</text>\n";
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            cell(out, kMargin + static_cast<int>(c) * kCell, kMargin + static_cast<int>(r) * kCell, m(r, c), lo, hi);
        }
    }
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        out << "<text x=\"" << kMargin + c * kCell + kCell / 2 << "\" y=\"" << height - kMargin / 2
            << "\" text-anchor=\"middle\" font-size=\"11\">T" << c + 1 << "</text>\n";
    }
    if (self) {
        const int x = kMargin * 2 + static_cast<int>(m.cols()) * kCell;
        cell(out, x, kMargin, *self, lo, hi);
        out << "<text x=\"" << x + kCell / 2 << "\" y=\"" << kMargin + kCell + 16
            << "\" text-anchor=\"middle\" font-size=\"11\">self</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace

void write_lap_csv(const fs::path& path, int layer, const Lap& lap) {
    std::ofstream out = open_out(path);
    out << "layer,source,target,value\n";
    for (Eigen::Index r = 0; r < lap.pattern.rows(); ++r) {
        for (Eigen::Index c = 0; c < lap.pattern.cols(); ++c) {
            out << layer << ',' << r << ',' << c << ',' << format_double(lap.pattern(r, c)) << '\n';
        }
    }
    out << layer << ",self,self," << format_double(lap.self) << '\n';
}

void write_lap_svg(const fs::path& path, int layer, const Lap& lap) {
    write_svg(path, lap.pattern, &lap.self, "Layer " + std::to_string(layer + 1) + " attention pattern");
}

std::vector<double> read_lap_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<double> out;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos) throw IngestionError(path.string() + ": malformed row");
        out.push_back(parse_double(std::string_view(line).substr(comma + 1), path));
    }
    return out;
}

std::vector<double> read_svg_annotations(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string doc = ss.str();
    const std::string open = "<text class=\"value\"";
    std::vector<double> out;
    for (std::size_t pos = doc.find(open); pos != std::string::npos; pos = doc.find(open, pos + 1)) {
        const auto start = doc.find('>', pos) + 1;
        const auto end = doc.find("</text>", start);
        out.push_back(parse_double(std::string_view(doc).substr(start, end - start), path));
    }
    return out;
}

void write_distribution_csv(const fs::path& path, const ad::Matrix& s) {
    std::ofstream out = open_out(path);
    out << "node";
    for (Eigen::Index k = 0; k < s.cols(); ++k) out << ",s_" << k + 1;
    out << '\n';
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        out << i;
        for (Eigen::Index k = 0; k < s.cols(); ++k) out << ',' << format_double(s(i, k));
        out << '\n';
    }
}

void write_matrix_csv(const fs::path& path, const ad::Matrix& m) {
    std::ofstream out = open_out(path);
    out << "source";
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << ",c_" << c + 1;
    out << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out << r;
        for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << format_double(m(r, c));
        out << '\n';
    }
}

void write_heatmap_svg(const fs::path& path, const ad::Matrix& m, const std::string& title) {
    write_svg(path, m, nullptr, title);
}

json laps_to_json(const std::vector<Lap>& laps) {
    json out = json::array();
    for (const auto& l : laps) out.push_back({{"pattern", matrix_to_json(l.pattern)}, {"self", l.self}});
    return out;
}

json report_to_json(const RunReport& report) {
    json reps = json::array();
    for (const auto& r : report.repeats) {
        json j = {{"seed", r.seed}, {"diverged", r.diverged}};
        if (r.diverged) {
            j["error"] = r.error;
            j["failed_epoch"] = r.failed_epoch;
        } else {
            j["test_acc"] = r.test_acc;
            j["best_val"] = r.best_val;
            j["best_epoch"] = r.best_epoch;
            j["epochs"] = r.epochs;
            j["seconds"] = r.seconds;
            j["laps"] = laps_to_json(r.laps);
            if (!r.categories.empty()) {
                j["categories"] = r.categories;
                j["preference"] = matrix_to_json(r.preference);
            }
        }
        reps.push_back(std::move(j));
    }
    return {{"mean_test", report.mean_test}, {"std_test", report.std_test}, {"mean_val", report.mean_val},
            {"completed", report.completed}, {"flagged", report.flagged}, {"wall_seconds", report.wall_seconds},
            {"repeats", std::move(reps)}};
}

json grid_to_json(const GridResult& grid) {
    json cells = json::array();
    for (const auto& c : grid.cells) {
        cells.push_back({{"lr", c.lr}, {"weight_decay", c.weight_decay}, {"dropout", c.dropout},
                         {"lambda", c.lambda}, {"diverged", c.diverged}, {"mean_val", c.mean_val},
                         {"mean_test", c.mean_test}, {"std_test", c.std_test}});
    }
    return {{"best", grid.best}, {"cells", std::move(cells)}};
}

void write_grid_csv(const fs::path& path, const GridResult& grid) {
    std::ofstream out = open_out(path);
    out << "lr,weight_decay,dropout,lambda,diverged,mean_val,mean_test,std_test,selected\n";
    for (std::size_t k = 0; k < grid.cells.size(); ++k) {
        const auto& c = grid.cells[k];
        out << format_double(c.lr) << ',' << format_double(c.weight_decay) << ',' << format_double(c.dropout) << ','
            << format_double(c.lambda) << ',' << (c.diverged ? 1 : 0) << ',' << format_double(c.mean_val) << ','
            << format_double(c.mean_test) << ',' << format_double(c.std_test) << ',' << (k == grid.best ? 1 : 0)
            << '\n';
    }
}

json train_config_to_json(const TrainConfig& c) {
    return {{"max_epochs", c.max_epochs}, {"patience", c.patience}, {"lr", c.lr}, {"weight_decay", c.weight_decay},
            {"seed", c.seed}, {"repeats", c.repeats}, {"split", graph::to_string(c.split.mode)},
            {"model", config_to_json(c.model)}};
}

TrainConfig train_config_from_json(const json& j) {
    TrainConfig c;
    try {
        c.max_epochs = j.value("max_epochs", c.max_epochs);
        c.patience = j.value("patience", c.patience);
        c.lr = j.value("lr", c.lr);
        c.weight_decay = j.value("weight_decay", c.weight_decay);
        c.seed = j.value("seed", c.seed);
        c.repeats = j.value("repeats", c.repeats);
        const auto mode = graph::parse_split_mode(j.value("split", std::string("supervised")));
        c.split = mode == graph::SplitMode::supervised        ? graph::SplitSpec::supervised(c.seed)
                  : mode == graph::SplitMode::semi_supervised ? graph::SplitSpec::semi_supervised(c.seed)
                                                              : graph::SplitSpec::fixed_public();
        if (j.contains("model")) c.model = config_from_json(j.at("model"));
    } catch (const json::exception& e) {
        throw ParameterError(std::string("train config: ") + e.what());
    }
    c.validate();
    return c;
}

Grid grid_from_json(const json& j) {
    Grid g;
    try {
        g.lr = j.value("lr", g.lr);
        g.weight_decay = j.value("weight_decay", g.weight_decay);
        g.dropout = j.value("dropout", g.dropout);
        g.lambda = j.value("lambda", g.lambda);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("grid: ") + e.what());
    }
    return g;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

}  // namespace hagat::harness

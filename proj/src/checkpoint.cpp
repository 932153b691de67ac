#include "hagat/checkpoint.hpp"

#include <fstream>

#include "hagat/errors.hpp"

namespace hagat {
using json = nlohmann::json;

json config_to_json(const ModelConfig& c) {
    return {{"variant", to_string(c.variant)}, {"t", c.t},
            {"lambda", c.lambda},              {"layers", c.layers},
            {"hidden", c.hidden},              {"explorer_hidden", c.explorer_hidden},
            {"dropout", c.dropout},            {"norm", to_string(c.norm)},
            {"prior_labels", to_string(c.prior_labels)}};
}

ModelConfig config_from_json(const json& j) {
    ModelConfig c;
    try {
        if (j.contains("variant")) c.variant = parse_variant(j.at("variant").get<std::string>());
        c.t = j.value("t", c.t);
        c.lambda = j.value("lambda", c.lambda);
        c.layers = j.value("layers", c.layers);
        c.hidden = j.value("hidden", c.hidden);
        c.explorer_hidden = j.value("explorer_hidden", c.explorer_hidden);
        c.dropout = j.value("dropout", c.dropout);
        if (j.contains("norm")) c.norm = parse_norm(j.at("norm").get<std::string>());
        if (j.contains("prior_labels")) c.prior_labels = parse_prior_labels(j.at("prior_labels").get<std::string>());
    } catch (const json::exception& e) {
        throw ParameterError(std::string("model config: ") + e.what());
    }
    return c;
}

json matrix_to_json(const ad::Matrix& m) {
    std::vector<double> data(m.data(), m.data() + m.size());
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ad::Matrix matrix_from_json(const json& j) {
    try {
        const auto rows = j.at("rows").get<Eigen::Index>();
        const auto cols = j.at("cols").get<Eigen::Index>();
        const auto data = j.at("data").get<std::vector<double>>();
        if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols) {
            throw ParameterError("array size does not match its shape");
        }
        ad::Matrix m(rows, cols);
        std::copy(data.begin(), data.end(), m.data());
        return m;
    } catch (const json::exception& e) {
        throw ParameterError(std::string("array: ") + e.what());
    }
}

void save_checkpoint(const std::filesystem::path& path, const ModelConfig& config, const ModelParams& params,
                     const json& meta) {
    json arrays = json::object();
    for (ad::Parameter* p : const_cast<ModelParams&>(params).parameters()) arrays[p->name] = matrix_to_json(p->value);
    if (params.prior) arrays["prior"] = matrix_to_json(*params.prior);
    const json doc = {{"format", "hagat-checkpoint"}, {"version", 1}, {"config", config_to_json(config)},
                      {"arrays", std::move(arrays)}, {"meta", meta}};
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write checkpoint " + path.string());
    out << doc.dump() << '\n';
    if (!out) throw IoError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw IoError("checkpoint " + path.string() + ": " + e.what());
    }
    if (doc.value("format", "") != "hagat-checkpoint") throw IoError(path.string() + " is not a checkpoint");

    Checkpoint ck;
    ck.config = config_from_json(doc.at("config"));
    ck.meta = doc.value("meta", json::object());
    const json& arrays = doc.at("arrays");
    if (!arrays.contains("layer0.theta")) throw ParameterError("checkpoint has no layer0.theta");
    const std::string last = "layer" + std::to_string(ck.config.layers - 1) + ".theta";
    if (!arrays.contains(last)) throw ParameterError("checkpoint has no " + last);
    const auto in_dim = arrays.at("layer0.theta").at("rows").get<Eigen::Index>();
    const auto classes = arrays.at(last).at("cols").get<int>();

    std::optional<ad::Matrix> prior;
    if (arrays.contains("prior")) prior = matrix_from_json(arrays.at("prior"));
    ad::Rng rng(0);
    ck.params = init_model(ck.config, in_dim, classes, rng, std::move(prior));
    for (ad::Parameter* p : ck.params.parameters()) {
        if (!arrays.contains(p->name)) throw ParameterError("checkpoint is missing " + p->name);
        ad::Matrix m = matrix_from_json(arrays.at(p->name));
        if (m.rows() != p->value.rows() || m.cols() != p->value.cols()) {
            throw ParameterError("checkpoint array " + p->name + " has the wrong shape");
        }
        p->value = std::move(m);
        p->zero_grad();
    }
    return ck;
}

}  // namespace hagat

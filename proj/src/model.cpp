#include "hagat/model.hpp"

#include <algorithm>
#include <cctype>

#include "hagat/errors.hpp"
#include "hagat/graph/normalize.hpp"
#include "hagat/init.hpp"

namespace hagat {

Variant parse_variant(const std::string& s) {
    std::string k = s;
    if (k.size() == 1) k[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(k[0])));
    if (k == "hagat" || k == "HA-GAT") return Variant::hagat;
    if (k == "L") return Variant::label;
    if (k == "G") return Variant::per_layer;
    if (k == "M") return Variant::mlp_explorer;
    if (k == "O") return Variant::single;
    if (k == "Z") return Variant::tiny_lambda;
    if (k == "gcn" || k == "GCN") return Variant::gcn;
    if (k == "mlp" || k == "MLP") return Variant::mlp;
    throw ParameterError("unknown variant '" + s + "' (expected hagat, L, G, M, O, Z, gcn or mlp)");
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::hagat: return "hagat";
        case Variant::label: return "L";
        case Variant::per_layer: return "G";
        case Variant::mlp_explorer: return "M";
        case Variant::single: return "O";
        case Variant::tiny_lambda: return "Z";
        case Variant::gcn: return "gcn";
        case Variant::mlp: return "mlp";
    }
    return "?";
}

bool uses_pattern(Variant v) { return v != Variant::gcn && v != Variant::mlp; }

PriorLabels parse_prior_labels(const std::string& s) {
    if (s == "all") return PriorLabels::all;
    if (s == "train") return PriorLabels::train;
    throw ParameterError("unknown prior label set '" + s + "' (expected all or train)");
}

std::string to_string(PriorLabels p) { return p == PriorLabels::all ? "all" : "train"; }

ModelConfig ModelConfig::resolved(int num_classes) const {
    ModelConfig c = *this;
    switch (variant) {
        case Variant::single: c.t = 1; break;
        case Variant::tiny_lambda: c.lambda = 1e-10; break;
        case Variant::label: c.t = num_classes; break;
        default: break;
    }
    if (num_classes < 1) throw ParameterError("model needs at least one class");
    if (uses_pattern(c.variant) && c.t < 1) throw ParameterError("t must be at least 1");
    if (uses_pattern(c.variant) && !(c.lambda > 0.0)) throw ParameterError("lambda must be positive");
    if (c.layers < 1) throw ParameterError("model needs at least one layer");
    if (c.hidden < 1 || c.explorer_hidden < 1) throw ParameterError("widths must be positive");
    if (!(c.dropout >= 0.0 && c.dropout < 1.0)) throw ParameterError("dropout must lie in [0, 1)");
    return c;
}

namespace {

bool has_explorer(const ModelConfig& c) {
    return (c.variant == Variant::hagat || c.variant == Variant::tiny_lambda || c.variant == Variant::mlp_explorer) &&
           c.t > 1;
}

}  // namespace

std::vector<ad::Parameter*> ModelParams::parameters() {
    std::vector<ad::Parameter*> out;
    if (explorer) {
        for (auto* p : explorer->parameters()) out.push_back(p);
    }
    for (auto& l : layers) {
        out.push_back(&l.theta);
        if (l.pattern.omega.value.size() != 0) {
            out.push_back(&l.pattern.omega);
            out.push_back(&l.pattern.omega_sl);
        }
        if (l.proj) out.push_back(&*l.proj);
    }
    return out;
}

ModelParams init_model(const ModelConfig& config, Eigen::Index in_dim, int num_classes, ad::Rng& rng,
                       std::optional<ad::Matrix> prior) {
    ModelParams p;
    if (has_explorer(config)) {
        const auto kind = config.variant == Variant::mlp_explorer ? ExplorerKind::mlp : ExplorerKind::gcn;
        p.explorer = init_explorer(in_dim, config.explorer_hidden, config.t, kind, rng);
    }
    Eigen::Index width = in_dim;
    for (int l = 0; l < config.layers; ++l) {
        const Eigen::Index out = l + 1 == config.layers ? num_classes : config.hidden;
        const std::string prefix = "layer" + std::to_string(l);
        LayerParams lp;
        lp.theta = ad::Parameter(prefix + ".theta", glorot_uniform(width, out, rng));
        if (uses_pattern(config.variant)) lp.pattern = init_pattern(config.t, config.lambda, prefix);
        if (config.variant == Variant::per_layer) {
            lp.proj = ad::Parameter(prefix + ".proj", glorot_uniform(width, config.t, rng));
        }
        p.layers.push_back(std::move(lp));
        width = out;
    }
    if (config.variant == Variant::label) {
        if (!prior) throw PriorError("label variant needs a label prior");
        if (prior->cols() != config.t) throw PriorError("label prior width does not match the class count");
        p.prior = std::move(prior);
    }
    return p;
}

ad::Matrix build_label_prior(std::span<const std::int32_t> labels, int num_classes, const graph::Mask* known) {
    if (num_classes < 1) throw PriorError("label prior needs at least one class");
    if (known && known->size() != labels.size()) throw PriorError("label prior mask size does not match labels");
    const auto n = static_cast<Eigen::Index>(labels.size());
    ad::Matrix s = ad::Matrix::Constant(n, num_classes, 1.0 / num_classes);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (known && !(*known)[i]) continue;
        if (labels[i] < 0 || labels[i] >= num_classes) {
            throw PriorError("node " + std::to_string(i) + " has no usable label (" + std::to_string(labels[i]) + ")");
        }
        s.row(i).setZero();
        s(i, labels[i]) = 1.0;
    }
    return s;
}

GraphContext make_context(const graph::Dataset& dataset) {
    return {graph::to_csr(dataset.features), graph::normalized_adjacency(dataset.graph, true),
            structure(dataset.graph)};
}

ad::Value per_layer_distribution(const ad::Value& h, const ad::Value& proj) {
    return ad::softmax_rows(ad::matmul(h, proj));
}

ForwardResult forward(const graph::Dataset& dataset, const GraphContext& ctx, const ModelConfig& config,
                      ModelParams& params, bool training, ad::Rng& rng, ad::Tape& tape) {
    ForwardResult r;
    if (config.variant == Variant::gcn) {
        r.logits = gcn_forward(ctx, params, config.dropout, training, rng, tape);
        return r;
    }
    if (config.variant == Variant::mlp) {
        r.logits = mlp_forward(ctx, params, config.dropout, training, rng, tape);
        return r;
    }
    if (static_cast<int>(params.layers.size()) != config.layers) throw ParameterError("parameters do not match config");
    const graph::SparseGraph& g = dataset.graph;
    const auto n = g.num_nodes();

    const graph::CsrMatrix x = ad::dropout(ctx.features, config.dropout, training, rng);
    ad::Value shared;
    if (config.variant == Variant::label) {
        if (!params.prior) throw PriorError("label variant needs a label prior");
        shared = tape.constant(*params.prior);
    } else if (params.explorer) {
        const ad::Value w0 = tape.parameter(params.explorer->w0);
        const ad::Value w1 = tape.parameter(params.explorer->w1);
        shared = explore(x, ctx.norm_adj, w0, w1, params.explorer->kind);
    } else if (config.variant != Variant::per_layer) {
        shared = tape.constant(ad::Matrix::Ones(n, 1));
    }

    ad::Value h;
    for (int l = 0; l < config.layers; ++l) {
        LayerParams& lp = params.layers[l];
        const ad::Value theta = tape.parameter(lp.theta);
        ad::Value transformed;
        ad::Value s = shared;
        if (l == 0) {
            transformed = ad::spmm(x, theta);
            if (lp.proj) s = ad::softmax_rows(ad::spmm(x, tape.parameter(*lp.proj)));
        } else {
            const ad::Value in = ad::dropout(h, config.dropout, training, rng);
            transformed = ad::matmul(in, theta);
            if (lp.proj) s = per_layer_distribution(in, tape.parameter(*lp.proj));
        }
        const double lambda = lp.pattern.lambda;
        const ad::Value p = phi(tape.parameter(lp.pattern.omega), lambda, config.norm);
        const ad::Value p_sl = phi(tape.parameter(lp.pattern.omega_sl), lambda, config.norm);
        const ad::Value w = edge_weights(s, p, g);
        const ad::Value w_self = self_loop_weights(p_sl, n);
        const Coefficients alpha = normalize(w, w_self, g, config.norm);
        h = propagate(alpha, ctx.pattern, transformed, l + 1 < config.layers);
        r.distributions.push_back(s);
        r.raw_weights.push_back(w);
        r.self_weights.push_back(w_self);
    }
    r.logits = h;
    return r;
}

namespace {

ad::Value baseline(const GraphContext& ctx, ModelParams& params, double dropout, bool training, ad::Rng& rng,
                   ad::Tape& tape, bool graph) {
    if (params.layers.empty()) throw ParameterError("baseline needs at least one layer");
    const graph::CsrMatrix x = ad::dropout(ctx.features, dropout, training, rng);
    ad::Value h;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const ad::Value theta = tape.parameter(params.layers[l].theta);
        ad::Value t = l == 0 ? ad::spmm(x, theta) : ad::matmul(ad::dropout(h, dropout, training, rng), theta);
        if (graph) t = ad::spmm(ctx.norm_adj, t);
        h = l + 1 < params.layers.size() ? ad::relu(t) : t;
    }
    return h;
}

}  // namespace

ad::Value gcn_forward(const GraphContext& ctx, ModelParams& params, double dropout, bool training, ad::Rng& rng,
                      ad::Tape& tape) {
    return baseline(ctx, params, dropout, training, rng, tape, true);
}

ad::Value mlp_forward(const GraphContext& ctx, ModelParams& params, double dropout, bool training, ad::Rng& rng,
                      ad::Tape& tape) {
    return baseline(ctx, params, dropout, training, rng, tape, false);
}

ad::Matrix overall_preference(const ad::Matrix& s, const graph::SparseGraph& graph) {
    if (s.rows() != graph.num_nodes()) throw DimensionError("overall_preference: S rows do not match node count");
    ad::Matrix neighbor_sum = ad::Matrix::Zero(s.rows(), s.cols());
    for (graph::NodeId i = 0; i < graph.num_nodes(); ++i) {
        for (auto j : graph.neighbors(i)) neighbor_sum.row(i) += s.row(j);
    }
    return s.transpose() * neighbor_sum;
}

ad::Matrix infer_distribution(const graph::Dataset& dataset, const GraphContext& ctx, const ModelConfig& config,
                              ModelParams& params) {
    if (!uses_pattern(config.variant)) throw ParameterError("baselines have no local distribution");
    ad::Tape tape;
    ad::Rng rng(0);
    const ForwardResult r = forward(dataset, ctx, config, params, false, rng, tape);
    return r.distributions.front().data();
}

}  // namespace hagat

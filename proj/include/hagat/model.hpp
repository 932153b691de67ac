#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hagat/ad/ops.hpp"
#include "hagat/attention.hpp"
#include "hagat/explorer.hpp"
#include "hagat/graph/dataset.hpp"

namespace hagat {

/// hagat: learned explorer S shared by all layers.
/// label: S is the frozen one-hot label matrix, t = C.
/// per_layer: each layer derives its own S from its input representation.
/// mlp_explorer: the explorer ignores the graph.
/// single: t = 1, one edge type.
/// tiny_lambda: lambda = 1e-10, the pattern stays at its initial all-ones value.
/// gcn, mlp: the plain baselines.
enum class Variant { hagat, label, per_layer, mlp_explorer, single, tiny_lambda, gcn, mlp };

/// Accepts hagat, L, G, M, O, Z, gcn, mlp (single letters in either case).
Variant parse_variant(const std::string& s);
std::string to_string(Variant v);
bool uses_pattern(Variant v);

enum class PriorLabels { all, train };
PriorLabels parse_prior_labels(const std::string& s);
std::string to_string(PriorLabels p);

struct ModelConfig {
    Variant variant = Variant::hagat;
    int t = 3;
    double lambda = 1.0;
    int layers = 2;
    int hidden = 64;
    int explorer_hidden = 64;
    double dropout = 0.5;
    NormScheme norm = NormScheme::neighbor;
    PriorLabels prior_labels = PriorLabels::all;

    /// Applies the settings a variant forces (t, lambda) and checks ranges.
    /// Throws ParameterError.
    ModelConfig resolved(int num_classes) const;
};

struct LayerParams {
    ParsingPattern pattern;          // unused by the baselines
    ad::Parameter theta;             // in x out
    std::optional<ad::Parameter> proj;  // per_layer variant: in x t
};

struct ModelParams {
    std::optional<ExplorerParams> explorer;
    std::vector<LayerParams> layers;
    std::optional<ad::Matrix> prior;  // label variant, N x C, never trained

    std::vector<ad::Parameter*> parameters();
};

/// `config` must already be resolved. `prior` is required for the label variant.
ModelParams init_model(const ModelConfig& config, Eigen::Index in_dim, int num_classes, ad::Rng& rng,
                       std::optional<ad::Matrix> prior = std::nullopt);

/// One-hot rows for nodes in `known` (all nodes when null); other nodes get
/// uniform rows. Throws PriorError when a known node's label is outside [0, C).
ad::Matrix build_label_prior(std::span<const std::int32_t> labels, int num_classes,
                             const graph::Mask* known = nullptr);

/// Per-dataset constants reused across forward passes.
struct GraphContext {
    graph::CsrMatrix features;  // sparse copy of X
    graph::CsrMatrix norm_adj;  // D^-1/2 (A + I) D^-1/2
    graph::CsrMatrix pattern;   // structure of A
};

GraphContext make_context(const graph::Dataset& dataset);

struct ForwardResult {
    ad::Value logits;
    std::vector<ad::Value> distributions;  // S used by each layer (empty for baselines)
    std::vector<ad::Value> raw_weights;    // pre-normalization edge weights per layer
    std::vector<ad::Value> self_weights;   // pre-normalization self weights per layer
};

/// Registers the parameters on `tape` and runs the model. Dropout draws from
/// `rng` only when training.
ForwardResult forward(const graph::Dataset& dataset, const GraphContext& ctx, const ModelConfig& config,
                      ModelParams& params, bool training, ad::Rng& rng, ad::Tape& tape);

/// softmax_rows(h proj).
ad::Value per_layer_distribution(const ad::Value& h, const ad::Value& proj);

/// Baselines over `params.layers[*].theta`, ReLU and dropout between layers.
ad::Value gcn_forward(const GraphContext& ctx, ModelParams& params, double dropout, bool training, ad::Rng& rng,
                      ad::Tape& tape);
ad::Value mlp_forward(const GraphContext& ctx, ModelParams& params, double dropout, bool training, ad::Rng& rng,
                      ad::Tape& tape);

/// S-transpose A S: the sum over stored edges (i, j) of s_i s_j^T.
ad::Matrix overall_preference(const ad::Matrix& s, const graph::SparseGraph& graph);

/// The distribution `forward` would use at layer 0 in inference mode.
ad::Matrix infer_distribution(const graph::Dataset& dataset, const GraphContext& ctx, const ModelConfig& config,
                              ModelParams& params);

}  // namespace hagat

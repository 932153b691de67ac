#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "hagat/ad/gradcheck.hpp"
#include "hagat/checkpoint.hpp"
#include "hagat/errors.hpp"
#include "hagat/graph/sbm.hpp"
#include "hagat/model.hpp"
#include "support.hpp"

using namespace hagat;
using ad::Matrix;
using ad::Tape;
using ad::Value;

namespace {

const Variant kPatternVariants[] = {Variant::hagat,  Variant::label,       Variant::per_layer,
                                    Variant::single, Variant::tiny_lambda, Variant::mlp_explorer};

graph::Dataset small_sbm(int per_class, int classes, int dim, std::uint64_t seed) {
    return graph::sbm_generate(per_class, classes, 0.4, 0.2, {dim, 1.0, 1.0}, seed);
}

ModelConfig config_for(Variant v, int classes, int hidden = 8) {
    ModelConfig c;
    c.variant = v;
    c.hidden = hidden;
    c.explorer_hidden = hidden;
    c.dropout = 0.3;
    return c.resolved(classes);
}

ModelParams params_for(const ModelConfig& c, const graph::Dataset& ds, std::uint64_t seed) {
    ad::Rng rng(seed);
    std::optional<Matrix> prior;
    if (c.variant == Variant::label) prior = build_label_prior(ds.labels, ds.num_classes);
    return init_model(c, ds.feature_dim(), ds.num_classes, rng, prior);
}

Matrix logits(const graph::Dataset& ds, const ModelConfig& c, ModelParams& p) {
    Tape tape;
    ad::Rng rng(0);
    return forward(ds, make_context(ds), c, p, false, rng, tape).logits.data();
}

graph::Dataset permuted(const graph::Dataset& ds, const std::vector<graph::NodeId>& perm) {
    graph::Dataset out = ds;
    out.graph = ds.graph.permuted(perm);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        out.features.row(perm[i]) = ds.features.row(static_cast<Eigen::Index>(i));
        out.labels[perm[i]] = ds.labels[i];
    }
    return out;
}

// Moves the parsing patterns off their all-ones start, where every edge
// weight is 1 whatever S is. The shift is applied to lambda * omega, so tiny
// lambda gets the same generic pattern as lambda = 1.
void perturb(ModelParams& p, std::uint64_t seed, double lambda = 1.0) {
    for (ad::Parameter* q : p.parameters()) {
        if (q->decay) continue;
        q->value.array() += 0.3 / lambda * test::uniform(q->value.rows(), q->value.cols(), seed++, 0.0, 1.0).array();
    }
}

}  // namespace

TEST(ModelConfig, VariantsForceTheirSettings) {
    ModelConfig c;
    c.t = 5;
    c.variant = Variant::single;
    EXPECT_EQ(c.resolved(4).t, 1);
    c.variant = Variant::tiny_lambda;
    EXPECT_EQ(c.resolved(4).lambda, 1e-10);
    c.variant = Variant::label;
    EXPECT_EQ(c.resolved(4).t, 4);
    c.variant = Variant::hagat;
    c.t = 0;
    EXPECT_THROW(c.resolved(4), ParameterError);
    c.t = 3;
    c.dropout = 1.0;
    EXPECT_THROW(c.resolved(4), ParameterError);
    for (const char* s : {"hagat", "L", "g", "M", "o", "Z", "gcn", "mlp"}) {
        EXPECT_EQ(parse_variant(to_string(parse_variant(s))), parse_variant(s));
    }
    EXPECT_THROW(parse_variant("T"), ParameterError);
}

TEST(InitModel, ShapesChainFromFeaturesToClasses) {
    const graph::Dataset ds = small_sbm(5, 3, 7, 1);
    for (const Variant v : kPatternVariants) {
        SCOPED_TRACE(to_string(v));
        const ModelConfig c = config_for(v, 3);
        ModelParams p = params_for(c, ds, 2);
        ASSERT_EQ(p.layers.size(), 2u);
        EXPECT_EQ(p.layers[0].theta.value.rows(), 7);
        EXPECT_EQ(p.layers[0].theta.value.cols(), 8);
        EXPECT_EQ(p.layers[1].theta.value.cols(), 3);
        EXPECT_EQ(p.layers[1].pattern.categories(), c.t);
        EXPECT_EQ(p.explorer.has_value(), v == Variant::hagat || v == Variant::tiny_lambda || v == Variant::mlp_explorer);
        EXPECT_EQ(p.layers[1].proj.has_value(), v == Variant::per_layer);
    }
    ModelConfig l = config_for(Variant::label, 3);
    ad::Rng rng(1);
    EXPECT_THROW(init_model(l, 7, 3, rng), PriorError);
}

TEST(Forward, TinyLambdaWithGcnNormIsAPlainGcn) {
    graph::Dataset ds = small_sbm(6, 3, 5, 3);
    ds.features = test::uniform(18, 5, 4);
    ModelConfig c = config_for(Variant::tiny_lambda, 3);
    c.norm = NormScheme::gcn;
    ModelParams p = params_for(c, ds, 5);
    Tape tape;
    ad::Rng rng(0);
    const ForwardResult r = forward(ds, make_context(ds), c, p, false, rng, tape);
    for (const Value& w : r.raw_weights) EXPECT_LT((w.data().array() - 1.0).abs().maxCoeff(), 1e-9);
    for (const Value& w : r.self_weights) EXPECT_LT((w.data().array() - 1.0).abs().maxCoeff(), 1e-9);

    const Matrix a = test::dense_normalized(ds.graph);
    const Matrix oracle = a * (a * ds.features * p.layers[0].theta.value).cwiseMax(0.0) * p.layers[1].theta.value;
    EXPECT_LT((r.logits.data() - oracle).cwiseAbs().maxCoeff(), 1e-10);

    Tape t2;
    EXPECT_LT((gcn_forward(make_context(ds), p, 0.0, false, rng, t2).data() - oracle).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Forward, SingleCategoryWeightsAreConstantPerLayer) {
    const graph::Dataset ds = small_sbm(6, 3, 5, 6);
    const ModelConfig c = config_for(Variant::single, 3);
    ModelParams p = params_for(c, ds, 7);
    p.layers[0].pattern.omega.value(0, 0) = 0.37;
    p.layers[1].pattern.omega.value(0, 0) = 2.9;
    Tape tape;
    ad::Rng rng(0);
    const ForwardResult r = forward(ds, make_context(ds), c, p, true, rng, tape);
    ASSERT_EQ(r.raw_weights.size(), 2u);
    for (const Value& w : r.raw_weights) EXPECT_EQ(w.data().maxCoeff(), w.data().minCoeff());
    EXPECT_EQ(r.raw_weights[0].data()(0, 0), 0.37);
    EXPECT_EQ(r.raw_weights[1].data()(0, 0), 2.9);
}

TEST(Forward, EdgelessGraphIsAnMlpWithSelfGains) {
    graph::Dataset ds = small_sbm(4, 2, 5, 8);
    ds.graph = graph::SparseGraph::from_edges(8, {}, true);
    const ModelConfig c = config_for(Variant::hagat, 2);
    ModelParams p = params_for(c, ds, 9);
    Tape tape;
    ad::Rng rng(0);
    const Matrix got = forward(ds, make_context(ds), c, p, false, rng, tape).logits.data();
    EXPECT_LT((got - mlp_forward(make_context(ds), p, 0.0, false, rng, tape).data()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Forward, PermutationEquivariantForEveryVariant) {
    const graph::Dataset ds = small_sbm(15, 3, 20, 10);
    std::vector<graph::NodeId> perm(45);
    for (int i = 0; i < 45; ++i) perm[i] = (i * 17 + 5) % 45;
    const graph::Dataset dp = permuted(ds, perm);
    for (const Variant v : {Variant::hagat, Variant::label, Variant::per_layer, Variant::single, Variant::tiny_lambda,
                            Variant::mlp_explorer, Variant::gcn, Variant::mlp}) {
        for (const NormScheme norm : {NormScheme::neighbor, NormScheme::softmax}) {
            SCOPED_TRACE(to_string(v) + "/" + to_string(norm));
            ModelConfig c = config_for(v, 3, 32);
            c.norm = norm;
            ModelParams p = params_for(c, ds, 11);
            perturb(p, 12);
            ModelParams q = params_for(c, dp, 11);
            perturb(q, 12);
            const Matrix a = logits(ds, c, p);
            const Matrix b = logits(dp, c, q);
            for (int i = 0; i < 45; ++i) ASSERT_EQ(b.row(perm[i]), a.row(i)) << "node " << i;
        }
    }
}

TEST(Forward, EndToEndGradientsMatchFiniteDifferences) {
    const graph::Dataset ds = graph::sbm_generate(5, 2, 0.6, 0.3, {4, 1.0, 1.0}, 13);
    graph::Mask train(10, 1);
    for (const Variant v : kPatternVariants) {
        for (const NormScheme norm : {NormScheme::neighbor, NormScheme::mean, NormScheme::gcn, NormScheme::softmax}) {
            SCOPED_TRACE(to_string(v) + "/" + to_string(norm));
            ModelConfig c = config_for(v, 2, 4);
            c.norm = norm;
            if (v != Variant::single && v != Variant::label) c.t = 3;
            ModelParams p = params_for(c, ds, 14);
            perturb(p, 15, c.lambda);
            const GraphContext ctx = make_context(ds);
            const auto params = p.parameters();
            const auto res = ad::finite_diff_check(
                [&](Tape& t) {
                    ad::Rng rng(16);  // the same dropout masks on every evaluation
                    const ForwardResult r = forward(ds, ctx, c, p, true, rng, t);
                    return ad::masked_cross_entropy(r.logits, ds.labels, train);
                },
                params, test::model_steps(params, c.lambda, 1e-5));
            EXPECT_LT(res.max_rel_error, 1e-4) << res.worst_parameter << "(" << res.worst_row << "," << res.worst_col
                                               << ") " << res.analytic << " vs " << res.numeric;
        }
    }
}

TEST(LabelPrior, OneHotRowsAndPreferences) {
    const std::vector<std::int32_t> y{0, 1, 0};
    Matrix expect(3, 2);
    expect << 1, 0, 0, 1, 1, 0;
    EXPECT_EQ(build_label_prior(y, 2), expect);

    const std::vector<std::int32_t> z{2, 4};
    const Matrix s = build_label_prior(z, 5);
    const Matrix m = s.row(0).transpose() * s.row(1);
    EXPECT_EQ(m(2, 4), 1.0);
    EXPECT_EQ(m.sum(), 1.0);

    const graph::Mask known{1, 0, 1};
    const Matrix partial = build_label_prior(y, 2, &known);
    EXPECT_EQ(partial.row(1), Matrix::Constant(1, 2, 0.5));
    EXPECT_EQ(partial.row(2), expect.row(2));

    const std::vector<std::int32_t> bad{0, -1, 1};
    EXPECT_THROW(build_label_prior(bad, 2), PriorError);
    EXPECT_NO_THROW(build_label_prior(bad, 2, &known));
    const graph::Mask short_mask{1, 1};
    EXPECT_THROW(build_label_prior(y, 2, &short_mask), PriorError);
}

TEST(LabelPrior, PriorIsNeverTrained) {
    const graph::Dataset ds = small_sbm(4, 2, 4, 17);
    const ModelConfig c = config_for(Variant::label, 2);
    ModelParams p = params_for(c, ds, 18);
    for (const ad::Parameter* q : p.parameters()) EXPECT_EQ(q->name.find("prior"), std::string::npos);
    Tape tape;
    ad::Rng rng(0);
    const ForwardResult r = forward(ds, make_context(ds), c, p, false, rng, tape);
    EXPECT_FALSE(r.distributions[0].requires_grad());
    EXPECT_EQ(r.distributions[0].data(), *p.prior);
}

TEST(PerLayer, ZeroInputGivesUniformRows) {
    Tape tape;
    const Matrix s = per_layer_distribution(tape.constant(Matrix::Zero(4, 6)), tape.constant(test::uniform(6, 3, 19))).data();
    EXPECT_LT((s.array() - 1.0 / 3.0).abs().maxCoeff(), 1e-16);
    EXPECT_EQ(per_layer_distribution(tape.constant(test::uniform(4, 6, 20)), tape.constant(test::uniform(6, 1, 21))).data(),
              Matrix::Ones(4, 1));
}

TEST(PerLayer, ProjectionGradientMatchesFiniteDifferences) {
    ad::Parameter h("h", test::uniform(5, 4, 22)), proj("proj", test::uniform(4, 3, 23));
    const Matrix probe = test::uniform(5, 3, 24);
    std::vector<ad::Parameter*> params{&proj, &h};
    const auto res = ad::finite_diff_check(
        [&](Tape& t) {
            return ad::sum(ad::mul(per_layer_distribution(t.parameter(h), t.parameter(proj)), t.constant(probe)));
        },
        params, 1e-5);
    EXPECT_LT(res.max_rel_error, 1e-4);
}

TEST(Baselines, GcnOnEdgelessGraphIsAnMlp) {
    graph::Dataset ds = small_sbm(3, 2, 4, 25);
    ds.graph = graph::SparseGraph::from_edges(6, {}, true);
    const ModelConfig c = config_for(Variant::gcn, 2);
    ModelParams p = params_for(c, ds, 26);
    Tape tape;
    ad::Rng rng(0);
    const GraphContext ctx = make_context(ds);
    EXPECT_EQ(gcn_forward(ctx, p, 0.0, false, rng, tape).data(), mlp_forward(ctx, p, 0.0, false, rng, tape).data());
}

TEST(Baselines, MatchDenseOracleOnFourNodes) {
    graph::Dataset ds = small_sbm(2, 2, 3, 27);
    ds.graph = test::undirected(4, {{0, 1}, {1, 2}, {2, 3}, {0, 2}});
    ds.features = test::uniform(4, 3, 28);
    const ModelConfig c = config_for(Variant::gcn, 2, 5);
    ModelParams p = params_for(c, ds, 29);
    const Matrix& t0 = p.layers[0].theta.value;
    const Matrix& t1 = p.layers[1].theta.value;
    const Matrix a = test::dense_normalized(ds.graph);
    const GraphContext ctx = make_context(ds);
    Tape tape;
    ad::Rng rng(0);
    EXPECT_LT((gcn_forward(ctx, p, 0.0, true, rng, tape).data() - a * (a * ds.features * t0).cwiseMax(0.0) * t1)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
    EXPECT_LT((mlp_forward(ctx, p, 0.0, true, rng, tape).data() - (ds.features * t0).cwiseMax(0.0) * t1)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
    EXPECT_EQ(gcn_forward(ctx, p, 0.0, true, rng, tape).data(), gcn_forward(ctx, p, 0.0, true, rng, tape).data());
}

TEST(OverallPreference, CountsAndUniformMass) {
    const graph::SparseGraph g = test::undirected(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}, {1, 3}});
    const std::vector<std::int32_t> y{0, 1, 1, 0, 2};
    const Matrix onehot = build_label_prior(y, 3);
    Matrix counts = Matrix::Zero(3, 3);
    for (const auto& [u, v] : g.edges()) counts(y[u], y[v]) += 1.0;
    EXPECT_EQ(overall_preference(onehot, g), counts);
    EXPECT_EQ(overall_preference(Matrix::Constant(5, 2, 0.5), g), Matrix::Constant(2, 2, 12.0 / 4.0));

    const Matrix s = test::row_softmax(test::uniform(5, 3, 30, -2, 2));
    Matrix loop = Matrix::Zero(3, 3);
    for (const auto& [u, v] : g.edges()) loop += s.row(u).transpose() * s.row(v);
    const Matrix m = overall_preference(s, g);
    EXPECT_LT((m - loop).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(m.sum(), 12.0, 1e-12);
    EXPECT_GE(m.minCoeff(), 0.0);
}

TEST(Checkpoint, SaveLoadForwardIsIdentical) {
    const graph::Dataset ds = small_sbm(5, 3, 6, 31);
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "hagat_model_ckpt";
    std::filesystem::create_directories(dir);
    for (const Variant v : {Variant::hagat, Variant::label, Variant::per_layer, Variant::single, Variant::gcn}) {
        SCOPED_TRACE(to_string(v));
        const ModelConfig c = config_for(v, 3);
        ModelParams p = params_for(c, ds, 32);
        perturb(p, 33);
        for (ad::Parameter* q : p.parameters()) q->value.array() += 1.0 / 3.0;
        const auto path = dir / (to_string(v) + ".json");
        save_checkpoint(path, c, p, {{"seed", 32}});
        Checkpoint back = load_checkpoint(path);
        EXPECT_EQ(back.meta.at("seed"), 32);
        EXPECT_EQ(config_to_json(back.config), config_to_json(c));
        auto a = p.parameters(), b = back.params.parameters();
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            EXPECT_EQ(a[k]->name, b[k]->name);
            EXPECT_EQ(a[k]->value, b[k]->value);
            EXPECT_EQ(a[k]->decay, b[k]->decay);
        }
        EXPECT_EQ(logits(ds, c, p), logits(ds, back.config, back.params));
    }
    EXPECT_THROW(load_checkpoint(dir / "missing.json"), IoError);
    std::ofstream(dir / "broken.json") << R"({"format": "hagat-checkpoint", "version": 1, "config": {}, "arrays": {}})";
    EXPECT_THROW(load_checkpoint(dir / "broken.json"), ParameterError);
}

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hagat/checkpoint.hpp"
#include "hagat/errors.hpp"
#include "hagat/graph/convert.hpp"
#include "hagat/graph/homophily.hpp"
#include "hagat/harness/export.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace hagat;

namespace {

struct TrainArgs {
    std::string dataset;
    std::string variant = "hagat";
    int t = 3;
    double lambda = 1.0;
    std::string norm = "neighbor";
    std::string split = "supervised";
    std::uint64_t seed = 0;
    int repeats = 10;
    std::string prior = "all";
    int jobs = 1;
    double lr = 0.01;
    double weight_decay = 5e-4;
    double dropout = 0.5;
    int epochs = 1000;
    int patience = 200;
    int hidden = 64;
    int layers = 2;
    bool row_normalize = false;
    std::string out;
};

graph::SplitSpec split_spec(const std::string& mode, std::uint64_t seed) {
    switch (graph::parse_split_mode(mode)) {
        case graph::SplitMode::supervised: return graph::SplitSpec::supervised(seed);
        case graph::SplitMode::semi_supervised: return graph::SplitSpec::semi_supervised(seed);
        case graph::SplitMode::fixed_public: return graph::SplitSpec::fixed_public();
    }
    return {};
}

std::string command_line(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

void write_manifest(const fs::path& dir, const std::string& cmd, const json& config, const json& extra) {
    json m = {{"command", cmd}, {"config", config}};
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    harness::write_json(dir / "manifest.json", m);
}

void print_report(const harness::RunReport& r) {
    for (const auto& rep : r.repeats) {
        if (rep.diverged) {
            std::printf("  seed %llu  diverged: %s\n", static_cast<unsigned long long>(rep.seed), rep.error.c_str());
        } else {
            std::printf("  seed %llu  test %.4f  val %.4f  best epoch %d  (%.1fs)\n",
                        static_cast<unsigned long long>(rep.seed), rep.test_acc, rep.best_val, rep.best_epoch,
                        rep.seconds);
        }
    }
    std::printf("test accuracy %.2f +- %.2f over %d repeats%s\n", 100 * r.mean_test, 100 * r.std_test, r.completed,
                r.flagged ? " (some repeats diverged and were excluded)" : "");
}

struct Loaded {
    Checkpoint ck;
    std::optional<graph::Dataset> dataset;
};

Loaded load_for_export(const std::string& ckpt, const std::string& dataset_override, bool need_dataset) {
    Loaded l{load_checkpoint(ckpt), std::nullopt};
    std::string dir = dataset_override;
    if (dir.empty()) dir = l.ck.meta.value("dataset", "");
    if (!dir.empty() && (need_dataset || fs::exists(dir))) {
        graph::LoadOptions opts;
        opts.row_normalize = l.ck.meta.value("row_normalize", false);
        l.dataset = graph::load_dataset(dir, "tsv", opts);
    } else if (need_dataset) {
        throw IoError("checkpoint does not record a dataset; pass --dataset");
    }
    return l;
}

int run_train(const TrainArgs& a, const std::string& cmd) {
    graph::LoadOptions lo;
    lo.row_normalize = a.row_normalize;
    const graph::Dataset ds = graph::load_dataset(a.dataset, "tsv", lo);
    harness::TrainConfig cfg;
    cfg.max_epochs = a.epochs;
    cfg.patience = a.patience;
    cfg.lr = a.lr;
    cfg.weight_decay = a.weight_decay;
    cfg.seed = a.seed;
    cfg.repeats = a.repeats;
    cfg.split = split_spec(a.split, a.seed);
    cfg.model.variant = parse_variant(a.variant);
    cfg.model.t = a.t;
    cfg.model.lambda = a.lambda;
    cfg.model.norm = parse_norm(a.norm);
    cfg.model.prior_labels = parse_prior_labels(a.prior);
    cfg.model.dropout = a.dropout;
    cfg.model.hidden = a.hidden;
    cfg.model.layers = a.layers;
    cfg.model = cfg.model.resolved(ds.num_classes);
    cfg.validate();

    const fs::path out = a.out.empty() ? fs::path("runs") / ("train-" + ds.name + "-" + to_string(cfg.model.variant) +
                                                               "-seed" + std::to_string(a.seed))
                                       : fs::path(a.out);
    fs::create_directories(out);
    json seeds = json::array();
    for (int k = 0; k < cfg.repeats; ++k) seeds.push_back(cfg.seed + k);
    write_manifest(out, cmd, harness::train_config_to_json(cfg),
                   {{"dataset", fs::absolute(a.dataset).string()}, {"row_normalize", a.row_normalize}, {"seeds", seeds}});

    std::printf("%s: N=%d E=%lld d=%lld C=%d, variant %s, split %s\n", ds.name.c_str(), ds.num_nodes(),
                static_cast<long long>(ds.graph.num_edges()), static_cast<long long>(ds.feature_dim()), ds.num_classes,
                to_string(cfg.model.variant).c_str(), a.split.c_str());
    const harness::RunReport r = harness::run_experiment(ds, cfg, a.jobs, true);
    for (const auto& rep : r.repeats) {
        if (!rep.result) continue;
        const json meta = {{"dataset", fs::absolute(a.dataset).string()}, {"row_normalize", a.row_normalize},
                           {"seed", rep.seed}, {"split", a.split}, {"test_acc", rep.test_acc},
                           {"best_val", rep.best_val}, {"best_epoch", rep.best_epoch}};
        save_checkpoint(out / "checkpoints" / ("seed" + std::to_string(rep.seed) + ".json"), rep.result->config,
                        rep.result->params, meta);
    }
    harness::write_json(out / "report.json", harness::report_to_json(r));
    print_report(r);
    std::printf("outputs in %s\n", out.string().c_str());
    return r.completed > 0 ? 0 : 1;
}

int run_grid(const std::string& config_path, int jobs_override, const std::string& cmd) {
    std::ifstream in(config_path);
    if (!in) throw IoError("cannot open " + config_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(config_path + ": " + e.what());
    }
    const std::string dataset = j.at("dataset").get<std::string>();
    graph::LoadOptions lo;
    lo.row_normalize = j.value("row_normalize", false);
    const graph::Dataset ds = graph::load_dataset(dataset, "tsv", lo);
    harness::TrainConfig base = harness::train_config_from_json(j);
    const harness::Grid grid = harness::grid_from_json(j.value("grid", json::object()));
    const int jobs = jobs_override > 0 ? jobs_override : j.value("jobs", 1);
    const fs::path out = j.value("out", std::string("runs/grid-") + ds.name);
    fs::create_directories(out);
    write_manifest(out, cmd, harness::train_config_to_json(base),
                   {{"dataset", fs::absolute(dataset).string()},
                    {"row_normalize", lo.row_normalize},
                    {"grid", {{"lr", grid.lr}, {"weight_decay", grid.weight_decay}, {"dropout", grid.dropout},
                              {"lambda", grid.lambda}}},
                    {"jobs", jobs}});

    const harness::GridResult g = harness::grid_search(ds, base, grid, jobs);
    harness::write_grid_csv(out / "grid.csv", g);
    json result = harness::grid_to_json(g);
    result["best_config"] = harness::train_config_to_json(g.best_config);
    harness::write_json(out / "grid.json", result);
    for (std::size_t k = 0; k < g.cells.size(); ++k) {
        const auto& c = g.cells[k];
        std::printf("%s lr=%g wd=%g dropout=%g lambda=%g  val %.4f  test %.4f +- %.4f%s\n", k == g.best ? "*" : " ",
                    c.lr, c.weight_decay, c.dropout, c.lambda, c.mean_val, c.mean_test, c.std_test,
                    c.diverged ? "  diverged" : "");
    }
    std::printf("outputs in %s\n", out.string().c_str());
    return 0;
}

int run_export_lap(const std::string& ckpt, const std::string& out) {
    const Checkpoint ck = load_checkpoint(ckpt);
    const auto laps = harness::extract_laps(ck.config, ck.params);
    if (laps.empty()) throw ParameterError("checkpoint has no attention pattern (baseline model)");
    for (std::size_t l = 0; l < laps.size(); ++l) {
        const std::string stem = "lap_layer" + std::to_string(l + 1);
        harness::write_lap_csv(fs::path(out) / (stem + ".csv"), static_cast<int>(l), laps[l]);
        harness::write_lap_svg(fs::path(out) / (stem + ".svg"), static_cast<int>(l), laps[l]);
    }
    std::printf("wrote %zu layer patterns to %s\n", laps.size(), out.c_str());
    return 0;
}

int run_export_s(const std::string& ckpt, const std::string& dataset, const std::string& out) {
    Loaded l = load_for_export(ckpt, dataset, true);
    const GraphContext ctx = make_context(*l.dataset);
    const ad::Matrix s = infer_distribution(*l.dataset, ctx, l.ck.config, l.ck.params);
    harness::write_distribution_csv(out, s);
    std::printf("wrote %lld x %lld distribution to %s\n", static_cast<long long>(s.rows()),
                static_cast<long long>(s.cols()), out.c_str());
    return 0;
}

int run_export_m(const std::string& ckpt, const std::string& dataset, const std::string& out) {
    Loaded l = load_for_export(ckpt, dataset, true);
    const GraphContext ctx = make_context(*l.dataset);
    const ad::Matrix s = infer_distribution(*l.dataset, ctx, l.ck.config, l.ck.params);
    const ad::Matrix m = overall_preference(s, l.dataset->graph);
    const auto cats = overall_categories(s);
    harness::write_matrix_csv(fs::path(out) / "preference.csv", m);
    harness::write_heatmap_svg(fs::path(out) / "preference.svg", m, "Overall edge preference");
    harness::write_json(fs::path(out) / "categories.json", {{"categories", cats}});
    std::printf("wrote preference matrix and category totals to %s\n", out.c_str());
    return 0;
}

int run_export_report(const std::string& ckpt, const std::string& dataset, const std::string& out) {
    Loaded l = load_for_export(ckpt, dataset, false);
    json report = {{"config", config_to_json(l.ck.config)},
                   {"meta", l.ck.meta},
                   {"laps", harness::laps_to_json(harness::extract_laps(l.ck.config, l.ck.params))}};
    if (l.dataset && uses_pattern(l.ck.config.variant)) {
        const GraphContext ctx = make_context(*l.dataset);
        const ad::Matrix s = infer_distribution(*l.dataset, ctx, l.ck.config, l.ck.params);
        report["categories"] = overall_categories(s);
        report["preference"] = matrix_to_json(overall_preference(s, l.dataset->graph));
    }
    harness::write_json(out, report);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heterophily-aware graph attention: training, analysis and data conversion"};
    app.require_subcommand(1);
    const std::string cmd = command_line(argc, argv);

    std::string raw, out_dir, source = "planetoid";
    auto* convert = app.add_subcommand("convert", "Convert raw benchmark files to the canonical layout");
    convert->add_option("raw", raw, "Raw directory")->required();
    convert->add_option("out", out_dir, "Output directory")->required();
    convert->add_option("--source", source, "planetoid, webkb, wiki or actor")->capture_default_str();

    TrainArgs ta;
    auto* train = app.add_subcommand("train", "Train repeatedly and report mean test accuracy");
    train->add_option("--dataset", ta.dataset, "Dataset directory")->required();
    train->add_option("--variant", ta.variant, "hagat, L, G, M, O, Z, gcn or mlp")->capture_default_str();
    train->add_option("--t", ta.t, "Number of latent categories")->capture_default_str();
    train->add_option("--lambda", ta.lambda, "Gradient scaling factor")->capture_default_str();
    train->add_option("--norm", ta.norm, "neighbor, mean, gcn or softmax")->capture_default_str();
    train->add_option("--split", ta.split, "supervised, semi or public")->capture_default_str();
    train->add_option("--seed", ta.seed, "Base seed")->capture_default_str();
    train->add_option("--repeats", ta.repeats, "Number of repeats")->capture_default_str();
    train->add_option("--prior-labels", ta.prior, "Label prior source for variant L: all or train")
        ->capture_default_str();
    train->add_option("--jobs", ta.jobs, "Worker threads")->capture_default_str();
    train->add_option("--lr", ta.lr, "Learning rate")->capture_default_str();
    train->add_option("--weight-decay", ta.weight_decay, "L2 penalty")->capture_default_str();
    train->add_option("--dropout", ta.dropout, "Dropout rate")->capture_default_str();
    train->add_option("--epochs", ta.epochs, "Maximum epochs")->capture_default_str();
    train->add_option("--patience", ta.patience, "Early stopping patience")->capture_default_str();
    train->add_option("--hidden", ta.hidden, "Hidden width")->capture_default_str();
    train->add_option("--layers", ta.layers, "Layer count")->capture_default_str();
    train->add_flag("--row-normalize", ta.row_normalize, "Scale feature rows to unit L1 norm");
    train->add_option("--out", ta.out, "Run directory");

    std::string grid_config;
    int grid_jobs = 0;
    auto* grid = app.add_subcommand("grid", "Grid search from a JSON config");
    grid->add_option("--config", grid_config, "Config file")->required();
    grid->add_option("--jobs", grid_jobs, "Worker threads (overrides the config)");

    std::string ckpt, dataset, out;
    auto* lap = app.add_subcommand("export-lap", "Write per-layer attention patterns as CSV and SVG");
    auto* es = app.add_subcommand("export-S", "Write the local distribution S as CSV");
    auto* em = app.add_subcommand("export-M", "Write the overall preference matrix and category totals");
    auto* er = app.add_subcommand("export-report", "Write a JSON report for a checkpoint");
    for (auto* sub : {lap, es, em, er}) {
        sub->add_option("--checkpoint", ckpt, "Checkpoint file")->required();
        sub->add_option("--out", out, "Output path");
        if (sub != lap) sub->add_option("--dataset", dataset, "Dataset directory (defaults to the one recorded)");
    }

    std::string hom_dataset;
    auto* hom = app.add_subcommand("homophily", "Print the homophily ratio of a dataset");
    hom->add_option("--dataset", hom_dataset, "Dataset directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*convert) {
            const auto r = graph::convert(raw, out_dir, graph::parse_raw_source(source));
            std::printf("%s: N=%d d=%lld C=%d\n", r.name.c_str(), r.nodes, static_cast<long long>(r.feature_dim),
                        r.classes);
            std::printf("edges: %lld raw records, %lld stored directed after symmetrization, %lld undirected pairs\n",
                        static_cast<long long>(r.raw_edges), static_cast<long long>(r.stored_directed_edges),
                        static_cast<long long>(r.undirected_pairs));
            std::printf("public split: %s\n", r.public_split ? "yes" : "no");
            return 0;
        }
        if (*train) return run_train(ta, cmd);
        if (*grid) return run_grid(grid_config, grid_jobs, cmd);
        if (*lap) return run_export_lap(ckpt, out.empty() ? "lap" : out);
        if (*es) return run_export_s(ckpt, dataset, out.empty() ? "S.csv" : out);
        if (*em) return run_export_m(ckpt, dataset, out.empty() ? "preference" : out);
        if (*er) return run_export_report(ckpt, dataset, out.empty() ? "report.json" : out);
        if (*hom) {
            const graph::Dataset ds = graph::load_dataset(hom_dataset);
            std::printf("%s: H = %.6f (N=%d, %lld undirected pairs)\n", ds.name.c_str(),
                        graph::homophily_ratio(ds.graph, ds.labels), ds.num_nodes(),
                        static_cast<long long>(ds.undirected_pairs()));
            return 0;
        }
    } catch (const hagat::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}

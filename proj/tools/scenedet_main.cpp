#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "scenedet/app_ir/parser.hpp"
#include "scenedet/app_ir/validate.hpp"
#include "scenedet/common/errors.hpp"
#include "scenedet/detector/detector.hpp"
#include "scenedet/harness/corpus.hpp"
#include "scenedet/harness/eval.hpp"
#include "scenedet/scenegraph/features.hpp"
#include "scenedet/scenegraph/scene_graph.hpp"

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using namespace scenedet;
using json = nlohmann::ordered_json;

namespace {

void write_or_print(const std::string& text, const std::string& out_path)
{
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + out_path);
    out << text;
}

std::vector<fs::path> collect_bundles(const fs::path& target)
{
    std::vector<fs::path> files;
    if (fs::is_directory(target)) {
        for (const auto& e : fs::recursive_directory_iterator(target)) {
            if (e.is_regular_file() && e.path().extension() == ".appir")
                files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
    }
    else {
        files.push_back(target);
    }
    return files;
}

void add_hyper_flags(CLI::App* cmd, gae::Hyper& theta, gae::Hyper& psi)
{
    cmd->add_option("--mask-p", theta.mask_p, "edge mask probability");
    cmd->add_option("--alpha", theta.alpha, "global loss weight");
    cmd->add_option("--lr", theta.lr, "learning rate");
    cmd->add_option("--epochs", theta.epochs, "training epochs");
    cmd->add_option("--neg-ratio", theta.neg_ratio,
                    "negative samples per positive");
    cmd->callback([&theta, &psi]() {
        psi.mask_p = theta.mask_p;
        psi.alpha = theta.alpha;
        psi.lr = theta.lr;
        psi.epochs = theta.epochs;
        psi.neg_ratio = theta.neg_ratio;
    });
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Scene-graph based app classifier"};
    app.set_config("--config", "", "TOML-style config file");
    app.require_subcommand(1);

    // gen-corpus
    auto* gen = app.add_subcommand("gen-corpus",
                                   "Generate the synthetic corpus");
    harness::CorpusSpec spec;
    std::string gen_out = "corpus";
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--per-class", spec.counts_per_class,
                    "apps per class family");
    gen->add_option("--seed", spec.seed, "corpus seed");
    gen->add_flag("--no-renamed",
                  [&spec](std::int64_t) { spec.emit_renamed = false; },
                  "skip rename-obfuscated variants");

    // build-sg
    auto* build = app.add_subcommand(
            "build-sg", "Build scene graphs from .appir bundles");
    std::string build_in;
    std::string build_out;
    int build_depth = 10;
    build->add_option("input", build_in, "bundle file or directory")
            ->required();
    build->add_option("--out", build_out,
                      "output file (single bundle) or directory");
    build->add_option("--max-depth", build_depth,
                      "inter-procedural depth budget");

    // encode
    auto* enc = app.add_subcommand(
            "encode", "Encode a scene-graph JSON into a feature CSV");
    std::string enc_in;
    std::string enc_out;
    enc->add_option("input", enc_in, "scene-graph JSON file")->required();
    enc->add_option("--out", enc_out, "output CSV path");

    // train
    auto* train_cmd = app.add_subcommand(
            "train", "Train encoders and classifier on a corpus");
    std::string train_corpus;
    std::string model_dir = "model";
    harness::PipelineOptions train_opts;
    train_cmd->add_option("--corpus", train_corpus, "corpus directory")
            ->required();
    train_cmd->add_option("--model-dir", model_dir,
                          "output model bundle directory");
    train_cmd->add_option("--seed", train_opts.seed, "pipeline seed");
    add_hyper_flags(train_cmd, train_opts.theta, train_opts.psi);

    // classify
    auto* cls_cmd = app.add_subcommand(
            "classify", "Classify bundles with a trained model");
    std::string cls_model;
    std::string cls_input;
    std::string cls_corpus;
    std::string cls_out;
    std::uint64_t cls_seed = 42;
    cls_cmd->add_option("input", cls_input,
                        "bundle file or directory to classify")
            ->required();
    cls_cmd->add_option("--model-dir", cls_model, "model bundle directory")
            ->required();
    cls_cmd->add_option("--corpus", cls_corpus,
                        "training corpus directory (relation graph "
                        "context)")
            ->required();
    cls_cmd->add_option("--seed", cls_seed,
                        "seed used when the model was trained");
    cls_cmd->add_option("--out", cls_out, "write JSON result here");

    // eval
    auto* eval_cmd = app.add_subcommand(
            "eval", "Static evaluation against ground-truth sidecars");
    std::string eval_dir;
    std::string eval_out;
    eval_cmd->add_option("--corpus", eval_dir, "corpus directory")
            ->required();
    eval_cmd->add_option("--out", eval_out, "write JSON report here");

    // report
    auto* rep_cmd = app.add_subcommand(
            "report", "Full pipeline report on a corpus");
    std::string rep_dir;
    std::string rep_out;
    std::string rep_mode = "full";
    harness::PipelineOptions rep_opts;
    rep_cmd->add_option("--corpus", rep_dir, "corpus directory")
            ->required();
    rep_cmd->add_option("--out", rep_out, "write JSON report here");
    rep_cmd->add_option("--seed", rep_opts.seed, "pipeline seed");
    rep_cmd->add_option("--features", rep_mode,
                        "feature set: full | atg | manifest");
    rep_cmd->add_flag("--shuffle-labels", rep_opts.shuffle_labels,
                      "chance-level control run");
    add_hyper_flags(rep_cmd, rep_opts.theta, rep_opts.psi);

    try {
        app.parse(argc, argv);

        if (*gen) {
            spec.out_dir = gen_out;
            auto index = harness::gen_corpus(spec);
            std::cout << "generated " << index.apps.size() << " apps in "
                      << gen_out << "\n";
        }
        else if (*build) {
            analysis::AnalysisConfig cfg;
            cfg.max_depth = build_depth;
            auto files = collect_bundles(build_in);
            for (const auto& f : files) {
                auto bundle = app_ir::parse_bundle_file(f);
                auto sg = scenegraph::build_scene_graph(bundle, cfg);
                std::string text = scenegraph::serialize(sg);
                if (files.size() == 1 && !fs::is_directory(build_in)) {
                    write_or_print(text, build_out);
                }
                else {
                    fs::path out_dir =
                            build_out.empty() ? fs::path(".")
                                              : fs::path(build_out);
                    fs::create_directories(out_dir);
                    fs::path out =
                            out_dir / (f.stem().string() + ".sg.json");
                    write_or_print(text, out.string());
                }
            }
        }
        else if (*enc) {
            std::ifstream in(enc_in, std::ios::binary);
            if (!in)
                throw IoError("cannot read " + enc_in);
            std::ostringstream buf;
            buf << in.rdbuf();
            auto sg = scenegraph::deserialize(buf.str());
            auto m = scenegraph::encode_features(sg);
            write_or_print(scenegraph::to_csv(m), enc_out);
        }
        else if (*train_cmd) {
            harness::PipelineModel model;
            auto report = harness::run_pipeline(train_corpus, train_opts,
                                                &model);
            detector::save_model_bundle(model.bundle, model_dir);
            std::cout << harness::report_to_json(report);
            std::cerr << "model bundle written to " << model_dir << "\n";
        }
        else if (*cls_cmd) {
            auto bundle_dir = detector::load_model_bundle(cls_model);
            // Rebuild training-side records to give test apps a relation
            // graph to join.
            harness::PipelineOptions opts;
            opts.seed = cls_seed;
            harness::PipelineModel model;
            harness::run_pipeline(cls_corpus, opts, &model);

            std::vector<detector::AppRecord> tests;
            for (const auto& f : collect_bundles(cls_input)) {
                auto b = app_ir::parse_bundle_file(f);
                auto sg = scenegraph::build_scene_graph(b);
                auto feats = scenegraph::encode_features(
                        sg, bundle_dir.feature_config);
                std::map<std::string, int> node_index;
                std::vector<std::pair<int, int>> edges;
                for (int r = 0; r < feats.rows; ++r)
                    node_index[feats.node_order[r]] = r;
                for (const auto& e : sg.atg.edges)
                    edges.push_back(
                            {node_index[e.from], node_index[e.to]});
                gae::Matrix x(feats.rows, feats.dim);
                x.a = feats.values;
                auto g = gae::DenseGraph::from_edges(feats.rows, edges,
                                                     std::move(x));
                auto a_hat = gae::normalize_adjacency(g);
                detector::AppRecord rec;
                rec.app_id = b.manifest.package_name;
                rec.package_name = b.manifest.package_name;
                rec.app_name = b.manifest.app_name;
                rec.cert_digest = b.manifest.cert_digest;
                rec.scene_vector = gae::pool(gae::encode(
                        g.features, a_hat, bundle_dir.f_theta));
                tests.push_back(std::move(rec));
            }
            auto preds = detector::classify(model.train_apps, tests,
                                            bundle_dir.f_psi,
                                            bundle_dir.classifier);
            json out = json::object();
            for (const auto& [id, c] : preds) {
                json e;
                e["label"] = detector::label_name(c.label);
                json scores = json::object();
                for (int i = 0; i < detector::kNumClasses; ++i)
                    scores[detector::label_name(
                            static_cast<detector::AppLabel>(i))] =
                            c.scores[i];
                e["scores"] = scores;
                out[id] = e;
            }
            write_or_print(out.dump(2) + "\n", cls_out);
        }
        else if (*eval_cmd) {
            auto report = harness::eval_static(eval_dir);
            write_or_print(harness::report_to_json(report), eval_out);
        }
        else if (*rep_cmd) {
            if (rep_mode == "atg")
                rep_opts.mode = harness::FeatureMode::AtgOnly;
            else if (rep_mode == "manifest")
                rep_opts.mode = harness::FeatureMode::ManifestBaseline;
            else if (rep_mode != "full")
                throw CLI::ValidationError("--features",
                                           "unknown feature mode "
                                                   + rep_mode);
            auto report = harness::run_pipeline(rep_dir, rep_opts);
            write_or_print(harness::report_to_json(report), rep_out);
        }
        return 0;
    }
    catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    catch (const SyntaxError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    catch (const BundleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}

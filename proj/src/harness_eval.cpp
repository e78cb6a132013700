#include "scenedet/harness/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "scenedet/common/errors.hpp"

#include "scenedet/app_ir/parser.hpp"
#include "scenedet/atg/atg.hpp"
#include "scenedet/common/hash.hpp"
#include "scenedet/common/rng.hpp"
#include "scenedet/scenegraph/features.hpp"
#include "scenedet/scenegraph/scene_graph.hpp"

namespace scenedet::harness {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn fn)
{
    if (workers <= 0)
        workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(
            static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                while (true) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= count)
                        return;
                    fn(i);
                }
            }
            catch (...) {
                errors[static_cast<std::size_t>(w)] =
                        std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto& e : errors) {
        if (e)
            std::rethrow_exception(e);
    }
}

} // namespace

EvalReport eval_static(const fs::path& dir,
                       const analysis::AnalysisConfig& cfg)
{
    auto t0 = Clock::now();
    EvalReport report;
    PrCounts transitions;
    PrCounts tokens;

    std::vector<fs::path> bundles;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file()
            && entry.path().extension() == ".appir") {
            fs::path gt = entry.path();
            gt.replace_extension(".gt.json");
            if (fs::exists(gt))
                bundles.push_back(entry.path());
        }
    }
    std::sort(bundles.begin(), bundles.end());

    struct PerApp {
        GroundTruth gt;
        std::set<std::pair<std::string, std::string>> recovered;
        std::set<std::string> recovered_tokens;
        double seconds = 0.0;
    };
    std::vector<PerApp> results(bundles.size());

    parallel_for(bundles.size(), 0, [&](std::size_t i) {
        auto app_t0 = Clock::now();
        fs::path gt_path = bundles[i];
        gt_path.replace_extension(".gt.json");
        PerApp& r = results[i];
        r.gt = ground_truth_from_json(read_file(gt_path));

        auto bundle = app_ir::parse_bundle_file(bundles[i]);
        auto cg = callgraph::build_call_graph(bundle);
        auto atg = atg::build_atg(bundle, cg, cfg);
        r.recovered = atg.edge_pairs();
        auto imprints = widgets::generate_imprints(
                bundle, cg, widgets::default_stoplist(), cfg);
        for (const auto& [owner, toks] : imprints)
            r.recovered_tokens.insert(toks.begin(), toks.end());
        r.seconds = seconds_since(app_t0);
    });

    std::map<std::string, scenegraph::GraphStats> per_label_totals;
    for (const auto& r : results) {
        std::set<std::pair<std::string, std::string>> expected(
                r.gt.edges.begin(), r.gt.edges.end());
        for (const auto& e : r.recovered) {
            if (expected.count(e))
                ++transitions.tp;
            else
                ++transitions.fp;
        }
        for (const auto& e : expected) {
            if (!r.recovered.count(e))
                ++transitions.fn;
        }
        report.planted_misses_expected +=
                static_cast<int>(r.gt.missed_edges.size());
        for (const auto& e : r.gt.missed_edges) {
            if (r.recovered.count(e))
                ++report.planted_misses_recovered;
        }
        for (const auto& t : r.recovered_tokens) {
            if (r.gt.tokens.count(t))
                ++tokens.tp;
            else
                ++tokens.fp;
        }
        for (const auto& t : r.gt.tokens) {
            if (!r.recovered_tokens.count(t))
                ++tokens.fn;
        }
        report.max_seconds_per_app =
                std::max(report.max_seconds_per_app, r.seconds);
    }

    report.transitions = transitions;
    report.tokens = tokens;
    report.timings.total_s = seconds_since(t0);
    return report;
}

namespace {

std::vector<double> manifest_vector(const app_ir::AppBundle& b, int dim)
{
    // Hashed manifest profile: permissions, app-name words, package
    // segments, plus raw counts. Stands in for the paper's manifest-only
    // feature column.
    std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
    int perm_buckets = dim * 3 / 8;
    int name_buckets = dim / 4;
    int pkg_buckets = dim / 4;
    int counts_base = perm_buckets + name_buckets + pkg_buckets;
    for (const auto& p : b.manifest.permissions)
        v[fnv1a64(p) % perm_buckets] += 1.0;
    std::string word;
    auto flush_word = [&](int base, int buckets) {
        if (!word.empty())
            v[base + static_cast<int>(fnv1a64(word) % buckets)] += 1.0;
        word.clear();
    };
    for (char c : b.manifest.app_name) {
        if (c == ' ')
            flush_word(perm_buckets, name_buckets);
        else
            word += c;
    }
    flush_word(perm_buckets, name_buckets);
    for (char c : b.manifest.package_name) {
        if (c == '.')
            flush_word(perm_buckets + name_buckets, pkg_buckets);
        else
            word += c;
    }
    flush_word(perm_buckets + name_buckets, pkg_buckets);
    for (auto& x : v)
        x = std::log1p(x);
    if (counts_base + 2 < dim) {
        v[counts_base] = std::log1p(b.manifest.permissions.size());
        v[counts_base + 1] =
                std::log1p(b.manifest.declared_activities.size());
        v[counts_base + 2] = std::log1p(b.classes.size());
    }
    return v;
}

void apply_atg_only_mask(scenegraph::FeatureMatrix& m,
                         const scenegraph::FeatureConfig& cfg)
{
    // Keep in/out-degree and the fragment flag; zero everything the UI
    // attributes contribute.
    int struct_base = cfg.widget_buckets + cfg.listener_buckets
            + cfg.token_buckets;
    for (int r = 0; r < m.rows; ++r) {
        double* row = m.values.data()
                + static_cast<std::size_t>(r) * m.dim;
        for (int c = 0; c < struct_base; ++c)
            row[c] = 0.0;
        row[struct_base + 2] = 0.0; // widget count
        row[struct_base + 3] = 0.0; // layout depth
        row[struct_base + 5] = 0.0; // has_webview
        row[struct_base + 6] = 0.0; // token count
        row[struct_base + 7] = 0.0; // listener count
    }
}

struct LoadedApp {
    std::string app_id;
    detector::AppLabel label{};
    app_ir::ManifestInfo manifest;
    scenegraph::SceneGraph sg;
    scenegraph::FeatureMatrix features;
    int class_count = 0;
};

} // namespace

EvalReport run_pipeline(const fs::path& corpus_dir,
                        const PipelineOptions& opts,
                        PipelineModel* model_out)
{
    auto t0 = Clock::now();
    EvalReport report;
    scenegraph::FeatureConfig fcfg;

    CorpusIndex index = load_corpus_index(corpus_dir);
    std::vector<CorpusManifestEntry> labeled;
    for (const auto& e : index.apps) {
        if (!e.benchmark && e.label)
            labeled.push_back(e);
    }

    // Build scene graphs and feature matrices (per-app, parallel).
    auto stage_t = Clock::now();
    std::vector<LoadedApp> apps(labeled.size());
    parallel_for(labeled.size(), opts.workers, [&](std::size_t i) {
        const auto& entry = labeled[i];
        auto bundle = app_ir::parse_bundle_file(corpus_dir / entry.file);
        LoadedApp& app = apps[i];
        app.app_id = entry.app_id;
        app.label = *entry.label;
        app.manifest = bundle.manifest;
        app.class_count = static_cast<int>(bundle.classes.size());
        app.sg = scenegraph::build_scene_graph(bundle, opts.analysis);
        app.features = scenegraph::encode_features(app.sg, fcfg);
        if (opts.mode == FeatureMode::AtgOnly)
            apply_atg_only_mask(app.features, fcfg);
    });
    report.timings.scene_graphs_s = seconds_since(stage_t);

    // Corpus statistics per label.
    {
        std::map<std::string, std::array<double, 3>> sums;
        std::map<std::string, int> counts;
        for (const auto& app : apps) {
            auto st = scenegraph::stats(app.sg);
            std::string name = detector::label_name(app.label);
            sums[name][0] += st.transition_pairs;
            sums[name][1] += st.widgets;
            sums[name][2] += st.tokens;
            ++counts[name];
        }
        for (const auto& [name, s] : sums) {
            ClassStats cs;
            cs.apps = counts[name];
            cs.mean_transition_pairs = s[0] / counts[name];
            cs.mean_widgets = s[1] / counts[name];
            cs.mean_tokens = s[2] / counts[name];
            report.corpus_stats[name] = cs;
        }
    }

    // Optional chance-level control: permute all labels.
    if (opts.shuffle_labels) {
        RandomStream rng(opts.seed ^ 0x5abe15ull);
        std::vector<detector::AppLabel> labels;
        labels.reserve(apps.size());
        for (const auto& a : apps)
            labels.push_back(a.label);
        rng.shuffle(labels);
        for (std::size_t i = 0; i < apps.size(); ++i)
            apps[i].label = labels[i];
    }

    // 70/20/10 split by seeded shuffle.
    std::vector<std::size_t> order(apps.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    RandomStream split_rng(opts.seed);
    split_rng.shuffle(order);
    std::size_t n_train = apps.size() * 7 / 10;
    std::size_t n_val = apps.size() * 2 / 10;
    std::vector<std::size_t> train_idx(order.begin(),
                                       order.begin() + n_train);
    std::vector<std::size_t> val_idx(order.begin() + n_train,
                                     order.begin() + n_train + n_val);
    std::vector<std::size_t> test_idx(order.begin() + n_train + n_val,
                                      order.end());

    // Scene-graph encoder f_theta: one model over the disjoint union of
    // the training scene graphs.
    gae::GaeParams f_theta;
    stage_t = Clock::now();
    if (opts.mode != FeatureMode::ManifestBaseline) {
        int total_nodes = 0;
        for (std::size_t i : train_idx)
            total_nodes += apps[i].features.rows;
        gae::Matrix x(total_nodes, fcfg.dim());
        std::vector<std::pair<int, int>> edges;
        int base = 0;
        for (std::size_t i : train_idx) {
            const auto& app = apps[i];
            std::map<std::string, int> node_index;
            for (int r = 0; r < app.features.rows; ++r) {
                node_index[app.features.node_order[r]] = base + r;
                for (int c = 0; c < app.features.dim; ++c)
                    x.at(base + r, c) = app.features.at(r, c);
            }
            for (const auto& e : app.sg.atg.edges)
                edges.push_back({node_index[e.from], node_index[e.to]});
            base += app.features.rows;
        }
        auto union_graph =
                gae::DenseGraph::from_edges(total_nodes, edges,
                                            std::move(x));
        f_theta = gae::train(union_graph, opts.theta);
    }
    report.timings.train_theta_s = seconds_since(stage_t);

    // Per-app scene vectors.
    stage_t = Clock::now();
    std::vector<detector::AppRecord> records(apps.size());
    parallel_for(apps.size(), opts.workers, [&](std::size_t i) {
        const auto& app = apps[i];
        detector::AppRecord rec;
        rec.app_id = app.app_id;
        rec.package_name = app.manifest.package_name;
        rec.app_name = app.manifest.app_name;
        rec.cert_digest = app.manifest.cert_digest;
        rec.label = app.label;
        if (opts.mode == FeatureMode::ManifestBaseline) {
            app_ir::AppBundle shim;
            shim.manifest = app.manifest;
            shim.classes.resize(static_cast<std::size_t>(app.class_count));
            rec.scene_vector = manifest_vector(shim, 32);
        }
        else {
            std::map<std::string, int> node_index;
            std::vector<std::pair<int, int>> edges;
            for (int r = 0; r < app.features.rows; ++r)
                node_index[app.features.node_order[r]] = r;
            for (const auto& e : app.sg.atg.edges)
                edges.push_back({node_index[e.from], node_index[e.to]});
            gae::Matrix x(app.features.rows, app.features.dim);
            x.a = app.features.values;
            auto g = gae::DenseGraph::from_edges(app.features.rows, edges,
                                                 std::move(x));
            auto a_hat = gae::normalize_adjacency(g);
            rec.scene_vector =
                    gae::pool(gae::encode(g.features, a_hat, f_theta));
        }
        records[i] = std::move(rec);
    });
    report.timings.embed_s = seconds_since(stage_t);

    auto subset = [&](const std::vector<std::size_t>& idx,
                      bool with_labels) {
        std::vector<detector::AppRecord> out;
        out.reserve(idx.size());
        for (std::size_t i : idx) {
            detector::AppRecord r = records[i];
            if (!with_labels)
                r.label.reset();
            out.push_back(std::move(r));
        }
        return out;
    };

    std::vector<detector::AppRecord> train_apps = subset(train_idx, true);

    // Self-supervised relation-graph encoder f_psi.
    stage_t = Clock::now();
    auto h_train = detector::build_relation_graph(train_apps);
    gae::GaeParams f_psi;
    if (std::getenv("SCENEDET_DEBUG_RANDOM_PSI")) {
        auto g0 = detector::to_dense_graph(h_train);
        f_psi = gae::init_params({g0.features.cols, 64, 32}, opts.psi.seed);
    }
    else {
        f_psi = detector::self_train_encoder(h_train, opts.psi);
    }
    report.timings.train_psi_s = seconds_since(stage_t);

    // Frozen-encoder classifier.
    stage_t = Clock::now();
    detector::ClassifierHyper clf_hyper;
    clf_hyper.seed = opts.seed;
    auto clf = detector::train_classifier(h_train, f_psi, clf_hyper);
    report.timings.classifier_s = seconds_since(stage_t);

    auto evaluate = [&](const std::vector<std::size_t>& idx,
                        ConfusionMatrix* confusion) {
        if (idx.empty())
            return 0.0;
        // One app per call: the union graph changes as little as possible,
        // the way apps arrive one by one in production.
        std::map<std::string, detector::Classification> preds;
        for (std::size_t i : idx) {
            auto one = subset({i}, false);
            auto p = detector::classify(train_apps, one, f_psi, clf);
            preds.insert(p.begin(), p.end());
        }
        int correct = 0;
        for (std::size_t i : idx) {
            const auto& pred = preds.at(records[i].app_id);
            if (pred.label == apps[i].label)
                ++correct;
            else if (std::getenv("SCENEDET_DEBUG_ERRORS")) {
                int deg = 0;
                for (const auto& t : train_apps) {
                    if (t.cert_digest == records[i].cert_digest
                        || t.app_name == records[i].app_name)
                        ++deg;
                }
                fprintf(stderr, "MISS %s true=%s pred=%s train_deg=%d\n",
                        records[i].app_id.c_str(),
                        detector::label_name(apps[i].label),
                        detector::label_name(pred.label), deg);
            }
            if (confusion)
                confusion->add(apps[i].label, pred.label);
        }
        return static_cast<double>(correct) / idx.size();
    };

    if (std::getenv("SCENEDET_DEBUG_TRAINACC")) {
        gae::DenseGraph gtr = detector::to_dense_graph(h_train);
        std::vector<int> allr(gtr.n);
        for (int i = 0; i < gtr.n; ++i)
            allr[i] = i;
        detector::standardize_columns(gtr.features, allr);
        auto ah = gae::normalize_adjacency(gtr);
        auto ztr = gae::encode(gtr.features, ah, f_psi);
        int corr = 0;
        for (int i = 0; i < ztr.rows; ++i) {
            double best = -1e18;
            int bi = -1;
            for (int c = 0; c < detector::kNumClasses; ++c) {
                double s = clf.bias.at(0, c);
                for (int k = 0; k < ztr.cols; ++k)
                    s += ztr.at(i, k) * clf.weights.at(k, c);
                if (s > best) {
                    best = s;
                    bi = c;
                }
            }
            if (h_train.nodes[i].label
                && bi == static_cast<int>(*h_train.nodes[i].label))
                ++corr;
        }
        fprintf(stderr, "clf train accuracy: %.3f\n",
                double(corr) / ztr.rows);
    }

    report.has_classification = true;
    report.val_accuracy = evaluate(val_idx, nullptr);
    report.test_accuracy = evaluate(test_idx, &report.confusion);
    auto sup = report.confusion.supports();
    for (int i = 0; i < detector::kNumClasses; ++i) {
        report.per_class_accuracy[i] = sup[i] == 0
                ? 0.0
                : static_cast<double>(report.confusion.m[i][i]) / sup[i];
    }

    if (model_out) {
        model_out->bundle = {f_theta, f_psi, clf, fcfg};
        model_out->train_apps = train_apps;
    }
    report.timings.total_s = seconds_since(t0);
    return report;
}

} // namespace scenedet::harness

#include "scenedet/detector/detector.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "scenedet/common/errors.hpp"
#include "scenedet/common/rng.hpp"

namespace scenedet::detector {

using json = nlohmann::ordered_json;

const char* label_name(AppLabel label)
{
    switch (label) {
    case AppLabel::GamblingGame:
        return "gambling_game";
    case AppLabel::Porn:
        return "porn";
    case AppLabel::InvestmentScam:
        return "investment_scam";
    case AppLabel::Miscellaneous:
        return "miscellaneous";
    case AppLabel::Legitimate:
        return "legitimate";
    }
    return "?";
}

std::optional<AppLabel> label_from(const std::string& name)
{
    for (auto l : {AppLabel::GamblingGame, AppLabel::Porn,
                   AppLabel::InvestmentScam, AppLabel::Miscellaneous,
                   AppLabel::Legitimate}) {
        if (name == label_name(l))
            return l;
    }
    return std::nullopt;
}

gae::Matrix RelationGraph::feature_matrix() const
{
    int f = nodes.empty() ? 0 : static_cast<int>(nodes[0].scene_vector.size());
    gae::Matrix x(static_cast<int>(nodes.size()), f);
    for (std::size_t r = 0; r < nodes.size(); ++r) {
        if (static_cast<int>(nodes[r].scene_vector.size()) != f)
            throw ShapeMismatch("scene vector length mismatch at "
                                + nodes[r].app_id);
        for (int c = 0; c < f; ++c)
            x.at(static_cast<int>(r), c) = nodes[r].scene_vector[c];
    }
    return x;
}

void standardize_columns(gae::Matrix& x, const std::vector<int>& fit_rows,
                         double target_sd)
{
    if (fit_rows.empty())
        return;
    for (int c = 0; c < x.cols; ++c) {
        double mean = 0.0;
        for (int r : fit_rows)
            mean += x.at(r, c);
        mean /= static_cast<double>(fit_rows.size());
        double var = 0.0;
        for (int r : fit_rows) {
            double d = x.at(r, c) - mean;
            var += d * d;
        }
        var /= static_cast<double>(fit_rows.size());
        double scale = target_sd / std::sqrt(var + 1e-12);
        for (int r = 0; r < x.rows; ++r)
            x.at(r, c) = (x.at(r, c) - mean) * scale;
    }
}

RelationGraph build_relation_graph(const std::vector<AppRecord>& apps)
{
    RelationGraph h;
    std::set<std::string> ids;
    for (const auto& a : apps) {
        if (!ids.insert(a.app_id).second)
            throw DuplicateAppId("duplicate app id " + a.app_id);
    }
    h.nodes = apps;
    for (std::size_t i = 0; i < apps.size(); ++i) {
        for (std::size_t j = i + 1; j < apps.size(); ++j) {
            const auto& a = apps[i];
            const auto& b = apps[j];
            bool overlap = a.package_name == b.package_name
                    || a.app_name == b.app_name
                    || a.cert_digest == b.cert_digest;
            if (overlap)
                h.edges.push_back({static_cast<int>(i),
                                   static_cast<int>(j)});
        }
    }
    return h;
}

gae::DenseGraph to_dense_graph(const RelationGraph& h)
{
    return gae::DenseGraph::from_edges(static_cast<int>(h.nodes.size()),
                                       h.edges, h.feature_matrix());
}

gae::GaeParams self_train_encoder(const RelationGraph& h,
                                  const gae::Hyper& hyper,
                                  gae::TrainStats* stats)
{
    gae::DenseGraph g = to_dense_graph(h);
    std::vector<int> all(g.n);
    for (int i = 0; i < g.n; ++i)
        all[i] = i;
    standardize_columns(g.features, all);
    return gae::train(g, hyper, stats);
}

namespace {

void softmax_row(double* row, int n)
{
    double mx = row[0];
    for (int i = 1; i < n; ++i)
        mx = std::max(mx, row[i]);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        row[i] = std::exp(row[i] - mx);
        sum += row[i];
    }
    for (int i = 0; i < n; ++i)
        row[i] /= sum;
}

} // namespace

ClassifierParams train_classifier(const RelationGraph& h,
                                  const gae::GaeParams& f_psi,
                                  const ClassifierHyper& hyper)
{
    gae::DenseGraph g = to_dense_graph(h);
    std::vector<int> all(g.n);
    for (int i = 0; i < g.n; ++i)
        all[i] = i;
    standardize_columns(g.features, all);
    gae::Csr a_hat = gae::normalize_adjacency(g);
    gae::Matrix z = gae::encode(g.features, a_hat, f_psi);

    std::vector<int> rows;
    std::vector<int> labels;
    for (std::size_t i = 0; i < h.nodes.size(); ++i) {
        if (h.nodes[i].label) {
            rows.push_back(static_cast<int>(i));
            labels.push_back(static_cast<int>(*h.nodes[i].label));
        }
    }
    if (rows.empty())
        throw EmptyClassError("no labeled apps to train on");

    const int f = z.cols;
    const int n = static_cast<int>(rows.size());
    ClassifierParams clf;
    clf.weights = gae::Matrix(f, kNumClasses);
    clf.bias = gae::Matrix(1, kNumClasses);
    {
        RandomStream rng(hyper.seed);
        double limit = std::sqrt(6.0 / (f + kNumClasses));
        for (auto& v : clf.weights.a)
            v = rng.next_range(-limit, limit);
    }

    int epochs = hyper.epochs;
    if (const char* env = std::getenv("SCENEDET_CLF_EPOCHS"))
        epochs = std::atoi(env);
    gae::Matrix probs(n, kNumClasses);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        // Forward: softmax(zW + b) over the labeled rows.
        for (int r = 0; r < n; ++r) {
            const double* zr = z.row(rows[r]);
            double* pr = probs.row(r);
            for (int c = 0; c < kNumClasses; ++c) {
                double s = clf.bias.at(0, c);
                for (int k = 0; k < f; ++k)
                    s += zr[k] * clf.weights.at(k, c);
                pr[c] = s;
            }
            softmax_row(pr, kNumClasses);
        }
        // Gradient of mean cross-entropy + L2.
        gae::Matrix gw(f, kNumClasses);
        gae::Matrix gb(1, kNumClasses);
        for (int r = 0; r < n; ++r) {
            const double* zr = z.row(rows[r]);
            for (int c = 0; c < kNumClasses; ++c) {
                double d = probs.at(r, c) - (labels[r] == c ? 1.0 : 0.0);
                d /= n;
                gb.at(0, c) += d;
                for (int k = 0; k < f; ++k)
                    gw.at(k, c) += d * zr[k];
            }
        }
        for (std::size_t i = 0; i < gw.a.size(); ++i)
            gw.a[i] += 2.0 * hyper.l2 * clf.weights.a[i];
        for (std::size_t i = 0; i < clf.weights.a.size(); ++i)
            clf.weights.a[i] -= hyper.lr * gw.a[i];
        for (std::size_t i = 0; i < clf.bias.a.size(); ++i)
            clf.bias.a[i] -= hyper.lr * gb.a[i];
    }
    clf.trained = true;
    return clf;
}

std::map<std::string, Classification>
classify(const std::vector<AppRecord>& train_apps,
         const std::vector<AppRecord>& test_apps,
         const gae::GaeParams& f_psi, const ClassifierParams& clf)
{
    std::set<std::string> train_ids;
    for (const auto& a : train_apps)
        train_ids.insert(a.app_id);
    for (const auto& a : test_apps) {
        if (train_ids.count(a.app_id))
            throw IdCollision("test app id " + a.app_id
                              + " collides with a training app");
    }

    // The union graph is rebuilt and renormalized from scratch, so test
    // apps participate in their neighbors' propagation.
    std::vector<AppRecord> all = train_apps;
    all.insert(all.end(), test_apps.begin(), test_apps.end());
    RelationGraph h = build_relation_graph(all);
    gae::DenseGraph g = to_dense_graph(h);
    std::vector<int> fit(train_apps.size());
    for (std::size_t i = 0; i < train_apps.size(); ++i)
        fit[i] = static_cast<int>(i);
    standardize_columns(g.features, fit);
    gae::Csr a_hat = gae::normalize_adjacency(g);
    gae::Matrix z = gae::encode(g.features, a_hat, f_psi);

    std::map<std::string, Classification> out;
    for (std::size_t i = 0; i < test_apps.size(); ++i) {
        int row = static_cast<int>(train_apps.size() + i);
        Classification c{};
        const double* zr = z.row(row);
        for (int cls = 0; cls < kNumClasses; ++cls) {
            double s = clf.bias.at(0, cls);
            for (int k = 0; k < z.cols; ++k)
                s += zr[k] * clf.weights.at(k, cls);
            c.scores[cls] = s;
        }
        softmax_row(c.scores.data(), kNumClasses);
        int best = 0;
        for (int cls = 1; cls < kNumClasses; ++cls) {
            if (c.scores[cls] > c.scores[best])
                best = cls;
        }
        c.label = static_cast<AppLabel>(best);
        out[test_apps[i].app_id] = c;
    }
    return out;
}

void save_model_bundle(const ModelBundle& bundle,
                       const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    gae::save_params(bundle.f_theta, dir / "f_theta.json");
    gae::save_params(bundle.f_psi, dir / "f_psi.json");

    json cj;
    cj["version"] = "clf/1";
    cj["weights"]["rows"] = bundle.classifier.weights.rows;
    cj["weights"]["cols"] = bundle.classifier.weights.cols;
    cj["weights"]["data"] = bundle.classifier.weights.a;
    cj["bias"] = bundle.classifier.bias.a;
    cj["trained"] = bundle.classifier.trained;
    std::ofstream cf(dir / "classifier.json");
    cf << cj.dump(1) << "\n";

    json fj;
    fj["widget_buckets"] = bundle.feature_config.widget_buckets;
    fj["listener_buckets"] = bundle.feature_config.listener_buckets;
    fj["token_buckets"] = bundle.feature_config.token_buckets;
    fj["structural_slots"] = bundle.feature_config.structural_slots;
    std::ofstream ff(dir / "feature_config.json");
    ff << fj.dump(1) << "\n";

    std::ofstream vf(dir / "VERSION");
    vf << "model/1\n";
}

ModelBundle load_model_bundle(const std::filesystem::path& dir)
{
    {
        std::ifstream vf(dir / "VERSION");
        std::string v;
        if (!vf || !(vf >> v) || v != "model/1")
            throw FormatError((dir / "VERSION").string(),
                              "missing or unsupported model version");
    }
    ModelBundle bundle;
    bundle.f_theta = gae::load_params(dir / "f_theta.json");
    bundle.f_psi = gae::load_params(dir / "f_psi.json");

    std::ifstream cf(dir / "classifier.json");
    if (!cf)
        throw IoError("cannot read classifier.json");
    json cj;
    cf >> cj;
    bundle.classifier.weights =
            gae::Matrix(cj["weights"]["rows"].get<int>(),
                        cj["weights"]["cols"].get<int>());
    bundle.classifier.weights.a =
            cj["weights"]["data"].get<std::vector<double>>();
    bundle.classifier.bias = gae::Matrix(1, kNumClasses);
    bundle.classifier.bias.a = cj["bias"].get<std::vector<double>>();
    bundle.classifier.trained = cj["trained"].get<bool>();

    std::ifstream ff(dir / "feature_config.json");
    if (!ff)
        throw IoError("cannot read feature_config.json");
    json fj;
    ff >> fj;
    bundle.feature_config.widget_buckets = fj["widget_buckets"].get<int>();
    bundle.feature_config.listener_buckets =
            fj["listener_buckets"].get<int>();
    bundle.feature_config.token_buckets = fj["token_buckets"].get<int>();
    bundle.feature_config.structural_slots =
            fj["structural_slots"].get<int>();
    return bundle;
}

} // namespace scenedet::detector

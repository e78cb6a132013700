#include "scenedet/harness/metrics.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace scenedet::harness {

using json = nlohmann::ordered_json;

int ConfusionMatrix::total() const
{
    int t = 0;
    for (const auto& row : m) {
        for (int v : row)
            t += v;
    }
    return t;
}

int ConfusionMatrix::correct() const
{
    int c = 0;
    for (int i = 0; i < detector::kNumClasses; ++i)
        c += m[i][i];
    return c;
}

double ConfusionMatrix::accuracy() const
{
    int t = total();
    return t == 0 ? 0.0 : static_cast<double>(correct()) / t;
}

std::array<int, detector::kNumClasses> ConfusionMatrix::supports() const
{
    std::array<int, detector::kNumClasses> s{};
    for (int i = 0; i < detector::kNumClasses; ++i) {
        for (int j = 0; j < detector::kNumClasses; ++j)
            s[i] += m[i][j];
    }
    return s;
}

bool report_self_consistent(const EvalReport& r, std::string* why)
{
    auto fail = [&](const std::string& msg) {
        if (why)
            *why = msg;
        return false;
    };
    auto check_pr = [&](const PrCounts& c, const char* name) {
        double p = c.precision();
        double rec = c.recall();
        double expect = p + rec == 0.0 ? 0.0 : 2.0 * p * rec / (p + rec);
        if (std::abs(c.f1() - expect) > 1e-12)
            return fail(std::string(name) + " f1 inconsistent");
        return true;
    };
    if (r.transitions && !check_pr(*r.transitions, "transitions"))
        return false;
    if (r.tokens && !check_pr(*r.tokens, "tokens"))
        return false;
    if (r.has_classification) {
        if (std::abs(r.confusion.accuracy() - r.test_accuracy) > 1e-12)
            return fail("test accuracy does not match confusion matrix");
        auto sup = r.confusion.supports();
        for (int i = 0; i < detector::kNumClasses; ++i) {
            if (sup[i] > 0) {
                double acc = static_cast<double>(r.confusion.m[i][i])
                        / sup[i];
                if (std::abs(acc - r.per_class_accuracy[i]) > 1e-12)
                    return fail("per-class accuracy inconsistent");
            }
        }
    }
    return true;
}

std::string report_to_json(const EvalReport& r)
{
    json j;
    auto pr_json = [](const PrCounts& c) {
        json p;
        p["tp"] = c.tp;
        p["fp"] = c.fp;
        p["fn"] = c.fn;
        p["precision"] = c.precision();
        p["recall"] = c.recall();
        p["f1"] = c.f1();
        return p;
    };
    if (r.transitions) {
        j["transitions"] = pr_json(*r.transitions);
        j["transitions"]["planted_misses_expected"] =
                r.planted_misses_expected;
        j["transitions"]["planted_misses_recovered"] =
                r.planted_misses_recovered;
        j["transitions"]["max_seconds_per_app"] = r.max_seconds_per_app;
    }
    if (r.tokens)
        j["tokens"] = pr_json(*r.tokens);
    if (r.has_classification) {
        json c;
        c["val_accuracy"] = r.val_accuracy;
        c["test_accuracy"] = r.test_accuracy;
        json conf = json::array();
        for (const auto& row : r.confusion.m)
            conf.push_back(row);
        c["confusion"] = conf;
        json pca = json::object();
        for (int i = 0; i < detector::kNumClasses; ++i)
            pca[detector::label_name(static_cast<detector::AppLabel>(i))] =
                    r.per_class_accuracy[i];
        c["per_class_accuracy"] = pca;
        j["classification"] = c;
    }
    if (!r.corpus_stats.empty()) {
        json s = json::object();
        for (const auto& [label, cs] : r.corpus_stats) {
            json e;
            e["apps"] = cs.apps;
            e["mean_transition_pairs"] = cs.mean_transition_pairs;
            e["mean_widgets"] = cs.mean_widgets;
            e["mean_tokens"] = cs.mean_tokens;
            s[label] = e;
        }
        j["corpus_stats"] = s;
    }
    json t;
    t["scene_graphs_s"] = r.timings.scene_graphs_s;
    t["train_theta_s"] = r.timings.train_theta_s;
    t["embed_s"] = r.timings.embed_s;
    t["train_psi_s"] = r.timings.train_psi_s;
    t["classifier_s"] = r.timings.classifier_s;
    t["total_s"] = r.timings.total_s;
    j["timings"] = t;
    return j.dump(2) + "\n";
}

} // namespace scenedet::harness

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>

#include "scenedet/detector/detector.hpp"

namespace scenedet::harness {

struct PrCounts {
    long tp = 0;
    long fp = 0;
    long fn = 0;

    double precision() const
    {
        return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
    }
    double recall() const
    {
        return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
    }
    double f1() const
    {
        double p = precision();
        double r = recall();
        return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    }
};

struct ConfusionMatrix {
    // rows = true label, cols = predicted
    std::array<std::array<int, detector::kNumClasses>,
               detector::kNumClasses>
            m{};

    void add(detector::AppLabel truth, detector::AppLabel pred)
    {
        ++m[static_cast<int>(truth)][static_cast<int>(pred)];
    }
    int total() const;
    int correct() const;
    double accuracy() const;
    std::array<int, detector::kNumClasses> supports() const;
};

struct StageTimings {
    double scene_graphs_s = 0.0;
    double train_theta_s = 0.0;
    double embed_s = 0.0;
    double train_psi_s = 0.0;
    double classifier_s = 0.0;
    double total_s = 0.0;
};

struct ClassStats {
    int apps = 0;
    double mean_transition_pairs = 0.0;
    double mean_widgets = 0.0;
    double mean_tokens = 0.0;
};

struct EvalReport {
    // Static sections (eval_static)
    std::optional<PrCounts> transitions;
    std::optional<PrCounts> tokens;
    int planted_misses_expected = 0;
    int planted_misses_recovered = 0;
    double max_seconds_per_app = 0.0;

    // Classification section (run_pipeline)
    bool has_classification = false;
    double val_accuracy = 0.0;
    double test_accuracy = 0.0;
    ConfusionMatrix confusion;
    std::array<double, detector::kNumClasses> per_class_accuracy{};

    std::map<std::string, ClassStats> corpus_stats;
    StageTimings timings;
};

// F1 consistent with precision/recall, accuracy consistent with the
// confusion matrix.
bool report_self_consistent(const EvalReport& r, std::string* why = nullptr);

std::string report_to_json(const EvalReport& r);

} // namespace scenedet::harness

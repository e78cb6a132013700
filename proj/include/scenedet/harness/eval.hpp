#pragma once

#include <filesystem>

#include "scenedet/analysis/reach.hpp"
#include "scenedet/gae/model.hpp"
#include "scenedet/harness/corpus.hpp"
#include "scenedet/harness/metrics.hpp"

namespace scenedet::harness {

// Static sections: micro-averaged transition and token P/R/F1 of every
// *.appir with a sidecar under `dir` (recursive).
EvalReport eval_static(const std::filesystem::path& dir,
                       const analysis::AnalysisConfig& cfg = {});

enum class FeatureMode { Full, AtgOnly, ManifestBaseline };

struct PipelineOptions {
    std::uint64_t seed = 42;
    gae::Hyper theta;         // scene-graph encoder stage
    gae::Hyper psi;           // relation-graph encoder stage
    FeatureMode mode = FeatureMode::Full;
    bool shuffle_labels = false;
    analysis::AnalysisConfig analysis;
    int workers = 0; // 0 = hardware concurrency
};

struct PipelineModel {
    detector::ModelBundle bundle;
    std::vector<detector::AppRecord> train_apps;
};

// 70/20/10 split by seeded shuffle; trains f_theta on the training scene
// graphs, embeds every app, self-trains f_psi on the training relation
// graph, fits the frozen-encoder classifier, and reports validation and
// held-out accuracy with the confusion matrix and corpus statistics.
EvalReport run_pipeline(const std::filesystem::path& corpus_dir,
                        const PipelineOptions& opts,
                        PipelineModel* model_out = nullptr);

} // namespace scenedet::harness

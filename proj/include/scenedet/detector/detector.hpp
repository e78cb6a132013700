#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scenedet/gae/train.hpp"
#include "scenedet/scenegraph/features.hpp"

namespace scenedet::detector {

enum class AppLabel {
    GamblingGame,
    Porn,
    InvestmentScam,
    Miscellaneous,
    Legitimate,
};

constexpr int kNumClasses = 5;

const char* label_name(AppLabel label);
std::optional<AppLabel> label_from(const std::string& name);

struct AppRecord {
    std::string app_id;
    std::string package_name;
    std::string app_name;
    std::string cert_digest;
    std::vector<double> scene_vector;
    std::optional<AppLabel> label;
};

// Undirected app-level graph; an edge connects two apps that share at
// least one strong feature (package name, app name or certificate).
struct RelationGraph {
    std::vector<AppRecord> nodes;
    std::vector<std::pair<int, int>> edges; // u < v, sorted

    gae::Matrix feature_matrix() const;
};

// Throws DuplicateAppId.
RelationGraph build_relation_graph(const std::vector<AppRecord>& apps);

// Spread given to standardized relation features; sized so the row
// softmax in the encoder produces decisive rows instead of near-uniform
// ones.
inline constexpr double kRelationFeatureSd = 4.0;

// Column standardization of the stacked scene vectors, fitted on
// fit_rows only. Pooled row-softmax embeddings are dominated by a common
// component; centering makes the app-to-app differences first-order for
// the GCN, and fitting on the training side keeps inference inductive
// (an added test app never shifts anyone else's features).
void standardize_columns(gae::Matrix& x, const std::vector<int>& fit_rows,
                         double target_sd = kRelationFeatureSd);

gae::DenseGraph to_dense_graph(const RelationGraph& h);

// Self-supervised stage: gae::train on the relation graph; labels unused.
gae::GaeParams self_train_encoder(const RelationGraph& h,
                                  const gae::Hyper& hyper,
                                  gae::TrainStats* stats = nullptr);

struct ClassifierParams {
    gae::Matrix weights; // F x 5
    gae::Matrix bias;    // 1 x 5
    bool trained = false;
};

struct ClassifierHyper {
    double lr = 0.1;
    int epochs = 500;
    double l2 = 1e-4;
    std::uint64_t seed = 0;
};

// Multinomial logistic regression over the frozen encoder's embeddings of
// the labeled nodes (cross-entropy + L2). f_psi is const and verified
// unchanged by the caller's digest if desired. Throws EmptyClassError when
// no labeled node exists.
ClassifierParams train_classifier(const RelationGraph& h,
                                  const gae::GaeParams& f_psi,
                                  const ClassifierHyper& hyper = {});

struct Classification {
    AppLabel label;
    std::array<double, kNumClasses> scores; // softmax, sums to 1
};

// Builds the union relation graph of train and test apps, encodes it with
// the frozen f_psi and applies the classifier to the test rows. Throws
// IdCollision when an id appears on both sides.
std::map<std::string, Classification>
classify(const std::vector<AppRecord>& train_apps,
         const std::vector<AppRecord>& test_apps,
         const gae::GaeParams& f_psi, const ClassifierParams& clf);

// Model bundle directory: scene encoder, app encoder, classifier, feature
// config and a format version file.
struct ModelBundle {
    gae::GaeParams f_theta;
    gae::GaeParams f_psi;
    ClassifierParams classifier;
    scenegraph::FeatureConfig feature_config;
};

void save_model_bundle(const ModelBundle& bundle,
                       const std::filesystem::path& dir);
ModelBundle load_model_bundle(const std::filesystem::path& dir);

} // namespace scenedet::detector

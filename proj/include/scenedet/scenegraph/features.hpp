#pragma once

#include <string>
#include <vector>

#include "scenedet/scenegraph/scene_graph.hpp"

namespace scenedet::scenegraph {

// Hashed feature layout. Row = [widget buckets | listener buckets | token
// buckets | structural slots]; counts are log1p-scaled, identifiers never
// enter the hash, so renaming cannot move features.
struct FeatureConfig {
    int widget_buckets = 64;
    int listener_buckets = 16;
    int token_buckets = 64;
    int structural_slots = 16;

    int dim() const
    {
        return widget_buckets + listener_buckets + token_buckets
                + structural_slots;
    }
};

struct FeatureMatrix {
    int rows = 0;
    int dim = 0;
    std::vector<double> values; // row-major
    std::vector<std::string> node_order;

    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * dim + c]; }
};

// Structural slot order: in-degree, out-degree, widget count, layout
// depth, is_fragment, has_webview, token count, listener count, then
// reserved zeros. Flags stay 0/1; the counts are log1p-scaled.
FeatureMatrix encode_features(const SceneGraph& sg,
                              const FeatureConfig& cfg = {});

std::string to_csv(const FeatureMatrix& m);

} // namespace scenedet::scenegraph

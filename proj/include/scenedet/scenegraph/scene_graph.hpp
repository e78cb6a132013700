#pragma once

#include <map>
#include <string>
#include <vector>

#include "scenedet/analysis/reach.hpp"
#include "scenedet/app_ir/types.hpp"
#include "scenedet/atg/atg.hpp"
#include "scenedet/widgets/widgets.hpp"

namespace scenedet::scenegraph {

// Scene graph: the ATG plus per-node UI attribute labels.
struct SceneGraph {
    atg::Atg atg;
    std::map<std::string, widgets::UiAttributes> attributes;
    std::string app_id;

    bool operator==(const SceneGraph&) const = default;
};

// call graph -> native widgets -> imprints -> ATG, assembled into one
// graph. Warnings (unresolved layouts etc.) are collected, never thrown.
SceneGraph build_scene_graph(const app_ir::AppBundle& bundle,
                             const analysis::AnalysisConfig& cfg = {},
                             const widgets::Stoplist& stoplist
                             = widgets::default_stoplist(),
                             std::vector<std::string>* warnings = nullptr);

// Versioned JSON form (`sg/1`), canonical key order, byte-deterministic.
std::string serialize(const SceneGraph& sg);

// Throws FormatError naming the JSON path of the offending field.
SceneGraph deserialize(const std::string& text);

// Per-app aggregates used by the corpus statistics (transition pairs,
// widgets, imprint tokens).
struct GraphStats {
    int nodes = 0;
    int transition_pairs = 0;
    int widgets = 0;
    int tokens = 0;
};

GraphStats stats(const SceneGraph& sg);

} // namespace scenedet::scenegraph

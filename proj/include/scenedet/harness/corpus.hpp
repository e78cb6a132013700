#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scenedet/app_ir/types.hpp"
#include "scenedet/detector/detector.hpp"

namespace scenedet::harness {

// Ground-truth sidecar shipped next to every generated bundle.
struct GroundTruth {
    std::string app_id;
    std::optional<detector::AppLabel> label;
    int class_count = 0;
    int planted_transitions = 0;
    std::vector<std::pair<std::string, std::string>> edges;
    std::vector<std::pair<std::string, std::string>> missed_edges;
    // owner -> sorted widget (type, listener-count) multiset
    std::map<std::string, std::vector<std::pair<std::string, int>>> widgets;
    std::set<std::string> tokens;
    int runtime_sources = 0;
};

std::string ground_truth_to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const std::string& text);

struct GeneratedApp {
    app_ir::AppBundle bundle;
    GroundTruth gt;
};

// The five benchmark templates (transition counts 13/13/13/12/11) and the
// 36-token taint fixture.
GeneratedApp make_app1();
GeneratedApp make_app2();
GeneratedApp make_app3();
GeneratedApp make_app4();
GeneratedApp make_app5();
GeneratedApp make_token_app();

// Class-family motif skeletons, one per label; used both for generation
// and for the pairwise-distinctness check.
std::vector<std::pair<std::string, std::string>>
motif_edges(detector::AppLabel label);

// Apps from the same developer group share group_seed (and with it the
// structural skeleton: noise nodes/edges, tokens, widget plan); the
// member seed only perturbs identity and small cosmetic details, the way
// cloned releases of one codebase differ.
GeneratedApp make_family_app(detector::AppLabel label,
                             std::uint64_t group_seed,
                             std::uint64_t member_seed, int index);

struct CorpusSpec {
    std::filesystem::path out_dir;
    int counts_per_class = 50;
    std::uint64_t seed = 1;
    bool emit_renamed = true;
};

struct CorpusManifestEntry {
    std::string app_id;
    std::string file; // relative path of the .appir
    std::string gt;   // relative path of the sidecar
    std::optional<detector::AppLabel> label;
    bool benchmark = false;
};

struct CorpusIndex {
    std::uint64_t seed = 0;
    std::vector<CorpusManifestEntry> apps;
};

// Deterministic per seed (byte-identical output). Emits benchmark/ and
// apps/ plus renamed/ mirrors when requested, and corpus.json.
CorpusIndex gen_corpus(const CorpusSpec& spec);

CorpusIndex load_corpus_index(const std::filesystem::path& dir);

} // namespace scenedet::harness

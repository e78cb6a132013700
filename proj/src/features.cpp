#include "scenedet/scenegraph/features.hpp"

#include <cmath>
#include <sstream>

#include "scenedet/common/hash.hpp"

namespace scenedet::scenegraph {

FeatureMatrix encode_features(const SceneGraph& sg, const FeatureConfig& cfg)
{
    FeatureMatrix m;
    m.dim = cfg.dim();
    for (const auto& [name, kind] : sg.atg.nodes)
        m.node_order.push_back(name);
    // atg.nodes is an ordered set, so node_order is already sorted.
    m.rows = static_cast<int>(m.node_order.size());
    m.values.assign(static_cast<std::size_t>(m.rows) * m.dim, 0.0);

    std::map<std::string, int> in_deg;
    std::map<std::string, int> out_deg;
    for (const auto& e : sg.atg.edges) {
        ++out_deg[e.from];
        ++in_deg[e.to];
    }

    const int widget_base = 0;
    const int listener_base = cfg.widget_buckets;
    const int token_base = listener_base + cfg.listener_buckets;
    const int struct_base = token_base + cfg.token_buckets;

    for (int r = 0; r < m.rows; ++r) {
        const std::string& name = m.node_order[r];
        double* row = m.values.data() + static_cast<std::size_t>(r) * m.dim;

        app_ir::ClassKind kind{};
        for (const auto& [n, k] : sg.atg.nodes) {
            if (n == name)
                kind = k;
        }

        int widget_count = 0;
        int listener_count = 0;
        int token_count = 0;
        int layout_depth = 0;
        bool has_webview = false;

        auto it = sg.attributes.find(name);
        if (it != sg.attributes.end()) {
            const auto& ui = it->second;
            for (const auto& w : ui.native_widgets) {
                ++widget_count;
                row[widget_base
                    + static_cast<int>(fnv1a64(w.widget_type)
                                       % cfg.widget_buckets)] += 1.0;
                for (auto l : w.listeners) {
                    ++listener_count;
                    row[listener_base
                        + static_cast<int>(
                                fnv1a64(app_ir::listener_kind_name(l))
                                % cfg.listener_buckets)] += 1.0;
                }
            }
            for (const auto& t : ui.imprint_tokens) {
                ++token_count;
                row[token_base
                    + static_cast<int>(fnv1a64(t) % cfg.token_buckets)]
                        += 1.0;
            }
            layout_depth = ui.layout_depth;
            has_webview = ui.has_webview;
        }

        for (int c = 0; c < struct_base; ++c)
            row[c] = std::log1p(row[c]);

        row[struct_base + 0] = std::log1p(in_deg[name]);
        row[struct_base + 1] = std::log1p(out_deg[name]);
        row[struct_base + 2] = std::log1p(widget_count);
        row[struct_base + 3] = std::log1p(layout_depth);
        row[struct_base + 4] = kind == app_ir::ClassKind::Fragment ? 1.0
                                                                   : 0.0;
        row[struct_base + 5] = has_webview ? 1.0 : 0.0;
        row[struct_base + 6] = std::log1p(token_count);
        row[struct_base + 7] = std::log1p(listener_count);
        // slots 8..15 reserved, zero
    }
    return m;
}

std::string to_csv(const FeatureMatrix& m)
{
    std::ostringstream out;
    out << "node";
    for (int c = 0; c < m.dim; ++c)
        out << ",f" << c;
    out << "\n";
    out.precision(17);
    for (int r = 0; r < m.rows; ++r) {
        out << m.node_order[r];
        for (int c = 0; c < m.dim; ++c)
            out << "," << m.at(r, c);
        out << "\n";
    }
    return out.str();
}

} // namespace scenedet::scenegraph

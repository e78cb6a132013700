#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "scenedet/app_ir/types.hpp"

namespace scenedet::app_ir {

// Seeded bijective rename of identifiers, mirroring what R8-style rename
// obfuscation does to a release build. Constants, resource text, api kinds
// and all graph structure are untouched.
struct RenameMap {
    std::map<std::string, std::string> classes;
    std::map<std::string, std::string> methods;
    std::map<std::string, std::string> widget_ids;

    std::string map_class(const std::string& name) const;
    std::string map_method(const std::string& name) const;
    std::string map_widget(const std::string& id) const;
};

// Deterministic per (bundle, seed). Method names that appear in the
// implicit run/start pair table or in a class's overrides_system_listener
// set are framework entry points and keep their names, as does everything
// in the manifest.
RenameMap build_rename_map(const AppBundle& bundle, std::uint64_t seed);

AppBundle apply_rename_obfuscation(const AppBundle& bundle,
                                   std::uint64_t seed);

AppBundle apply_rename(const AppBundle& bundle, const RenameMap& map);

} // namespace scenedet::app_ir

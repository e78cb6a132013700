#pragma once

#include <filesystem>
#include <string>

#include "scenedet/app_ir/types.hpp"
#include "scenedet/app_ir/validate.hpp"

namespace scenedet::app_ir {

// Parses App-IR concrete syntax (format `appir/1`, see docs/APP_IR.md).
// Syntactic problems throw SyntaxError. The result is not validated.
AppBundle parse_text(const std::string& source);

// parse_text + validate. Throws BundleError carrying the first violation
// (dangling reference, duplicate name, ...) when validation fails.
AppBundle parse_bundle(const std::string& source);

AppBundle parse_bundle_file(const std::filesystem::path& path);

// Canonical text form. parse(serialize(parse(s))) == parse(s) for every
// well-formed s, and serialization is byte-deterministic.
std::string serialize_bundle(const AppBundle& bundle);

} // namespace scenedet::app_ir

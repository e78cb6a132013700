#pragma once

#include <stdexcept>
#include <string>

namespace scenedet {

struct SyntaxError : std::runtime_error {
    int line;
    int col;
    SyntaxError(int line, int col, const std::string& what)
        : std::runtime_error("syntax error at " + std::to_string(line) + ":"
                             + std::to_string(col) + ": " + what),
          line(line), col(col)
    {
    }
};

// Thrown by parse_bundle when post-parse validation fails; carries the
// first offending name (dangling reference, duplicate, ...).
struct BundleError : std::runtime_error {
    std::string code;
    std::string subject;
    BundleError(std::string code, std::string subject, const std::string& what)
        : std::runtime_error(what), code(std::move(code)),
          subject(std::move(subject))
    {
    }
};

struct FormatError : std::runtime_error {
    std::string path;
    FormatError(std::string path, const std::string& what)
        : std::runtime_error("format error at " + path + ": " + what),
          path(std::move(path))
    {
    }
};

struct UnknownMethod : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownClass : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SinkNotText : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DuplicateAppId : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IdCollision : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyClassError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace scenedet

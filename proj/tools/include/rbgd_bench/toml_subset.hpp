#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace rbgd::bench {

/// Parse failure with the 1-based line it was detected on.
class TomlError : public std::runtime_error {
 public:
  TomlError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/** Reads the TOML subset used by experiment configs into a JSON object.
 *
 * Supported: comments, bare or quoted keys, `[table]`, `[[array.of.tables]]`
 * with single-segment names, basic strings with the usual escapes, literal
 * strings, integers (with `_` separators), floats, booleans, and arrays of
 * those scalars (may span lines). Dotted keys, inline tables, dates and
 * multi-line strings are rejected with a TomlError. */
nlohmann::json parse_toml_subset(std::string_view text);

}  // namespace rbgd::bench

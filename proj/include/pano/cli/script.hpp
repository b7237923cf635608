#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pano::cli {

/// One line of a chain script:
///
///   segment <k>: reuse|text "<...>"|speech <fixture-id> [yaw <deg>]
///
/// Blank lines and lines starting with '#' are skipped. Inside the quotes,
/// \" and \\ escape.
struct ScriptAction {
  enum class Kind { reuse, text, speech };
  Kind kind = Kind::reuse;
  /// Prompt text for `text`, fixture id for `speech`.
  std::string argument;
  std::optional<double> yaw_degrees;
};

class ScriptError : public std::runtime_error {
 public:
  ScriptError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Actions keyed by segment index. Segment 0 comes from the initial prompt,
/// so valid indices are 1..segments-1, each at most once.
std::map<int, ScriptAction> parse_script(std::string_view text, int segments);

}  // namespace pano::cli

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pano::agents {

inline constexpr std::size_t kMaxPromptChars = 2000;

/// Trimmed, non-empty UTF-8 prompt of at most kMaxPromptChars code points.
class TextPrompt {
 public:
  /// Throws invalid_prompt when empty after trimming and prompt_too_long
  /// past the length limit.
  static TextPrompt make(std::string_view text);

  const std::string& text() const noexcept { return text_; }

  friend bool operator==(const TextPrompt&, const TextPrompt&) = default;

 private:
  explicit TextPrompt(std::string text) : text_(std::move(text)) {}
  std::string text_;
};

/// Number of UTF-8 code points in `text`.
std::size_t utf8_length(std::string_view text);

struct RefinedPrompt {
  TextPrompt base;
  std::vector<std::string> descriptors;
  /// base.text() followed by ", descriptor" for each descriptor.
  std::string rendered;

  friend bool operator==(const RefinedPrompt&, const RefinedPrompt&) = default;
};

/// Panorama descriptors appended by default.
std::vector<std::string> default_descriptors();

/// Appends, in vocabulary order, every descriptor that does not already
/// occur case-insensitively in the base text. Throws prompt_too_long when
/// the rendered prompt would exceed the limit.
RefinedPrompt refine_with_descriptors(const TextPrompt& base, std::span<const std::string> vocabulary);

/// Inverse of rendering: strips trailing descriptors from `vocabulary` (in
/// reverse vocabulary order) and returns the base and descriptors, or
/// nullopt if the remaining base is not a valid prompt.
std::optional<RefinedPrompt> parse_rendered(std::string_view rendered, std::span<const std::string> vocabulary);

}  // namespace pano::agents

#include "pano/agents/prompt.hpp"

#include <algorithm>
#include <cctype>

#include "pano/core/error.hpp"

namespace pano::agents {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

constexpr std::string_view kSeparator = ", ";

}  // namespace

std::size_t utf8_length(std::string_view text) {
  return static_cast<std::size_t>(
      std::count_if(text.begin(), text.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

TextPrompt TextPrompt::make(std::string_view text) {
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  if (text.empty()) throw Error(Errc::invalid_prompt, "prompt is empty");
  if (utf8_length(text) > kMaxPromptChars) {
    throw Error(Errc::prompt_too_long, "prompt exceeds " + std::to_string(kMaxPromptChars) + " characters");
  }
  return TextPrompt(std::string(text));
}

std::vector<std::string> default_descriptors() {
  return {"360 degree equirectangular panorama", "seamless horizontal wrap", "wide field of view"};
}

RefinedPrompt refine_with_descriptors(const TextPrompt& base, std::span<const std::string> vocabulary) {
  const std::string haystack = lower(base.text());
  RefinedPrompt out{base, {}, base.text()};
  for (const auto& d : vocabulary) {
    if (d.empty() || haystack.find(lower(d)) != std::string::npos) continue;
    if (std::find(out.descriptors.begin(), out.descriptors.end(), d) != out.descriptors.end()) continue;
    out.descriptors.push_back(d);
    out.rendered.append(kSeparator).append(d);
  }
  if (utf8_length(out.rendered) > kMaxPromptChars) {
    throw Error(Errc::prompt_too_long, "refined prompt exceeds " + std::to_string(kMaxPromptChars) + " characters");
  }
  return out;
}

std::optional<RefinedPrompt> parse_rendered(std::string_view rendered, std::span<const std::string> vocabulary) {
  std::vector<std::string> found;
  std::string_view rest = rendered;
  for (auto it = vocabulary.rbegin(); it != vocabulary.rend(); ++it) {
    const std::string suffix = std::string(kSeparator) + *it;
    if (rest.size() <= suffix.size() || !rest.ends_with(suffix)) continue;
    // Refinement only appends descriptors the base does not already hold.
    const std::string_view shorter = rest.substr(0, rest.size() - suffix.size());
    if (is_space(shorter.back()) || lower(shorter).find(lower(*it)) != std::string::npos) continue;
    found.push_back(*it);
    rest = shorter;
  }
  std::reverse(found.begin(), found.end());
  try {
    TextPrompt base = TextPrompt::make(rest);
    if (base.text() != rest) return std::nullopt;
    return RefinedPrompt{std::move(base), std::move(found), std::string(rendered)};
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace pano::agents

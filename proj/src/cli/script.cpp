#include "pano/cli/script.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace pano::cli {

namespace {

class Cursor {
 public:
  Cursor(std::string_view s, int line) : s_(s), line_(line) {}

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool done() {
    skip_space();
    return pos_ >= s_.size();
  }
  std::string_view word() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != ':') ++pos_;
    return s_.substr(start, pos_ - start);
  }
  void expect(char c) {
    skip_space();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string quoted() {
    expect('"');
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\') {
        if (++pos_ >= s_.size()) break;
        if (s_[pos_] != '"' && s_[pos_] != '\\') fail("unknown escape");
      }
      out += s_[pos_++];
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }
  [[noreturn]] void fail(const std::string& message) const { throw ScriptError(line_, message); }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

template <class T>
T number(Cursor& c, std::string_view w, const char* what) {
  T v{};
  auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
  if (w.empty() || ec != std::errc{} || ptr != w.data() + w.size()) c.fail(std::string("bad ") + what + " '" + std::string(w) + "'");
  return v;
}

}  // namespace

std::map<int, ScriptAction> parse_script(std::string_view text, int segments) {
  std::map<int, ScriptAction> actions;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    Cursor c(line, line_no);
    if (c.done()) continue;
    if (c.word().starts_with('#')) continue;
    c = Cursor(line, line_no);

    if (c.word() != "segment") c.fail("expected 'segment'");
    const int k = number<int>(c, c.word(), "segment index");
    if (k < 1 || k >= segments) c.fail("segment index must be in 1.." + std::to_string(segments - 1));
    if (actions.count(k)) c.fail("segment " + std::to_string(k) + " given twice");
    c.expect(':');

    ScriptAction a;
    const std::string_view kind = c.word();
    if (kind == "reuse") {
      a.kind = ScriptAction::Kind::reuse;
    } else if (kind == "text") {
      a.kind = ScriptAction::Kind::text;
      a.argument = c.quoted();
    } else if (kind == "speech") {
      a.kind = ScriptAction::Kind::speech;
      a.argument = std::string(c.word());
      if (a.argument.empty()) c.fail("speech needs a fixture id");
    } else {
      c.fail("expected reuse, text or speech");
    }
    if (!c.done()) {
      if (c.word() != "yaw") c.fail("expected 'yaw' or end of line");
      const double deg = number<double>(c, c.word(), "yaw");
      if (!std::isfinite(deg)) c.fail("yaw must be finite");
      a.yaw_degrees = deg;
      if (!c.done()) c.fail("trailing input");
    }
    actions.emplace(k, std::move(a));
  }
  return actions;
}

}  // namespace pano::cli

#include "iotnames/names.hpp"

#include <array>
#include <functional>

#include "iotnames/error.hpp"

namespace iotnames {
namespace {

// UTF-8 encodings of U+3002, U+FF0E and U+FF61.
constexpr std::array<std::string_view, 3> kDotVariants = {
    "\xE3\x80\x82",
    "\xEF\xBC\x8E",
    "\xEF\xBD\xA1",
};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::size_t utf8_length(std::string_view text) noexcept {
  std::size_t n = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

NormalizedName normalize(std::string_view raw) {
  NormalizedName out;
  std::string& s = out.text;
  s.reserve(raw.size());

  for (std::size_t i = 0; i < raw.size();) {
    bool matched = false;
    for (auto variant : kDotVariants) {
      if (raw.substr(i, variant.size()) == variant) {
        s.push_back('.');
        ++out.report.substituted_dots;
        i += variant.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    char c = raw[i++];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    s.push_back(c);
  }

  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && is_space(s[begin])) ++begin;
  while (end > begin && is_space(s[end - 1])) --end;
  if (begin != 0 || end != s.size()) {
    out.report.trimmed_whitespace = true;
    s = s.substr(begin, end - begin);
  }

  if (!s.empty() && s.back() == '.') {
    const bool lone = s.size() == 1;
    const bool terminator = lone || (s[s.size() - 2] != '.' && !is_space(s[s.size() - 2]));
    if (terminator) {
      s.pop_back();
      out.report.trailing_dot_removed = true;
    }
  }
  return out;
}

DomainName::DomainName(std::vector<std::string> labels, std::string raw)
    : raw_(std::move(raw)), labels_(std::move(labels)) {
  if (labels_.empty()) throw InputError("domain name needs at least one label");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const auto& label = labels_[i];
    if (label.empty() || label.find('.') != std::string::npos) {
      throw InputError("invalid label at position " + std::to_string(i + 1));
    }
    if (i) text_.push_back('.');
    text_ += label;
  }
  if (raw_.empty()) raw_ = text_;
}

std::size_t DomainName::char_length() const noexcept { return utf8_length(text_); }

DomainName split_labels(std::string_view normalized, std::string_view raw) {
  std::vector<std::string> labels;
  std::size_t start = 0;
  while (true) {
    std::size_t dot = normalized.find('.', start);
    std::string_view segment = normalized.substr(start, dot == std::string_view::npos ? dot : dot - start);
    if (segment.empty()) throw StructuralError(std::string(normalized), labels.size() + 1);
    labels.emplace_back(segment);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return DomainName(std::move(labels), std::string(raw.empty() ? normalized : raw));
}

DomainName parse_name(std::string_view raw) {
  return split_labels(normalize(raw).text, raw);
}

}  // namespace iotnames

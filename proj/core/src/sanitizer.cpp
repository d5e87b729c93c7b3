#include "iotnames/sanitizer.hpp"

#include <array>
#include <unordered_set>

namespace iotnames {
namespace {

constexpr std::array<std::string_view, 7> kRuleNames = {
    "StartsWithDot", "ConsecutiveDots", "LabelTooLong", "NameTooLong",
    "SingleLabel",   "HyphenEdge",      "DoubleHyphen34",
};

// Byte offset of the code point with 0-based index `index`, or npos.
std::size_t codepoint_offset(std::string_view text, std::size_t index) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) == 0x80) continue;
    if (seen == index) return i;
    ++seen;
  }
  return std::string_view::npos;
}

bool hyphens_at_3_and_4(std::string_view name) {
  const std::size_t third = codepoint_offset(name, 2);
  if (third == std::string_view::npos || third + 1 >= name.size()) return false;
  return name[third] == '-' && name[third + 1] == '-';
}

// Checks a normalized name. On success `checked` is the form the remaining
// rules were applied to.
SyntaxVerdict check_normalized(std::string_view name, std::string_view* checked = nullptr) {
  auto fail = [](SyntaxRule r) { return SyntaxVerdict{r}; };

  if (!name.empty() && name.front() == '.') return fail(SyntaxRule::StartsWithDot);
  if (name.find("..") != std::string_view::npos) return fail(SyntaxRule::ConsecutiveDots);
  // normalize() keeps a terminator that follows whitespace ("a. ."); drop it here.
  if (!name.empty() && name.back() == '.') name.remove_suffix(1);
  if (checked) *checked = name;

  std::vector<std::string_view> labels;
  std::size_t start = 0;
  while (true) {
    std::size_t dot = name.find('.', start);
    labels.push_back(name.substr(start, dot == std::string_view::npos ? dot : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }

  for (auto label : labels) {
    if (utf8_length(label) > kMaxLabelLength) return fail(SyntaxRule::LabelTooLong);
  }
  if (utf8_length(name) > kMaxNameLength) return fail(SyntaxRule::NameTooLong);
  if (labels.size() == 1) return fail(SyntaxRule::SingleLabel);
  for (auto label : labels) {
    if (!label.empty() && (label.front() == '-' || label.back() == '-')) {
      return fail(SyntaxRule::HyphenEdge);
    }
  }
  if (hyphens_at_3_and_4(name) && !name.starts_with("xn")) return fail(SyntaxRule::DoubleHyphen34);
  return {};
}

}  // namespace

std::string_view to_string(SyntaxRule rule) noexcept {
  return kRuleNames[static_cast<std::size_t>(rule)];
}

std::optional<SyntaxRule> parse_syntax_rule(std::string_view text) noexcept {
  for (std::size_t i = 0; i < kRuleNames.size(); ++i) {
    if (kRuleNames[i] == text) return static_cast<SyntaxRule>(i);
  }
  return std::nullopt;
}

SyntaxVerdict check_syntax(std::string_view raw) {
  return check_normalized(normalize(raw).text);
}

SanitizeResult sanitize_list(std::span<const std::string> raw_names) {
  SanitizeResult result;
  std::unordered_set<std::string> seen;
  for (const auto& raw : raw_names) {
    auto normalized = normalize(raw).text;
    if (!seen.insert(normalized).second) continue;
    std::string_view checked;
    auto verdict = check_normalized(normalized, &checked);
    if (verdict.accepted()) {
      result.accepted.push_back(split_labels(checked, raw));
    } else {
      result.discarded.emplace_back(raw, *verdict.failed_rule);
    }
  }
  return result;
}

}  // namespace iotnames

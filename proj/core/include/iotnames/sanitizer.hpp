#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iotnames/names.hpp"

namespace iotnames {

/// Syntax rules in evaluation order. Trailing-dot removal happens during
/// normalization and never fails.
enum class SyntaxRule {
  StartsWithDot,
  ConsecutiveDots,
  LabelTooLong,
  NameTooLong,
  SingleLabel,
  HyphenEdge,
  DoubleHyphen34,
};

std::string_view to_string(SyntaxRule rule) noexcept;
std::optional<SyntaxRule> parse_syntax_rule(std::string_view text) noexcept;

inline constexpr std::size_t kMaxLabelLength = 63;
inline constexpr std::size_t kMaxNameLength = 253;

struct SyntaxVerdict {
  std::optional<SyntaxRule> failed_rule;

  bool accepted() const noexcept { return !failed_rule.has_value(); }
  bool operator==(const SyntaxVerdict&) const = default;
};

/// Normalizes `raw` and reports the first rule it breaks.
SyntaxVerdict check_syntax(std::string_view raw);

struct SanitizeResult {
  std::vector<DomainName> accepted;
  std::vector<std::pair<std::string, SyntaxRule>> discarded;
};

/// Deduplicates by normalized form (first appearance wins) and splits the
/// unique names into accepted and discarded, both in first-appearance order.
SanitizeResult sanitize_list(std::span<const std::string> raw_names);

}  // namespace iotnames

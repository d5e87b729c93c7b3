#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace iotnames {

/// What normalize() changed.
struct NormalizationReport {
  std::size_t substituted_dots = 0;
  bool trimmed_whitespace = false;
  bool trailing_dot_removed = false;

  bool operator==(const NormalizationReport&) const = default;
};

struct NormalizedName {
  std::string text;
  NormalizationReport report;
};

/// Maps the IDNA dot variants (U+3002, U+FF0E, U+FF61) to '.', trims ASCII
/// whitespace, lowercases ASCII letters and drops a single FQDN terminator.
///
/// The terminator is only dropped when it follows a character that is
/// neither a dot nor whitespace, so "a.." and "a. ." stay as they are and
/// the function is idempotent. Never fails.
NormalizedName normalize(std::string_view raw);

/// A normalized domain name decomposed into labels, leftmost first.
class DomainName {
 public:
  /// Throws InputError if `labels` is empty or any label is empty or
  /// contains a dot.
  explicit DomainName(std::vector<std::string> labels, std::string raw = {});

  const std::string& raw() const noexcept { return raw_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& text() const noexcept { return text_; }

  std::size_t label_count() const noexcept { return labels_.size(); }

  /// Length of the dotted form in Unicode code points, dots included.
  std::size_t char_length() const noexcept;

  /// Equality ignores the raw form.
  bool operator==(const DomainName& other) const noexcept { return text_ == other.text_; }
  auto operator<=>(const DomainName& other) const noexcept { return text_ <=> other.text_; }

 private:
  std::string raw_;
  std::vector<std::string> labels_;
  std::string text_;
};

/// Splits an already-normalized name on '.'. Throws StructuralError naming
/// the 1-based segment that is empty. `raw` defaults to `normalized`.
DomainName split_labels(std::string_view normalized, std::string_view raw = {});

/// normalize() followed by split_labels(), keeping `raw` as the source form.
DomainName parse_name(std::string_view raw);

inline std::size_t label_count(const DomainName& name) noexcept { return name.label_count(); }
inline std::size_t char_length(const DomainName& name) noexcept { return name.char_length(); }

/// Number of Unicode code points in a UTF-8 string (continuation bytes skipped).
std::size_t utf8_length(std::string_view text) noexcept;

}  // namespace iotnames

template <>
struct std::hash<iotnames::DomainName> {
  std::size_t operator()(const iotnames::DomainName& name) const noexcept {
    return std::hash<std::string>{}(name.text());
  }
};

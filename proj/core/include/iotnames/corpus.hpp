#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "iotnames/label.hpp"
#include "iotnames/names.hpp"

namespace iotnames {

/// Ordered, duplicate-free list of names from one source.
class NameList {
 public:
  NameList(std::string id, NameClass name_class, std::string provenance = {});

  /// Appends unless an equal normalized name is already present.
  bool add(DomainName name);
  bool contains(const DomainName& name) const { return index_.contains(name.text()); }

  const std::string& id() const noexcept { return id_; }
  NameClass name_class() const noexcept { return class_; }
  const std::string& provenance() const noexcept { return provenance_; }
  const std::vector<DomainName>& names() const noexcept { return names_; }
  std::size_t size() const noexcept { return names_.size(); }
  bool empty() const noexcept { return names_.empty(); }

  auto begin() const noexcept { return names_.begin(); }
  auto end() const noexcept { return names_.end(); }

 private:
  std::string id_;
  NameClass class_;
  std::string provenance_;
  std::vector<DomainName> names_;
  std::unordered_set<std::string> index_;
};

struct LoadResult {
  NameList list;
  /// Lines that failed the syntax check.
  std::size_t rejected = 0;
  /// Valid lines that repeated an earlier name.
  std::size_t duplicates = 0;
};

/// Reads a UTF-8 list, one name per line; blank lines and lines starting
/// with '#' are skipped. Throws IoError if unreadable and InputError if no
/// valid name remains.
LoadResult load_list(const std::filesystem::path& path, std::string id, NameClass name_class);

/// Same as load_list() over already-read lines.
LoadResult parse_list(std::span<const std::string> lines, std::string id, NameClass name_class,
                      std::string provenance = {});

/// One name per line, normalized form.
void write_list(std::ostream& out, const NameList& list);

struct RemoveResult {
  NameList list;
  std::size_t removed = 0;
};

/// `target` without the names that also appear in `reference`.
RemoveResult remove_commons(const NameList& reference, const NameList& target);

/// First `n` names in list order. Throws InputError if n > size.
NameList select_top(const NameList& list, std::size_t n);

/// Uniform sample of `n` names without replacement, kept in list order.
NameList select_random(const NameList& list, std::size_t n, std::uint64_t seed);

/// Per-list quotas for make_mix(): floor(n/L) each, remainder to the
/// earliest lists.
std::vector<std::size_t> mix_quotas(std::size_t n, std::size_t list_count);

/// Uniform draw of quota-many names from each list, concatenated in list
/// order. Throws InputError naming a list that is smaller than its quota.
NameList make_mix(std::span<const NameList> lists, std::size_t n, std::uint64_t seed,
                  std::string id = "mix");

struct LabeledName {
  DomainName name;
  Label label;
};

struct LabeledDataset {
  std::vector<LabeledName> entries;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return entries.size(); }
  std::vector<Label> labels() const;
  std::size_t count(Label label) const;
};

/// Positives first, then negatives, each in list order.
LabeledDataset make_dataset(const NameList& positive, const NameList& negative, std::uint64_t seed);

/// CSV `name,class` with a header row.
void write_dataset_csv(std::ostream& out, const LabeledDataset& dataset);
LabeledDataset read_dataset_csv(std::istream& in);

struct SplitPlan {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  bool stratified = true;
};

struct IndexSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Train/test partition of positions 0..labels.size()-1; both halves are in
/// ascending index order. Stratified plans give each class
/// round(train_fraction * class_size) training samples.
IndexSplit split_indices(std::span<const Label> labels, const SplitPlan& plan);

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& dataset, const SplitPlan& plan);

struct FoldPlan {
  std::size_t k = 5;
  std::uint64_t seed = 0;
};

/// k stratified folds. Each class is shuffled and dealt round-robin, so fold
/// class counts differ by at most one.
std::vector<IndexSplit> stratified_fold_indices(std::span<const Label> labels, const FoldPlan& plan);

std::vector<std::pair<LabeledDataset, LabeledDataset>> stratified_folds(const LabeledDataset& dataset,
                                                                        const FoldPlan& plan);

LabeledDataset subset(const LabeledDataset& dataset, std::span<const std::size_t> indices);

enum class FixtureKind { IotLike, ToplistLike, Mixed };

std::string_view to_string(FixtureKind kind) noexcept;
FixtureKind parse_fixture_kind(std::string_view text);

/// Synthetic names with the shapes of the two list families.
///
/// iot-like: `<service>.<region>.<sld>.<tld>` (60%) or `<service>.<sld>.<tld>`.
/// toplist-like: `<sld>.<tld>`. Mixed alternates the two. SLDs and TLDs come
/// from pools shared by both kinds, so the only systematic difference is the
/// presence of a third label from the right, which every iot-like name has
/// and no toplist-like name has.
NameList generate_fixtures(FixtureKind kind, std::size_t n, std::uint64_t seed);

}  // namespace iotnames

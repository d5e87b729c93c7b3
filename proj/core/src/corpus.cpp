#include "iotnames/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "iotnames/csv.hpp"
#include "iotnames/error.hpp"
#include "iotnames/random.hpp"
#include "iotnames/sanitizer.hpp"

namespace iotnames {

NameList::NameList(std::string id, NameClass name_class, std::string provenance)
    : id_(std::move(id)), class_(name_class), provenance_(std::move(provenance)) {}

bool NameList::add(DomainName name) {
  if (!index_.insert(name.text()).second) return false;
  names_.push_back(std::move(name));
  return true;
}

LoadResult parse_list(std::span<const std::string> lines, std::string id, NameClass name_class,
                      std::string provenance) {
  std::vector<std::string> candidates;
  candidates.reserve(lines.size());
  std::size_t nonblank = 0;
  for (const auto& line : lines) {
    std::string_view view = line;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    auto first = view.find_first_not_of(" \t");
    if (first == std::string_view::npos || view[first] == '#') continue;
    ++nonblank;
    candidates.emplace_back(view);
  }

  auto sanitized = sanitize_list(candidates);
  LoadResult result{NameList(std::move(id), name_class, std::move(provenance))};
  for (auto& name : sanitized.accepted) result.list.add(std::move(name));
  result.rejected = sanitized.discarded.size();
  result.duplicates = nonblank - result.rejected - result.list.size();
  if (result.list.empty()) {
    throw InputError("list '" + result.list.id() + "' has no valid names");
  }
  return result;
}

LoadResult load_list(const std::filesystem::path& path, std::string id, NameClass name_class) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read list file '" + path.string() + "'");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  try {
    return parse_list(lines, std::move(id), name_class, path.string());
  } catch (const InputError&) {
    throw InputError("list file '" + path.string() + "' has no valid names");
  }
}

void write_list(std::ostream& out, const NameList& list) {
  for (const auto& name : list) out << name.text() << '\n';
}

RemoveResult remove_commons(const NameList& reference, const NameList& target) {
  RemoveResult result{NameList(target.id(), target.name_class(), target.provenance())};
  for (const auto& name : target) {
    if (reference.contains(name)) {
      ++result.removed;
    } else {
      result.list.add(name);
    }
  }
  return result;
}

NameList select_top(const NameList& list, std::size_t n) {
  if (n > list.size()) {
    throw InputError("cannot select " + std::to_string(n) + " names from '" + list.id() + "' (" +
                     std::to_string(list.size()) + " available)");
  }
  NameList out(list.id(), list.name_class(), list.provenance());
  for (std::size_t i = 0; i < n; ++i) out.add(list.names()[i]);
  return out;
}

NameList select_random(const NameList& list, std::size_t n, std::uint64_t seed) {
  if (n > list.size()) {
    throw InputError("cannot sample " + std::to_string(n) + " names from '" + list.id() + "' (" +
                     std::to_string(list.size()) + " available)");
  }
  Rng rng(seed);
  auto picks = rng.sample_indices(list.size(), n);
  std::sort(picks.begin(), picks.end());
  NameList out(list.id(), list.name_class(), list.provenance());
  for (auto i : picks) out.add(list.names()[i]);
  return out;
}

std::vector<std::size_t> mix_quotas(std::size_t n, std::size_t list_count) {
  if (list_count == 0) throw InputError("mix needs at least one list");
  std::vector<std::size_t> quotas(list_count, n / list_count);
  for (std::size_t i = 0; i < n % list_count; ++i) ++quotas[i];
  return quotas;
}

NameList make_mix(std::span<const NameList> lists, std::size_t n, std::uint64_t seed, std::string id) {
  const auto quotas = mix_quotas(n, lists.size());
  std::string provenance = "mix of";
  for (std::size_t i = 0; i < lists.size(); ++i) {
    if (lists[i].size() < quotas[i]) {
      throw InputError("list '" + lists[i].id() + "' has " + std::to_string(lists[i].size()) +
                       " names, fewer than its mix quota " + std::to_string(quotas[i]));
    }
    provenance += " " + lists[i].id();
  }
  NameList out(std::move(id), NameClass::Other, std::move(provenance));
  for (std::size_t i = 0; i < lists.size(); ++i) {
    auto part = select_random(lists[i], quotas[i], derive_seed(seed, i));
    for (const auto& name : part) out.add(name);
  }
  return out;
}

std::vector<Label> LabeledDataset::labels() const {
  std::vector<Label> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.label);
  return out;
}

std::size_t LabeledDataset::count(Label label) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [&](const LabeledName& e) { return e.label == label; }));
}

LabeledDataset make_dataset(const NameList& positive, const NameList& negative, std::uint64_t seed) {
  LabeledDataset ds;
  ds.seed = seed;
  ds.entries.reserve(positive.size() + negative.size());
  for (const auto& name : positive) ds.entries.push_back({name, Label::Positive});
  for (const auto& name : negative) ds.entries.push_back({name, Label::Negative});
  return ds;
}

void write_dataset_csv(std::ostream& out, const LabeledDataset& dataset) {
  out << "name,class\n";
  for (const auto& e : dataset.entries) {
    out << csv::escape(e.name.text()) << ',' << to_string(class_of(e.label)) << '\n';
  }
}

LabeledDataset read_dataset_csv(std::istream& in) {
  LabeledDataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = csv::split_record(line);
    if (line_no == 1 && fields.size() == 2 && fields[0] == "name" && fields[1] == "class") continue;
    if (fields.size() != 2) throw InputError("dataset line " + std::to_string(line_no) + ": expected name,class");
    auto cls = parse_name_class(fields[1]);
    if (!cls) throw InputError("dataset line " + std::to_string(line_no) + ": unknown class '" + fields[1] + "'");
    ds.entries.push_back({split_labels(fields[0]), label_of(*cls)});
  }
  return ds;
}

namespace {

std::array<std::vector<std::size_t>, 2> indices_by_class(std::span<const Label> labels) {
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  return by_class;
}

}  // namespace

IndexSplit split_indices(std::span<const Label> labels, const SplitPlan& plan) {
  if (!(plan.train_fraction > 0.0 && plan.train_fraction < 1.0)) {
    throw InputError("train fraction must lie strictly between 0 and 1");
  }
  Rng rng(plan.seed);
  std::vector<char> in_train(labels.size(), 0);

  auto take = [&](std::vector<std::size_t>& pool) {
    rng.shuffle(pool);
    auto n_train = static_cast<std::size_t>(std::llround(plan.train_fraction * static_cast<double>(pool.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, pool.size() - 1);
    for (std::size_t i = 0; i < n_train; ++i) in_train[pool[i]] = 1;
  };

  if (plan.stratified) {
    auto by_class = indices_by_class(labels);
    for (auto& pool : by_class) {
      if (pool.size() < 2) throw InputError("stratified split needs at least 2 samples of each class");
    }
    for (auto& pool : by_class) take(pool);
  } else {
    if (labels.size() < 2) throw InputError("split needs at least 2 samples");
    std::vector<std::size_t> all(labels.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    take(all);
  }

  IndexSplit out;
  for (std::size_t i = 0; i < labels.size(); ++i) (in_train[i] ? out.train : out.test).push_back(i);
  return out;
}

LabeledDataset subset(const LabeledDataset& dataset, std::span<const std::size_t> indices) {
  LabeledDataset out;
  out.seed = dataset.seed;
  out.entries.reserve(indices.size());
  for (auto i : indices) out.entries.push_back(dataset.entries.at(i));
  return out;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& dataset, const SplitPlan& plan) {
  const auto labels = dataset.labels();
  auto parts = split_indices(labels, plan);
  return {subset(dataset, parts.train), subset(dataset, parts.test)};
}

std::vector<IndexSplit> stratified_fold_indices(std::span<const Label> labels, const FoldPlan& plan) {
  if (plan.k < 2) throw InputError("k-fold needs k >= 2");
  auto by_class = indices_by_class(labels);
  for (const auto& pool : by_class) {
    if (pool.size() < plan.k) {
      throw InputError("each class needs at least k=" + std::to_string(plan.k) + " samples for stratified folds");
    }
  }
  Rng rng(plan.seed);
  std::vector<std::size_t> fold_of(labels.size());
  for (auto& pool : by_class) {
    rng.shuffle(pool);
    for (std::size_t j = 0; j < pool.size(); ++j) fold_of[pool[j]] = j % plan.k;
  }
  std::vector<IndexSplit> folds(plan.k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t f = 0; f < plan.k; ++f) (fold_of[i] == f ? folds[f].test : folds[f].train).push_back(i);
  }
  return folds;
}

std::vector<std::pair<LabeledDataset, LabeledDataset>> stratified_folds(const LabeledDataset& dataset,
                                                                        const FoldPlan& plan) {
  const auto labels = dataset.labels();
  std::vector<std::pair<LabeledDataset, LabeledDataset>> out;
  for (const auto& fold : stratified_fold_indices(labels, plan)) {
    out.emplace_back(subset(dataset, fold.train), subset(dataset, fold.test));
  }
  return out;
}

// --- fixtures ---------------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 30> kServices = {
    "mqtt",   "cam",    "api",     "telemetry", "ota",    "fw",     "iot",     "devices",
    "hub",    "sensor", "gateway", "broker",    "coap",   "stream", "push",    "time",
    "ntp",    "config", "update",  "cloud",     "data",   "events", "metrics", "log",
    "auth",   "connect", "edge",   "link",      "sync",   "status",
};

constexpr std::array<std::string_view, 20> kRegions = {
    "eu-west-1",  "eu-central-1", "us-east-1",  "us-west-2",  "ap-southeast-1",
    "ap-northeast-1", "sa-east-1", "ca-central-1", "eu-north-1", "ap-south-1",
    "us-east-2",  "eu-west-3",    "cn-north-1", "me-south-1", "af-south-1",
    "eu",         "us",           "cn",         "ap",         "na",
};

struct WeightedTld {
  std::string_view tld;
  double weight;
};

constexpr std::array<WeightedTld, 10> kTlds = {{
    {"com", 0.45}, {"net", 0.15}, {"org", 0.12}, {"io", 0.07}, {"de", 0.05},
    {"cn", 0.04},  {"jp", 0.03},  {"fr", 0.03},  {"ru", 0.03}, {"br", 0.03},
}};

constexpr std::array<std::string_view, 32> kSyllables = {
    "ka", "lo", "mi", "ne", "ro", "ta", "vi", "zu", "be", "do", "fa", "gi", "ha", "ju", "ke", "lu",
    "ma", "no", "pi", "ri", "sa", "te", "wo", "xa", "yo", "an", "el", "or", "un", "ix", "ar", "en",
};

constexpr std::size_t kSldPoolSize = 400;
constexpr std::uint64_t kSldPoolSeed = 0x51D5EED;

// Shared by every fixture kind and independent of the caller's seed.
const std::vector<std::string>& sld_pool() {
  static const std::vector<std::string> pool = [] {
    Rng rng(kSldPoolSeed);
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    while (out.size() < kSldPoolSize) {
      std::string word;
      const auto syllables = 2 + rng.uniform_index(2);
      for (std::uint64_t s = 0; s < syllables; ++s) word += kSyllables[rng.uniform_index(kSyllables.size())];
      if (seen.insert(word).second) out.push_back(std::move(word));
    }
    return out;
  }();
  return pool;
}

std::string_view draw_tld(Rng& rng) {
  double u = rng.uniform_real();
  for (const auto& t : kTlds) {
    if (u < t.weight) return t.tld;
    u -= t.weight;
  }
  return kTlds.front().tld;
}

std::string iot_like(Rng& rng) {
  const auto& slds = sld_pool();
  std::string name(kServices[rng.uniform_index(kServices.size())]);
  if (rng.uniform_real() < 0.6) {
    name += '.';
    name += kRegions[rng.uniform_index(kRegions.size())];
  }
  name += '.';
  name += slds[rng.uniform_index(slds.size())];
  name += '.';
  name += draw_tld(rng);
  return name;
}

std::string toplist_like(Rng& rng) {
  const auto& slds = sld_pool();
  std::string name = slds[rng.uniform_index(slds.size())];
  name += '.';
  name += draw_tld(rng);
  return name;
}

}  // namespace

std::string_view to_string(FixtureKind kind) noexcept {
  switch (kind) {
    case FixtureKind::IotLike: return "iot-like";
    case FixtureKind::ToplistLike: return "toplist-like";
    case FixtureKind::Mixed: return "mixed";
  }
  return "mixed";
}

FixtureKind parse_fixture_kind(std::string_view text) {
  if (text == "iot-like") return FixtureKind::IotLike;
  if (text == "toplist-like") return FixtureKind::ToplistLike;
  if (text == "mixed") return FixtureKind::Mixed;
  throw InputError("unknown fixture kind '" + std::string(text) + "'");
}

NameList generate_fixtures(FixtureKind kind, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InputError("fixture count must be at least 1");
  const auto cls = kind == FixtureKind::IotLike ? NameClass::IotM2M : NameClass::Other;
  NameList out(std::string(to_string(kind)), cls, "fixture seed=" + std::to_string(seed));
  Rng rng(seed);
  std::size_t attempts = 0;
  const std::size_t attempt_limit = 1000 * n + 100000;
  while (out.size() < n) {
    if (++attempts > attempt_limit) throw InputError("fixture pool exhausted for " + std::to_string(n) + " names");
    bool iot = kind == FixtureKind::IotLike || (kind == FixtureKind::Mixed && out.size() % 2 == 0);
    out.add(split_labels(iot ? iot_like(rng) : toplist_like(rng)));
  }
  return out;
}

}  // namespace iotnames

#include "iotnames_cli/pipeline_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "iotnames/error.hpp"
#include "iotnames/random.hpp"

namespace iotnames::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Field {
  std::string key;
  std::string value;
  std::size_t line;

  [[noreturn]] void fail(const std::string& why) const {
    throw InputError("config line " + std::to_string(line) + " (" + key + "): " + why);
  }

  std::size_t count(std::size_t min = 0) const {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || p != value.data() + value.size()) fail("expected a non-negative integer");
    if (v < min) fail("must be at least " + std::to_string(min));
    return v;
  }

  std::uint64_t u64() const {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || p != value.data() + value.size()) fail("expected an unsigned integer");
    return v;
  }

  double real() const {
    double v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || p != value.data() + value.size()) fail("expected a number");
    return v;
  }

  bool boolean() const {
    if (value == "true" || value == "yes" || value == "1") return true;
    if (value == "false" || value == "no" || value == "0") return false;
    fail("expected true or false");
  }

  std::vector<std::string> list() const {
    std::vector<std::string> out;
    std::string_view rest = value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      if (item.empty()) fail("empty list item");
      out.emplace_back(item);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (out.empty()) fail("expected at least one value");
    return out;
  }
};

using Setter = std::function<void(PipelineConfig&, const Field&, const std::filesystem::path&)>;

struct KeySpec {
  std::string help;
  Setter set;
};

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

const std::map<std::string, KeySpec>& key_specs() {
  static const std::map<std::string, KeySpec> specs = {
      {"seed", {"master seed for every randomized stage",
                [](auto& c, const Field& f, auto&) { c.seed = f.u64(); }}},
      {"lists.positive", {"iot-m2m list file",
                          [](auto& c, const Field& f, const auto& base) { c.positive = resolve_path(base, f.value); }}},
      {"lists.negative", {"comma-separated list files of the other class",
                          [](auto& c, const Field& f, const auto& base) {
                            c.negatives.clear();
                            for (const auto& item : f.list()) c.negatives.push_back(resolve_path(base, item));
                          }}},
      {"select.mode", {"top | random | mix",
                       [](auto& c, const Field& f, auto&) {
                         try {
                           c.selection = parse_selection_mode(f.value);
                         } catch (const InputError& e) {
                           f.fail(e.what());
                         }
                       }}},
      {"select.n", {"names taken from each class", [](auto& c, const Field& f, auto&) { c.n = f.count(1); }}},
      {"select.repeats", {"random picks (random mode)",
                          [](auto& c, const Field& f, auto&) { c.repeats = f.count(1); }}},
      {"select.reuse_embedding", {"share one embedding across random picks",
                                  [](auto& c, const Field& f, auto&) { c.reuse_embedding = f.boolean(); }}},
      {"embed.dim", {"vector dimension", [](auto& c, const Field& f, auto&) { c.embedding.vector_dim = f.count(1); }}},
      {"embed.window", {"context labels on each side",
                        [](auto& c, const Field& f, auto&) { c.embedding.window = f.count(1); }}},
      {"embed.pad_to", {"padded name length in labels",
                        [](auto& c, const Field& f, auto&) { c.embedding.pad_to = f.count(1); }}},
      {"embed.pad_token", {"padding label", [](auto& c, const Field& f, auto&) { c.embedding.pad_token = f.value; }}},
      {"embed.negatives", {"negative samples per position",
                           [](auto& c, const Field& f, auto&) { c.embedding.negatives = f.count(); }}},
      {"embed.epochs", {"training epochs", [](auto& c, const Field& f, auto&) { c.embedding.epochs = f.count(1); }}},
      {"embed.lr", {"initial learning rate",
                    [](auto& c, const Field& f, auto&) { c.embedding.initial_learning_rate = f.real(); }}},
      {"embed.min_lr", {"final learning rate",
                        [](auto& c, const Field& f, auto&) { c.embedding.min_learning_rate = f.real(); }}},
      {"embed.min_count", {"minimum label count",
                           [](auto& c, const Field& f, auto&) { c.embedding.min_count = f.count(1); }}},
      {"embed.train_only", {"train the embedding on the training split only",
                            [](auto& c, const Field& f, auto&) { c.embed_train_only = f.boolean(); }}},
      {"model.algorithm", {"nb | lr | knn | svm | dt | rf",
                           [](auto& c, const Field& f, auto&) {
                             try {
                               c.model.algorithm = parse_algorithm(f.value);
                             } catch (const InputError& e) {
                               f.fail(e.what());
                             }
                           }}},
      {"model.l2", {"L2 strength for lr and svm",
                    [](auto& c, const Field& f, auto&) { c.model.lr.l2 = c.model.svm.l2 = f.real(); }}},
      {"model.max_iters", {"lr iteration cap", [](auto& c, const Field& f, auto&) { c.model.lr.max_iters = f.count(1); }}},
      {"model.tolerance", {"lr gradient tolerance",
                           [](auto& c, const Field& f, auto&) { c.model.lr.tolerance = f.real(); }}},
      {"model.neighbors", {"knn k", [](auto& c, const Field& f, auto&) { c.model.knn.k = f.count(1); }}},
      {"model.svm_epochs", {"svm passes over the data",
                            [](auto& c, const Field& f, auto&) { c.model.svm.epochs = f.count(1); }}},
      {"model.max_depth", {"tree depth limit for dt and rf",
                           [](auto& c, const Field& f, auto&) { c.model.dt.max_depth = c.model.rf.max_depth = f.count(1); }}},
      {"model.min_samples_split", {"smallest node that may split",
                                   [](auto& c, const Field& f, auto&) {
                                     c.model.dt.min_samples_split = c.model.rf.min_samples_split = f.count(2);
                                   }}},
      {"model.trees", {"rf tree count", [](auto& c, const Field& f, auto&) { c.model.rf.trees = f.count(1); }}},
      {"model.features_per_split", {"rf candidate features per node",
                                    [](auto& c, const Field& f, auto&) { c.model.rf.features_per_split = f.count(1); }}},
      {"model.bootstrap", {"rf bootstrap sampling",
                           [](auto& c, const Field& f, auto&) { c.model.rf.bootstrap = f.boolean(); }}},
      {"model.threads", {"rf worker threads (0 = all cores); never changes results",
                         [](auto& c, const Field& f, auto&) { c.model.rf.threads = f.count(); }}},
      {"eval.mode", {"holdout | cv | ablation",
                     [](auto& c, const Field& f, auto&) {
                       try {
                         c.eval = parse_eval_mode(f.value);
                       } catch (const InputError& e) {
                         f.fail(e.what());
                       }
                     }}},
      {"eval.train_fraction", {"holdout training share",
                               [](auto& c, const Field& f, auto&) {
                                 c.train_fraction = f.real();
                                 if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) f.fail("must lie in (0, 1)");
                               }}},
      {"eval.k", {"cross-validation folds", [](auto& c, const Field& f, auto&) { c.k = f.count(2); }}},
  };
  return specs;
}

}  // namespace

std::string_view to_string(SelectionMode mode) noexcept {
  switch (mode) {
    case SelectionMode::Top: return "top";
    case SelectionMode::Random: return "random";
    case SelectionMode::Mix: return "mix";
  }
  return "top";
}

std::string_view to_string(EvalMode mode) noexcept {
  switch (mode) {
    case EvalMode::Holdout: return "holdout";
    case EvalMode::Cv: return "cv";
    case EvalMode::Ablation: return "ablation";
  }
  return "holdout";
}

SelectionMode parse_selection_mode(std::string_view text) {
  if (text == "top") return SelectionMode::Top;
  if (text == "random") return SelectionMode::Random;
  if (text == "mix") return SelectionMode::Mix;
  throw InputError("unknown selection mode '" + std::string(text) + "' (top, random, mix)");
}

EvalMode parse_eval_mode(std::string_view text) {
  if (text == "holdout") return EvalMode::Holdout;
  if (text == "cv") return EvalMode::Cv;
  if (text == "ablation") return EvalMode::Ablation;
  throw InputError("unknown evaluation mode '" + std::string(text) + "' (holdout, cv, ablation)");
}

const std::map<std::string, std::string>& pipeline_config_keys() {
  static const std::map<std::string, std::string> keys = [] {
    std::map<std::string, std::string> out;
    for (const auto& [k, spec] : key_specs()) out.emplace(k, spec.help);
    return out;
  }();
  return keys;
}

PipelineConfig parse_config_settings(std::string_view text, const std::filesystem::path& base_dir) {
  PipelineConfig config;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> seen;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const Field field{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no};
    const auto it = key_specs().find(field.key);
    if (it == key_specs().end()) {
      throw InputError("config line " + std::to_string(line_no) + ": unknown key '" + field.key + "'");
    }
    if (const auto prev = seen.find(field.key); prev != seen.end()) {
      field.fail("already set on line " + std::to_string(prev->second));
    }
    seen.emplace(field.key, line_no);
    if (field.value.empty()) field.fail("missing value");
    it->second.set(config, field, base_dir);
  }
  config.embedding.validate();
  return config;
}

PipelineConfig parse_pipeline_config(std::string_view text, const std::filesystem::path& base_dir) {
  auto config = parse_config_settings(text, base_dir);
  if (config.positive.empty()) throw InputError("config is missing lists.positive");
  if (config.negatives.empty()) throw InputError("config is missing lists.negative");
  return config;
}

namespace {

std::string read_config_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace

PipelineConfig load_config_settings(const std::filesystem::path& path) {
  return parse_config_settings(read_config_text(path), std::filesystem::absolute(path).parent_path());
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  auto config = parse_pipeline_config(read_config_text(path), std::filesystem::absolute(path).parent_path());
  auto check = [](const std::filesystem::path& p) {
    if (!std::filesystem::is_regular_file(p)) throw InputError("list file '" + p.string() + "' does not exist");
  };
  check(config.positive);
  for (const auto& p : config.negatives) check(p);
  return config;
}

StageSeeds stage_seeds(std::uint64_t seed) {
  return {derive_seed(seed, 0), derive_seed(seed, 1), derive_seed(seed, 2),
          derive_seed(seed, 3), derive_seed(seed, 4), derive_seed(seed, 5)};
}

ModelSpec seeded(ModelSpec spec, std::uint64_t model_seed) {
  spec.rf.seed = model_seed;
  spec.svm.seed = model_seed;
  return spec;
}

}  // namespace iotnames::cli

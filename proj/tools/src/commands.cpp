#include "commands.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "iotnames/classify.hpp"
#include "iotnames/corpus.hpp"
#include "iotnames/csv.hpp"
#include "iotnames/embedding.hpp"
#include "iotnames/error.hpp"
#include "iotnames/eval.hpp"
#include "iotnames/pcap.hpp"
#include "iotnames/resolver.hpp"
#include "iotnames/sanitizer.hpp"
#include "iotnames/stats.hpp"
#include "iotnames_cli/pipeline.hpp"

namespace iotnames::cli {
namespace {

void require_file(const std::filesystem::path& path, std::string_view what) {
  if (!std::filesystem::is_regular_file(path)) {
    throw InputError(std::string(what) + " '" + path.string() + "' does not exist");
  }
}

std::ifstream open_input(const std::filesystem::path& path, std::string_view what) {
  require_file(path, what);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + std::string(what) + " '" + path.string() + "'");
  return in;
}

NameList load_names(const std::filesystem::path& path, NameClass name_class = NameClass::Other) {
  require_file(path, "list file");
  return load_list(path, path.filename().string(), name_class).list;
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  auto in = open_input(path, "dataset");
  return read_dataset_csv(in);
}

EmbeddingModel load_embedding(const std::filesystem::path& path) {
  auto in = open_input(path, "embedding");
  return EmbeddingModel::load(in);
}

double check_fraction(double f) {
  if (!(f > 0.0 && f < 1.0)) throw InputError("--train-fraction must lie in (0, 1)");
  return f;
}

struct Loaded {
  LabeledDataset dataset;
  EmbeddingModel embedding;
  FeatureMatrix features;
  IndexSplit split;
};

Loaded load_experiment(const Context& ctx, const ExperimentInputs& in) {
  auto dataset = load_dataset(in.dataset);
  auto embedding = load_embedding(in.embedding);
  auto features = vectorize_dataset(dataset, embedding);
  const double fraction = check_fraction(in.train_fraction.value_or(ctx.settings().train_fraction));
  auto split = split_indices(features.labels, SplitPlan{fraction, pick_seeds(ctx.seed(), 0).split, true});
  return {std::move(dataset), std::move(embedding), std::move(features), std::move(split)};
}

ModelSpec model_spec(const Context& ctx, const ModelFlags& flags) {
  return seeded(flags.apply(ctx.settings().model), pick_seeds(ctx.seed(), 0).model);
}

void write_summary(std::ostream& out, std::string_view section, const DistributionSummary& s) {
  out << "# " << section << "\nstatistic,value\n";
  out << "n," << s.n << '\n';
  const std::pair<const char*, double> rows[] = {{"min", s.min},       {"q1", s.q1},     {"median", s.median},
                                                 {"q3", s.q3},         {"max", s.max},   {"mean", s.mean},
                                                 {"bandwidth", s.bandwidth}};
  for (const auto& [k, v] : rows) out << k << ',' << csv::format_double(v) << '\n';
  out << "\n# " << section << " density\nx,density\n";
  for (const auto& p : s.density) out << csv::format_double(p.x) << ',' << csv::format_double(p.pdf) << '\n';
  out << '\n';
}

}  // namespace

std::uint64_t Context::seed() const {
  if (common.seed) return *common.seed;
  if (common.config) {
    if (const auto s = settings().seed) return *s;
  }
  return 0;
}

PipelineConfig Context::settings() const {
  if (!common.config) return {};
  require_file(*common.config, "config file");
  return load_config_settings(*common.config);
}

ModelSpec ModelFlags::apply(ModelSpec spec) const {
  if (algorithm) spec.algorithm = parse_algorithm(*algorithm);
  if (l2) spec.lr.l2 = spec.svm.l2 = *l2;
  if (max_iters) spec.lr.max_iters = *max_iters;
  if (tolerance) spec.lr.tolerance = *tolerance;
  if (neighbors) spec.knn.k = *neighbors;
  if (svm_epochs) spec.svm.epochs = *svm_epochs;
  if (max_depth) spec.dt.max_depth = spec.rf.max_depth = *max_depth;
  if (min_samples_split) spec.dt.min_samples_split = spec.rf.min_samples_split = *min_samples_split;
  if (trees) spec.rf.trees = *trees;
  if (features_per_split) spec.rf.features_per_split = *features_per_split;
  if (no_bootstrap) spec.rf.bootstrap = false;
  if (threads) spec.rf.threads = *threads;
  return spec;
}

EmbeddingConfig EmbedFlags::apply(EmbeddingConfig config) const {
  if (dim) config.vector_dim = *dim;
  if (window) config.window = *window;
  if (pad_to) config.pad_to = *pad_to;
  if (negatives) config.negatives = *negatives;
  if (epochs) config.epochs = *epochs;
  if (lr) config.initial_learning_rate = *lr;
  if (min_count) config.min_count = *min_count;
  config.validate();
  return config;
}

void run_sanitize(const Context& ctx, const SanitizeOptions& opt) {
  auto in = open_input(opt.input, "input file");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    lines.push_back(std::move(line));
  }
  const auto result = sanitize_list(lines);
  const auto dir = ctx.output_dir();

  auto emit = [&](std::ostream& out) {
    for (const auto& name : result.accepted) out << name.text() << '\n';
  };
  if (opt.accepted) {
    dir.write(*opt.accepted, emit);
  } else {
    emit(ctx.out);
  }
  dir.write(opt.report, [&](std::ostream& out) {
    out << "raw,rule\n";
    for (const auto& [raw, rule] : result.discarded) out << csv::escape(raw) << ',' << to_string(rule) << '\n';
  });
  ctx.log.info("accepted " + std::to_string(result.accepted.size()) + ", discarded " +
               std::to_string(result.discarded.size()));
}

void run_probe(const Context& ctx, const ProbeOptionsCli& opt) {
  const auto names = load_names(opt.input);
  ProbeOptions options;
  options.server = parse_endpoint(opt.server);
  options.timeout = std::chrono::milliseconds(opt.timeout_ms);
  options.retries = opt.retries;
  options.max_inflight = opt.max_inflight;
  options.seed = ctx.seed();
  if (options.max_inflight == 0) throw InputError("--max-inflight must be positive");

  const auto dir = ctx.output_dir();
  ctx.log.info("probing " + std::to_string(names.size()) + " names via " + opt.server);
  const auto verdicts = probe_all(names.names(), options);
  std::map<Resolvability, std::size_t> counts;
  dir.write(opt.output, [&](std::ostream& out) {
    out << "name,status,rcode,attempts\n";
    for (const auto& v : verdicts) {
      ++counts[v.status];
      out << csv::escape(v.name.text()) << ',' << to_string(v.status) << ',';
      if (v.rcode) out << static_cast<unsigned>(*v.rcode);
      out << ',' << v.attempts << '\n';
    }
  });
  ctx.log.info("resolvable " + std::to_string(counts[Resolvability::Resolvable]) + ", unresolvable " +
               std::to_string(counts[Resolvability::Unresolvable]) + ", indeterminate " +
               std::to_string(counts[Resolvability::Indeterminate]));
}

void run_extract(const Context& ctx, const ExtractOptions& opt) {
  require_file(opt.pcap, "capture");
  require_file(opt.devices, "device map");
  const auto devices = pcap::DeviceMap::load(opt.devices);
  const auto capture = pcap::read_capture(opt.pcap);
  const auto result = pcap::extract_qnames(capture, devices, opt.pcap.filename().string());
  const auto dir = ctx.output_dir();
  for (const auto c : {NameClass::IotM2M, NameClass::Other}) {
    const auto it = result.lists.find(c);
    const NameList empty(std::string(to_string(c)), c);
    dir.write(std::string(to_string(c)) + ".txt",
              [&](std::ostream& out) { write_list(out, it == result.lists.end() ? empty : it->second); });
  }
  ctx.log.info(std::to_string(result.packets) + " packets, " + std::to_string(result.dns_responses) +
               " DNS responses, " + std::to_string(result.unmapped) + " unmapped, " +
               std::to_string(result.parse_failures) + " unparseable");
}

void run_prepare(const Context& ctx, const PrepareOptions& opt) {
  auto config = ctx.settings();
  config.positive = opt.positive;
  config.negatives = opt.negatives;
  config.selection = parse_selection_mode(opt.mode);
  config.n = opt.n;
  require_file(config.positive, "list file");
  for (const auto& p : config.negatives) require_file(p, "list file");

  const auto sources = load_sources(config);
  const auto seeds = pick_seeds(ctx.seed(), 0);
  auto dataset = select_dataset(sources, config, seeds.selection);
  dataset.seed = seeds.dataset;
  ctx.output_dir().write(opt.output, [&](std::ostream& out) { write_dataset_csv(out, dataset); });
  ctx.log.info(std::to_string(sources.commons_removed) + " common names removed, " +
               std::to_string(dataset.size()) + " names labeled");
}

void run_fixtures(const Context& ctx, const FixturesOptions& opt) {
  const auto kind = parse_fixture_kind(opt.kind);
  const auto list = generate_fixtures(kind, opt.n, ctx.seed());
  const auto name = opt.output.value_or(std::string(to_string(kind)) + ".txt");
  ctx.output_dir().write(name, [&](std::ostream& out) { write_list(out, list); });
  ctx.log.info("wrote " + std::to_string(list.size()) + " names to " + name);
}

void run_stats(const Context& ctx, const StatsOptions& opt) {
  const auto list = load_names(opt.input);
  const auto lengths = name_length_stats(list);
  const auto labels = label_count_stats(list);
  const auto freq = top_labels(list, opt.top);
  ctx.output_dir().write(opt.output, [&](std::ostream& out) {
    write_summary(out, "name_length", lengths);
    write_summary(out, "label_count", labels);
    out << "# top_labels\nlabel,share\n";
    for (const auto& [label, share] : freq.entries) out << csv::escape(label) << ',' << csv::format_double(share) << '\n';
    out << "(others)," << csv::format_double(freq.others_mass) << '\n';
  });
  ctx.log.info("profiled " + std::to_string(list.size()) + " names");
}

void run_embed(const Context& ctx, const EmbedOptions& opt) {
  if (opt.inputs.empty() && !opt.dataset) throw InputError("embed needs --input or --dataset");
  std::vector<DomainName> names;
  if (opt.dataset) {
    for (auto& e : load_dataset(*opt.dataset).entries) names.push_back(std::move(e.name));
  }
  for (const auto& path : opt.inputs) {
    const auto list = load_names(path);
    names.insert(names.end(), list.begin(), list.end());
  }
  auto config = opt.flags.apply(ctx.settings().embedding);
  config.seed = pick_seeds(ctx.seed(), 0).embedding;
  const auto model = train_cbow(std::span<const DomainName>(names), config);
  ctx.output_dir().write(opt.output, [&](std::ostream& out) { model.save(out); });
  ctx.log.info("trained on " + std::to_string(names.size()) + " names, vocabulary of " +
               std::to_string(model.vocabulary().size()) + " labels");
}

void run_vectorize(const Context& ctx, const VectorizeOptions& opt) {
  if (opt.input.has_value() == opt.dataset.has_value()) {
    throw InputError("vectorize needs exactly one of --input and --dataset");
  }
  const auto model = load_embedding(opt.embedding);
  FeatureMatrix m;
  if (opt.dataset) {
    m = vectorize_dataset(load_dataset(*opt.dataset), model);
  } else {
    const auto list = load_names(*opt.input);
    const std::size_t cols = model.config().pad_to * model.dim();
    m = FeatureMatrix(list.size(), cols);
    for (std::size_t i = 0; i < list.size(); ++i) vectorize_into(list.names()[i], model, m.row(i));
  }
  ctx.output_dir().write(opt.output, [&](std::ostream& out) { write_matrix(out, m.rows, m.cols, m.values); });
  ctx.log.info("wrote a " + std::to_string(m.rows) + " x " + std::to_string(m.cols) + " matrix");
}

void run_train(const Context& ctx, const TrainOptions& opt) {
  const auto ex = load_experiment(ctx, opt.inputs);
  const auto spec = model_spec(ctx, opt.model);
  const auto data = opt.whole ? ex.features : select_rows(ex.features, ex.split.train);
  const auto model = fit(spec, data);
  ctx.output_dir().write(opt.output, [&](std::ostream& out) { model.save(out); });
  ctx.log.info("trained " + std::string(to_string(spec.algorithm)) + " on " + std::to_string(data.rows) + " rows");
}

void run_evaluate(const Context& ctx, const EvaluateOptions& opt) {
  const auto ex = load_experiment(ctx, opt.inputs);
  auto in = open_input(opt.model, "model file");
  const auto model = TrainedClassifier::load(in);
  const auto test = opt.whole ? ex.features : select_rows(ex.features, ex.split.test);
  const auto report = evaluate(model, test);
  write_holdout_report(ctx.output_dir(), to_string(model.algorithm()), report);
  ctx.log.info("accuracy " + format_metric(report.metrics.accuracy) + " on " + std::to_string(test.rows) + " rows");
}

void run_cv(const Context& ctx, const CvOptions& opt) {
  const auto ex = load_experiment(ctx, opt.inputs);
  const auto spec = model_spec(ctx, opt.model);
  const std::size_t k = opt.k.value_or(ctx.settings().k);
  if (k < 2) throw InputError("--k must be at least 2");
  const auto cv = cross_validate(spec, ex.features, FoldPlan{k, pick_seeds(ctx.seed(), 0).folds});
  write_cv_report(ctx.output_dir(), to_string(spec.algorithm), cv);
  ctx.log.info("accuracy mean " + format_metric(cv.accuracy.mean) + ", std " + format_metric(cv.accuracy.std));
}

void run_ablate(const Context& ctx, const AblateOptions& opt) {
  const auto ex = load_experiment(ctx, opt.inputs);
  const auto spec = model_spec(ctx, opt.model);
  const auto& config = ex.embedding.config();
  for (const auto p : opt.positions) {
    if (p >= config.pad_to) throw InputError("--positions entry " + std::to_string(p) + " is past pad_to");
  }
  const auto train = select_rows(ex.features, ex.split.train);
  const auto test = select_rows(ex.features, ex.split.test);
  const auto baseline = evaluate(fit(spec, train), test);
  const auto result = opt.positions.empty() ? ablate(spec, train, test, config)
                                            : ablate_positions(spec, train, test, config, opt.positions);
  write_ablation_report(ctx.output_dir(), to_string(spec.algorithm), baseline, result,
                        padding_positions(ex.dataset, config));
  ctx.log.info("ablated " + std::to_string(result.per_position.size()) + " positions");
}

void run_pipeline_command(const Context& ctx) {
  if (!ctx.common.config) throw InputError("pipeline needs --config");
  require_file(*ctx.common.config, "config file");
  const auto config = load_pipeline_config(*ctx.common.config);
  const auto seed = ctx.common.seed ? ctx.common.seed : config.seed;
  if (!seed) throw InputError("no seed: set 'seed' in the config or pass --seed");
  run_pipeline(config, *seed, ctx.output_dir(), ctx.log);
}

}  // namespace iotnames::cli

#include "iotnames_cli/cli.hpp"

#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "iotnames/error.hpp"

namespace iotnames::cli {
namespace {

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--model", f.algorithm, "nb | lr | knn | svm | dt | rf");
  cmd->add_option("--l2", f.l2, "L2 strength (lr, svm)");
  cmd->add_option("--max-iters", f.max_iters, "iteration cap (lr)");
  cmd->add_option("--tolerance", f.tolerance, "gradient tolerance (lr)");
  cmd->add_option("--neighbors", f.neighbors, "k (knn)");
  cmd->add_option("--svm-epochs", f.svm_epochs, "passes over the data (svm)");
  cmd->add_option("--max-depth", f.max_depth, "tree depth limit (dt, rf)");
  cmd->add_option("--min-samples-split", f.min_samples_split, "smallest splittable node (dt, rf)");
  cmd->add_option("--trees", f.trees, "tree count (rf)");
  cmd->add_option("--features-per-split", f.features_per_split, "candidate features per node (rf)");
  cmd->add_flag("--no-bootstrap", f.no_bootstrap, "grow every tree on the full sample (rf)");
  cmd->add_option("--threads", f.threads, "worker threads, 0 = all cores (rf)");
}

void add_embed_flags(CLI::App* cmd, EmbedFlags& f) {
  cmd->add_option("--dim", f.dim, "vector dimension");
  cmd->add_option("--window", f.window, "context labels on each side");
  cmd->add_option("--pad-to", f.pad_to, "padded length in labels");
  cmd->add_option("--negatives", f.negatives, "negative samples");
  cmd->add_option("--epochs", f.epochs, "training epochs");
  cmd->add_option("--lr", f.lr, "initial learning rate");
  cmd->add_option("--min-count", f.min_count, "minimum label count");
}

void add_experiment_inputs(CLI::App* cmd, ExperimentInputs& in) {
  cmd->add_option("--dataset", in.dataset, "labeled dataset CSV (name,class)")->required();
  cmd->add_option("--embedding", in.embedding, "embedding model file")->required();
  cmd->add_option("--train-fraction", in.train_fraction, "holdout training share (default 0.8)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Domain-name analysis toolkit: list sanitization, DNS probing, label embeddings and classifiers",
               "iotnames"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions common;
  app.add_option("--seed", common.seed, "master seed for every randomized step");
  app.add_option("--config", common.config, "key = value settings file");
  app.add_option("--output-dir", common.output_dir, "directory for every result file")->capture_default_str();
  app.add_flag("--quiet", common.quiet, "suppress progress messages");

  std::function<void(const Context&)> action;

  SanitizeOptions sanitize;
  auto* c = app.add_subcommand("sanitize", "check name syntax; accepted names to stdout or --accepted");
  c->add_option("--input", sanitize.input, "list file")->required();
  c->add_option("--accepted", sanitize.accepted, "file for accepted names");
  c->add_option("--report", sanitize.report, "CSV of discarded names (raw,rule)")->capture_default_str();
  c->callback([&] { action = [&](const Context& ctx) { run_sanitize(ctx, sanitize); }; });

  ProbeOptionsCli probe;
  c = app.add_subcommand("probe", "ask a DNS server whether each name resolves");
  c->add_option("--input", probe.input, "list file")->required();
  c->add_option("--server", probe.server, "resolver address, e.g. 192.0.2.1 or [::1]:5353")->required();
  c->add_option("--timeout-ms", probe.timeout_ms, "per-attempt timeout")->capture_default_str();
  c->add_option("--retries", probe.retries, "extra attempts after a timeout")->capture_default_str();
  c->add_option("--max-inflight", probe.max_inflight, "outstanding queries")->capture_default_str();
  c->add_option("--output", probe.output, "CSV name,status,rcode,attempts")->capture_default_str();
  c->callback([&] { action = [&](const Context& ctx) { run_probe(ctx, probe); }; });

  ExtractOptions extract;
  c = app.add_subcommand("extract", "collect DNS response names per device class from a pcap");
  c->add_option("--pcap", extract.pcap, "classic pcap file")->required();
  c->add_option("--devices", extract.devices, "CSV address,class")->required();
  c->callback([&] { action = [&](const Context& ctx) { run_extract(ctx, extract); }; });

  PrepareOptions prepare;
  c = app.add_subcommand("prepare", "remove common names, select n per class and label");
  c->add_option("--positive", prepare.positive, "iot-m2m list")->required();
  c->add_option("--negative", prepare.negatives, "other-class list (repeatable)")->required();
  c->add_option("--mode", prepare.mode, "top | random | mix")->capture_default_str();
  c->add_option("--n", prepare.n, "names per class")->capture_default_str();
  c->add_option("--output", prepare.output, "dataset CSV")->capture_default_str();
  c->callback([&] { action = [&](const Context& ctx) { run_prepare(ctx, prepare); }; });

  FixturesOptions fixtures;
  c = app.add_subcommand("fixtures", "generate synthetic name lists");
  c->add_option("--kind", fixtures.kind, "iot-like | toplist-like | mixed")->required();
  c->add_option("--n", fixtures.n, "number of names")->capture_default_str();
  c->add_option("--output", fixtures.output, "list file (default <kind>.txt)");
  c->callback([&] { action = [&](const Context& ctx) { run_fixtures(ctx, fixtures); }; });

  StatsOptions stats;
  c = app.add_subcommand("stats", "length and label statistics of a list");
  c->add_option("--input", stats.input, "list file")->required();
  c->add_option("--top", stats.top, "labels listed in the frequency table")->capture_default_str();
  c->add_option("--output", stats.output, "CSV blocks")->capture_default_str();
  c->callback([&] { action = [&](const Context& ctx) { run_stats(ctx, stats); }; });

  EmbedOptions embed;
  c = app.add_subcommand("embed", "train a label embedding");
  c->add_option("--input", embed.inputs, "list file (repeatable)");
  c->add_option("--dataset", embed.dataset, "labeled dataset CSV");
  add_embed_flags(c, embed.flags);
  c->add_option("--output", embed.output, "embedding file")->capture_default_str();
  c->callback([&] { action = [&](const Context& ctx) { run_embed(ctx, embed); }; });

  VectorizeOptions vectorize;
  c = app.add_subcommand("vectorize", "map names to a binary feature matrix");
  c->add_option("--embedding", vectorize.embedding, "embedding file")->required();
  c->add_option("--input", vectorize.input, "list file");
  c->add_option("--dataset", vectorize.dataset, "labeled dataset CSV");
  c->add_option("--output", vectorize.output, "matrix file")->capture_default_str();
  c->callback([&] { action = [&](const Context& ctx) { run_vectorize(ctx, vectorize); }; });

  TrainOptions train;
  c = app.add_subcommand("train", "fit a classifier on the training split");
  add_experiment_inputs(c, train.inputs);
  add_model_flags(c, train.model);
  c->add_flag("--whole", train.whole, "fit on the whole dataset");
  c->add_option("--output", train.output, "model file")->capture_default_str();
  c->callback([&] { action = [&](const Context& ctx) { run_train(ctx, train); }; });

  EvaluateOptions evaluate;
  c = app.add_subcommand("evaluate", "score a saved model on the test split");
  add_experiment_inputs(c, evaluate.inputs);
  c->add_option("--model-file", evaluate.model, "model file from train")->required();
  c->add_flag("--whole", evaluate.whole, "evaluate on the whole dataset");
  c->callback([&] { action = [&](const Context& ctx) { run_evaluate(ctx, evaluate); }; });

  CvOptions cv;
  c = app.add_subcommand("cv", "stratified k-fold cross-validation");
  add_experiment_inputs(c, cv.inputs);
  add_model_flags(c, cv.model);
  c->add_option("--k", cv.k, "folds (default 5)");
  c->callback([&] { action = [&](const Context& ctx) { run_cv(ctx, cv); }; });

  AblateOptions ablate;
  c = app.add_subcommand("ablate", "zero one label position at a time and refit");
  add_experiment_inputs(c, ablate.inputs);
  add_model_flags(c, ablate.model);
  c->add_option("--positions", ablate.positions, "positions to ablate (default all)")->delimiter(',');
  c->callback([&] { action = [&](const Context& ctx) { run_ablate(ctx, ablate); }; });

  c = app.add_subcommand("pipeline", "run a whole experiment from --config");
  c->callback([&] { action = [&](const Context& ctx) { run_pipeline_command(ctx); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInput;
  }

  try {
    const Context ctx{common, out, Log(err, common.quiet)};
    action(ctx);
    return kExitOk;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace iotnames::cli

#include "iotnames_cli/output.hpp"

#include <algorithm>
#include <ostream>

#include "iotnames/csv.hpp"
#include "iotnames/error.hpp"

namespace iotnames::cli {

void Log::info(std::string_view message) const {
  if (!quiet_) err_ << message << '\n';
}

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec || !std::filesystem::is_directory(root_)) {
    throw IoError("cannot create output directory '" + root_.string() + "'");
  }
}

std::filesystem::path OutputDir::resolve(std::string_view name) const {
  const std::filesystem::path rel(name);
  if (name.empty() || rel.is_absolute() || rel.has_root_name()) {
    throw InputError("output name '" + std::string(name) + "' must be a relative path inside --output-dir");
  }
  for (const auto& part : rel) {
    if (part == "..") throw InputError("output name '" + std::string(name) + "' leaves --output-dir");
  }
  return root_ / rel;
}

std::ofstream OutputDir::open(std::string_view name) const {
  const auto path = resolve(name);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void OutputDir::finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("error writing '" + path.string() + "'");
  out.close();
}

std::string format_metric(const std::optional<double>& value) {
  return value ? csv::format_double(*value) : "NA";
}

std::string metric_cells(const EvalReport& report) {
  const auto& m = report.metrics;
  std::optional<double> auc;
  if (!report.roc.points.empty()) auc = report.roc.auc;
  return format_metric(m.accuracy) + "," + format_metric(m.precision) + "," + format_metric(m.recall) + "," +
         format_metric(m.f1) + "," + format_metric(auc);
}

void write_roc_rows(std::ostream& out, const RocCurve& roc, std::string_view prefix) {
  for (const auto& p : roc.points) {
    if (!prefix.empty()) out << prefix << ',';
    out << csv::format_double(p.fpr) << ',' << csv::format_double(p.tpr) << '\n';
  }
}

namespace {

std::string confusion_cells(const ConfusionMatrix& c) {
  return std::to_string(c.tp) + "," + std::to_string(c.tn) + "," + std::to_string(c.fp) + "," + std::to_string(c.fn);
}

}  // namespace

void write_holdout_report(const OutputDir& dir, std::string_view model, const EvalReport& report) {
  dir.write("metrics.csv", [&](std::ostream& out) {
    out << "model," << kMetricColumns << ",tp,tn,fp,fn\n";
    out << model << ',' << metric_cells(report) << ',' << confusion_cells(report.confusion) << '\n';
  });
  dir.write("roc.csv", [&](std::ostream& out) {
    out << "fpr,tpr\n";
    write_roc_rows(out, report.roc);
  });
}

void write_cv_report(const OutputDir& dir, std::string_view model, const CvResult& cv) {
  dir.write("cv.csv", [&](std::ostream& out) {
    out << "fold,model," << kMetricColumns << ",tp,tn,fp,fn\n";
    for (std::size_t i = 0; i < cv.per_fold.size(); ++i) {
      out << i + 1 << ',' << model << ',' << metric_cells(cv.per_fold[i]) << ','
          << confusion_cells(cv.per_fold[i].confusion) << '\n';
    }
    std::vector<std::optional<double>> aucs;
    for (const auto& r : cv.per_fold) {
      aucs.push_back(r.roc.points.empty() ? std::nullopt : std::optional<double>(r.roc.auc));
    }
    const auto auc = summarize_metric(aucs);
    out << "mean," << model << ',' << format_metric(cv.accuracy.mean) << ',' << format_metric(cv.precision.mean)
        << ',' << format_metric(cv.recall.mean) << ',' << format_metric(cv.f1.mean) << ',' << format_metric(auc.mean)
        << ",,,,\n";
    out << "std," << model << ',' << format_metric(cv.accuracy.std) << ',' << format_metric(cv.precision.std)
        << ',' << format_metric(cv.recall.std) << ',' << format_metric(cv.f1.std) << ',' << format_metric(auc.std)
        << ",,,,\n";
  });
  dir.write("cv_roc.csv", [&](std::ostream& out) {
    out << "fold,fpr,tpr\n";
    for (std::size_t i = 0; i < cv.per_fold.size(); ++i) write_roc_rows(out, cv.per_fold[i].roc, std::to_string(i + 1));
  });
}

void write_ablation_report(const OutputDir& dir, std::string_view model, const EvalReport& baseline,
                           const AblationResult& ablation, std::span<const std::size_t> padding) {
  const auto base_acc = baseline.metrics.accuracy;
  dir.write("ablation.csv", [&](std::ostream& out) {
    out << "position,model,all_padding," << kMetricColumns << ",delta_accuracy\n";
    out << "baseline," << model << ",," << metric_cells(baseline) << ",0\n";
    for (const auto& e : ablation.per_position) {
      const bool pad = std::find(padding.begin(), padding.end(), e.position) != padding.end();
      std::optional<double> delta;
      if (base_acc && e.report.metrics.accuracy) delta = *e.report.metrics.accuracy - *base_acc;
      out << e.position << ',' << model << ',' << (pad ? "yes" : "no") << ',' << metric_cells(e.report) << ','
          << format_metric(delta) << '\n';
    }
  });
  dir.write("ablation_roc.csv", [&](std::ostream& out) {
    out << "position,fpr,tpr\n";
    write_roc_rows(out, baseline.roc, "baseline");
    for (const auto& e : ablation.per_position) write_roc_rows(out, e.report.roc, std::to_string(e.position));
  });
}

}  // namespace iotnames::cli

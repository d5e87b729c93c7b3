#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "iotnames/eval.hpp"

namespace iotnames::cli {

/// Progress messages on stderr, silenced by --quiet.
class Log {
 public:
  Log(std::ostream& err, bool quiet) : err_(err), quiet_(quiet) {}
  void info(std::string_view message) const;
  std::ostream& err() const { return err_; }

 private:
  std::ostream& err_;
  bool quiet_;
};

/// The directory every result file is written into. Names given to it must
/// be plain relative paths that stay inside it.
class OutputDir {
 public:
  /// Creates the directory if needed. Throws IoError on failure.
  explicit OutputDir(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }

  /// Throws InputError for absolute names or names that climb out with "..".
  std::filesystem::path resolve(std::string_view name) const;

  /// Opens `name` for binary writing, creating parent directories.
  std::ofstream open(std::string_view name) const;

  /// Flushes and closes `out`, throwing IoError if any write failed.
  static void finish(std::ofstream& out, const std::filesystem::path& path);

  /// open(), body(stream), finish().
  template <typename Body>
  void write(std::string_view name, Body&& body) const {
    auto out = open(name);
    body(static_cast<std::ostream&>(out));
    finish(out, resolve(name));
  }

 private:
  std::filesystem::path root_;
};

/// "NA" for undefined values, shortest round-trip text otherwise.
std::string format_metric(const std::optional<double>& value);

inline constexpr std::string_view kMetricColumns = "accuracy,precision,recall,f1,auc";

/// accuracy,precision,recall,f1,auc of `report` (auc NA without both classes).
std::string metric_cells(const EvalReport& report);

/// fpr,tpr lines, each prefixed by `prefix` when it is non-empty.
void write_roc_rows(std::ostream& out, const RocCurve& roc, std::string_view prefix = {});

/// metrics.csv (one row) and roc.csv.
void write_holdout_report(const OutputDir& dir, std::string_view model, const EvalReport& report);

/// cv.csv (one row per fold, then mean and std rows) and cv_roc.csv.
void write_cv_report(const OutputDir& dir, std::string_view model, const CvResult& cv);

/// ablation.csv (baseline row, then one row per position) and ablation_roc.csv.
/// `padding` lists positions that are padding for every sample.
void write_ablation_report(const OutputDir& dir, std::string_view model, const EvalReport& baseline,
                           const AblationResult& ablation, std::span<const std::size_t> padding);

}  // namespace iotnames::cli

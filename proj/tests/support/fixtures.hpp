#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace iotnames::test {

std::filesystem::path data_dir();

struct SanitizerCase {
  std::string expected;
  std::string raw;
};

/// Rows of data/sanitizer_cases.tsv.
std::vector<SanitizerCase> load_sanitizer_cases();

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace iotnames::test

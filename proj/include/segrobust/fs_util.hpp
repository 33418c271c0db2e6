#pragma once

#include <filesystem>
#include <string>

namespace segrobust {

/// Builds an output directory in a hidden sibling and renames it into place
/// on commit(), so an interrupted run never leaves a partial tree at the
/// final path. The destination must not already exist.
class StagingDir {
 public:
  explicit StagingDir(std::filesystem::path final_path);
  ~StagingDir();

  StagingDir(const StagingDir&) = delete;
  StagingDir& operator=(const StagingDir&) = delete;

  const std::filesystem::path& path() const { return staging_; }
  void commit();

 private:
  std::filesystem::path final_;
  std::filesystem::path staging_;
  bool committed_ = false;
};

/// Writes `contents` to a temp file in the same directory and renames it over
/// `path`.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);

}  // namespace segrobust

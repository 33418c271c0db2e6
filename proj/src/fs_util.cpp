#include "segrobust/fs_util.hpp"

#include <atomic>
#include <fstream>
#include <stdexcept>

#include <unistd.h>

namespace segrobust {

namespace fs = std::filesystem;

namespace {

std::string unique_suffix() {
  static std::atomic<unsigned> counter{0};
  return std::to_string(::getpid()) + "-" + std::to_string(counter++);
}

}  // namespace

StagingDir::StagingDir(fs::path final_path)
    : final_(std::move(final_path)) {
  if (final_.empty()) throw std::invalid_argument("empty output path");
  if (fs::exists(final_))
    throw std::runtime_error("output path already exists: " + final_.string());
  fs::path parent = fs::absolute(final_).parent_path();
  fs::create_directories(parent);
  staging_ = parent / ("." + final_.filename().string() + ".tmp-" +
                       unique_suffix());
  fs::create_directories(staging_);
}

StagingDir::~StagingDir() {
  if (!committed_) {
    std::error_code ec;
    fs::remove_all(staging_, ec);
  }
}

void StagingDir::commit() {
  fs::rename(staging_, final_);
  committed_ = true;
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp-" + unique_suffix();
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw std::runtime_error("short write: " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace segrobust

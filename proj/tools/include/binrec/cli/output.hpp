#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace binrec::cli {

/// Shortest decimal text with 17 significant digits ("nan", "inf" for
/// non-finite values).
std::string format_number(double v);

/// Output files written under `name.partial` and renamed to `name` only by
/// commit(). Files of an aborted run keep the suffix.
class PartialFiles {
 public:
  explicit PartialFiles(std::filesystem::path dir);

  std::ofstream& open(const std::string& name);
  /// Flushes, closes and renames every file. Throws on I/O errors.
  std::vector<std::filesystem::path> commit();

  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  struct Entry {
    std::filesystem::path final_path;
    std::filesystem::path partial_path;
    std::unique_ptr<std::ofstream> stream;
  };
  std::filesystem::path dir_;
  std::vector<Entry> entries_;
};

}  // namespace binrec::cli

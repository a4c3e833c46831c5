#include "binrec/cli/output.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace binrec::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

PartialFiles::PartialFiles(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::ofstream& PartialFiles::open(const std::string& name) {
  Entry e;
  e.final_path = dir_ / name;
  e.partial_path = dir_ / (name + ".partial");
  e.stream = std::make_unique<std::ofstream>(e.partial_path, std::ios::binary | std::ios::trunc);
  if (!*e.stream) throw std::runtime_error("cannot write " + e.partial_path.string());
  entries_.push_back(std::move(e));
  return *entries_.back().stream;
}

std::vector<std::filesystem::path> PartialFiles::commit() {
  std::vector<std::filesystem::path> done;
  for (auto& e : entries_) {
    e.stream->flush();
    if (!*e.stream) throw std::runtime_error("write failed for " + e.partial_path.string());
    e.stream->close();
    std::filesystem::rename(e.partial_path, e.final_path);
    done.push_back(e.final_path);
  }
  entries_.clear();
  return done;
}

}  // namespace binrec::cli

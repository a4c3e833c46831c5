#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace binrec {

/// 8-bit grayscale raster, row 0 at the top.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

/// Reads binary (P5) or ASCII (P2) PGM with maxval <= 255.
GrayImage read_pgm(const std::filesystem::path& path);
GrayImage parse_pgm(const std::string& bytes);

/// Writes binary P5 with maxval 255.
void write_pgm(const std::filesystem::path& path, const GrayImage& image);
std::string encode_pgm(const GrayImage& image);

/// Linear map [-1, 1] -> 0..255 (values clamped, round half up).
std::uint8_t field_to_gray(double u) noexcept;
/// Inverse on the 256-level lattice: g -> 2 g / 255 - 1.
double gray_to_field(std::uint8_t g) noexcept;

}  // namespace binrec

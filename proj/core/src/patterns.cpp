#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "binrec/experiments.hpp"
#include "binrec/pgm.hpp"

namespace binrec {

// ---------------------------------------------------------------------------
// PGM

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(const std::string& bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const char c = bytes[pos];
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos])) && bytes[pos] != '#') {
    ++pos;
  }
  if (start == pos) throw std::invalid_argument("PGM: truncated header");
  return bytes.substr(start, pos - start);
}

int parse_positive(const std::string& token, const char* what) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || value <= 0) {
    throw std::invalid_argument(std::string("PGM: invalid ") + what + " '" + token + "'");
  }
  return value;
}

}  // namespace

GrayImage parse_pgm(const std::string& bytes) {
  std::size_t pos = 0;
  const std::string magic = next_token(bytes, pos);
  if (magic != "P5" && magic != "P2") throw std::invalid_argument("PGM: unsupported magic '" + magic + "'");
  GrayImage img;
  img.width = parse_positive(next_token(bytes, pos), "width");
  img.height = parse_positive(next_token(bytes, pos), "height");
  const int maxval = parse_positive(next_token(bytes, pos), "maxval");
  if (maxval > 255) throw std::invalid_argument("PGM: 16-bit images are not supported");

  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  img.pixels.resize(count);
  auto rescale = [maxval](int v) {
    return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0, maxval) / maxval));
  };
  if (magic == "P5") {
    ++pos;  // single whitespace after maxval
    if (bytes.size() < pos + count) throw std::invalid_argument("PGM: truncated pixel data");
    for (std::size_t i = 0; i < count; ++i) img.pixels[i] = rescale(static_cast<unsigned char>(bytes[pos + i]));
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const std::string tok = next_token(bytes, pos);
      std::size_t used = 0;
      const int v = std::stoi(tok, &used);
      if (used != tok.size() || v < 0) throw std::invalid_argument("PGM: invalid pixel '" + tok + "'");
      img.pixels[i] = rescale(v);
    }
  }
  return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open image " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_pgm(ss.str());
}

std::string encode_pgm(const GrayImage& image) {
  std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(image.pixels.begin(), image.pixels.end());
  return out;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const std::string bytes = encode_pgm(image);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::uint8_t field_to_gray(double u) noexcept {
  const double scaled = (std::clamp(u, -1.0, 1.0) + 1.0) * 0.5 * 255.0;
  return static_cast<std::uint8_t>(std::min(255.0, std::floor(scaled + 0.5)));
}

double gray_to_field(std::uint8_t g) noexcept { return 2.0 * g / 255.0 - 1.0; }

// ---------------------------------------------------------------------------
// Patterns

int pattern_dimension(const BinaryPattern& pattern) noexcept {
  return std::holds_alternative<Barcode>(pattern) ? 1 : 2;
}

void validate_pattern(const BinaryPattern& pattern) {
  if (const auto* bar = std::get_if<Barcode>(&pattern)) {
    double last = 0.0;
    for (double c : bar->cuts) {
      if (!(c > last) || !(c < 1.0)) {
        throw std::invalid_argument("barcode cuts must be strictly increasing inside (0, 1)");
      }
      last = c;
    }
  } else if (const auto* blob = std::get_if<Blob>(&pattern)) {
    double wiggle = 0.0;
    for (const auto& hmode : blob->harmonics) wiggle += std::abs(hmode.amplitude);
    if (!(blob->radius > wiggle)) throw std::invalid_argument("blob radius must exceed the total harmonic amplitude");
  } else if (const auto* blocks = std::get_if<Blocks>(&pattern)) {
    if (blocks->rows < 1 || blocks->cols < 1) throw std::invalid_argument("block matrix must be nonempty");
    if (blocks->cells.size() != static_cast<std::size_t>(blocks->rows) * blocks->cols) {
      throw std::invalid_argument("block matrix size does not match rows x cols");
    }
  } else if (const auto* raster = std::get_if<RasterImage>(&pattern)) {
    if (raster->image.width < 1 || raster->image.height < 1 ||
        raster->image.pixels.size() != static_cast<std::size_t>(raster->image.width) * raster->image.height) {
      throw std::invalid_argument("raster image is empty or malformed");
    }
  }
}

namespace {

double pattern_value(const BinaryPattern& pattern, const Point& p) {
  if (const auto* bar = std::get_if<Barcode>(&pattern)) {
    const auto crossed = std::upper_bound(bar->cuts.begin(), bar->cuts.end(), p.x) - bar->cuts.begin();
    return crossed % 2 == 0 ? 1.0 : -1.0;
  }
  if (const auto* blob = std::get_if<Blob>(&pattern)) {
    const double dx = p.x - blob->center.x;
    const double dy = p.y - blob->center.y;
    const double theta = std::atan2(dy, dx);
    double r = blob->radius;
    for (const auto& hmode : blob->harmonics) r += hmode.amplitude * std::cos(hmode.frequency * theta + hmode.phase);
    return std::hypot(dx, dy) <= r ? 1.0 : -1.0;
  }
  auto cell = [&](int rows, int cols) {
    const int col = std::min(cols - 1, static_cast<int>(std::floor(p.x * cols)));
    const int row = std::min(rows - 1, static_cast<int>(std::floor((1.0 - p.y) * rows)));
    return std::pair{std::max(0, row), std::max(0, col)};
  };
  if (const auto* blocks = std::get_if<Blocks>(&pattern)) {
    const auto [row, col] = cell(blocks->rows, blocks->cols);
    return blocks->cells[static_cast<std::size_t>(row) * blocks->cols + col] != 0 ? 1.0 : -1.0;
  }
  const auto& img = std::get<RasterImage>(pattern).image;
  const auto [row, col] = cell(img.height, img.width);
  return img.at(row, col) >= 128 ? 1.0 : -1.0;
}

}  // namespace

FeFunction rasterize(const BinaryPattern& pattern, MeshPtr mesh) {
  validate_pattern(pattern);
  if (pattern_dimension(pattern) != mesh->dim()) {
    throw std::invalid_argument("rasterize: pattern dimension does not match the mesh");
  }
  return interpolate(std::move(mesh), [&](const Point& p) { return pattern_value(pattern, p); });
}

double min_feature_width(const BinaryPattern& pattern) {
  validate_pattern(pattern);
  if (const auto* bar = std::get_if<Barcode>(&pattern)) {
    double last = 0.0;
    double width = 1.0;
    for (double c : bar->cuts) {
      width = std::min(width, c - last);
      last = c;
    }
    if (!bar->cuts.empty()) width = std::min(width, 1.0 - last);
    return width;
  }
  if (const auto* blob = std::get_if<Blob>(&pattern)) {
    double wiggle = 0.0;
    for (const auto& hmode : blob->harmonics) wiggle += std::abs(hmode.amplitude);
    return 2.0 * (blob->radius - wiggle);
  }
  if (const auto* blocks = std::get_if<Blocks>(&pattern)) {
    return 1.0 / std::max(blocks->rows, blocks->cols);
  }
  const auto& img = std::get<RasterImage>(pattern).image;
  return 1.0 / std::max(img.width, img.height);
}

Barcode three_bar_pattern() { return Barcode{{0.2, 0.4, 0.6, 0.8}}; }

Barcode reference_barcode() {
  // module widths, alternating white / black, quiet zones at both ends
  static constexpr int kModules[] = {
      8, 1, 1, 2, 1, 3, 1, 1, 2, 2, 1, 1, 3, 2, 1, 1, 2, 3, 1, 1, 1, 2, 2, 1, 3, 1, 1, 2, 1, 2, 2,
      3, 1, 1, 1, 1, 2, 1, 3, 2, 1, 1, 1, 2, 1, 1, 3, 1, 2, 2, 1, 1, 4, 2, 1, 1, 3, 1, 2, 1, 10};
  static constexpr int kTotal = 113;
  Barcode bar;
  int position = 0;
  for (std::size_t k = 0; k + 1 < std::size(kModules); ++k) {
    position += kModules[k];
    bar.cuts.push_back(static_cast<double>(position) / kTotal);
  }
  return bar;
}

Blob reference_blob() {
  return Blob{{0.5, 0.5}, 0.27, {{2, 0.04, 0.3}, {3, 0.05, 1.1}, {5, 0.02, 0.0}}};
}

Blocks qr_like_blocks(int n, std::uint64_t seed) {
  if (n < 21) throw std::invalid_argument("qr_like_blocks: need at least 21 blocks per side");
  Blocks b{n, n, std::vector<std::uint8_t>(static_cast<std::size_t>(n) * n)};
  std::mt19937_64 rng(seed);
  for (auto& c : b.cells) c = static_cast<std::uint8_t>(rng() >> 63);
  auto finder = [&](int r0, int c0) {
    for (int r = -1; r <= 7; ++r) {
      for (int c = -1; c <= 7; ++c) {
        const int rr = r0 + r;
        const int cc = c0 + c;
        if (rr < 0 || cc < 0 || rr >= n || cc >= n) continue;
        const int ring = std::max(std::abs(r - 3), std::abs(c - 3));
        // dark outer ring, light ring, dark 3x3 core, light separator
        const bool dark = ring == 3 || ring <= 1;
        b.cells[static_cast<std::size_t>(rr) * n + cc] = dark ? 0 : 1;
      }
    }
  };
  finder(0, 0);
  finder(0, n - 7);
  finder(n - 7, 0);
  return b;
}

}  // namespace binrec

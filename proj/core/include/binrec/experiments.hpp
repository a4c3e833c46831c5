#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "binrec/blur.hpp"
#include "binrec/fem.hpp"
#include "binrec/pgm.hpp"
#include "binrec/phasefield.hpp"
#include "binrec/solver.hpp"

namespace binrec {

// ---------------------------------------------------------------------------
// Ground-truth patterns

/// 1D bar pattern: +1 on [0, cuts[0]), then alternating sign at every cut.
/// A node sitting exactly on a cut takes the value to its right.
struct Barcode {
  std::vector<double> cuts;
};

struct BlobHarmonic {
  int frequency = 0;
  double amplitude = 0.0;
  double phase = 0.0;
};

/// Star-shaped region r(theta) = radius + sum a_k cos(k theta + phi_k)
/// around center; +1 inside, -1 outside.
struct Blob {
  Point center{0.5, 0.5};
  double radius = 0.25;
  std::vector<BlobHarmonic> harmonics;
};

/// rows x cols grid of blocks covering the unit square, row 0 at the top.
/// Nonzero cells are +1, zero cells -1.
struct Blocks {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> cells;
};

/// Grayscale raster covering the unit square, thresholded at 128
/// (>= 128 -> +1).
struct RasterImage {
  GrayImage image;
};

using BinaryPattern = std::variant<Barcode, Blob, Blocks, RasterImage>;

int pattern_dimension(const BinaryPattern& pattern) noexcept;
/// Throws std::invalid_argument for malformed patterns.
void validate_pattern(const BinaryPattern& pattern);

/// Nodal values exactly +1 or -1.
FeFunction rasterize(const BinaryPattern& pattern, MeshPtr mesh);

/// Width of the smallest feature (bar, block, pixel or blob diameter).
double min_feature_width(const BinaryPattern& pattern);

/// Equal-width bars: cuts at 0.2, 0.4, 0.6, 0.8, so every segment is 0.2 wide.
Barcode three_bar_pattern();
/// Barcode on a 113-module grid (smallest bar one module, omega = 1/113).
Barcode reference_barcode();
/// Irregular blob with concave parts, centred in the unit square.
Blob reference_blob();
/// Pseudo-random n x n block code with the three corner finder squares of
/// a QR symbol; deterministic in seed.
Blocks qr_like_blocks(int n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic data and metrics

struct NoiseSpec {
  double gamma = 0.0;  // variance
  std::uint64_t seed = 0;
};

/// i.i.d. N(0, gamma) samples: mt19937_64 seeded with `seed`, Box-Muller on
/// 53-bit uniforms, both variates of each pair used in order.
std::vector<double> gaussian_noise(std::size_t count, const NoiseSpec& noise);

/// y_d = S_h u_true + zeta with nodal noise.
FeFunction synthesize_data(const FeFunction& u_true, const BlurOperator& blur, const NoiseSpec& noise);

/// Affine map of y_d onto [-1, 1] (min -> -1, max -> +1), clamped. A
/// constant y_d gives 0.
FeFunction initial_guess(const FeFunction& y_d);

/// Nodal sign projection, 0 maps to +1.
FeFunction project_binary(const FeFunction& u);

/// 2 x number of sign changes along a 1D binary function.
double tv_binary(const FeFunction& u_binary);

/// ||a - b||_L1. Exact for piecewise-linear functions in 1D, lumped
/// quadrature in 2D.
double l1_distance(const FeFunction& a, const FeFunction& b);

/// E = 1/4 | |P u_rec|_TV - |u_true|_TV | + 1/2 ||P u_rec - u_true||_L1.
/// 1D only; throws UnsupportedError otherwise.
double error_metric(const FeFunction& u_rec, const FeFunction& u_true);

// ---------------------------------------------------------------------------
// Pipelines

/// Mesh, blurring operator and rasterised truth for one (pattern, params)
/// pair. The mesh size follows params.h.
struct ExperimentSetup {
  MeshPtr mesh;
  std::shared_ptr<const BlurOperator> blur;
  FeFunction u_true;
};

ExperimentSetup make_setup(const BinaryPattern& pattern, const ModelParams& params);

struct SingleRun {
  FeFunction y_d;
  RecoveryResult result;
  std::optional<double> error;  // 1D only
  double l1_mismatch = 0.0;     // ||P u_rec - u_true||_L1
};

/// synthesize -> initial_guess -> run_recovery -> metrics.
SingleRun run_single(const ExperimentSetup& setup, const ModelParams& params, Potential potential,
                     std::uint64_t seed, const IterateObserver& observer = {});

struct AveragedError {
  double mean = 0.0;                   // over successful runs; NaN if none
  std::vector<double> per_run;         // NaN for failed runs, seed order
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> failures;   // "seed: message"
  int failed_runs = 0;
};

/// Runs seeds base_seed .. base_seed + n - 1, possibly concurrently, and
/// merges results in seed order.
AveragedError averaged_error(const BinaryPattern& pattern, const ModelParams& params,
                             Potential potential, int n_realizations, std::uint64_t base_seed,
                             int threads = 0);

/// BINREC_THREADS if set and positive, else hardware concurrency.
int default_thread_count();

}  // namespace binrec

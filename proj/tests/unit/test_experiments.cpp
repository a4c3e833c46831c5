#include <cmath>
#include <numeric>
#include <stdexcept>

#include "binrec/errors.hpp"
#include "binrec/experiments.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace binrec;

namespace {

// frozen from the first verified run, seeds 0..19
constexpr double kThreeBarMeanWell = 0.10296874999999998;
constexpr double kThreeBarMeanObstacle = 0.092500000000000027;

ModelParams three_bar_params(Potential p, double gamma) {
  ModelParams m = parameter_heuristics(0.2, p);
  m.alpha = 0.01;
  m.gamma = gamma;
  return m;
}

// midpoint rule on 64 sub-intervals per cell of |a - b| (piecewise linear)
double l1_by_sampling(const FeFunction& a, const FeFunction& b) {
  const auto& mesh = *a.mesh;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    const double w = mesh.node(i + 1).x - mesh.node(i).x;
    const double d0 = a[i] - b[i], d1 = a[i + 1] - b[i + 1];
    for (int k = 0; k < 64; ++k) {
      const double t = (k + 0.5) / 64;
      total += std::abs((1 - t) * d0 + t * d1) * w / 64;
    }
  }
  return total;
}

}  // namespace

TEST_CASE("rasterize: barcodes") {
  const auto mesh = build_interval_mesh(30);
  for (double v : rasterize(Barcode{}, mesh).coeffs) CHECK(v == 1.0);

  const Barcode thirds{{1.0 / 3, 2.0 / 3}};
  const auto u = rasterize(thirds, mesh);
  for (double v : u.coeffs) CHECK(std::abs(v) == 1.0);
  CHECK(min_feature_width(thirds) == doctest::Approx(1.0 / 3));
  CHECK(tv_binary(u) == 4.0);
  CHECK(u[0] == 1.0);
  CHECK(u[15] == -1.0);
  CHECK(u[30] == 1.0);

  // a node on a cut takes the value to its right
  const auto m5 = build_interval_mesh(5);
  REQUIRE(m5->node(2).x == 0.4);
  CHECK(rasterize(Barcode{{0.4}}, m5)[2] == -1.0);

  CHECK_THROWS_AS(rasterize(thirds, build_square_mesh(4)), std::invalid_argument);
}

TEST_CASE("rasterize: 2 x 2 checkerboard on a 64 x 64 mesh") {
  const auto mesh = build_square_mesh(64);
  const Blocks board{2, 2, {1, 0, 0, 1}};  // row 0 at the top
  const auto u = rasterize(board, mesh);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Point p = mesh->node(i);
    CHECK(std::abs(u[i]) == 1.0);
    if (std::abs(p.x - 0.5) < 1e-9 || std::abs(p.y - 0.5) < 1e-9) continue;
    const bool top = p.y > 0.5, left = p.x < 0.5;
    CHECK(u[i] == (top == left ? 1.0 : -1.0));
  }
  CHECK_THROWS_AS(rasterize(board, build_interval_mesh(4)), std::invalid_argument);
}

TEST_CASE("min_feature_width") {
  CHECK(min_feature_width(Barcode{{0.3, 0.5, 0.9}}) == doctest::Approx(0.1));
  CHECK(min_feature_width(Barcode{}) == 1.0);
  CHECK(min_feature_width(Blocks{25, 25, std::vector<std::uint8_t>(625, 1)}) == doctest::Approx(0.04));
  CHECK(min_feature_width(three_bar_pattern()) == doctest::Approx(0.2));
  CHECK(min_feature_width(reference_barcode()) == doctest::Approx(1.0 / 113));
  CHECK(min_feature_width(qr_like_blocks(25, 3)) == doctest::Approx(0.04));
  CHECK(min_feature_width(reference_blob()) > 0.2);
}

TEST_CASE("pattern validation") {
  CHECK_THROWS_AS(validate_pattern(Barcode{{0.5, 0.3}}), std::invalid_argument);
  CHECK_THROWS_AS(validate_pattern(Barcode{{0.5, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(validate_pattern(Barcode{{0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(validate_pattern(Barcode{{1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(validate_pattern(Blocks{0, 0, {}}), std::invalid_argument);
  CHECK_THROWS_AS(validate_pattern(Blocks{2, 2, {1, 0, 1}}), std::invalid_argument);
  CHECK_NOTHROW(validate_pattern(reference_barcode()));
  CHECK_NOTHROW(validate_pattern(reference_blob()));
  CHECK(pattern_dimension(three_bar_pattern()) == 1);
  CHECK(pattern_dimension(reference_blob()) == 2);
  const auto a = qr_like_blocks(25, 7), b = qr_like_blocks(25, 7);
  CHECK(a.cells == b.cells);
  CHECK(a.cells != qr_like_blocks(25, 8).cells);
}

TEST_CASE("synthesize_data: exact blur without noise, determinism, noise statistics") {
  const auto mesh = build_interval_mesh(200);
  const BlurOperator blur(mesh, 0.01);
  const auto u = rasterize(three_bar_pattern(), mesh);
  CHECK(synthesize_data(u, blur, {0.0, 5}).coeffs == blur.apply(u).coeffs);
  CHECK(synthesize_data(u, blur, {0.2, 5}).coeffs == synthesize_data(u, blur, {0.2, 5}).coeffs);
  CHECK(synthesize_data(u, blur, {0.2, 5}).coeffs != synthesize_data(u, blur, {0.2, 6}).coeffs);

  for (std::uint64_t seed : {0u, 1u, 2u, 3u}) {
    const auto z = gaussian_noise(10000, {0.04, seed});
    const double mean = std::accumulate(z.begin(), z.end(), 0.0) / z.size();
    double var = 0.0;
    for (double v : z) var += (v - mean) * (v - mean);
    var /= z.size() - 1;
    CHECK(var >= 0.036);
    CHECK(var <= 0.044);
    CHECK(std::abs(mean) < 3 * 0.2 / 100);
  }
  CHECK(gaussian_noise(7, {0.0, 1}) == std::vector<double>(7, 0.0));
  CHECK(gaussian_noise(5, {0.1, 9}).size() == 5);
  CHECK_THROWS_AS(gaussian_noise(3, {-0.1, 1}), std::invalid_argument);
}

TEST_CASE("initial_guess") {
  const auto mesh = build_interval_mesh(10);
  const auto truth = rasterize(three_bar_pattern(), mesh);
  CHECK(initial_guess(truth).coeffs == truth.coeffs);

  auto half = truth;
  for (double& v : half.coeffs) v *= 0.5;
  CHECK(initial_guess(half).coeffs == truth.coeffs);

  for (double v : initial_guess(FeFunction::constant(mesh, 3.0)).coeffs) CHECK(v == 0.0);

  const auto r = initial_guess(test::random_function(mesh, 3, -4.0, 9.0));
  CHECK(*std::min_element(r.coeffs.begin(), r.coeffs.end()) == -1.0);
  CHECK(*std::max_element(r.coeffs.begin(), r.coeffs.end()) == 1.0);
}

TEST_CASE("project_binary") {
  const auto mesh = build_interval_mesh(2);
  for (double v : project_binary(FeFunction::zeros(mesh)).coeffs) CHECK(v == 1.0);
  const FeFunction u{mesh, {-0.3, 0.0, 0.7}};
  CHECK(project_binary(u).coeffs == std::vector<double>{-1.0, 1.0, 1.0});
  const auto once = project_binary(test::random_function(build_interval_mesh(40), 4));
  CHECK(project_binary(once).coeffs == once.coeffs);
}

TEST_CASE("tv_binary") {
  const auto mesh = build_interval_mesh(100);
  CHECK(tv_binary(FeFunction::constant(mesh, -1.0)) == 0.0);
  CHECK(tv_binary(rasterize(Barcode{{0.5}}, mesh)) == 2.0);
  CHECK(tv_binary(rasterize(three_bar_pattern(), mesh)) == 8.0);
  const auto fine = build_interval_mesh(113 * 8);
  CHECK(tv_binary(rasterize(reference_barcode(), fine)) == 2.0 * reference_barcode().cuts.size());
  CHECK_THROWS_AS(tv_binary(FeFunction::constant(mesh, 0.5)), std::invalid_argument);
  CHECK_THROWS_AS(tv_binary(FeFunction::constant(build_square_mesh(2), 1.0)), UnsupportedError);
}

TEST_CASE("l1_distance agrees with fine sampling") {
  const auto mesh = build_interval_mesh(37);
  for (int k = 0; k < 5; ++k) {
    const auto a = project_binary(test::random_function(mesh, 60 + k));
    const auto b = project_binary(test::random_function(mesh, 70 + k));
    CHECK(l1_distance(a, b) == doctest::Approx(l1_by_sampling(a, b)).epsilon(1e-9));
    const auto c = test::random_function(mesh, 80 + k);
    CHECK(l1_distance(a, c) == doctest::Approx(l1_by_sampling(a, c)).epsilon(1e-3));
  }
}

TEST_CASE("error_metric") {
  const auto mesh = build_interval_mesh(160);
  const auto truth = rasterize(three_bar_pattern(), mesh);
  CHECK(error_metric(truth, truth) == 0.0);

  // -u_true: E = 1 in the continuum; the piecewise-linear difference changes
  // sign inside each of the four cut cells, which removes h per cut
  for (int n : {160, 1600, 16000}) {
    const auto m = build_interval_mesh(n);
    const auto t = rasterize(three_bar_pattern(), m);
    auto flipped = t;
    for (double& v : flipped.coeffs) v = -v;
    const double e = error_metric(flipped, t);
    CHECK(e == doctest::Approx(1.0 - 2.0 / n).epsilon(1e-12));
    if (n == 160) CHECK(e == doctest::Approx(0.5 * l1_by_sampling(flipped, t)).epsilon(1e-12));
    CHECK(std::abs(e - 1.0) <= 2.0 / n + 1e-12);
  }

  // one extra bar pair inside the first bar
  auto extra = truth;
  for (std::size_t i = 8; i <= 12; ++i) extra[i] = -1.0;
  const double e = error_metric(extra, truth);
  CHECK(std::floor(e) >= 1.0);
  CHECK(e == doctest::Approx(1.0 + 0.5 * l1_by_sampling(extra, truth)));
  CHECK(error_metric(truth, extra) == e);

  // continuous reconstructions are projected first
  auto soft = truth;
  for (double& v : soft.coeffs) v *= 0.3;
  CHECK(error_metric(soft, truth) == 0.0);

  const auto square = build_square_mesh(4);
  CHECK_THROWS_AS(error_metric(FeFunction::constant(square, 1.0), FeFunction::constant(square, 1.0)),
                  UnsupportedError);
}

TEST_CASE("run_single is reproducible") {
  const auto m = three_bar_params(Potential::DoubleObstacle, 0.2);
  const auto setup = make_setup(three_bar_pattern(), m);
  const auto a = run_single(setup, m, Potential::DoubleObstacle, 11);
  const auto b = run_single(setup, m, Potential::DoubleObstacle, 11);
  CHECK(a.result.final_u.coeffs == b.result.final_u.coeffs);
  CHECK(a.result.energies == b.result.energies);
  REQUIRE(a.error.has_value());
  CHECK(*a.error == *b.error);
  CHECK(a.l1_mismatch >= 0.0);
  CHECK(setup.mesh->node_count() == 161);
}

TEST_CASE("averaged_error: noiseless runs agree, single realisation") {
  const auto m = three_bar_params(Potential::SmoothDoubleWell, 0.0);
  const auto avg = averaged_error(three_bar_pattern(), m, Potential::SmoothDoubleWell, 4, 0);
  REQUIRE(avg.per_run.size() == 4);
  for (double e : avg.per_run) CHECK(e == avg.per_run.front());
  CHECK(avg.mean == avg.per_run.front());
  CHECK(avg.seeds == std::vector<std::uint64_t>{0, 1, 2, 3});
  CHECK(avg.failed_runs == 0);

  const auto noisy = three_bar_params(Potential::SmoothDoubleWell, 0.2);
  const auto one = averaged_error(three_bar_pattern(), noisy, Potential::SmoothDoubleWell, 1, 5);
  REQUIRE(one.per_run.size() == 1);
  CHECK(one.mean == one.per_run[0]);
  const auto setup = make_setup(three_bar_pattern(), noisy);
  CHECK(one.mean == *run_single(setup, noisy, Potential::SmoothDoubleWell, 5).error);

  CHECK_THROWS_AS(averaged_error(three_bar_pattern(), noisy, Potential::SmoothDoubleWell, 0, 0),
                  std::invalid_argument);
}

TEST_CASE("averaged_error is independent of the thread count") {
  const auto m = three_bar_params(Potential::DoubleObstacle, 0.2);
  const auto a = averaged_error(three_bar_pattern(), m, Potential::DoubleObstacle, 6, 0, 1);
  const auto b = averaged_error(three_bar_pattern(), m, Potential::DoubleObstacle, 6, 0, 3);
  CHECK(a.per_run == b.per_run);
  CHECK(a.mean == b.mean);
}

TEST_CASE("three-bar problem, 20 realisations: frozen means") {
  const double frozen[] = {kThreeBarMeanWell, kThreeBarMeanObstacle};
  int k = 0;
  for (Potential p : {Potential::SmoothDoubleWell, Potential::DoubleObstacle}) {
    const auto avg = averaged_error(three_bar_pattern(), three_bar_params(p, 0.2), p, 20, 0);
    CHECK(avg.failed_runs == 0);
    CHECK(avg.mean == doctest::Approx(frozen[k++]).epsilon(1e-12));
  }
}

TEST_CASE("three-bar problem, 20 realisations: accurate recovery regime (mean E < 0.1)") {
  for (Potential p : {Potential::SmoothDoubleWell, Potential::DoubleObstacle}) {
    const auto avg = averaged_error(three_bar_pattern(), three_bar_params(p, 0.2), p, 20, 0);
    INFO(to_string(p) << " mean E " << avg.mean);
    CHECK(avg.mean < 0.1);
  }
}

TEST_CASE("PGM encoding") {
  const GrayImage img{3, 2, {0, 128, 255, 7, 64, 200}};
  const auto back = parse_pgm(encode_pgm(img));
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  CHECK(back.pixels == img.pixels);

  const auto ascii = parse_pgm("P2\n# comment\n2 2\n15\n0 15\n5 10\n");
  CHECK(ascii.pixels == std::vector<std::uint8_t>{0, 255, 85, 170});
  CHECK(ascii.at(1, 1) == 170);

  CHECK_THROWS_AS(parse_pgm("P6\n1 1\n255\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_pgm("P5\n2 2\n255\nab"), std::invalid_argument);
  CHECK_THROWS_AS(parse_pgm("P2\n1 1\n65535\n0\n"), std::invalid_argument);

  CHECK(field_to_gray(-1.0) == 0);
  CHECK(field_to_gray(1.0) == 255);
  CHECK(field_to_gray(-5.0) == 0);
  CHECK(field_to_gray(5.0) == 255);
  for (int g = 0; g < 256; ++g) CHECK(field_to_gray(gray_to_field(static_cast<std::uint8_t>(g))) == g);
}

TEST_CASE("raster image patterns threshold at 128") {
  const GrayImage img{2, 1, {127, 128}};
  const RasterImage raster{img};
  CHECK(min_feature_width(raster) == 0.5);
  const auto mesh = build_square_mesh(4);
  const auto u = rasterize(raster, mesh);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = mesh->node(i).x;
    if (x < 0.5) CHECK(u[i] == -1.0);
    if (x > 0.5) CHECK(u[i] == 1.0);
  }
}

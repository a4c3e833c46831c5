#include "binrec/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "binrec/errors.hpp"

namespace binrec {

std::vector<double> gaussian_noise(std::size_t count, const NoiseSpec& noise) {
  if (!(noise.gamma >= 0.0)) throw std::invalid_argument("noise variance must be >= 0");
  std::vector<double> out(count, 0.0);
  if (noise.gamma == 0.0) return out;

  std::mt19937_64 rng(noise.seed);
  const double stddev = std::sqrt(noise.gamma);
  constexpr double kUnit = 1.0 / 9007199254740992.0;  // 2^-53
  for (std::size_t i = 0; i < count; i += 2) {
    const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * kUnit;  // (0, 1]
    const double u2 = static_cast<double>(rng() >> 11) * kUnit;          // [0, 1)
    const double radius = std::sqrt(-2.0 * std::log(u1)) * stddev;
    const double angle = 2.0 * std::numbers::pi * u2;
    out[i] = radius * std::cos(angle);
    if (i + 1 < count) out[i + 1] = radius * std::sin(angle);
  }
  return out;
}

FeFunction synthesize_data(const FeFunction& u_true, const BlurOperator& blur, const NoiseSpec& noise) {
  FeFunction y = blur.apply(u_true);
  if (noise.gamma > 0.0) {
    const auto zeta = gaussian_noise(y.size(), noise);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += zeta[i];
  } else if (noise.gamma < 0.0) {
    throw std::invalid_argument("noise variance must be >= 0");
  }
  return y;
}

FeFunction initial_guess(const FeFunction& y_d) {
  FeFunction u = FeFunction::zeros(y_d.mesh);
  if (y_d.coeffs.empty()) return u;
  const auto [lo, hi] = std::minmax_element(y_d.coeffs.begin(), y_d.coeffs.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = std::clamp(2.0 * (y_d[i] - *lo) / range - 1.0, -1.0, 1.0);
  }
  return u;
}

FeFunction project_binary(const FeFunction& u) {
  FeFunction p = u;
  for (double& v : p.coeffs) v = v >= 0.0 ? 1.0 : -1.0;
  return p;
}

double tv_binary(const FeFunction& u) {
  if (u.mesh->dim() != 1) throw UnsupportedError("tv_binary: only defined in 1D");
  for (double v : u.coeffs) {
    if (v != 1.0 && v != -1.0) throw std::invalid_argument("tv_binary: values must be exactly +1 or -1");
  }
  int changes = 0;
  for (std::size_t i = 1; i < u.size(); ++i) changes += u[i] != u[i - 1] ? 1 : 0;
  return 2.0 * changes;
}

double l1_distance(const FeFunction& a, const FeFunction& b) {
  if (a.size() != b.size()) throw std::invalid_argument("l1_distance: functions differ in size");
  const Mesh& mesh = *a.mesh;
  if (mesh.dim() != 1) {
    const auto lumped = assemble_lumped_mass(mesh).diagonal();
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += lumped[i] * std::abs(a[i] - b[i]);
    return s;
  }
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const auto v = mesh.element(e);
    const double d0 = a[v[0]] - b[v[0]];
    const double d1 = a[v[1]] - b[v[1]];
    const double len = mesh.element_measure(e);
    if (d0 * d1 >= 0.0) {
      total += 0.5 * len * (std::abs(d0) + std::abs(d1));
    } else {
      // linear difference changes sign inside the element
      total += 0.5 * len * (d0 * d0 + d1 * d1) / (std::abs(d0) + std::abs(d1));
    }
  }
  return total;
}

double error_metric(const FeFunction& u_rec, const FeFunction& u_true) {
  if (u_rec.mesh->dim() != 1 || u_true.mesh->dim() != 1) {
    throw UnsupportedError("error_metric: only defined for 1D functions");
  }
  const FeFunction projected = project_binary(u_rec);
  return 0.25 * std::abs(tv_binary(projected) - tv_binary(u_true)) +
         0.5 * l1_distance(projected, u_true);
}

ExperimentSetup make_setup(const BinaryPattern& pattern, const ModelParams& params) {
  const int dim = pattern_dimension(pattern);
  const int cells = cells_for_width(params.h, dim);
  MeshPtr mesh = dim == 1 ? build_interval_mesh(cells) : build_square_mesh(cells);
  auto blur = std::make_shared<const BlurOperator>(mesh, params.alpha);
  FeFunction truth = rasterize(pattern, mesh);
  return {std::move(mesh), std::move(blur), std::move(truth)};
}

SingleRun run_single(const ExperimentSetup& setup, const ModelParams& params, Potential potential,
                     std::uint64_t seed, const IterateObserver& observer) {
  SingleRun run;
  run.y_d = synthesize_data(setup.u_true, *setup.blur, {params.gamma, seed});
  const FeFunction u0 = initial_guess(run.y_d);
  run.result = run_recovery(run.y_d, *setup.blur, params, potential, u0, observer);
  run.l1_mismatch = l1_distance(project_binary(run.result.final_u), setup.u_true);
  if (setup.mesh->dim() == 1) run.error = error_metric(run.result.final_u, setup.u_true);
  return run;
}

int default_thread_count() {
  if (const char* env = std::getenv("BINREC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

AveragedError averaged_error(const BinaryPattern& pattern, const ModelParams& params,
                             Potential potential, int n_realizations, std::uint64_t base_seed,
                             int threads) {
  if (n_realizations < 1) throw std::invalid_argument("averaged_error: need at least one realization");
  if (pattern_dimension(pattern) != 1) throw UnsupportedError("averaged_error: the error metric is 1D only");
  params.validate();
  const ExperimentSetup setup = make_setup(pattern, params);

  const auto n = static_cast<std::size_t>(n_realizations);
  AveragedError out;
  out.per_run.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.seeds.resize(n);
  std::vector<std::string> errors(n);
  for (std::size_t k = 0; k < n; ++k) out.seeds[k] = base_seed + k;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        out.per_run[k] = *run_single(setup, params, potential, out.seeds[k]).error;
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  const int pool = std::clamp(threads > 0 ? threads : default_thread_count(), 1, n_realizations);
  std::vector<std::thread> workers;
  for (int t = 1; t < pool; ++t) workers.emplace_back(worker);
  worker();
  for (auto& t : workers) t.join();

  double sum = 0.0;
  int ok = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!errors[k].empty()) {
      ++out.failed_runs;
      out.failures.push_back(std::to_string(out.seeds[k]) + ": " + errors[k]);
    } else {
      sum += out.per_run[k];
      ++ok;
    }
  }
  out.mean = ok > 0 ? sum / ok : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace binrec

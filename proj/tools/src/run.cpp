#include "binrec/cli/run.hpp"

#include <cmath>
#include <limits>

#include "binrec/cli/oracle.hpp"
#include "binrec/cli/output.hpp"
#include "binrec/errors.hpp"
#include "binrec/experiments.hpp"
#include "binrec/pgm.hpp"

namespace binrec::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* kSummaryHeader = "potential,seed,E,l1_mismatch,iterations,converged,monotone,final_energy\n";

GrayImage to_image(const FeFunction& f) {
  const Mesh& mesh = *f.mesh;
  const int n = mesh.cells_per_side();
  GrayImage img{n + 1, n + 1, std::vector<std::uint8_t>(f.size())};
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      // mesh rows run upward, image rows downward
      img.pixels[static_cast<std::size_t>(n - j) * (n + 1) + i] =
          field_to_gray(f[static_cast<std::size_t>(j) * (n + 1) + i]);
    }
  }
  return img;
}

void write_image(PartialFiles& files, const std::string& name, const FeFunction& f) {
  const std::string bytes = encode_pgm(to_image(f));
  files.open(name).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

struct Recovered {
  RecoveryResult result;
  std::optional<double> error;
  double l1 = 0.0;
};

// One recovery with streamed energy trace and final field dumps.
Recovered recover_into(PartialFiles& files, const ExperimentSetup& setup, const FeFunction& y_d,
                       const ModelParams& params, Potential p, std::ostream& log) {
  std::ofstream& energy = files.open("energy.csv");
  energy << "iter,energy,l2_diff\n";
  const FeFunction u0 = initial_guess(y_d);
  energy << "0," << format_number(total_energy(u0, y_d, *setup.blur, params, p)) << ",nan\n";

  const auto observer = [&](int n, const FeFunction&, double e, double diff) {
    energy << n << ',' << format_number(e) << ',' << format_number(diff) << '\n';
  };
  Recovered out;
  out.result = run_recovery(y_d, *setup.blur, params, p, u0, observer);
  const FeFunction& u = out.result.final_u;
  out.l1 = l1_distance(project_binary(u), setup.u_true);

  if (setup.mesh->dim() == 1) {
    out.error = error_metric(u, setup.u_true);
    std::ofstream& sol = files.open("solution.csv");
    sol << "x,u_true,y_d,u_rec\n";
    for (std::size_t i = 0; i < u.size(); ++i) {
      sol << format_number(setup.mesh->node(i).x) << ',' << format_number(setup.u_true[i]) << ','
          << format_number(y_d[i]) << ',' << format_number(u[i]) << '\n';
    }
  } else {
    write_image(files, "u_rec.pgm", u);
    write_image(files, "y_d.pgm", y_d);
  }
  log << to_string(p) << ": " << out.result.iterations << " iterations, "
      << (out.result.converged ? "converged" : "not converged") << ", "
      << (out.result.monotone ? "monotone" : "energy increased");
  if (out.error) log << ", E = " << format_number(*out.error);
  log << '\n';
  return out;
}

void summary_row(std::ostream& out, Potential p, std::uint64_t seed, const Recovered& r) {
  out << to_string(p) << ',' << seed << ',' << format_number(r.error.value_or(kNaN)) << ','
      << format_number(r.l1) << ',' << r.result.iterations << ',' << (r.result.converged ? 1 : 0) << ','
      << (r.result.monotone ? 1 : 0) << ','
      << format_number(r.result.energies.empty() ? r.result.initial_energy : r.result.energies.back()) << '\n';
}

void describe(std::ostream& log, const ModelParams& m, const ExperimentSetup& setup) {
  log << "mesh " << setup.mesh->dim() << "D, " << setup.mesh->node_count() << " nodes; alpha "
      << m.alpha << ", gamma " << m.gamma << ", sigma " << m.sigma << ", epsilon " << m.epsilon << ", h "
      << setup.mesh->h() << ", rho " << m.rho << ", tol " << m.tol << '\n';
}

void run_synthesize(const RunConfig& c, PartialFiles& files, std::ostream& log) {
  const ModelParams m = c.model_params(c.potential);
  const ExperimentSetup setup = make_setup(c.pattern, m);
  describe(log, m, setup);
  const FeFunction y_d = synthesize_data(setup.u_true, *setup.blur, {m.gamma, c.seed});
  if (setup.mesh->dim() == 1) {
    std::ofstream& out = files.open("data.csv");
    out << "x,u_true,y_d\n";
    for (std::size_t i = 0; i < y_d.size(); ++i) {
      out << format_number(setup.mesh->node(i).x) << ',' << format_number(setup.u_true[i]) << ','
          << format_number(y_d[i]) << '\n';
    }
  } else {
    write_image(files, "u_true.pgm", setup.u_true);
    write_image(files, "y_d.pgm", y_d);
  }
}

void run_recover(const RunConfig& c, PartialFiles& files, std::ostream& log) {
  const ModelParams m = c.model_params(c.potential);
  const ExperimentSetup setup = make_setup(c.pattern, m);
  describe(log, m, setup);
  const FeFunction y_d = synthesize_data(setup.u_true, *setup.blur, {m.gamma, c.seed});
  const Recovered r = recover_into(files, setup, y_d, m, c.potential, log);
  std::ofstream& summary = files.open("summary.csv");
  summary << kSummaryHeader;
  summary_row(summary, c.potential, c.seed, r);
}

void run_compare(const RunConfig& c, PartialFiles& files, std::ostream& log) {
  std::vector<std::pair<Potential, Recovered>> rows;
  std::vector<PartialFiles> sub;
  for (Potential p : {Potential::SmoothDoubleWell, Potential::DoubleObstacle}) {
    const ModelParams m = c.model_params(p);
    const ExperimentSetup setup = make_setup(c.pattern, m);
    describe(log, m, setup);
    const FeFunction y_d = synthesize_data(setup.u_true, *setup.blur, {m.gamma, c.seed});
    sub.emplace_back(files.dir() / std::string(to_string(p)));
    rows.emplace_back(p, recover_into(sub.back(), setup, y_d, m, p, log));
  }
  for (auto& s : sub) s.commit();
  std::ofstream& summary = files.open("summary.csv");
  summary << kSummaryHeader;
  for (const auto& [p, r] : rows) summary_row(summary, p, c.seed, r);
}

void run_sweep(const RunConfig& c, PartialFiles& files, std::ostream& log) {
  std::ofstream& table = files.open("sweep.csv");
  std::ofstream& runs = files.open("sweep_runs.csv");
  table << "alpha,gamma,potential,mean_E,realizations,failed\n";
  runs << "alpha,gamma,potential,seed,E\n";
  for (double alpha : c.sweep_alpha) {
    for (double gamma : c.sweep_gamma) {
      ModelParams m = c.model_params(c.potential);
      m.alpha = alpha;
      m.gamma = gamma;
      const AveragedError avg = averaged_error(c.pattern, m, c.potential, c.n_realizations, c.seed);
      table << format_number(alpha) << ',' << format_number(gamma) << ',' << to_string(c.potential) << ','
            << format_number(avg.mean) << ',' << c.n_realizations << ',' << avg.failed_runs << '\n';
      for (std::size_t k = 0; k < avg.per_run.size(); ++k) {
        runs << format_number(alpha) << ',' << format_number(gamma) << ',' << to_string(c.potential) << ','
             << avg.seeds[k] << ',' << format_number(avg.per_run[k]) << '\n';
      }
      for (const auto& f : avg.failures) log << "  failed run " << f << '\n';
      log << "alpha " << alpha << ", gamma " << gamma << ": mean E " << format_number(avg.mean) << '\n';
    }
  }
}

bool run_oracle(const RunConfig& c, PartialFiles& files, std::ostream& log) {
  const OracleReport report = oracle_check(c.seed, c.oracle_instances, c.oracle_perturbation);
  write_report(log, report);
  std::ofstream& out = files.open("oracle_report.csv");
  out << "check,instance,cells,max_deviation,energy_gap,pass\n";
  for (const auto& r : report.rows) {
    out << r.check << ',' << r.instance << ',' << r.cells << ',' << format_number(r.max_deviation) << ','
        << format_number(r.energy_gap) << ',' << (r.pass ? 1 : 0) << '\n';
  }
  return report.all_pass();
}

}  // namespace

RunOutcome run(const RunConfig& config, std::ostream& log) {
  RunOutcome outcome;
  try {
    validate(config);
    PartialFiles files(config.out_dir);
    bool ok = true;
    switch (config.command) {
      case Command::Synthesize: run_synthesize(config, files, log); break;
      case Command::Recover: run_recover(config, files, log); break;
      case Command::Compare: run_compare(config, files, log); break;
      case Command::Sweep: run_sweep(config, files, log); break;
      case Command::OracleCheck: ok = run_oracle(config, files, log); break;
    }
    outcome.files = files.commit();
    if (!ok) {
      outcome.exit_code = 1;
      outcome.error = "oracle check failed";
    }
  } catch (const ConfigError& e) {
    outcome.exit_code = 2;
    outcome.error = e.what();
  } catch (const NumericalError& e) {
    outcome.exit_code = 3;
    outcome.error = std::string(e.what()) + " (residual " + format_number(e.residual()) + ")";
  } catch (const std::exception& e) {
    outcome.exit_code = 1;
    outcome.error = e.what();
  }
  return outcome;
}

}  // namespace binrec::cli

#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "binrec/cli/config.hpp"

namespace binrec::cli {

struct RunOutcome {
  int exit_code = 0;
  std::vector<std::filesystem::path> files;  // committed outputs
  std::string error;                         // empty on success
};

/// Executes config.command, writing outputs under config.out_dir and
/// progress lines to log. Errors are reported through the outcome; files of
/// a failed run keep their `.partial` suffix.
///
///   synthesize   1D data.csv (x,u_true,y_d) / 2D u_true.pgm, y_d.pgm
///   recover      energy.csv, solution.csv (1D) or u_rec.pgm + y_d.pgm (2D),
///                summary.csv
///   compare      recover outputs per potential in well/ and obstacle/,
///                one summary.csv row per potential, same data
///   sweep        sweep.csv (alpha x gamma grid of mean E), sweep_runs.csv
///   oracle-check oracle_report.csv; exit 1 if any row fails
RunOutcome run(const RunConfig& config, std::ostream& log);

}  // namespace binrec::cli

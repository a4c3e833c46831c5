#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "binrec/experiments.hpp"
#include "binrec/phasefield.hpp"

namespace binrec::cli {

enum class Command { Synthesize, Recover, Sweep, Compare, OracleCheck };

std::string_view to_string(Command c) noexcept;
/// Throws ConfigError for unknown names.
Command parse_command(std::string_view name);

/// Invalid configuration. line() is 0 when the problem is not tied to a
/// single line (e.g. a missing key).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line) : std::runtime_error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct RunConfig {
  Command command = Command::Recover;
  std::string pattern_name = "three_bar";
  BinaryPattern pattern = three_bar_pattern();
  double alpha = 0.0;
  double gamma = 0.0;
  Potential potential = Potential::SmoothDoubleWell;

  // explicit overrides; anything left empty comes from parameter_heuristics
  std::optional<double> omega;
  std::optional<double> sigma;
  std::optional<double> epsilon;
  std::optional<double> h;
  std::optional<double> rho;
  std::optional<double> tol;
  std::optional<int> max_iters;
  StopCriterion stop_on = StopCriterion::L2Change;

  std::uint64_t seed = 0;
  int n_realizations = 20;
  std::vector<double> sweep_alpha{1e-4, 1e-3, 1e-2, 1e-1};
  std::vector<double> sweep_gamma{0.2, 0.4};
  std::filesystem::path out_dir = "binrec_out";

  // oracle-check negative control: added to one entry of every oracle matrix
  double oracle_perturbation = 0.0;
  int oracle_instances = 20;

  /// Feature width used by the heuristics: the override or the pattern's.
  double feature_width() const;
  /// Fully resolved model parameters for one potential.
  ModelParams model_params(Potential p) const;
};

/// Parses `key = value` lines; '#' starts a comment. Unknown keys,
/// duplicate keys, unparsable values and invalid resolved parameters raise
/// ConfigError. Relative image paths resolve against base_dir. A given
/// command replaces the file's `command` key.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {},
                       std::optional<Command> command = {});
RunConfig load_config(const std::filesystem::path& path, std::optional<Command> command = {});

/// Re-checks the resolved parameters of every potential the command uses.
void validate(const RunConfig& config);

}  // namespace binrec::cli

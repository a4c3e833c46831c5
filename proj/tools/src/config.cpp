#include "binrec/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "binrec/solver.hpp"

namespace binrec::cli {

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::Synthesize: return "synthesize";
    case Command::Recover: return "recover";
    case Command::Sweep: return "sweep";
    case Command::Compare: return "compare";
    case Command::OracleCheck: return "oracle-check";
  }
  return "recover";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::Synthesize, Command::Recover, Command::Sweep, Command::Compare,
                    Command::OracleCheck}) {
    if (name == to_string(c)) return c;
  }
  throw ConfigError("unknown command '" + std::string(name) + "'", 0);
}

double RunConfig::feature_width() const { return omega ? *omega : min_feature_width(pattern); }

ModelParams RunConfig::model_params(Potential p) const {
  ModelParams m = parameter_heuristics(feature_width(), p);
  m.alpha = alpha;
  m.gamma = gamma;
  if (sigma) m.sigma = *sigma;
  if (epsilon) m.epsilon = *epsilon;
  if (h) m.h = *h;
  if (rho) m.rho = *rho;
  if (tol) m.tol = *tol;
  if (max_iters) m.max_iters = *max_iters;
  m.stop_on = stop_on;
  return m;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

struct Line {
  std::string value;
  int number = 0;
};

[[noreturn]] void fail(const Line& line, const std::string& key, const std::string& why) {
  throw ConfigError("line " + std::to_string(line.number) + ": " + key + ": " + why, line.number);
}

double to_double(const Line& line, const std::string& key) {
  double v = 0.0;
  const char* first = line.value.data();
  const char* last = first + line.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) fail(line, key, "expected a number, got '" + line.value + "'");
  return v;
}

long long to_integer(const Line& line, const std::string& key) {
  long long v = 0;
  const char* first = line.value.data();
  const char* last = first + line.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) fail(line, key, "expected an integer, got '" + line.value + "'");
  return v;
}

std::vector<double> to_list(const Line& line, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(line.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Line piece{trim(item), line.number};
    if (piece.value.empty()) fail(line, key, "empty list element");
    out.push_back(to_double(piece, key));
  }
  if (out.empty()) fail(line, key, "empty list");
  return out;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "command",   "pattern", "cuts",     "image",          "qr_blocks",   "qr_seed",
      "alpha",     "gamma",   "potential", "omega",         "sigma",       "epsilon",
      "h",         "rho",     "tol",      "max_iters",      "stop_on",     "seed",
      "n_realizations", "sweep_alpha", "sweep_gamma", "out", "oracle_perturbation",
      "oracle_instances"};
  return keys;
}

}  // namespace

void validate(const RunConfig& config) {
  if (config.command == Command::OracleCheck) return;
  std::vector<Potential> used{config.potential};
  if (config.command == Command::Compare) {
    used = {Potential::SmoothDoubleWell, Potential::DoubleObstacle};
  }
  for (Potential p : used) {
    try {
      ModelParams m = config.model_params(p);
      if (config.command == Command::Sweep) {
        m.alpha = config.sweep_alpha.front();
        m.gamma = config.sweep_gamma.front();
      }
      m.validate();
      if (config.command != Command::Synthesize) check_rho(m, p);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string(to_string(p)) + " parameters: " + e.what(), 0);
    }
  }
  if (config.command == Command::Sweep) {
    if (pattern_dimension(config.pattern) != 1) throw ConfigError("sweep needs a 1D pattern", 0);
    for (double a : config.sweep_alpha) {
      if (!(a > 0.0)) throw ConfigError("sweep_alpha values must be > 0", 0);
    }
    for (double g : config.sweep_gamma) {
      if (!(g >= 0.0)) throw ConfigError("sweep_gamma values must be >= 0", 0);
    }
  }
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir,
                       std::optional<Command> command) {
  std::map<std::string, Line> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const std::string line = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'", number);
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("line " + std::to_string(number) + ": unknown key '" + key + "'", number);
    }
    if (value.empty()) fail({value, number}, key, "missing value");
    if (!entries.emplace(key, Line{value, number}).second) fail({value, number}, key, "duplicate key");
  }

  RunConfig c;
  auto get = [&](const char* key) -> const Line* {
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };
  auto positive = [&](const char* key, std::optional<double>& slot) {
    if (const Line* l = get(key)) {
      slot = to_double(*l, key);
      if (!(*slot > 0.0)) fail(*l, key, "must be > 0");
    }
  };

  if (const Line* l = get("command")) {
    try {
      c.command = parse_command(l->value);
    } catch (const ConfigError& e) {
      fail(*l, "command", e.what());
    }
  }
  if (command) c.command = *command;

  if (const Line* l = get("pattern")) c.pattern_name = l->value;
  const Line pattern_line = get("pattern") ? *get("pattern") : Line{c.pattern_name, 0};
  auto reject_unless = [&](const char* key, const char* pattern) {
    if (const Line* l = get(key); l && c.pattern_name != pattern) {
      fail(*l, key, std::string("only valid with pattern = ") + pattern);
    }
  };
  reject_unless("cuts", "bars");
  reject_unless("image", "image");
  reject_unless("qr_blocks", "qr");
  reject_unless("qr_seed", "qr");
  try {
    if (c.pattern_name == "three_bar") {
      c.pattern = three_bar_pattern();
    } else if (c.pattern_name == "barcode") {
      c.pattern = reference_barcode();
    } else if (c.pattern_name == "blob") {
      c.pattern = reference_blob();
    } else if (c.pattern_name == "bars") {
      const Line* l = get("cuts");
      if (!l) fail(pattern_line, "pattern", "bars needs a 'cuts' list");
      c.pattern = Barcode{to_list(*l, "cuts")};
    } else if (c.pattern_name == "qr") {
      int blocks = 25;
      std::uint64_t qr_seed = 1;
      if (const Line* l = get("qr_blocks")) blocks = static_cast<int>(to_integer(*l, "qr_blocks"));
      if (const Line* l = get("qr_seed")) qr_seed = static_cast<std::uint64_t>(to_integer(*l, "qr_seed"));
      c.pattern = qr_like_blocks(blocks, qr_seed);
    } else if (c.pattern_name == "image") {
      const Line* l = get("image");
      if (!l) fail(pattern_line, "pattern", "image needs an 'image' path");
      std::filesystem::path path = l->value;
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
      c.pattern = RasterImage{read_pgm(path)};
    } else {
      fail(pattern_line, "pattern",
           "unknown pattern '" + c.pattern_name + "' (three_bar, barcode, bars, blob, qr, image)");
    }
    validate_pattern(c.pattern);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(pattern_line, "pattern", e.what());
  }

  if (const Line* l = get("alpha")) {
    c.alpha = to_double(*l, "alpha");
    if (!(c.alpha > 0.0)) fail(*l, "alpha", "must be > 0");
  } else if (c.command != Command::OracleCheck && c.command != Command::Sweep) {
    throw ConfigError("missing required key 'alpha'", 0);
  }
  if (const Line* l = get("gamma")) {
    c.gamma = to_double(*l, "gamma");
    if (!(c.gamma >= 0.0)) fail(*l, "gamma", "must be >= 0");
  }
  if (const Line* l = get("potential")) {
    try {
      c.potential = parse_potential(l->value);
    } catch (const std::exception& e) {
      fail(*l, "potential", e.what());
    }
  }
  positive("omega", c.omega);
  positive("sigma", c.sigma);
  positive("epsilon", c.epsilon);
  positive("h", c.h);
  positive("rho", c.rho);
  positive("tol", c.tol);
  if (const Line* l = get("max_iters")) {
    const long long v = to_integer(*l, "max_iters");
    if (v < 1 || v > 100000000) fail(*l, "max_iters", "must be in [1, 1e8]");
    c.max_iters = static_cast<int>(v);
  }
  if (const Line* l = get("stop_on")) {
    if (l->value == "l2") {
      c.stop_on = StopCriterion::L2Change;
    } else if (l->value == "energy") {
      c.stop_on = StopCriterion::EnergyChange;
    } else {
      fail(*l, "stop_on", "expected 'l2' or 'energy'");
    }
  }
  if (const Line* l = get("seed")) {
    const long long v = to_integer(*l, "seed");
    if (v < 0) fail(*l, "seed", "must be >= 0");
    c.seed = static_cast<std::uint64_t>(v);
  }
  if (const Line* l = get("n_realizations")) {
    const long long v = to_integer(*l, "n_realizations");
    if (v < 1 || v > 1000000) fail(*l, "n_realizations", "must be in [1, 1e6]");
    c.n_realizations = static_cast<int>(v);
  }
  if (const Line* l = get("sweep_alpha")) c.sweep_alpha = to_list(*l, "sweep_alpha");
  if (const Line* l = get("sweep_gamma")) c.sweep_gamma = to_list(*l, "sweep_gamma");
  if (const Line* l = get("out")) c.out_dir = l->value;
  if (const Line* l = get("oracle_perturbation")) c.oracle_perturbation = to_double(*l, "oracle_perturbation");
  if (const Line* l = get("oracle_instances")) {
    const long long v = to_integer(*l, "oracle_instances");
    if (v < 1 || v > 100000) fail(*l, "oracle_instances", "must be in [1, 1e5]");
    c.oracle_instances = static_cast<int>(v);
  }

  // point the invariant failure at the override that caused it, if any
  try {
    validate(c);
  } catch (const ConfigError& e) {
    for (const char* key : {"rho", "sigma", "epsilon", "h", "tol", "omega", "alpha"}) {
      if (const Line* l = get(key); l && std::string(e.what()).find(key) != std::string::npos) {
        throw ConfigError("line " + std::to_string(l->number) + ": " + e.what(), l->number);
      }
    }
    throw;
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path, std::optional<Command> command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string(), 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path(), command);
}

}  // namespace binrec::cli

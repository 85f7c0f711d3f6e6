#include "ptforge/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "ptforge/errors.hpp"

namespace ptforge::shell {

namespace {

constexpr std::size_t kMaxGridPoints = 1000000;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& token, const std::string& context) {
  const std::string t = trim(token);
  const char* begin = t.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(value)) {
    throw UsageError("bad number '" + token + "' in " + context);
  }
  return value;
}

std::size_t parse_count(const std::string& token, const std::string& context) {
  const std::string t = trim(token);
  const char* begin = t.c_str();
  char* end = nullptr;
  const unsigned long value = std::strtoul(begin, &end, 10);
  if (end == begin || *end != '\0') {
    throw UsageError("bad count '" + token + "' in " + context);
  }
  return static_cast<std::size_t>(value);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string::size_type pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

// One key = value line of a config document.
struct ConfigEntry {
  std::string key;
  std::string value;
};

std::vector<ConfigEntry> read_config_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config document '" + path + "'");
  std::vector<ConfigEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) +
                       " is not 'key = value': '" + stripped + "'");
    }
    ConfigEntry entry;
    entry.key = trim(stripped.substr(0, eq));
    entry.value = trim(stripped.substr(eq + 1));
    if (entry.key.empty()) {
      throw UsageError("config line " + std::to_string(line_no) + " has an empty key");
    }
    // Values may be double-quoted to protect spaces or emptiness.
    if (entry.value.size() >= 2 && entry.value.front() == '"' &&
        entry.value.back() == '"') {
      entry.value = entry.value.substr(1, entry.value.size() - 2);
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::string usage_synopsis() {
  std::ostringstream os;
  os << "usage: pt-forge COMMAND [OPTIONS]\ncommands:";
  for (const auto& c : known_commands()) os << ' ' << c;
  os << "\nrun 'pt-forge --help' for the full option list";
  return os.str();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

void validate(RunConfig& cfg) {
  const auto& commands = known_commands();
  if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end()) {
    throw UsageError("unknown command '" + cfg.command + "'\n" + usage_synopsis());
  }
  require(cfg.gamma_ratio >= 0.0 && cfg.gamma_ratio < 1.0,
          "gamma-ratio must be in [0, 1)");
  require(cfg.theta > 0.0 && cfg.theta < pt::kPi, "theta must be in (0, pi)");
  require(cfg.omega_init_over_lambda > 0.0,
          "omega-init-over-lambda must be positive");
  require(cfg.omega03_over_lambda >= 0.0,
          "omega03-over-lambda must be nonnegative");
  require(cfg.horizon_tau > 0.0, "horizon-tau must be positive");
  require(cfg.dtau_sample > 0.0, "dtau-sample must be positive");
  for (double* tol : {&cfg.abs_tol, &cfg.rel_tol, &cfg.quad_abs_tol,
                      &cfg.quad_rel_tol, &cfg.drift_tol, &cfg.bisect_tol}) {
    require(*tol > 0.0, "tolerances must be positive");
  }
  require(cfg.omega_cap > 0.0, "omega-cap must be positive");
  require(cfg.omega03_search_max > 0.0, "omega03-search-max must be positive");
  require(cfg.transient_fraction >= 0.0 && cfg.transient_fraction < 1.0,
          "transient-fraction must be in [0, 1)");
  require(cfg.tau_required > 0.0, "tau-required must be positive");
  require(cfg.r_min > 0.0 && cfg.r_min < 1.0, "r-min must be in (0, 1)");
  require(cfg.omega03_max_over_lambda >= 0.0,
          "omega03-max-over-lambda must be nonnegative");
  require(cfg.format == "csv" || cfg.format == "json",
          "format must be 'csv' or 'json'");
  for (double g : cfg.gamma_ratio_grid) {
    require(g >= 0.0 && g < 1.0, "gamma-ratio-grid values must be in [0, 1)");
  }
  for (double w : cfg.omega_init_grid) {
    require(w > 0.0, "omega-init-grid values must be positive");
  }
  for (double w : cfg.omega03_grid) {
    require(w >= 0.0, "omega03-grid values must be nonnegative");
  }
}

}  // namespace

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> commands = {
      "pt2",       "synth",       "emulate",
      "breakdown-scan", "threshold",   "boundary",
      "feasibility",    "detuning-range", "orbit"};
  return commands;
}

std::vector<double> parse_grid(const std::string& spec) {
  const std::string context = "grid '" + spec + "'";
  std::string body = trim(spec);
  if (body.empty()) throw UsageError("empty " + context);

  std::vector<double> values;
  const bool log_spaced = body.rfind("log:", 0) == 0;
  if (log_spaced) body = body.substr(4);

  if (body.find(':') != std::string::npos) {
    const auto parts = split(body, ':');
    if (parts.size() != 3) {
      throw UsageError(context + " must be lo:hi:n" +
                       (log_spaced ? " after the log: prefix" : ""));
    }
    const double lo = parse_number(parts[0], context);
    const double hi = parse_number(parts[1], context);
    const std::size_t n = parse_count(parts[2], context);
    if (n < 2) throw UsageError(context + " needs at least two points");
    if (n > kMaxGridPoints) throw UsageError(context + " is implausibly large");
    if (!(lo < hi)) throw UsageError(context + " needs lo < hi");
    if (log_spaced && !(lo > 0.0)) {
      throw UsageError("log-spaced " + context + " needs lo > 0");
    }
    values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(n - 1);
      values.push_back(log_spaced ? lo * std::pow(hi / lo, t)
                                  : lo + (hi - lo) * t);
    }
    values.back() = hi;  // land the endpoint exactly
  } else {
    if (log_spaced) throw UsageError(context + " must be log:lo:hi:n");
    for (const auto& token : split(body, ',')) {
      values.push_back(parse_number(token, context));
    }
  }
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) {
      throw UsageError(context + " must be strictly increasing");
    }
  }
  return values;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  std::string gamma_grid_spec, omega_init_grid_spec, omega03_grid_spec;
  std::string config_path;

  CLI::App app{"Drive synthesis and verification for a four-level emulation "
               "of balanced gain/loss two-level dynamics"};
  app.name("pt-forge");
  // Repeated flags keep the last value, which also makes config-document
  // tokens (prepended below) yield to explicit command-line flags.
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  app.add_option("command", cfg.command,
                 "one of: pt2 synth emulate breakdown-scan threshold boundary "
                 "feasibility detuning-range orbit")
      ->required();
  app.add_option("--config", config_path,
                 "flat 'key = value' document of defaults (flags override it)");
  app.add_option("--gamma-ratio", cfg.gamma_ratio, "gain/coupling ratio in [0, 1)");
  app.add_option("--theta", cfg.theta, "initial mixing angle in (0, pi)");
  app.add_option("--omega-init-over-lambda", cfg.omega_init_over_lambda,
                 "starting inner couplings, in units of lambda");
  app.add_option("--omega03-over-lambda", cfg.omega03_over_lambda,
                 "static recycling coupling, in units of lambda");
  app.add_option("--horizon-tau", cfg.horizon_tau, "integration window in tau");
  app.add_option("--dtau-sample", cfg.dtau_sample, "uniform output grid spacing");
  app.add_option("--abs-tol", cfg.abs_tol, "control-stage absolute tolerance");
  app.add_option("--rel-tol", cfg.rel_tol, "control-stage relative tolerance");
  app.add_option("--omega-cap", cfg.omega_cap, "coupling value treated as divergence");
  app.add_option("--drift-tol", cfg.drift_tol,
                 "cycle-averaged drift below which a run counts as periodic");
  app.add_option("--quad-abs-tol", cfg.quad_abs_tol,
                 "four-level verification absolute tolerance");
  app.add_option("--quad-rel-tol", cfg.quad_rel_tol,
                 "four-level verification relative tolerance");
  app.add_option("--bisect-tol", cfg.bisect_tol,
                 "threshold bisection tolerance, in units of lambda");
  app.add_option("--omega03-search-max", cfg.omega03_search_max,
                 "largest recycling strength the threshold search will try");
  app.add_option("--transient-fraction", cfg.transient_fraction,
                 "fraction of the horizon discarded before range measurements");
  app.add_option("--tau-required", cfg.tau_required,
                 "emulation span a feasibility query demands");
  app.add_option("--r-min", cfg.r_min,
                 "minimum inner-pair population fraction for feasibility");
  app.add_option("--omega03-max-over-lambda", cfg.omega03_max_over_lambda,
                 "recycling budget of a feasibility query");
  app.add_option("--gamma-ratio-grid", gamma_grid_spec,
                 "scan axis over gamma-ratio (number, list, lo:hi:n, log:lo:hi:n)");
  app.add_option("--omega-init-grid", omega_init_grid_spec,
                 "scan axis over omega-init-over-lambda");
  app.add_option("--omega03-grid", omega03_grid_spec,
                 "scan axis over omega03-over-lambda");
  app.add_option("--workers", cfg.workers,
                 "parallel grid workers (0 = PT_FORGE_THREADS or hardware)");
  app.add_option("--out", cfg.out, "output path ('-' for stdout)");
  app.add_option("--format", cfg.format, "output format: csv or json");

  // Locate a config document first so its keys can be expanded into tokens
  // that sit before (and therefore yield to) the explicit flags.
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    }
  }
  if (!config_path.empty()) {
    std::set<std::string> known;
    for (const CLI::Option* opt : app.get_options()) {
      for (const auto& name : opt->get_lnames()) known.insert(name);
    }
    for (const auto& entry : read_config_document(config_path)) {
      if (entry.key == "config" || entry.key == "help" ||
          known.find(entry.key) == known.end()) {
        throw UsageError("unknown config key '" + entry.key + "' in '" +
                         config_path + "'");
      }
      tokens.push_back("--" + entry.key);
      tokens.push_back(entry.value);
    }
  }
  tokens.insert(tokens.end(), args.begin(), args.end());

  try {
    std::reverse(tokens.begin(), tokens.end());  // CLI11 consumes from the back
    app.parse(tokens);
  } catch (const CLI::CallForHelp&) {
    cfg.help = true;
    cfg.help_text = app.help();
    return cfg;
  } catch (const CLI::RequiredError&) {
    throw UsageError(usage_synopsis());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (!gamma_grid_spec.empty()) cfg.gamma_ratio_grid = parse_grid(gamma_grid_spec);
  if (!omega_init_grid_spec.empty()) cfg.omega_init_grid = parse_grid(omega_init_grid_spec);
  if (!omega03_grid_spec.empty()) cfg.omega03_grid = parse_grid(omega03_grid_spec);
  if (cfg.gamma_ratio_grid.empty()) cfg.gamma_ratio_grid = {cfg.gamma_ratio};
  if (cfg.omega_init_grid.empty()) cfg.omega_init_grid = {cfg.omega_init_over_lambda};
  if (cfg.omega03_grid.empty()) cfg.omega03_grid = {cfg.omega03_over_lambda};

  validate(cfg);
  return cfg;
}

RunConfig parse_config(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_config(args);
}

}  // namespace ptforge::shell

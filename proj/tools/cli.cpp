#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <optional>
#include <ostream>

#include "quditbell/bounds.hpp"
#include "quditbell/errors.hpp"
#include "quditbell/io.hpp"
#include "quditbell/optimize.hpp"
#include "quditbell/quantum.hpp"

namespace quditbell::cli {

namespace {

using io::Json;

struct RunConfig {
  std::string command;
  std::string n_text = "2";
  std::string d_text = "2";
  std::string model = "hlnhv";
  std::string partition;
  std::string angles_mode = "paper";
  std::string phases_file;
  std::string path_mode = "auto";
  std::string emit_table;
  std::string table_file;
  std::uint64_t budget = kDefaultEnumerationBudget;
  unsigned threads = default_threads();
  int restarts = 20;
  std::uint64_t seed = 0x5eed;
  std::string output_path;
  std::string format = "json";
};

int parse_int(const std::string& text, const char* what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InputError(std::string("--") + what + ": '" + text + "' is not an integer");
  }
}

// "3" or "2..5"; an inverted range is empty.
std::vector<int> parse_range(const std::string& text, const char* what) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {parse_int(text, what)};
  const int lo = parse_int(text.substr(0, dots), what);
  const int hi = parse_int(text.substr(dots + 2), what);
  std::vector<int> out;
  for (int v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

BellScenario scenario_of(const RunConfig& cfg) {
  return BellScenario(parse_int(cfg.n_text, "n"), parse_int(cfg.d_text, "d"));
}

Bipartition balanced_partition(int n) {
  std::vector<int> a;
  for (int p = 0; p < n / 2; ++p) a.push_back(p);
  return Bipartition(n, a);
}

// Top-level scalar fields become CSV columns.
std::string render(const Json& report, const std::string& format) {
  if (format == "json") return report.dump(2) + "\n";
  std::vector<std::string> columns;
  for (const auto& [key, value] : report.items()) {
    if (value.is_primitive()) columns.push_back(key);
  }
  return io::to_csv(columns, Json::array({report}));
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output_path.empty()) {
    out << text;
  } else {
    io::write_file_atomic(cfg.output_path, text);
  }
}

Json cmd_bound(const RunConfig& cfg) {
  const BellScenario sc = scenario_of(cfg);
  const EnumerationOptions opts{cfg.budget, cfg.threads};
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };
  if (cfg.model == "lhv") {
    if (!cfg.partition.empty()) throw InputError("--partition does not apply to --model lhv");
    const auto b = lhv_bound(sc, opts);
    return io::lhv_report(sc, b, elapsed());
  }
  const Bipartition part =
      cfg.partition.empty() ? balanced_partition(sc.n_parties()) : Bipartition::parse(cfg.partition, sc.n_parties());
  const auto b = hlnhv_bound(sc, part, opts);
  return io::hlnhv_report(sc, b, elapsed());
}

struct Evaluated {
  PhaseConfiguration config;
  std::string mode;
  double value;
  std::string path;
  std::optional<JointProbabilityTable> table;
};

Evaluated evaluate_violation(const RunConfig& cfg, const BellScenario& sc) {
  std::optional<PhaseConfiguration> config;
  std::string mode = cfg.angles_mode;
  if (!cfg.phases_file.empty()) {
    config = io::read_phases_file(cfg.phases_file);
    if (config->n_parties() != sc.n_parties() || config->dimension() != sc.dimension()) {
      throw InputError("phase file is for n=" + std::to_string(config->n_parties()) +
                       ", d=" + std::to_string(config->dimension()));
    }
    mode = "file";
  } else if (mode == "paper") {
    config = paper_optimal_angles(sc);
  } else if (mode == "zero") {
    config = PhaseConfiguration(sc.n_parties(), sc.dimension());
  } else if (mode == "optimized-symmetric" || mode == "optimized-free") {
    RestartOptions ro;
    ro.optimizer.mode = mode == "optimized-free" ? PhaseMode::Free : PhaseMode::Symmetric;
    ro.restarts = cfg.restarts;
    ro.seed = cfg.seed;
    ro.threads = cfg.threads;
    config = optimize_with_restarts(sc, ro).best.config;
  } else {
    throw InputError("unknown --angles mode '" + mode + "'");
  }

  std::string path = cfg.path_mode;
  if (path == "auto") {
    const long double dim = std::pow(static_cast<long double>(sc.dimension()), sc.n_parties());
    path = dim <= static_cast<long double>(kDenseDimensionLimit) ? "dense" : "closed-form";
  }
  Evaluated ev{*config, mode, 0.0, path, std::nullopt};
  if (path == "dense") {
    ev.table = joint_probabilities(ghz_state(sc), *config, cfg.threads);
    ev.value = bell_value(*ev.table);
  } else if (path == "closed-form") {
    if (!cfg.emit_table.empty()) ev.table = ghz_joint_probabilities(*config);
    ev.value = ev.table ? bell_value(*ev.table) : ghz_bell_value(*config);
  } else {
    throw InputError("unknown --path '" + path + "'");
  }
  return ev;
}

Json cmd_violation(const RunConfig& cfg) {
  const BellScenario sc = scenario_of(cfg);
  auto ev = evaluate_violation(cfg, sc);
  if (!cfg.emit_table.empty()) {
    io::write_file_atomic(cfg.emit_table, io::table_to_json(*ev.table).dump() + "\n");
  }
  const double closed = max_violation(sc);
  Json j;
  j["n"] = sc.n_parties();
  j["d"] = sc.dimension();
  j["angles_mode"] = ev.mode;
  j["path"] = ev.path;
  j["value"] = ev.value;
  j["closed_form_max"] = closed;
  j["difference"] = ev.value - closed;
  j["hlnhv_bound"] = hlnhv_bound_value(sc);
  j["witness_fired"] = ev.value > hlnhv_bound_value(sc);
  j["report"] = io::violation_report_to_json(make_violation_report(sc, ev.value, ev.config, ev.mode));
  return j;
}

Json cmd_visibility(const RunConfig& cfg) {
  const BellScenario sc = scenario_of(cfg);
  const auto report = critical_visibility(sc);
  Json j = io::violation_report_to_json(report);
  j["hlnhv_bound"] = hlnhv_bound_value(sc);
  // Bell value of the white-noise mixture at V = V_cr.
  const double dim = std::pow(static_cast<double>(sc.dimension()), sc.n_parties());
  double crossover = 0.0;
  if (dim <= static_cast<double>(kDenseDimensionLimit)) {
    const auto rho = mix_with_noise(ghz_state(sc), report.critical_visibility);
    crossover = bell_value(joint_probabilities(rho, report.angles, cfg.threads));
  } else {
    // The noise term contributes zero; the value is affine in V.
    crossover = report.critical_visibility * ghz_bell_value(report.angles);
  }
  j["crossover_value"] = crossover;
  return j;
}

const std::vector<std::string> kScanColumns{"n", "d", "hlnhv_bound", "max_violation", "ratio", "v_cr"};

Json cmd_scan(const RunConfig& cfg) {
  const auto ns = parse_range(cfg.n_text, "n");
  const auto ds = parse_range(cfg.d_text, "d");
  Json rows = Json::array();
  for (int n : ns) {
    for (int d : ds) {
      const BellScenario sc(n, d);
      const auto bound = hlnhv_bound(sc, balanced_partition(n), EnumerationOptions{cfg.budget, cfg.threads});
      const auto report = critical_visibility(sc);
      Json row;
      row["n"] = n;
      row["d"] = d;
      row["hlnhv_bound"] = bound.bound.to_double();
      row["max_violation"] = report.max_value;
      row["ratio"] = report.ratio;
      row["v_cr"] = report.critical_visibility;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

Json cmd_eval(const RunConfig& cfg) {
  if (cfg.table_file.empty()) throw InputError("eval needs a table file");
  const auto table = io::read_table_file(cfg.table_file);
  const auto& sc = table.scenario();
  const auto qs = correlations(table);
  double value = 0.0;
  for (double q : qs) value -= q;
  Json j;
  j["n"] = sc.n_parties();
  j["d"] = sc.dimension();
  j["bell_value"] = value;
  j["hlnhv_bound"] = hlnhv_bound_value(sc);
  j["witness_fired"] = value > hlnhv_bound_value(sc);
  Json per = Json::object();
  for (const auto& s : SettingString::all(sc.n_parties())) per[s.to_string()] = qs[s.mask()];
  j["correlations"] = std::move(per);
  return j;
}

std::uint64_t default_budget() {
  if (const char* env = std::getenv(kBudgetEnv)) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InputError(std::string(kBudgetEnv) + " is not a positive integer");
    }
  }
  return kDefaultEnumerationBudget;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"N-qudit Bell-type inequality: hidden-variable bounds and GHZ violations", "quditbell"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub, bool with_budget) {
    sub->add_option("--n", cfg.n_text, "party count");
    sub->add_option("--d", cfg.d_text, "outcomes per measurement");
    sub->add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.output_path, "write the report here instead of stdout");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    if (with_budget) {
      sub->add_option("--budget", cfg.budget, "max strategies to enumerate")->check(CLI::PositiveNumber);
    }
  };

  auto* bound = app.add_subcommand("bound", "exhaustive HLNHV or LHV bound");
  common(bound, true);
  bound->add_option("--model", cfg.model, "hlnhv or lhv")->check(CLI::IsMember({"hlnhv", "lhv"}));
  bound->add_option("--partition", cfg.partition, "blocks like 1,2/3 (hlnhv only)");

  auto* violation = app.add_subcommand("violation", "GHZ Bell value under multiport measurements");
  common(violation, false);
  violation->add_option("--angles", cfg.angles_mode, "paper, zero, optimized-symmetric or optimized-free");
  violation->add_option("--phases", cfg.phases_file, "phase configuration JSON (overrides --angles)");
  violation->add_option("--path", cfg.path_mode, "auto, dense or closed-form")
      ->check(CLI::IsMember({"auto", "dense", "closed-form"}));
  violation->add_option("--emit-table", cfg.emit_table, "write the probability table JSON here");
  violation->add_option("--restarts", cfg.restarts, "random restarts for optimized modes")->check(CLI::PositiveNumber);
  violation->add_option("--seed", cfg.seed, "restart seed");

  auto* visibility = app.add_subcommand("visibility", "violation ratio and critical visibility");
  common(visibility, false);

  auto* scan = app.add_subcommand("scan", "bounds, violations and V_cr over an (n, d) grid");
  common(scan, true);

  auto* eval = app.add_subcommand("eval", "Bell value of a probability-table file");
  eval->add_option("table", cfg.table_file, "probability table JSON")->required();
  eval->add_option("--out", cfg.output_path, "write the report here instead of stdout");
  eval->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  try {
    cfg.budget = default_budget();
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (*bound) {
      emit(cfg, render(cmd_bound(cfg), cfg.format), out);
    } else if (*violation) {
      emit(cfg, render(cmd_violation(cfg), cfg.format), out);
    } else if (*visibility) {
      emit(cfg, render(cmd_visibility(cfg), cfg.format), out);
    } else if (*scan) {
      const Json rows = cmd_scan(cfg);
      emit(cfg, cfg.format == "csv" ? io::to_csv(kScanColumns, rows) : rows.dump(2) + "\n", out);
    } else if (*eval) {
      emit(cfg, render(cmd_eval(cfg), cfg.format), out);
    }
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kBudgetError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kOk;
}

}  // namespace quditbell::cli

#include "ponwm/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "ponwm/csv.hpp"
#include "ponwm/error.hpp"
#include "ponwm/scenario.hpp"

namespace ponwm {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string instrument;
  std::optional<double> margin;
};

// Failures while reading inputs are usage/config errors (exit 2).
struct UsageFailure : Error {
  using Error::Error;
};

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  return f;
}

fs::path sibling(const fs::path& path, const std::string& suffix_and_ext) {
  fs::path p = path;
  p.replace_extension();
  return p.string() + suffix_and_ext;
}

Scenario load(const Options& opt) {
  try {
    return load_scenario(opt.config, opt.seed);
  } catch (const Error& e) {
    throw UsageFailure(e.what());
  }
}

const OtdrSpec& pick_instrument(const Scenario& sc, const std::string& id) {
  if (sc.instruments.empty()) throw UsageFailure("scenario has no instruments");
  if (id.empty()) return sc.instruments.front();
  try {
    return sc.instrument(id);
  } catch (const Error& e) {
    throw UsageFailure(e.what());
  }
}

std::vector<double> margins(const Scenario& sc, const Options& opt) {
  if (opt.margin) {
    if (!(*opt.margin > 0.0)) throw UsageFailure("--margin must be > 0 dB");
    return {*opt.margin};
  }
  return sc.margins_db;
}

int cmd_trace(const Options& opt, std::ostream& out) {
  const Scenario sc = load(opt);
  const OtdrSpec& otdr = pick_instrument(sc, opt.instrument);
  PonTopology topology = sc.topology;
  if (sc.trace.budget) {
    BudgetClass budget = budget_of(*sc.trace.budget);
    for (const auto& b : sc.budgets) {
      if (b.id == budget.id) budget = b;
    }
    topology = set_voa_for_budget(topology, sc.profiles, budget, otdr.wavelength_nm).topology;
  }
  TraceNoise noise;
  noise.sigma_db = sc.trace.noise_sigma_db;
  if (noise.sigma_db > 0.0) noise.seed = sc.require_seed();
  const Trace trace = synthesize_trace(topology, otdr, sc.profiles, noise);
  const double margin = margins(sc, opt).front();
  const auto events = detect_events(trace, margin);

  const fs::path csv_path = opt.out.empty() ? fs::path("trace.csv") : fs::path(opt.out);
  {
    auto f = open_output(csv_path);
    f << "distance_m,level_db\n";
    for (const auto& s : trace.samples) {
      f << csv::number(s.distance_m, 3) << ',' << csv::number(s.level_db, 6) << '\n';
    }
  }
  const fs::path meta_path = sibling(csv_path, ".json");
  {
    nlohmann::ordered_json meta;
    meta["instrument"] = otdr.id;
    meta["wavelength_nm"] = trace.wavelength_nm;
    meta["pulse_ns"] = trace.pulse_ns;
    meta["dr_effective_db"] = -trace.noise_floor_db;
    meta["noise_floor_db"] = trace.noise_floor_db;
    meta["backscatter_db"] = trace.backscatter_db;
    meta["seed"] = trace.seed;
    meta["noise_sigma_db"] = trace.noise_sigma_db;
    meta["sample_spacing_m"] = otdr.sample_spacing_m;
    meta["samples"] = trace.samples.size();
    meta["margin_db"] = margin;
    auto f = open_output(meta_path);
    f << meta.dump(2) << '\n';
  }
  const fs::path events_path = sibling(csv_path, ".events.csv");
  {
    auto f = open_output(events_path);
    f << "distance_m,height_db,reflectance_db\n";
    for (const auto& e : events) {
      f << csv::number(e.distance_m, 3) << ',' << csv::number(e.peak_height_above_floor_db, 6)
        << ',' << csv::number(e.inferred_reflectance_db, 6) << '\n';
    }
  }
  out << "trace: " << trace.samples.size() << " samples, " << events.size()
      << " event(s) -> " << csv_path.string() << '\n';
  return kExitOk;
}

int cmd_coverage(const Options& opt, std::ostream& out, std::ostream& err) {
  const Scenario sc = load(opt);
  OntPopulation population;
  try {
    population = resolve_population(sc);
  } catch (const Error& e) {
    throw UsageFailure(e.what());
  }
  std::vector<OtdrSpec> instruments = sc.instruments;
  if (!opt.instrument.empty()) instruments = {pick_instrument(sc, opt.instrument)};
  const auto report =
      coverage_sweep(population, instruments, sc.topology, sc.profiles, sc.budgets, margins(sc, opt));
  for (const auto& d : report.diagnostics) err << "warning: " << d << '\n';

  const fs::path path = opt.out.empty() ? fs::path("coverage.csv") : fs::path(opt.out);
  auto f = open_output(path);
  if (path.extension() == ".json") {
    write_coverage_json(report, f);
  } else {
    write_coverage_csv(report, f);
  }
  out << "coverage: " << report.rows.size() << " row(s) -> " << path.string() << '\n';
  return report.rows.empty() ? kExitAnalysisFailure : kExitOk;
}

int cmd_sensitivity(const Options& opt, std::ostream& out, std::ostream& err) {
  const Scenario sc = load(opt);
  std::vector<OtdrSpec> instruments = sc.instruments;
  if (!opt.instrument.empty()) instruments = {pick_instrument(sc, opt.instrument)};

  const fs::path path = opt.out.empty() ? fs::path("sensitivity.csv") : fs::path(opt.out);
  auto f = open_output(path);
  f << "instrument,wavelength_nm,budget_class,path_loss_db,margin_db,dr_effective_db,"
       "min_reflectance_db,max_detectable_orl_db\n";
  std::size_t rows = 0;
  for (const auto& otdr : instruments) {
    for (const auto& budget : sc.budgets) {
      for (double margin : margins(sc, opt)) {
        try {
          const auto s = detection_setup(otdr, sc.topology, sc.profiles, budget, margin);
          f << otdr.id << ',' << csv::number(otdr.wavelength_nm, 1) << ','
            << to_string(budget.id) << ',' << csv::number(s.path_loss_db, 6) << ','
            << csv::number(margin, 3) << ',' << csv::number(s.dr_effective_db, 6) << ','
            << csv::number(s.min_reflectance_db, 6) << ','
            << csv::number(-s.min_reflectance_db, 6) << '\n';
          ++rows;
        } catch (const Error& e) {
          err << "warning: " << otdr.id << ' ' << to_string(budget.id) << ": " << e.what() << '\n';
        }
      }
    }
  }
  out << "sensitivity: " << rows << " row(s) -> " << path.string() << '\n';
  return rows == 0 ? kExitAnalysisFailure : kExitOk;
}

int cmd_srs(const Options& opt, std::ostream& out) {
  const Scenario sc = load(opt);
  if (sc.raman.empty()) throw UsageFailure("scenario has no raman entries");
  const fs::path path = opt.out.empty() ? fs::path("srs.csv") : fs::path(opt.out);
  for (const auto& cfg : sc.raman) {
    const auto rows = sweep_powers(cfg.base, cfg.pump_powers_dbm, cfg.signal_powers_dbm);
    const fs::path target = sc.raman.size() == 1
                                ? path
                                : sibling(path, "_" + cfg.name + path.extension().string());
    auto f = open_output(target);
    write_sweep_csv(rows, f);
    out << "srs " << cfg.name << ": " << rows.size() << " row(s) -> " << target.string() << '\n';
  }
  return kExitOk;
}

int cmd_budget(const Options& opt, std::ostream& out) {
  const Scenario sc = load(opt);
  if (!sc.interference) throw UsageFailure("scenario has no interference section");
  const auto& ic = *sc.interference;
  const OtdrSpec& otdr =
      pick_instrument(sc, opt.instrument.empty() ? ic.instrument : opt.instrument);
  const LaunchCheck check = check_launch(sc.topology, otdr, sc.profiles, ic.launch_dbm, ic.spec);
  if (opt.out.empty()) {
    write_launch_json(check, out);
  } else {
    auto f = open_output(opt.out);
    write_launch_json(check, f);
    out << "budget: " << (check.pass ? "pass" : "fail") << " -> " << opt.out << '\n';
  }
  return check.pass ? kExitOk : kExitAnalysisFailure;
}

int cmd_population(const Options& opt, std::ostream& out) {
  const Scenario sc = load(opt);
  OntPopulation population;
  try {
    population = resolve_population(sc);
  } catch (const Error& e) {
    throw UsageFailure(e.what());
  }
  const fs::path path = opt.out.empty() ? fs::path("population.csv") : fs::path(opt.out);
  auto f = open_output(path);
  write_population_csv(population, f);
  out << "population: " << population.size() << " unit(s) -> " << path.string() << '\n';
  return kExitOk;
}

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config, "scenario JSON file")->required();
  cmd->add_option("--out", opt.out, "output path");
  cmd->add_option("--seed", opt.seed, "override the scenario seed");
  cmd->add_option("--instrument", opt.instrument, "instrument id");
  cmd->add_option("--margin", opt.margin, "detection margin above the noise floor (dB)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"PON monitoring-wavelength simulator", "ponwm"};
  app.require_subcommand(1);
  Options opt;
  auto* trace = app.add_subcommand("trace", "synthesize an OTDR trace and its events");
  auto* coverage = app.add_subcommand("coverage", "ONT detectability per instrument and budget");
  auto* sensitivity = app.add_subcommand("sensitivity", "minimum detectable reflectance per budget");
  auto* srs = app.add_subcommand("srs", "Raman crosstalk power sweep");
  auto* budget = app.add_subcommand("budget", "OTDR launch power interference check");
  auto* population = app.add_subcommand("population", "write the scenario's ONT population CSV");
  for (auto* cmd : {trace, coverage, sensitivity, srs, budget, population}) add_common(cmd, opt);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (trace->parsed()) return cmd_trace(opt, out);
    if (coverage->parsed()) return cmd_coverage(opt, out, err);
    if (sensitivity->parsed()) return cmd_sensitivity(opt, out, err);
    if (srs->parsed()) return cmd_srs(opt, out);
    if (budget->parsed()) return cmd_budget(opt, out);
    if (population->parsed()) return cmd_population(opt, out);
  } catch (const UsageFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitAnalysisFailure;
  }
  return kExitUsage;
}

}  // namespace ponwm

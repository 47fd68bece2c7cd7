#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ponwm/detectability.hpp"
#include "ponwm/interference.hpp"
#include "ponwm/optics.hpp"
#include "ponwm/otdr.hpp"
#include "ponwm/raman.hpp"
#include "ponwm/topology.hpp"

namespace ponwm {

struct RamanSweepConfig {
  std::string name;
  RamanScenario base;
  std::vector<double> pump_powers_dbm;
  std::vector<double> signal_powers_dbm;
};

struct InterferenceConfig {
  InterferenceSpec spec;
  double launch_dbm = 9.0;
  std::string instrument;  // empty: first instrument
};

struct TraceConfig {
  std::optional<BudgetClassId> budget;  // set the VOA for this class before synthesis
  double noise_sigma_db = 0.0;
};

using PopulationSource = std::variant<std::monostate, std::filesystem::path, SyntheticOrlParams>;

// A declarative analysis setup loaded from one JSON file.
struct Scenario {
  std::string name;
  std::filesystem::path base_dir;
  ProfileLibrary profiles = ProfileLibrary::defaults();
  PonTopology topology;
  std::vector<OtdrSpec> instruments;
  // Fig-5 style readings per instrument id; already folded into dr_effective_override_db.
  std::map<std::string, std::vector<SensitivityObservation>> calibrations;
  PopulationSource population;
  std::vector<BudgetClass> budgets;
  std::vector<double> margins_db{1.0};
  std::vector<RamanSweepConfig> raman;
  std::optional<InterferenceConfig> interference;
  TraceConfig trace;
  std::optional<std::uint64_t> seed;

  const OtdrSpec& instrument(const std::string& id) const;
  std::vector<std::string> instrument_ids() const;
  // Throws ConfigError when a stochastic feature is enabled without a seed.
  std::uint64_t require_seed() const;
};

// `seed_override` replaces the file's seed (the CLI --seed flag).
Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override = std::nullopt);
Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir,
                        std::optional<std::uint64_t> seed_override = std::nullopt);

OntPopulation resolve_population(const Scenario& scenario);

}  // namespace ponwm

#include "ponwm/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ponwm/error.hpp"

namespace ponwm {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  return j.at(key);
}

WavelengthTable table_from(const json& points, const std::string& where) {
  if (!points.is_array() || points.empty()) {
    throw ConfigError(where + ": points must be a non-empty [[nm, value], ...] list");
  }
  std::vector<WavelengthTable::Point> out;
  for (const auto& p : points) {
    if (!p.is_array() || p.size() != 2) throw ConfigError(where + ": each point is [nm, value]");
    out.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return WavelengthTable(std::move(out));
}

FiberProfile profile_from(const json& j) {
  FiberProfile p;
  p.name = require(j, "name", "profile").get<std::string>();
  const std::string where = "profile '" + p.name + "'";
  p.family = fiber_family_from_string(j.value("family", std::string("G652D")));
  p.attenuation = table_from(require(j, "points", where), where);
  if (j.contains("backscatter_b0_db")) {
    const auto& b = j.at("backscatter_b0_db");
    if (b.is_number()) {
      p.backscatter_b0.default_db = b.get<double>();
    } else if (b.is_object()) {
      for (const auto& [key, value] : b.items()) {
        if (key == "default") {
          p.backscatter_b0.default_db = value.get<double>();
        } else {
          p.backscatter_b0.per_wavelength_db[std::stod(key)] = value.get<double>();
        }
      }
    } else {
      throw ConfigError(where + ": backscatter_b0_db must be a number or an object");
    }
  }
  p.validate();
  return p;
}

PathElement element_from(const json& j, std::size_t index) {
  const std::string where = "topology element " + std::to_string(index);
  const std::string kind = require(j, "kind", where).get<std::string>();
  if (kind == "span") {
    return FiberSpan{require(j, "profile", where).get<std::string>(),
                     require(j, "length_km", where).get<double>()};
  }
  if (kind == "splitter") {
    const int ports = j.value("ports", 32);
    Splitter s;
    if (j.contains("excess_db")) {
      s.ports = ports;
      s.excess_loss = table_from(j.at("excess_db"), where);
      s.uniformity_db = j.value("uniformity_db", 0.0);
    } else if (ports == 32) {
      s = default_splitter_32();
      s.uniformity_db = j.value("uniformity_db", s.uniformity_db);
    } else {
      throw ConfigError(where + ": non-default splitters need an excess_db table");
    }
    if (j.contains("port")) s.port = j.at("port").get<int>();
    s.seed = j.value("seed", std::uint64_t{0});
    return s;
  }
  if (kind == "bend") {
    BendSpec b = default_g657a1_bend(j.value("turns", 1));
    if (j.contains("family")) b.fiber_family = fiber_family_from_string(j.at("family").get<std::string>());
    b.radius_mm = j.value("radius_mm", b.radius_mm);
    if (j.contains("points")) b.loss_per_turn = table_from(j.at("points"), where);
    return b;
  }
  if (kind == "connector") return Connector{require(j, "loss_db", where).get<double>()};
  if (kind == "voa") return Voa{j.value("setting_db", 0.0)};
  if (kind == "vbr") return Vbr{require(j, "reflectance_db", where).get<double>()};
  if (kind == "ont") return OntTermination{require(j, "orl_db", where).get<double>()};
  throw ConfigError(where + ": unknown kind '" + kind + "'");
}

OtdrSpec instrument_from(const json& j) {
  OtdrSpec o;
  o.id = require(j, "id", "instrument").get<std::string>();
  const std::string where = "instrument '" + o.id + "'";
  o.wavelength_nm = require(j, "wavelength_nm", where).get<double>();
  o.dr_datasheet_db = require(j, "dr_datasheet_db", where).get<double>();
  o.datasheet_pulse_ns = j.value("datasheet_pulse_ns", o.datasheet_pulse_ns);
  o.datasheet_averaging_s = j.value("datasheet_averaging_s", o.datasheet_averaging_s);
  o.operating_pulse_ns = j.value("operating_pulse_ns", o.operating_pulse_ns);
  o.operating_averaging_s = j.value("operating_averaging_s", o.operating_averaging_s);
  o.sample_spacing_m = j.value("sample_spacing_m", o.sample_spacing_m);
  if (j.contains("dr_effective_db") && !j.at("dr_effective_db").is_null()) {
    o.dr_effective_override_db = j.at("dr_effective_db").get<double>();
  }
  o.validate();
  return o;
}

SyntheticOrlParams synthetic_from(const json& j) {
  SyntheticOrlParams p;
  p.count = j.value("count", std::size_t{87});
  p.vendors = j.value("vendors", std::size_t{4});
  for (const auto& [key, d] : require(j, "wavelengths", "population.synthetic").items()) {
    const std::string where = "population.synthetic." + key;
    p.per_wavelength[std::stoi(key)] = {require(d, "mean_db", where).get<double>(),
                                        require(d, "stddev_db", where).get<double>(),
                                        require(d, "min_db", where).get<double>(),
                                        require(d, "max_db", where).get<double>()};
  }
  p.validate();
  return p;
}

RamanSweepConfig raman_from(const json& j, std::size_t index) {
  RamanSweepConfig c;
  c.name = j.value("name", "raman" + std::to_string(index));
  const std::string where = "raman '" + c.name + "'";
  const RamanPair pair = raman_pair_from_string(j.value("pair", std::string("custom")));
  if (pair == RamanPair::Custom) {
    if (!j.contains("gain_coefficient")) {
      throw ConfigError(where + ": custom pairs must supply gain_coefficient");
    }
    c.base = default_scenario(RamanPair::GPON_1383_1490);
  } else {
    c.base = default_scenario(pair);
  }
  auto& s = c.base;
  s.gain_coefficient = j.value("gain_coefficient", s.gain_coefficient);
  s.pump_wavelength_nm = j.value("pump_wavelength_nm", s.pump_wavelength_nm);
  s.signal_wavelength_nm = j.value("signal_wavelength_nm", s.signal_wavelength_nm);
  s.pump_power_dbm = j.value("pump_power_dbm", s.pump_power_dbm);
  s.signal_power_dbm = j.value("signal_power_dbm", s.signal_power_dbm);
  s.pump_attenuation_db_km = j.value("pump_attenuation_db_km", s.pump_attenuation_db_km);
  s.signal_attenuation_db_km = j.value("signal_attenuation_db_km", s.signal_attenuation_db_km);
  s.length_km = j.value("length_km", s.length_km);
  s.photon_term = j.value("photon_term", s.photon_term);
  s.step_m = j.value("step_m", s.step_m);
  s.validate();
  c.pump_powers_dbm =
      j.value("pump_powers_dbm", std::vector<double>{s.pump_power_dbm});
  c.signal_powers_dbm =
      j.value("signal_powers_dbm", std::vector<double>{s.signal_power_dbm});
  return c;
}

}  // namespace

const OtdrSpec& Scenario::instrument(const std::string& id) const {
  for (const auto& o : instruments) {
    if (o.id == id) return o;
  }
  std::string valid;
  for (const auto& o : instruments) valid += (valid.empty() ? "" : ", ") + o.id;
  throw ConfigError("unknown instrument '" + id + "' (valid: " + valid + ")");
}

std::vector<std::string> Scenario::instrument_ids() const {
  std::vector<std::string> ids;
  for (const auto& o : instruments) ids.push_back(o.id);
  return ids;
}

std::uint64_t Scenario::require_seed() const {
  if (!seed) throw ConfigError("scenario '" + name + "' needs a seed for its stochastic features");
  return *seed;
}

Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir,
                        std::optional<std::uint64_t> seed_override) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }

  Scenario sc;
  sc.base_dir = base_dir;
  try {
    sc.name = doc.value("name", std::string("scenario"));
    if (doc.contains("seed")) sc.seed = doc.at("seed").get<std::uint64_t>();
    if (seed_override) sc.seed = seed_override;

    for (const auto& p : doc.value("profiles", json::array())) sc.profiles.add(profile_from(p));

    if (doc.contains("topology")) {
      const auto& t = doc.at("topology");
      std::vector<PathElement> elements;
      const auto& list = require(t, "elements", "topology");
      for (std::size_t i = 0; i < list.size(); ++i) elements.push_back(element_from(list[i], i));
      sc.topology = PonTopology(t.value("name", std::string("topology")), std::move(elements));
      for (const auto& e : sc.topology.elements()) {
        if (const auto* span = std::get_if<FiberSpan>(&e); span && !sc.profiles.contains(span->profile)) {
          throw ConfigError("topology references unknown profile '" + span->profile + "'");
        }
      }
    }

    for (const auto& i : doc.value("instruments", json::array())) {
      OtdrSpec o = instrument_from(i);
      if (i.contains("calibration")) {
        std::vector<SensitivityObservation> obs;
        for (const auto& row : i.at("calibration")) {
          obs.push_back({require(row, "path_loss_db", "calibration").get<double>(),
                         require(row, "min_reflectance_db", "calibration").get<double>(),
                         row.value("margin_db", 1.0)});
        }
        if (!o.dr_effective_override_db) {
          const double b = terminal_backscatter(sc.topology, sc.profiles, o);
          o.dr_effective_override_db = calibrate_effective_dr(obs, b);
        }
        sc.calibrations[o.id] = std::move(obs);
      }
      sc.instruments.push_back(std::move(o));
    }

    std::map<std::string, double> overrides;
    if (doc.contains("budget_overrides_db")) {
      overrides = doc.at("budget_overrides_db").get<std::map<std::string, double>>();
    }
    for (const auto& name :
         doc.value("budgets", std::vector<std::string>{"B+", "C+", "D"})) {
      BudgetClass b = budget_of(budget_class_from_string(name));
      if (auto it = overrides.find(name); it != overrides.end()) b.max_odn_loss_db = it->second;
      sc.budgets.push_back(b);
    }
    for (std::size_t i = 1; i < sc.budgets.size(); ++i) {
      if (static_cast<int>(sc.budgets[i].id) > static_cast<int>(sc.budgets[i - 1].id) &&
          !(sc.budgets[i].max_odn_loss_db > sc.budgets[i - 1].max_odn_loss_db)) {
        throw ConfigError("budget classes must satisfy B+ < C+ < D");
      }
    }
    sc.margins_db = doc.value("margins_db", sc.margins_db);
    for (double m : sc.margins_db) {
      if (!(m > 0.0)) throw ConfigError("margins must be > 0 dB");
    }

    if (doc.contains("population")) {
      const auto& p = doc.at("population");
      if (p.contains("csv")) {
        sc.population = base_dir / p.at("csv").get<std::string>();
      } else if (p.contains("synthetic")) {
        sc.population = synthetic_from(p.at("synthetic"));
      } else {
        throw ConfigError("population needs 'csv' or 'synthetic'");
      }
    }

    const auto raman = doc.value("raman", json::array());
    for (std::size_t i = 0; i < raman.size(); ++i) sc.raman.push_back(raman_from(raman[i], i));

    if (doc.contains("interference")) {
      const auto& j = doc.at("interference");
      InterferenceConfig ic;
      ic.spec.penalty_free_post_splitter_dbm =
          j.value("penalty_free_post_splitter_dbm", ic.spec.penalty_free_post_splitter_dbm);
      ic.spec.isolation_db = j.value("isolation_db", ic.spec.isolation_db);
      ic.spec.validate();
      ic.launch_dbm = j.value("launch_dbm", ic.launch_dbm);
      ic.instrument = j.value("instrument", std::string());
      sc.interference = ic;
    }

    if (doc.contains("trace")) {
      const auto& j = doc.at("trace");
      if (j.contains("budget")) sc.trace.budget = budget_class_from_string(j.at("budget").get<std::string>());
      sc.trace.noise_sigma_db = j.value("noise_sigma_db", 0.0);
      if (sc.trace.noise_sigma_db < 0.0) throw ConfigError("trace noise sigma must be >= 0 dB");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config schema error: ") + e.what());
  } catch (const Error& e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config value error: ") + e.what());
  }

  const bool stochastic = std::holds_alternative<SyntheticOrlParams>(sc.population) ||
                          sc.trace.noise_sigma_db > 0.0;
  if (stochastic && !sc.seed) {
    throw ConfigError("scenario '" + sc.name + "' uses stochastic features but has no seed");
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path.parent_path(), seed_override);
}

OntPopulation resolve_population(const Scenario& scenario) {
  if (const auto* path = std::get_if<std::filesystem::path>(&scenario.population)) {
    return load_population(*path);
  }
  if (const auto* params = std::get_if<SyntheticOrlParams>(&scenario.population)) {
    SyntheticOrlParams p = *params;
    p.seed = scenario.require_seed();
    return synth_population(p);
  }
  throw ConfigError("scenario '" + scenario.name + "' has no population");
}

}  // namespace ponwm

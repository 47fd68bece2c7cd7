#include "ponwm/detectability.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ponwm/csv.hpp"
#include "ponwm/error.hpp"
#include "ponwm/random.hpp"

namespace ponwm {

double OntRecord::orl_at(int wavelength_nm) const {
  auto it = orl_db.find(wavelength_nm);
  if (it == orl_db.end()) {
    throw ArgumentError("unit '" + unit_id + "' has no ORL at " + std::to_string(wavelength_nm) +
                        " nm");
  }
  return it->second;
}

void SyntheticOrlParams::validate() const {
  if (per_wavelength.empty()) throw ArgumentError("synthetic ORL params need a wavelength");
  if (vendors == 0) throw ArgumentError("synthetic ORL params need at least one vendor");
  for (const auto& [wl, d] : per_wavelength) {
    if (!(d.stddev_db > 0.0)) {
      throw ArgumentError("ORL std-dev at " + std::to_string(wl) + " nm must be > 0");
    }
    if (!(d.min_db < d.mean_db && d.mean_db < d.max_db)) {
      throw ArgumentError("ORL params at " + std::to_string(wl) + " nm need min < mean < max");
    }
    if (!(d.min_db > 0.0)) {
      throw ArgumentError("ORL lower bound at " + std::to_string(wl) + " nm must be > 0");
    }
  }
}

OntPopulation::OntPopulation(std::vector<OntRecord> records, PopulationProvenance provenance)
    : records_(std::move(records)), provenance_(std::move(provenance)) {
  std::set<std::string> seen;
  for (const auto& r : records_) {
    if (!seen.insert(r.unit_id).second) {
      throw ArgumentError("duplicate unit_id '" + r.unit_id + "'");
    }
    if (r.orl_db.empty()) throw ArgumentError("unit '" + r.unit_id + "' has no ORL values");
    for (const auto& [wl, orl] : r.orl_db) {
      if (!(orl > 0.0)) throw ArgumentError("unit '" + r.unit_id + "' has non-positive ORL");
    }
  }
}

namespace {

std::optional<int> orl_column_wavelength(std::string_view name) {
  constexpr std::string_view prefix = "orl_";
  constexpr std::string_view suffix = "_db";
  if (name.size() <= prefix.size() + suffix.size() || !name.starts_with(prefix) ||
      !name.ends_with(suffix)) {
    return std::nullopt;
  }
  const auto digits = name.substr(prefix.size(), name.size() - prefix.size() - suffix.size());
  int wl = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), wl);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || wl <= 0) return std::nullopt;
  return wl;
}

}  // namespace

OntPopulation parse_population(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source + ": empty population file", 0);
  const auto header = csv::split_line(line);

  std::optional<std::size_t> id_col;
  std::optional<std::size_t> vendor_col;
  std::vector<std::pair<std::size_t, int>> orl_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "unit_id") {
      id_col = c;
    } else if (header[c] == "vendor") {
      vendor_col = c;
    } else if (auto wl = orl_column_wavelength(header[c])) {
      orl_cols.emplace_back(c, *wl);
    }
  }
  auto has_wl = [&](int wl) {
    return std::any_of(orl_cols.begin(), orl_cols.end(),
                       [&](const auto& col) { return col.second == wl; });
  };
  std::vector<std::string> missing;
  if (!id_col) missing.push_back("unit_id");
  if (!vendor_col) missing.push_back("vendor");
  if (!has_wl(1383)) missing.push_back("orl_1383_db");
  if (!has_wl(1650)) missing.push_back("orl_1650_db");
  if (!missing.empty()) {
    std::string msg = source + ": missing column(s):";
    for (const auto& m : missing) msg += " " + m;
    throw ParseError(msg, 0);
  }

  std::vector<OntRecord> records;
  std::set<std::string> seen;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    const auto fields = csv::split_line(line);
    auto fail = [&](const std::string& why) -> ParseError {
      return ParseError(source + ": row " + std::to_string(row) + ": " + why, row);
    };
    if (fields.size() != header.size()) {
      throw fail("expected " + std::to_string(header.size()) + " fields, got " +
                 std::to_string(fields.size()));
    }
    OntRecord rec;
    rec.unit_id = fields[*id_col];
    rec.vendor = fields[*vendor_col];
    if (rec.unit_id.empty()) throw fail("empty unit_id");
    if (!seen.insert(rec.unit_id).second) throw fail("duplicate unit_id '" + rec.unit_id + "'");
    for (const auto& [col, wl] : orl_cols) {
      const auto value = csv::parse_double(fields[col]);
      if (!value) throw fail(header[col] + " is not numeric: '" + fields[col] + "'");
      if (!(*value > 0.0)) throw fail(header[col] + " must be positive, got " + fields[col]);
      rec.orl_db[wl] = *value;
    }
    records.push_back(std::move(rec));
  }
  return OntPopulation(std::move(records), {PopulationProvenance::Kind::measured_csv, source, 0});
}

OntPopulation load_population(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open population file " + path.string(), 0);
  return parse_population(in, path.string());
}

void write_population_csv(const OntPopulation& population, std::ostream& out) {
  std::set<int> wavelengths;
  for (const auto& r : population.records()) {
    for (const auto& [wl, _] : r.orl_db) wavelengths.insert(wl);
  }
  out << "unit_id,vendor";
  for (int wl : wavelengths) out << ",orl_" << wl << "_db";
  out << '\n';
  for (const auto& r : population.records()) {
    out << r.unit_id << ',' << r.vendor;
    for (int wl : wavelengths) {
      out << ',';
      if (auto it = r.orl_db.find(wl); it != r.orl_db.end()) out << csv::number(it->second, 3);
    }
    out << '\n';
  }
}

OntPopulation synth_population(const SyntheticOrlParams& params) {
  params.validate();
  std::vector<OntRecord> records(params.count);
  for (std::size_t i = 0; i < params.count; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "ONT-%03zu", i + 1);
    records[i].unit_id = id;
    records[i].vendor = std::string("vendor-") + static_cast<char>('A' + i % params.vendors);
  }
  // one stream per wavelength, so adding a wavelength leaves the others unchanged
  for (const auto& [wl, d] : params.per_wavelength) {
    Rng rng(mix_seed(params.seed, static_cast<std::uint64_t>(wl)));
    for (auto& r : records) {
      r.orl_db[wl] = rng.truncated_normal(d.mean_db, d.stddev_db, d.min_db, d.max_db);
    }
  }
  return OntPopulation(std::move(records),
                       {PopulationProvenance::Kind::synthetic, "", params.seed});
}

SyntheticOrlParams reference_population_params(std::uint64_t seed) {
  SyntheticOrlParams p;
  p.count = 87;
  p.seed = seed;
  p.vendors = 4;
  p.per_wavelength[1383] = {38.4, 4.8, 28.0, 49.0};
  p.per_wavelength[1650] = {45.5, 6.0, 45.0, 62.0};
  return p;
}

PopulationStats population_stats(const OntPopulation& population, int wavelength_nm) {
  PopulationStats st;
  if (population.size() == 0) throw ArgumentError("population is empty");
  std::vector<double> values;
  values.reserve(population.size());
  for (const auto& r : population.records()) values.push_back(r.orl_at(wavelength_nm));

  st.count = values.size();
  st.min = *std::min_element(values.begin(), values.end());
  st.max = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  st.mean = sum / static_cast<double>(st.count);
  if (st.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - st.mean) * (v - st.mean);
    st.stddev = std::sqrt(ss / static_cast<double>(st.count - 1));
  }
  return st;
}

DetectionSetup detection_setup(const OtdrSpec& otdr, const PonTopology& topology,
                               const ProfileLibrary& profiles, const BudgetClass& budget,
                               double margin_db) {
  otdr.validate();
  const auto adjusted = set_voa_for_budget(topology, profiles, budget, otdr.wavelength_nm);
  DetectionSetup s;
  s.path_loss_db = path_loss(adjusted.topology, profiles, otdr.wavelength_nm);
  s.backscatter_db = terminal_backscatter(topology, profiles, otdr);
  s.dr_effective_db = effective_dynamic_range(otdr);
  s.min_reflectance_db =
      min_detectable_reflectance(s.dr_effective_db, s.path_loss_db, s.backscatter_db, margin_db);
  return s;
}

std::vector<bool> detected_units(const OntPopulation& population, const OtdrSpec& otdr,
                                 const PonTopology& topology, const ProfileLibrary& profiles,
                                 const BudgetClass& budget, double margin_db) {
  const auto setup = detection_setup(otdr, topology, profiles, budget, margin_db);
  const int wl = static_cast<int>(std::lround(otdr.wavelength_nm));
  std::vector<bool> flags;
  flags.reserve(population.size());
  for (const auto& r : population.records()) {
    flags.push_back(-r.orl_at(wl) >= setup.min_reflectance_db);
  }
  return flags;
}

CoverageRow coverage(const OntPopulation& population, const OtdrSpec& otdr,
                     const PonTopology& topology, const ProfileLibrary& profiles,
                     const BudgetClass& budget, double margin_db) {
  if (population.size() == 0) throw ArgumentError("population is empty");
  const auto setup = detection_setup(otdr, topology, profiles, budget, margin_db);
  const auto flags = detected_units(population, otdr, topology, profiles, budget, margin_db);

  CoverageRow row;
  row.wavelength_nm = otdr.wavelength_nm;
  row.instrument = otdr.id;
  row.budget = budget.id;
  row.margin_db = margin_db;
  row.total = population.size();
  row.detectable = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
  row.fraction = static_cast<double>(row.detectable) / static_cast<double>(row.total);
  row.max_detectable_orl_db = -setup.min_reflectance_db;
  return row;
}

CoverageReport coverage_sweep(const OntPopulation& population,
                              const std::vector<OtdrSpec>& instruments,
                              const PonTopology& topology, const ProfileLibrary& profiles,
                              const std::vector<BudgetClass>& budgets,
                              const std::vector<double>& margins) {
  CoverageReport report;
  for (const auto& otdr : instruments) {
    for (const auto& budget : budgets) {
      for (double margin : margins) {
        try {
          report.rows.push_back(coverage(population, otdr, topology, profiles, budget, margin));
        } catch (const Error& e) {
          std::ostringstream os;
          os << otdr.id << " @" << otdr.wavelength_nm << " nm, " << to_string(budget.id)
             << ", margin " << margin << " dB: " << e.what();
          report.diagnostics.push_back(os.str());
        }
      }
    }
  }
  return report;
}

void write_coverage_csv(const CoverageReport& report, std::ostream& out) {
  out << "wavelength_nm,budget_class,margin_db,detectable,total,fraction\n";
  for (const auto& r : report.rows) {
    out << csv::number(r.wavelength_nm, 1) << ',' << to_string(r.budget) << ','
        << csv::number(r.margin_db, 3) << ',' << r.detectable << ',' << r.total << ','
        << csv::number(r.fraction, 6) << '\n';
  }
}

void write_coverage_json(const CoverageReport& report, std::ostream& out) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json j;
    j["wavelength_nm"] = r.wavelength_nm;
    j["budget_class"] = std::string(to_string(r.budget));
    j["margin_db"] = r.margin_db;
    j["detectable"] = r.detectable;
    j["total"] = r.total;
    j["fraction"] = r.fraction;
    rows.push_back(std::move(j));
  }
  nlohmann::ordered_json doc;
  doc["rows"] = std::move(rows);
  doc["diagnostics"] = report.diagnostics;
  out << doc.dump(2) << '\n';
}

}  // namespace ponwm

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ponwm/otdr.hpp"
#include "ponwm/topology.hpp"

namespace ponwm {

struct OntRecord {
  std::string unit_id;
  std::string vendor;
  std::map<int, double> orl_db;  // wavelength nm -> ORL (positive dB); reflectance = -ORL

  double orl_at(int wavelength_nm) const;
};

struct OrlDistribution {
  double mean_db = 40.0;  // location of the parent normal
  double stddev_db = 5.0;
  double min_db = 20.0;
  double max_db = 60.0;
};

struct SyntheticOrlParams {
  std::map<int, OrlDistribution> per_wavelength;
  std::size_t count = 87;
  std::uint64_t seed = 1;
  std::size_t vendors = 4;

  void validate() const;
};

struct PopulationProvenance {
  enum class Kind { measured_csv, synthetic } kind = Kind::measured_csv;
  std::string source;  // csv path, empty for synthetic
  std::uint64_t seed = 0;
};

class OntPopulation {
 public:
  OntPopulation() = default;
  OntPopulation(std::vector<OntRecord> records, PopulationProvenance provenance);

  const std::vector<OntRecord>& records() const { return records_; }
  const PopulationProvenance& provenance() const { return provenance_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<OntRecord> records_;
  PopulationProvenance provenance_;
};

struct PopulationStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n-1); 0 for a single record
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

// CSV schema: unit_id,vendor,orl_1383_db,orl_1650_db[,orl_<nm>_db ...]
OntPopulation load_population(const std::filesystem::path& path);
OntPopulation parse_population(std::istream& in, const std::string& source = "<stream>");
void write_population_csv(const OntPopulation& population, std::ostream& out);

OntPopulation synth_population(const SyntheticOrlParams& params);
// Shipped reference parameters: mean-ORL gap of 11.5 dB, broader spread at 1383 nm.
SyntheticOrlParams reference_population_params(std::uint64_t seed);

PopulationStats population_stats(const OntPopulation& population, int wavelength_nm);

struct CoverageRow {
  double wavelength_nm = 0.0;
  std::string instrument;
  BudgetClassId budget = BudgetClassId::Cplus;
  double margin_db = 1.0;
  std::size_t detectable = 0;
  std::size_t total = 0;
  double fraction = 0.0;
  double max_detectable_orl_db = 0.0;
};

struct CoverageReport {
  std::vector<CoverageRow> rows;
  std::vector<std::string> diagnostics;
};

// Everything a detection threshold depends on for one instrument and budget.
struct DetectionSetup {
  double path_loss_db = 0.0;
  double backscatter_db = 0.0;
  double dr_effective_db = 0.0;
  double min_reflectance_db = 0.0;
};

DetectionSetup detection_setup(const OtdrSpec& otdr, const PonTopology& topology,
                               const ProfileLibrary& profiles, const BudgetClass& budget,
                               double margin_db);

// Per-record detection flags (analytic threshold), in population order.
std::vector<bool> detected_units(const OntPopulation& population, const OtdrSpec& otdr,
                                 const PonTopology& topology, const ProfileLibrary& profiles,
                                 const BudgetClass& budget, double margin_db);

CoverageRow coverage(const OntPopulation& population, const OtdrSpec& otdr,
                     const PonTopology& topology, const ProfileLibrary& profiles,
                     const BudgetClass& budget, double margin_db);

CoverageReport coverage_sweep(const OntPopulation& population,
                              const std::vector<OtdrSpec>& instruments,
                              const PonTopology& topology, const ProfileLibrary& profiles,
                              const std::vector<BudgetClass>& budgets,
                              const std::vector<double>& margins);

void write_coverage_csv(const CoverageReport& report, std::ostream& out);
void write_coverage_json(const CoverageReport& report, std::ostream& out);

}  // namespace ponwm

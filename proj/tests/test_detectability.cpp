#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "ponwm/detectability.hpp"
#include "ponwm/error.hpp"
#include "ponwm/random.hpp"

using namespace ponwm;
using doctest::Approx;

namespace {

const std::filesystem::path kSource = PONWM_SOURCE_DIR;

PonTopology ref_path() {
  return PonTopology("ref", {FiberSpan{"G652D", 20.0}, default_splitter_32(), Voa{0.0},
                             OntTermination{40.0}});
}

OtdrSpec instrument(double wl, double dr_eff) {
  OtdrSpec s;
  s.id = wl == 1383.0 ? "otdr1383" : "otdr1650";
  s.wavelength_nm = wl;
  s.dr_datasheet_db = wl == 1383.0 ? 37.0 : 46.0;
  s.dr_effective_override_db = dr_eff;
  return s;
}

OntPopulation uniform_population(std::size_t n, double orl) {
  std::vector<OntRecord> recs;
  for (std::size_t i = 0; i < n; ++i) {
    recs.push_back({"u" + std::to_string(i), "v", {{1383, orl}, {1650, orl}}});
  }
  return OntPopulation(std::move(recs), {});
}

}  // namespace

TEST_CASE("parse_population") {
  std::istringstream ok(
      "unit_id,vendor,orl_1383_db,orl_1650_db\n"
      "a,v1,35.0,47.5\n"
      "b,v2,40.25,50\n"
      "c,v1,30,45.0\n");
  const auto pop = parse_population(ok);
  REQUIRE(pop.size() == 3);
  CHECK(pop.records()[1].orl_at(1383) == 40.25);
  CHECK(pop.records()[2].vendor == "v1");

  std::istringstream extra("unit_id,vendor,orl_1383_db,orl_1650_db,orl_1310_db\na,v,30,40,20\n");
  CHECK(parse_population(extra).records()[0].orl_at(1310) == 20.0);

  std::istringstream bad("unit_id,vendor,orl_1383_db,orl_1650_db\na,v,30,40\nb,v,-5,40\n");
  try {
    parse_population(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }

  std::istringstream text("unit_id,vendor,orl_1383_db,orl_1650_db\na,v,30,x\n");
  CHECK_THROWS_AS(parse_population(text), ParseError);
  std::istringstream missing("unit_id,vendor,orl_1383_db\na,v,30\n");
  CHECK_THROWS_AS(parse_population(missing), ParseError);
  std::istringstream dup("unit_id,vendor,orl_1383_db,orl_1650_db\na,v,30,40\na,v,31,41\n");
  CHECK_THROWS_AS(parse_population(dup), ParseError);
}

TEST_CASE("population csv round trip") {
  const auto pop = synth_population(reference_population_params(5));
  std::ostringstream out;
  write_population_csv(pop, out);
  std::istringstream in(out.str());
  const auto back = parse_population(in);
  REQUIRE(back.size() == pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    CHECK(back.records()[i].unit_id == pop.records()[i].unit_id);
    CHECK(std::abs(back.records()[i].orl_at(1383) - pop.records()[i].orl_at(1383)) <= 5e-4);
  }
}

TEST_CASE("shipped reference population") {
  const auto pop = load_population(kSource / "data" / "reference_population.csv");
  CHECK(pop.size() == 87);
  const double gap = population_stats(pop, 1650).mean - population_stats(pop, 1383).mean;
  CHECK(std::abs(gap - 11.5) <= 0.5);
  CHECK(population_stats(pop, 1383).stddev > 0.0);
  std::set<std::string> vendors;
  for (const auto& r : pop.records()) vendors.insert(r.vendor);
  CHECK(vendors.size() == 4);
  CHECK_THROWS_AS(load_population(kSource / "data" / "no_such_file.csv"), ParseError);
}

TEST_CASE("synth_population") {
  SyntheticOrlParams p = reference_population_params(1);
  const auto a = synth_population(p);
  const auto b = synth_population(p);
  REQUIRE(a.size() == 87);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.records()[i].orl_db == b.records()[i].orl_db);
    CHECK(a.records()[i].unit_id == b.records()[i].unit_id);
  }
  CHECK(a.provenance().kind == PopulationProvenance::Kind::synthetic);
  CHECK(a.provenance().seed == 1);

  p.count = 1;
  const auto one = synth_population(p);
  REQUIRE(one.size() == 1);
  for (const auto& [wl, d] : p.per_wavelength) {
    CHECK(one.records()[0].orl_at(wl) >= d.min_db);
    CHECK(one.records()[0].orl_at(wl) <= d.max_db);
  }

  SyntheticOrlParams bad = reference_population_params(1);
  bad.per_wavelength[1383].stddev_db = 0.0;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad = reference_population_params(1);
  bad.per_wavelength[1383].min_db = 39.0;
  bad.per_wavelength[1383].mean_db = 38.0;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
}

TEST_CASE("synth_population mean gap and bounds") {
  SyntheticOrlParams p;
  p.count = 10000;
  p.seed = 77;
  p.per_wavelength[1650] = {47.0, 4.0, 30.0, 64.0};
  p.per_wavelength[1383] = {35.5, 6.0, 18.5, 52.5};
  const auto pop = synth_population(p);
  const double gap = population_stats(pop, 1650).mean - population_stats(pop, 1383).mean;
  CHECK(std::abs(gap - 11.5) <= 0.3);

  for (const auto& [wl, d] : p.per_wavelength) {
    const auto st = population_stats(pop, wl);
    const double target = truncated_normal_mean(d.mean_db, d.stddev_db, d.min_db, d.max_db);
    CHECK(std::abs(st.mean - target) <= 3.0 * d.stddev_db / std::sqrt(10000.0));
    CHECK(st.min >= d.min_db);
    CHECK(st.max <= d.max_db);
  }

  const auto ref = synth_population([] {
    auto q = reference_population_params(99);
    q.count = 5000;
    return q;
  }());
  for (const auto& r : ref.records()) {
    CHECK(r.orl_at(1383) >= 28.0);
    CHECK(r.orl_at(1650) <= 62.0);
  }
}

TEST_CASE("population_stats") {
  const auto one = uniform_population(1, 40.0);
  CHECK(population_stats(one, 1383).mean == 40.0);
  CHECK(population_stats(one, 1383).stddev == 0.0);

  std::vector<OntRecord> recs{{"a", "v", {{1383, 30.0}}}, {"b", "v", {{1383, 50.0}}}};
  const OntPopulation two(recs, {});
  const auto st = population_stats(two, 1383);
  CHECK(st.mean == 40.0);
  CHECK(st.min == 30.0);
  CHECK(st.max == 50.0);
  CHECK(st.count == 2);
  try {
    population_stats(two, 1650);
    FAIL("expected ArgumentError");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find("'a'") != std::string::npos);
  }
}

TEST_CASE("coverage on trivial populations") {
  const auto lib = ProfileLibrary::defaults();
  // C+ at 22.88 dB DR_eff: ORL_max is 44 dB
  const auto otdr = instrument(1383.0, 22.88);
  const auto all = coverage(uniform_population(10, 20.0), otdr, ref_path(), lib,
                            budget_of(BudgetClassId::Cplus), 1.0);
  CHECK(std::abs(all.max_detectable_orl_db - 44.0) < 0.1);
  CHECK(all.fraction == 1.0);
  CHECK(all.detectable == 10);
  const auto none = coverage(uniform_population(10, 60.0), otdr, ref_path(), lib,
                             budget_of(BudgetClassId::Cplus), 1.0);
  CHECK(none.fraction == 0.0);

  const PonTopology lossy("l", {Connector{40.0}, Voa{0.0}, OntTermination{40.0}});
  CHECK_THROWS_AS(coverage(uniform_population(3, 30.0), otdr, lossy, lib,
                           budget_of(BudgetClassId::D), 1.0),
                  InfeasibleError);
}

TEST_CASE("coverage_sweep") {
  const auto lib = ProfileLibrary::defaults();
  const auto pop = synth_population(reference_population_params(2607));
  const std::vector<OtdrSpec> instruments{instrument(1383.0, 23.5), instrument(1650.0, 24.7)};
  const std::vector<BudgetClass> budgets{budget_of(BudgetClassId::Bplus),
                                         budget_of(BudgetClassId::Cplus),
                                         budget_of(BudgetClassId::D)};
  const auto report = coverage_sweep(pop, instruments, ref_path(), lib, budgets, {1.0});
  REQUIRE(report.rows.size() == 6);
  CHECK(report.diagnostics.empty());
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& r = report.rows[i];
    CHECK(r.fraction == static_cast<double>(r.detectable) / static_cast<double>(r.total));
    CHECK(r.detectable <= r.total);
    if (i % 3 != 0) CHECK(r.fraction <= report.rows[i - 1].fraction);
  }
  for (std::size_t j = 0; j < 3; ++j) CHECK(report.rows[j].fraction >= report.rows[j + 3].fraction);

  // infeasible cells become diagnostics
  BudgetClass tiny{BudgetClassId::Bplus, 10.0};
  const auto partial = coverage_sweep(pop, instruments, ref_path(), lib, {tiny, budgets[1]}, {1.0});
  CHECK(partial.rows.size() == 2);
  CHECK(partial.diagnostics.size() == 2);

  std::ostringstream csv;
  write_coverage_csv(report, csv);
  CHECK(csv.str().rfind("wavelength_nm,budget_class,margin_db,detectable,total,fraction\n", 0) == 0);
  std::ostringstream json;
  write_coverage_json(report, json);
  CHECK(json.str().find("\"rows\"") != std::string::npos);
}

TEST_CASE("coverage monotonicity") {
  const auto lib = ProfileLibrary::defaults();
  const auto pop = synth_population(reference_population_params(11));
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dr(18.0, 32.0), m(0.5, 3.0), loss(24.0, 36.0), d(0.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double dr0 = dr(rng), m0 = m(rng), l0 = loss(rng), step = d(rng);
    const BudgetClass b0{BudgetClassId::Cplus, l0};
    const BudgetClass b1{BudgetClassId::Cplus, l0 + step};
    const auto base = coverage(pop, instrument(1383.0, dr0), ref_path(), lib, b0, m0).fraction;
    CHECK(coverage(pop, instrument(1383.0, dr0), ref_path(), lib, b1, m0).fraction <= base);
    CHECK(coverage(pop, instrument(1383.0, dr0), ref_path(), lib, b0, m0 + step).fraction <= base);
    CHECK(coverage(pop, instrument(1383.0, dr0 + step), ref_path(), lib, b0, m0).fraction >= base);
  }
}

TEST_CASE("analytic coverage equals trace-based detection") {
  const auto lib = ProfileLibrary::defaults();
  auto params = reference_population_params(31);
  params.count = 60;
  const auto pop = synth_population(params);
  for (const auto& otdr : {instrument(1383.0, 23.5), instrument(1650.0, 24.7)}) {
    const auto wl = static_cast<int>(otdr.wavelength_nm);
    for (auto id : {BudgetClassId::Bplus, BudgetClassId::Cplus, BudgetClassId::D}) {
      const auto flags = detected_units(pop, otdr, ref_path(), lib, budget_of(id), 1.0);
      const auto tuned = set_voa_for_budget(ref_path(), lib, budget_of(id), otdr.wavelength_nm).topology;
      for (std::size_t i = 0; i < pop.size(); ++i) {
        const auto topo = tuned.with_termination(OntTermination{pop.records()[i].orl_at(wl)});
        const bool seen = !detect_events(synthesize_trace(topo, otdr, lib), 1.0).empty();
        CHECK(seen == flags[i]);
      }
    }
  }
}

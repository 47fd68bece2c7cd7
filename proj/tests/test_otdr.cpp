#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ponwm/error.hpp"
#include "ponwm/otdr.hpp"
#include "ponwm/topology.hpp"

using namespace ponwm;
using doctest::Approx;

namespace {

OtdrSpec otdr1383() {
  OtdrSpec s;
  s.id = "otdr1383";
  return s;
}

PonTopology cplus_path(double orl_db) {
  const auto lib = ProfileLibrary::defaults();
  const PonTopology base("cplus", {FiberSpan{"G652D", 20.0}, default_splitter_32(), Voa{0.0},
                                  OntTermination{orl_db}});
  return set_voa_for_budget(base, lib, budget_of(BudgetClassId::Cplus), 1383.0).topology;
}

double max_level_beyond(const Trace& t, double from_m) {
  double m = -INFINITY;
  for (const auto& p : t.samples) {
    if (p.distance_m >= from_m) m = std::max(m, p.level_db);
  }
  return m;
}

}  // namespace

TEST_CASE("effective_dynamic_range") {
  auto s = otdr1383();
  CHECK(effective_dynamic_range(s) == Approx(22.88).epsilon(0.0004));
  CHECK(std::abs(effective_dynamic_range(s) - (37.0 + 5.0 * std::log10(30.0 / 20000.0))) < 1e-12);
  s.operating_pulse_ns = s.datasheet_pulse_ns;
  CHECK(effective_dynamic_range(s) == 37.0);
  s.operating_averaging_s = 18.0;
  CHECK(effective_dynamic_range(s) == Approx(34.5));
  s.dr_effective_override_db = 25.0;
  CHECK(effective_dynamic_range(s) == 25.0);

  OtdrSpec s1650 = otdr1383();
  s1650.wavelength_nm = 1650.0;
  s1650.dr_datasheet_db = 46.0;
  CHECK(effective_dynamic_range(s1650) > effective_dynamic_range(otdr1383()));

  s = otdr1383();
  s.operating_pulse_ns = 0.0;
  CHECK_THROWS_AS(s.validate(), ArgumentError);
}

TEST_CASE("backscatter_level") {
  CHECK(backscatter_level(-79.0, 1.0) == -79.0);
  CHECK(std::abs(backscatter_level(-79.0, 30.0) - -64.23) < 0.01);
  CHECK(std::abs(backscatter_level(-82.0, 30.0) - -67.23) < 0.01);
  const auto lib = ProfileLibrary::defaults();
  CHECK(backscatter_level(lib.get("G652D"), 1383.0, 30.0) == backscatter_level(-79.0, 30.0));
  CHECK(backscatter_level(lib.get("G652D"), 1650.0, 30.0) == backscatter_level(-82.0, 30.0));
}

TEST_CASE("peak height and reflectance") {
  const double b = backscatter_level(-79.0, 30.0);
  CHECK(std::abs(peak_height_from_reflectance(b, b) - 1.5051) < 0.001);
  CHECK(std::abs(peak_height_from_reflectance(-32.0, b) - 16.12) < 0.02);
  CHECK(peak_height_from_reflectance(-200.0, b) < 1e-6);
  CHECK(peak_height_from_reflectance(-200.0, b) >= 0.0);

  CHECK(std::abs(reflectance_from_peak_height(5.0 * std::log10(2.0), b) - b) < 1e-6);
  CHECK(std::abs(reflectance_from_peak_height(16.12, -64.23) - -32.0) < 0.05);
  CHECK_THROWS_AS(reflectance_from_peak_height(0.0, b), DomainError);
  CHECK_THROWS_AS(reflectance_from_peak_height(-1.0, b), DomainError);

  for (double r = -70.0; r <= -10.0; r += 0.25) {
    for (double bb : {-64.23, -67.23}) {
      CHECK(std::abs(reflectance_from_peak_height(peak_height_from_reflectance(r, bb), bb) - r) <
            1e-9);
    }
  }
  // monotone in reflectance
  double prev = 0.0;
  for (double r = -90.0; r <= 0.0; r += 1.0) {
    const double d = peak_height_from_reflectance(r, b);
    CHECK(d > prev);
    prev = d;
  }
}

TEST_CASE("synthesize_trace on an empty topology") {
  const auto lib = ProfileLibrary::defaults();
  const Trace t = synthesize_trace(PonTopology(), otdr1383(), lib);
  REQUIRE(t.samples.size() == 2);
  CHECK(t.samples[0].level_db == 0.0);
  CHECK(t.samples[1].level_db == 0.0);
  CHECK(t.noise_floor_db == Approx(-22.88).epsilon(0.0004));
  CHECK(detect_events(t, 1.0).empty());
}

TEST_CASE("synthesize_trace on the 20 km C+ path") {
  const auto lib = ProfileLibrary::defaults();
  const Trace t = synthesize_trace(cplus_path(32.0), otdr1383(), lib);
  CHECK(t.noise_floor_db == Approx(-22.88).epsilon(0.0004));
  CHECK(t.backscatter_db == Approx(-64.23).epsilon(0.0002));

  const double peak = max_level_beyond(t, 20000.0);
  CHECK(std::abs(peak - -15.88) < 0.05);
  CHECK(std::abs(peak - t.noise_floor_db - 7.00) < 0.05);

  for (const auto& p : t.samples) CHECK(p.level_db >= t.noise_floor_db);
  // baseline slope over the feeder equals the fiber attenuation
  const double a = attenuation_at(lib.get("G652D"), 1383.0);
  for (std::size_t i = 1; i < t.samples.size(); ++i) {
    const auto& p0 = t.samples[i - 1];
    const auto& p1 = t.samples[i];
    if (p1.distance_m >= 20000.0) break;
    CHECK(std::abs((p0.level_db - p1.level_db) / ((p1.distance_m - p0.distance_m) / 1000.0) - a) <
          1e-9);
  }

  const auto events = detect_events(t, 1.0);
  REQUIRE(events.size() == 1);
  CHECK(events[0].distance_m >= 20000.0);
  CHECK(std::abs(events[0].peak_height_above_floor_db - 7.00) < 0.05);
  // baseline is buried under the floor, so the inferred value bounds the true one from below
  CHECK(events[0].inferred_reflectance_db <= -32.0 + 1e-9);
  CHECK(detect_events(t, 8.0).empty());
}

TEST_CASE("events inferred from a trace above the floor recover the reflectance") {
  const auto lib = ProfileLibrary::defaults();
  auto spec = otdr1383();
  spec.dr_effective_override_db = 45.0;
  const Trace t = synthesize_trace(cplus_path(32.0), spec, lib);
  const auto events = detect_events(t, 1.0);
  REQUIRE(events.size() == 1);
  CHECK(std::abs(events[0].inferred_reflectance_db - -32.0) < 1e-6);
}

TEST_CASE("synthesize_trace jitter is deterministic per seed") {
  const auto lib = ProfileLibrary::defaults();
  const auto topo = cplus_path(32.0);
  const Trace a = synthesize_trace(topo, otdr1383(), lib, {0.2, 42});
  const Trace b = synthesize_trace(topo, otdr1383(), lib, {0.2, 42});
  const Trace c = synthesize_trace(topo, otdr1383(), lib, {0.2, 43});
  REQUIRE(a.samples.size() == b.samples.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].level_db == b.samples[i].level_db);
    CHECK(a.samples[i].level_db >= a.noise_floor_db);
    if (a.samples[i].level_db != c.samples[i].level_db) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("synthesize_trace rejects an unresolved wavelength") {
  const auto lib = ProfileLibrary::defaults();
  auto spec = otdr1383();
  spec.wavelength_nm = 1700.0;
  CHECK_THROWS_AS(synthesize_trace(cplus_path(32.0), spec, lib), OutOfRangeError);
}

TEST_CASE("flat trace has no events") {
  Trace t;
  t.noise_floor_db = -20.0;
  for (int i = 0; i < 50; ++i) t.samples.push_back({2.0 * i, -5.0});
  for (double m : {0.1, 1.0, 10.0}) CHECK(detect_events(t, m).empty());
}

TEST_CASE("min_detectable_reflectance") {
  const double b = -64.23;
  CHECK(required_peak_height(22.88, 32.0, 1.0) == Approx(10.12));
  CHECK(std::abs(min_detectable_reflectance(22.88, 32.0, b, 1.0) - -44.0) < 0.1);
  // D budget: the threshold evaluates to -38.0
  CHECK(std::abs(min_detectable_reflectance(22.88, 35.0, b, 1.0) - -38.0) < 0.05);
  // boundary: path_loss = DR_eff - margin
  CHECK(min_detectable_reflectance(22.88, 21.88, b, 1.0) ==
        Approx(reflectance_from_peak_height(1.0, b)));
  // backscatter-visible region keeps the margin-height reflectance
  CHECK(min_detectable_reflectance(22.88, 5.0, b, 1.0) ==
        Approx(reflectance_from_peak_height(1.0, b)));
  CHECK(min_detectable_reflectance(otdr1383(), 32.0, b, 1.0) ==
        Approx(min_detectable_reflectance(22.88, 32.0, b, 1.0)).epsilon(1e-3));
}

TEST_CASE("min_detectable_reflectance monotonicity") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dr(15.0, 40.0), pl(0.0, 45.0), mg(0.1, 5.0), step(0.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const double d = dr(rng), p = pl(rng), m = mg(rng), s = step(rng);
    const double r = min_detectable_reflectance(d, p, -64.23, m);
    CHECK(min_detectable_reflectance(d, p + s, -64.23, m) >= r - 1e-12);
    CHECK(min_detectable_reflectance(d, p, -64.23, m + s) >= r - 1e-12);
    CHECK(min_detectable_reflectance(d + s, p, -64.23, m) <= r + 1e-12);
  }
}

TEST_CASE("analytic threshold agrees with the noiseless trace") {
  const auto lib = ProfileLibrary::defaults();
  const auto spec = otdr1383();
  const double dr = effective_dynamic_range(spec);
  for (double orl = 30.0; orl <= 50.0; orl += 0.37) {
    const auto topo = cplus_path(orl);
    const Trace t = synthesize_trace(topo, spec, lib);
    const double pl = path_loss(topo, lib, 1383.0);
    const bool analytic =
        -orl >= min_detectable_reflectance(dr, pl, t.backscatter_db, 1.0);
    CHECK(analytic == !detect_events(t, 1.0).empty());
  }
}

TEST_CASE("calibrate_effective_dr") {
  const double b = -64.23;
  std::vector<SensitivityObservation> one{{32.0, min_detectable_reflectance(22.88, 32.0, b, 1.0), 1.0}};
  CHECK(std::abs(calibrate_effective_dr(one, b) - 22.88) < 1e-6);

  std::vector<SensitivityObservation> five;
  for (double pl : {36.0, 38.0, 40.0, 42.0, 44.0}) {
    five.push_back({pl, min_detectable_reflectance(31.88, pl, b, 1.5), 1.5});
  }
  CHECK(std::abs(calibrate_effective_dr(five, b) - 31.88) < 1e-6);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> noise(-0.5, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<SensitivityObservation> obs;
    for (double pl : {28.0, 32.0, 35.0}) {
      for (double m : {1.0, 1.5, 2.0}) {
        obs.push_back({pl, min_detectable_reflectance(22.88, pl, b, m) + noise(rng), m});
      }
    }
    CHECK(std::abs(calibrate_effective_dr(obs, b) - 22.88) <= 0.5);
  }

  CHECK_THROWS_AS(calibrate_effective_dr(std::vector<SensitivityObservation>{}, b), ArgumentError);
}

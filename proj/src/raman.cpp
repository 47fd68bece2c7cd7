#include "ponwm/raman.hpp"

#include <array>
#include <cmath>
#include <ostream>
#include <string>

#include "ponwm/csv.hpp"
#include "ponwm/error.hpp"
#include "ponwm/optics.hpp"
#include "ponwm/rk4.hpp"
#include "ponwm/units.hpp"

namespace ponwm {

namespace {

constexpr double kConvergenceDb = 1e-6;
constexpr double kMinStepKm = 1e-6;

// dB ratio a/b where both may be zero (no light in, no light out).
double ratio_db(double a, double b) {
  if (a == 0.0 && b == 0.0) return 0.0;
  return linear_to_db(a / b);
}

struct EndPowers {
  double signal_w;
  double pump_w;
};

auto make_rhs(const RamanScenario& s, bool raman_on) {
  const double alpha_s = db_per_km_to_linear(s.signal_attenuation_db_km);
  const double alpha_p = db_per_km_to_linear(s.pump_attenuation_db_km);
  const double g = raman_on ? s.gain_coefficient : 0.0;
  const double photon = s.photon_term ? s.signal_wavelength_nm / s.pump_wavelength_nm : 1.0;
  // state: {signal W, pump W}, z in km
  return [=](double, const std::array<double, 2>& y) {
    const double transfer = g * y[0] * y[1];
    return std::array<double, 2>{-alpha_s * y[0] + transfer, -alpha_p * y[1] - photon * transfer};
  };
}

std::array<double, 2> launch_state(const RamanScenario& s) {
  return {dbm_to_watts(s.signal_power_dbm), dbm_to_watts(s.pump_power_dbm)};
}

EndPowers run(const RamanScenario& s, bool raman_on, double step_km) {
  const auto out = rk4_integrate(make_rhs(s, raman_on), launch_state(s), s.length_km, step_km);
  return {out[0], out[1]};
}

RamanResult result_at(const RamanScenario& s, double step_km) {
  const EndPowers on = run(s, true, step_km);
  const EndPowers off = run(s, false, step_km);
  RamanResult r;
  r.signal_out_on_dbm = watts_to_dbm(on.signal_w);
  r.signal_out_off_dbm = watts_to_dbm(off.signal_w);
  r.pump_out_on_dbm = watts_to_dbm(on.pump_w);
  r.pump_out_off_dbm = watts_to_dbm(off.pump_w);
  r.on_off_gain_db = ratio_db(on.signal_w, off.signal_w);
  r.pump_depletion_db = ratio_db(off.pump_w, on.pump_w);
  return r;
}

}  // namespace

void RamanScenario::validate() const {
  if (!(pump_wavelength_nm < signal_wavelength_nm)) {
    throw ArgumentError("Raman pump wavelength must be shorter than the signal wavelength");
  }
  if (!(gain_coefficient >= 0.0)) throw ArgumentError("Raman gain coefficient must be >= 0");
  if (!(length_km > 0.0)) throw ArgumentError("fiber length must be > 0 km");
  if (!(step_m > 0.0) || step_m > length_km * 1000.0) {
    throw ArgumentError("integration step must be in (0, length]");
  }
  if (pump_attenuation_db_km < 0.0 || signal_attenuation_db_km < 0.0) {
    throw ArgumentError("attenuation must be >= 0 dB/km");
  }
  if (std::isnan(pump_power_dbm) || std::isnan(signal_power_dbm) || pump_power_dbm == INFINITY ||
      signal_power_dbm == INFINITY) {
    throw ArgumentError("launch powers must be finite dBm or -inf");
  }
}

RamanPair raman_pair_from_string(std::string_view name) {
  if (name == "GPON_1383_1490") return RamanPair::GPON_1383_1490;
  if (name == "HSPON_1342_1383") return RamanPair::HSPON_1342_1383;
  if (name == "custom" || name == "Custom") return RamanPair::Custom;
  throw ArgumentError("unknown Raman pair '" + std::string(name) +
                      "' (expected GPON_1383_1490, HSPON_1342_1383 or custom)");
}

double gain_coefficient_for(RamanPair pair) {
  switch (pair) {
    case RamanPair::GPON_1383_1490:
      return 0.3;
    case RamanPair::HSPON_1342_1383:
      return 0.17;
    case RamanPair::Custom:
      break;
  }
  throw ArgumentError("custom Raman pairs must supply an explicit gain coefficient");
}

RamanScenario default_scenario(RamanPair pair) {
  RamanScenario s;
  s.gain_coefficient = gain_coefficient_for(pair);
  if (pair == RamanPair::GPON_1383_1490) {
    s.pump_wavelength_nm = 1383.0;
    s.signal_wavelength_nm = 1490.0;
    s.pump_power_dbm = 9.0;
    s.signal_power_dbm = 0.0;
    s.pump_attenuation_db_km = 0.32;
    s.signal_attenuation_db_km = 0.24;
  } else {
    // the HSPON downstream data is the shorter wavelength, so it is the pump here
    s.pump_wavelength_nm = 1342.0;
    s.signal_wavelength_nm = 1383.0;
    s.pump_power_dbm = 0.0;
    s.signal_power_dbm = 9.0;
    s.pump_attenuation_db_km = 0.33;
    s.signal_attenuation_db_km = 0.32;
  }
  s.length_km = 22.0;
  return s;
}

std::vector<RamanSample> propagate(const RamanScenario& scenario, bool raman_on,
                                   double step_km) {
  scenario.validate();
  std::vector<RamanSample> samples;
  rk4_integrate(
      make_rhs(scenario, raman_on), launch_state(scenario), scenario.length_km, step_km,
      [&](double z, const std::array<double, 2>& y) { samples.push_back({z, y[0], y[1]}); });
  return samples;
}

RamanResult integrate(const RamanScenario& scenario) {
  scenario.validate();
  double step_km = scenario.step_m / 1000.0;
  RamanResult coarse = result_at(scenario, step_km);
  while (true) {
    step_km *= 0.5;
    if (step_km < kMinStepKm) {
      throw NumericalError("Raman integration did not converge at the minimum step");
    }
    RamanResult fine = result_at(scenario, step_km);
    if (std::abs(fine.on_off_gain_db - coarse.on_off_gain_db) < kConvergenceDb &&
        std::abs(fine.pump_depletion_db - coarse.pump_depletion_db) < kConvergenceDb) {
      return fine;
    }
    coarse = fine;
  }
}

double analytic_onoff_gain(const RamanScenario& scenario) {
  scenario.validate();
  return kDbPerNeper * scenario.gain_coefficient * dbm_to_watts(scenario.pump_power_dbm) *
         effective_length(scenario.pump_attenuation_db_km, scenario.length_km);
}

std::vector<RamanSweepRow> sweep_powers(const RamanScenario& base,
                                        const std::vector<double>& pump_powers_dbm,
                                        const std::vector<double>& signal_powers_dbm) {
  std::vector<RamanSweepRow> rows;
  rows.reserve(pump_powers_dbm.size() * signal_powers_dbm.size());
  for (double pump : pump_powers_dbm) {
    for (double signal : signal_powers_dbm) {
      RamanScenario s = base;
      s.pump_power_dbm = pump;
      s.signal_power_dbm = signal;
      rows.push_back({pump, signal, integrate(s)});
    }
  }
  return rows;
}

void write_sweep_csv(const std::vector<RamanSweepRow>& rows, std::ostream& out) {
  out << "pump_dbm,signal_dbm,on_off_gain_db,pump_depletion_db,signal_out_on_dbm,"
         "pump_out_on_dbm\n";
  for (const auto& r : rows) {
    out << csv::number(r.pump_dbm, 3) << ',' << csv::number(r.signal_dbm, 3) << ','
        << csv::number(r.result.on_off_gain_db, 9) << ','
        << csv::number(r.result.pump_depletion_db, 9) << ','
        << csv::number(r.result.signal_out_on_dbm, 6) << ','
        << csv::number(r.result.pump_out_on_dbm, 6) << '\n';
  }
}

}  // namespace ponwm

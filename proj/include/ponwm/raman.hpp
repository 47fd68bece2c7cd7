#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

namespace ponwm {

// Co-propagating pump (shorter wavelength) / signal pair in one fiber.
struct RamanScenario {
  double pump_wavelength_nm = 1383.0;
  double signal_wavelength_nm = 1490.0;
  double pump_power_dbm = 9.0;  // -inf means no pump
  double signal_power_dbm = 0.0;
  double gain_coefficient = 0.3;  // 1/(W km)
  double pump_attenuation_db_km = 0.32;
  double signal_attenuation_db_km = 0.24;
  double length_km = 22.0;
  bool photon_term = true;
  double step_m = 10.0;

  void validate() const;
};

struct RamanResult {
  double signal_out_on_dbm = 0.0;
  double signal_out_off_dbm = 0.0;
  double pump_out_on_dbm = 0.0;
  double pump_out_off_dbm = 0.0;
  double on_off_gain_db = 0.0;
  double pump_depletion_db = 0.0;
};

struct RamanSample {
  double z_km = 0.0;
  double signal_w = 0.0;
  double pump_w = 0.0;
};

enum class RamanPair { GPON_1383_1490, HSPON_1342_1383, Custom };

RamanPair raman_pair_from_string(std::string_view name);
double gain_coefficient_for(RamanPair pair);
// Scenario with the pair's wavelengths, coefficient and G.652.D attenuations over 22 km.
RamanScenario default_scenario(RamanPair pair);

// Power evolution along z with the Raman term on or off, at a fixed step (km).
std::vector<RamanSample> propagate(const RamanScenario& scenario, bool raman_on, double step_km);

// Converged on/off integration: the step is halved until on-off gain and depletion
// change by less than 1e-6 dB.
RamanResult integrate(const RamanScenario& scenario);

// Undepleted-pump closed form: 10/ln10 * g * P_pump * L_eff(pump).
double analytic_onoff_gain(const RamanScenario& scenario);

struct RamanSweepRow {
  double pump_dbm = 0.0;
  double signal_dbm = 0.0;
  RamanResult result;
};

std::vector<RamanSweepRow> sweep_powers(const RamanScenario& base,
                                        const std::vector<double>& pump_powers_dbm,
                                        const std::vector<double>& signal_powers_dbm);

void write_sweep_csv(const std::vector<RamanSweepRow>& rows, std::ostream& out);

}  // namespace ponwm

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ponwm/optics.hpp"
#include "ponwm/topology.hpp"

namespace ponwm {

struct OtdrSpec {
  std::string id;
  double wavelength_nm = 1383.0;
  double dr_datasheet_db = 37.0;
  double datasheet_pulse_ns = 20000.0;
  double datasheet_averaging_s = 180.0;
  double operating_pulse_ns = 30.0;
  double operating_averaging_s = 180.0;
  std::optional<double> dr_effective_override_db;
  double sample_spacing_m = 2.0;

  void validate() const;
};

struct TracePoint {
  double distance_m = 0.0;
  double level_db = 0.0;
};

// One-way display: every element loss appears once, reference 0 dB at the launch.
struct Trace {
  std::vector<TracePoint> samples;
  double noise_floor_db = 0.0;
  double wavelength_nm = 0.0;
  double pulse_ns = 0.0;
  double backscatter_db = 0.0;  // B at the terminating reflector, used to infer reflectance
  double noise_sigma_db = 0.0;
  std::uint64_t seed = 0;
};

struct TraceNoise {
  double sigma_db = 0.0;  // 0 disables jitter
  std::uint64_t seed = 0;
};

struct ReflectiveEvent {
  double distance_m = 0.0;
  double peak_height_above_floor_db = 0.0;
  double inferred_reflectance_db = 0.0;
};

struct SensitivityObservation {
  double path_loss_db = 0.0;
  double min_reflectance_db = 0.0;
  double margin_db = 1.0;
};

double effective_dynamic_range(const OtdrSpec& spec);

// B(pulse) = B0 + 10 log10(pulse / 1 ns), B0 taken at `wavelength_nm`.
double backscatter_level(const FiberProfile& profile, double wavelength_nm, double pulse_ns);
double backscatter_level(double b0_db, double pulse_ns);

// Height of a reflective spike above the local backscatter for reflectance R and backscatter B.
double peak_height_from_reflectance(double reflectance_db, double backscatter_db);
double reflectance_from_peak_height(double height_db, double backscatter_db);

// Backscatter level at the far end of the topology (profile of the last fiber span).
double terminal_backscatter(const PonTopology& topology, const ProfileLibrary& profiles,
                            const OtdrSpec& otdr);

Trace synthesize_trace(const PonTopology& topology, const OtdrSpec& otdr,
                       const ProfileLibrary& profiles, const TraceNoise& noise = {});

std::vector<ReflectiveEvent> detect_events(const Trace& trace, double margin_db);

// Spike height a reflection at `path_loss_db` needs to clear both the floor and the
// local backscatter by `margin_db`.
double required_peak_height(double dr_effective_db, double path_loss_db, double margin_db);

// Lowest reflectance (dB, most negative) still detectable at the given path loss.
double min_detectable_reflectance(const OtdrSpec& otdr, double path_loss_db,
                                  double backscatter_db, double margin_db);
double min_detectable_reflectance(double dr_effective_db, double path_loss_db,
                                  double backscatter_db, double margin_db);

// Least-squares DR_eff from (path loss, min reflectance, margin) readings.
double calibrate_effective_dr(std::span<const SensitivityObservation> observations,
                              double backscatter_db);

}  // namespace ponwm

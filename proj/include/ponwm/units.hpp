#pragma once

#include <cmath>
#include <numbers>

#include "ponwm/error.hpp"

namespace ponwm {

// dB -> linear ratio (or dBm -> mW).
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double linear) {
  if (!(linear > 0.0)) {
    throw DomainError("linear_to_db: value must be positive");
  }
  return 10.0 * std::log10(linear);
}

inline double dbm_to_watts(double dbm) { return db_to_linear(dbm) * 1e-3; }

// 0 W maps to -inf dBm rather than throwing; power outputs of the SRS model can be zero.
inline double watts_to_dbm(double watts) {
  if (watts == 0.0) return -INFINITY;
  return linear_to_db(watts * 1e3);
}

// dB/km -> 1/km (power attenuation in nepers-like natural units).
inline double db_per_km_to_linear(double db_per_km) {
  return db_per_km * std::numbers::ln10 / 10.0;
}

// 10/ln(10) ~ 4.343: converts a natural-log power exponent into dB.
inline constexpr double kDbPerNeper = 10.0 / std::numbers::ln10;

}  // namespace ponwm

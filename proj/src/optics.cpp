#include "ponwm/optics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ponwm/error.hpp"
#include "ponwm/units.hpp"

namespace ponwm {

namespace {

std::string interval_message(double wavelength_nm, double lo, double hi) {
  std::ostringstream os;
  os << "wavelength " << wavelength_nm << " nm outside table range [" << lo << ", " << hi
     << "] nm";
  return os.str();
}

// Below this linear attenuation (1/km) the effective length is taken as L.
constexpr double kLosslessThreshold = 1e-9;

}  // namespace

WavelengthTable::WavelengthTable(std::vector<Point> points) : points_(std::move(points)) {
  if (points_.empty()) {
    throw ArgumentError("wavelength table needs at least one point");
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i].first > points_[i - 1].first)) {
      throw ArgumentError("wavelength table knots must be strictly increasing");
    }
  }
}

bool WavelengthTable::covers(double wavelength_nm) const {
  return !points_.empty() && wavelength_nm >= min_wavelength() &&
         wavelength_nm <= max_wavelength();
}

std::size_t WavelengthTable::segment(double wavelength_nm) const {
  if (points_.empty()) {
    throw OutOfRangeError("empty wavelength table", 0.0, 0.0);
  }
  if (!covers(wavelength_nm)) {
    throw OutOfRangeError(interval_message(wavelength_nm, min_wavelength(), max_wavelength()),
                          min_wavelength(), max_wavelength());
  }
  auto it = std::upper_bound(points_.begin(), points_.end(), wavelength_nm,
                             [](double w, const Point& p) { return w < p.first; });
  // it points past the knot at or below wavelength_nm
  return static_cast<std::size_t>(std::distance(points_.begin(), it)) - 1;
}

double WavelengthTable::at(double wavelength_nm) const {
  const std::size_t i = segment(wavelength_nm);
  const auto& [x0, y0] = points_[i];
  if (wavelength_nm == x0 || i + 1 == points_.size()) return y0;
  const auto& [x1, y1] = points_[i + 1];
  const double t = (wavelength_nm - x0) / (x1 - x0);
  return y0 + t * (y1 - y0);
}

double WavelengthTable::at_log(double wavelength_nm) const {
  const std::size_t i = segment(wavelength_nm);
  const auto& [x0, y0] = points_[i];
  if (wavelength_nm == x0 || i + 1 == points_.size()) return y0;
  const auto& [x1, y1] = points_[i + 1];
  const double t = (wavelength_nm - x0) / (x1 - x0);
  if (y0 <= 0.0 || y1 <= 0.0) return y0 + t * (y1 - y0);
  return std::exp(std::log(y0) + t * (std::log(y1) - std::log(y0)));
}

std::string_view to_string(FiberFamily family) {
  switch (family) {
    case FiberFamily::G652AB_legacy:
      return "G652AB_legacy";
    case FiberFamily::G652D:
      return "G652D";
    case FiberFamily::G657A1:
      return "G657A1";
  }
  return "unknown";
}

FiberFamily fiber_family_from_string(std::string_view name) {
  if (name == "G652AB_legacy" || name == "G652AB" || name == "G.652.A/B") {
    return FiberFamily::G652AB_legacy;
  }
  if (name == "G652D" || name == "G.652.D") return FiberFamily::G652D;
  if (name == "G657A1" || name == "G.657.A1") return FiberFamily::G657A1;
  throw ArgumentError("unknown fiber family '" + std::string(name) +
                      "' (expected G652AB_legacy, G652D or G657A1)");
}

double BackscatterCoefficient::at(double wavelength_nm) const {
  auto it = per_wavelength_db.find(wavelength_nm);
  return it != per_wavelength_db.end() ? it->second : default_db;
}

void FiberProfile::validate() const {
  if (attenuation.empty()) {
    throw ArgumentError("fiber profile '" + name + "' has no attenuation points");
  }
  for (const auto& [wl, att] : attenuation.points()) {
    if (!(att > 0.0)) {
      std::ostringstream os;
      os << "fiber profile '" << name << "': attenuation at " << wl << " nm must be > 0";
      throw ArgumentError(os.str());
    }
  }
  if (!(backscatter_b0.default_db < 0.0)) {
    throw ArgumentError("fiber profile '" + name + "': backscatter_b0 must be < 0 dB");
  }
  for (const auto& [wl, b0] : backscatter_b0.per_wavelength_db) {
    if (!(b0 < 0.0)) {
      throw ArgumentError("fiber profile '" + name + "': backscatter_b0 must be < 0 dB");
    }
  }
}

void BendSpec::validate() const {
  if (turns < 1) throw ArgumentError("bend must have at least one turn");
  if (!(radius_mm > 0.0)) throw ArgumentError("bend radius must be positive");
  if (loss_per_turn.empty()) throw ArgumentError("bend has no loss table");
  for (const auto& [wl, loss] : loss_per_turn.points()) {
    if (loss < 0.0) throw ArgumentError("bend loss per turn must be >= 0 dB");
  }
}

double attenuation_at(const FiberProfile& profile, double wavelength_nm) {
  return profile.attenuation.at(wavelength_nm);
}

double span_loss(const FiberProfile& profile, double length_km, double wavelength_nm) {
  if (length_km < 0.0) throw ArgumentError("span length must be >= 0 km");
  return attenuation_at(profile, wavelength_nm) * length_km;
}

double bend_loss(const BendSpec& bend, double wavelength_nm) {
  if (bend.turns < 1) throw ArgumentError("bend must have at least one turn");
  return bend.loss_per_turn.at_log(wavelength_nm) * bend.turns;
}

double effective_length(double attenuation_db_per_km, double length_km) {
  if (attenuation_db_per_km < 0.0) throw ArgumentError("attenuation must be >= 0 dB/km");
  if (length_km < 0.0) throw ArgumentError("length must be >= 0 km");
  const double alpha = db_per_km_to_linear(attenuation_db_per_km);
  if (alpha < kLosslessThreshold) return length_km;
  return -std::expm1(-alpha * length_km) / alpha;
}

FiberProfile default_g652d_profile() {
  FiberProfile p;
  p.name = "G652D";
  p.family = FiberFamily::G652D;
  p.attenuation = WavelengthTable({{1310.0, 0.33},
                                   {1383.0, 0.32},
                                   {1490.0, 0.24},
                                   {1550.0, 0.20},
                                   {1625.0, 0.23},
                                   {1650.0, 0.25}});
  p.backscatter_b0.default_db = -80.0;
  p.backscatter_b0.per_wavelength_db = {{1383.0, -79.0}, {1650.0, -82.0}};
  return p;
}

FiberProfile default_g652ab_legacy_profile() {
  FiberProfile p = default_g652d_profile();
  p.name = "G652AB_legacy";
  p.family = FiberFamily::G652AB_legacy;
  // OH- water peak at 1383 nm
  p.attenuation = WavelengthTable({{1310.0, 0.35},
                                   {1383.0, 1.00},
                                   {1490.0, 0.25},
                                   {1550.0, 0.21},
                                   {1625.0, 0.24},
                                   {1650.0, 0.26}});
  return p;
}

BendSpec default_g657a1_bend(int turns) {
  BendSpec b;
  b.fiber_family = FiberFamily::G657A1;
  b.radius_mm = 10.0;
  b.turns = turns;
  b.loss_per_turn = WavelengthTable({{1383.0, 0.2}, {1625.0, 1.5}, {1650.0, 2.0}});
  return b;
}

ProfileLibrary::ProfileLibrary(std::vector<FiberProfile> profiles) {
  for (auto& p : profiles) add(std::move(p));
}

void ProfileLibrary::add(FiberProfile profile) {
  profile.validate();
  std::string key = profile.name;
  profiles_.insert_or_assign(std::move(key), std::move(profile));
}

const FiberProfile& ProfileLibrary::get(std::string_view name) const {
  auto it = profiles_.find(name);
  if (it == profiles_.end()) {
    throw ArgumentError("unknown fiber profile '" + std::string(name) + "'");
  }
  return it->second;
}

bool ProfileLibrary::contains(std::string_view name) const {
  return profiles_.find(name) != profiles_.end();
}

std::vector<std::string> ProfileLibrary::names() const {
  std::vector<std::string> out;
  out.reserve(profiles_.size());
  for (const auto& [name, _] : profiles_) out.push_back(name);
  return out;
}

ProfileLibrary ProfileLibrary::defaults() {
  return ProfileLibrary({default_g652d_profile(), default_g652ab_legacy_profile()});
}

}  // namespace ponwm

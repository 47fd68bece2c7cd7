#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ponwm {

// Piecewise-linear table over wavelength (nm). Knots strictly increasing.
class WavelengthTable {
 public:
  using Point = std::pair<double, double>;

  WavelengthTable() = default;
  explicit WavelengthTable(std::vector<Point> points);

  // Linear interpolation; exact at knots. Throws OutOfRangeError naming the valid interval.
  double at(double wavelength_nm) const;
  // Interpolates log(value) linearly; falls back to linear when an end value is zero.
  double at_log(double wavelength_nm) const;

  bool covers(double wavelength_nm) const;
  double min_wavelength() const { return points_.front().first; }
  double max_wavelength() const { return points_.back().first; }
  const std::vector<Point>& points() const { return points_; }
  bool empty() const { return points_.empty(); }

 private:
  std::size_t segment(double wavelength_nm) const;
  std::vector<Point> points_;
};

enum class FiberFamily { G652AB_legacy, G652D, G657A1 };

std::string_view to_string(FiberFamily family);
FiberFamily fiber_family_from_string(std::string_view name);

// Backscatter capture level B0 for a 1 ns pulse, relative to the launched pulse.
// Per-wavelength entries are exact-match; everything else uses the scalar default.
struct BackscatterCoefficient {
  double default_db = -80.0;
  std::map<double, double> per_wavelength_db;

  double at(double wavelength_nm) const;
};

struct FiberProfile {
  std::string name;
  FiberFamily family = FiberFamily::G652D;
  WavelengthTable attenuation;  // dB/km, all values > 0
  BackscatterCoefficient backscatter_b0;

  void validate() const;
};

struct BendSpec {
  FiberFamily fiber_family = FiberFamily::G657A1;
  double radius_mm = 10.0;
  int turns = 1;
  WavelengthTable loss_per_turn;  // dB per turn

  void validate() const;
};

double attenuation_at(const FiberProfile& profile, double wavelength_nm);
double span_loss(const FiberProfile& profile, double length_km, double wavelength_nm);
double bend_loss(const BendSpec& bend, double wavelength_nm);

// (1 - exp(-a L)) / a with a the linear power attenuation; returns L in the lossless limit.
double effective_length(double attenuation_db_per_km, double length_km);

// Shipped stand-in tables. All are overridable through scenario config.
FiberProfile default_g652d_profile();
FiberProfile default_g652ab_legacy_profile();
BendSpec default_g657a1_bend(int turns = 1);

// Name -> profile lookup used when resolving fiber spans.
class ProfileLibrary {
 public:
  ProfileLibrary() = default;
  explicit ProfileLibrary(std::vector<FiberProfile> profiles);

  void add(FiberProfile profile);
  const FiberProfile& get(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;

  // G.652.D and legacy G.652.A/B defaults.
  static ProfileLibrary defaults();

 private:
  std::map<std::string, FiberProfile, std::less<>> profiles_;
};

}  // namespace ponwm

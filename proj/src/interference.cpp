#include "ponwm/interference.hpp"

#include <ostream>

#include "json.hpp"
#include "ponwm/error.hpp"

namespace ponwm {

namespace {

// pass/fail comparisons tolerate accumulated rounding in the dB sums
constexpr double kComparisonTolerance = 1e-12;

}  // namespace

void InterferenceSpec::validate() const {
  if (isolation_db < 0.0) throw ArgumentError("isolation must be >= 0 dB");
  if (path_loss_headend_to_post_splitter_db < 0.0) throw ArgumentError("path loss must be >= 0 dB");
}

double max_headend_power(const InterferenceSpec& spec) {
  spec.validate();
  return spec.penalty_free_post_splitter_dbm + spec.path_loss_headend_to_post_splitter_db;
}

double receiver_interference(double post_splitter_power_dbm, double isolation_db) {
  if (isolation_db < 0.0) throw ArgumentError("isolation must be >= 0 dB");
  return post_splitter_power_dbm - isolation_db;
}

LaunchCheck check_launch(double launch_dbm, double path_loss_db, const InterferenceSpec& spec) {
  LaunchCheck c;
  c.launch_dbm = launch_dbm;
  c.post_splitter_dbm = launch_dbm - path_loss_db;
  c.threshold_dbm = spec.penalty_free_post_splitter_dbm;
  c.margin_db = c.threshold_dbm - c.post_splitter_dbm;
  c.pass = c.margin_db >= -kComparisonTolerance;
  c.receiver_interference_dbm = receiver_interference(c.post_splitter_dbm, spec.isolation_db);
  return c;
}

LaunchCheck check_launch(const PonTopology& topology, const OtdrSpec& otdr,
                         const ProfileLibrary& profiles, double launch_dbm,
                         const InterferenceSpec& spec) {
  spec.validate();
  return check_launch(launch_dbm, post_splitter_loss(topology, profiles, otdr.wavelength_nm),
                      spec);
}

void write_launch_json(const LaunchCheck& check, std::ostream& out) {
  nlohmann::ordered_json j;
  j["launch_dbm"] = check.launch_dbm;
  j["post_splitter_dbm"] = check.post_splitter_dbm;
  j["threshold_dbm"] = check.threshold_dbm;
  j["pass"] = check.pass;
  j["margin_db"] = check.margin_db;
  j["receiver_interference_dbm"] = check.receiver_interference_dbm;
  out << j.dump(2) << '\n';
}

}  // namespace ponwm

#pragma once

#include <iosfwd>

#include "ponwm/otdr.hpp"
#include "ponwm/topology.hpp"

namespace ponwm {

struct InterferenceSpec {
  double penalty_free_post_splitter_dbm = -7.8;  // measured zero-penalty level
  double isolation_db = 40.0;                    // ONT filter rejection near 1380 nm
  double path_loss_headend_to_post_splitter_db = 0.0;

  void validate() const;
};

struct LaunchCheck {
  double launch_dbm = 0.0;
  double post_splitter_dbm = 0.0;
  double threshold_dbm = 0.0;
  bool pass = false;
  double margin_db = 0.0;  // threshold - actual; negative on failure
  double receiver_interference_dbm = 0.0;
};

double max_headend_power(const InterferenceSpec& spec);
double receiver_interference(double post_splitter_power_dbm, double isolation_db);

// The headend->post-splitter loss is taken from the topology at the OTDR wavelength;
// spec.path_loss_headend_to_post_splitter_db is ignored.
LaunchCheck check_launch(const PonTopology& topology, const OtdrSpec& otdr,
                         const ProfileLibrary& profiles, double launch_dbm,
                         const InterferenceSpec& spec);
LaunchCheck check_launch(double launch_dbm, double path_loss_db, const InterferenceSpec& spec);

void write_launch_json(const LaunchCheck& check, std::ostream& out);

}  // namespace ponwm

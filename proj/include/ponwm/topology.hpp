#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ponwm/optics.hpp"

namespace ponwm {

// 1xN passive splitter. Total loss is the ideal 10*log10(N) split plus a tabulated excess.
struct Splitter {
  int ports = 32;
  WavelengthTable excess_loss;  // dB
  double uniformity_db = 0.0;   // max port-to-port spread
  // When set, the monitored output port; its loss gets a deterministic offset
  // in [-uniformity/2, +uniformity/2] derived from (port, seed).
  std::optional<int> port;
  std::uint64_t seed = 0;

  void validate() const;
};

// 32-way PLC splitter with excess loss fitted to 15.76 dB @1383 and 16.13 dB @1650.
Splitter default_splitter_32();

double ideal_split_loss(int ports);
double splitter_loss(const Splitter& splitter, double wavelength_nm);
// Offset of one output port relative to the mean, in [-uniformity/2, uniformity/2].
double splitter_port_offset(const Splitter& splitter, int port);

struct FiberSpan {
  std::string profile;
  double length_km = 0.0;
};
struct Connector {
  double loss_db = 0.0;
};
struct Voa {
  double setting_db = 0.0;
};
struct Vbr {
  double reflectance_db = -60.0;
};
struct OntTermination {
  double orl_db = 40.0;
};

using PathElement =
    std::variant<FiberSpan, Splitter, BendSpec, Connector, Voa, Vbr, OntTermination>;

std::string_view element_kind(const PathElement& element);
bool is_reflector(const PathElement& element);

// Ordered headend -> termination chain. Immutable once built.
class PonTopology {
 public:
  PonTopology() = default;
  PonTopology(std::string name, std::vector<PathElement> elements);

  const std::string& name() const { return name_; }
  const std::vector<PathElement>& elements() const { return elements_; }
  bool empty() const { return elements_.empty(); }

  // Reflectance (dB, <= 0) of the terminating reflector, if any.
  std::optional<double> terminal_reflectance_db() const;
  double total_length_km() const;

  PonTopology with_element(std::size_t index, PathElement element) const;
  PonTopology with_termination(PathElement reflector) const;
  PonTopology without_termination() const;

 private:
  void validate() const;
  std::string name_;
  std::vector<PathElement> elements_;
};

// Fails if `head` already ends in a reflector.
PonTopology concat(const PonTopology& head, const PonTopology& tail);

enum class BudgetClassId { Bplus, Cplus, D };

struct BudgetClass {
  BudgetClassId id = BudgetClassId::Cplus;
  double max_odn_loss_db = 32.0;
};

std::string_view to_string(BudgetClassId id);
BudgetClassId budget_class_from_string(std::string_view name);
BudgetClass budget_of(BudgetClassId id);

double element_loss(const PathElement& element, const ProfileLibrary& profiles,
                    double wavelength_nm);
double path_loss(const PonTopology& topology, const ProfileLibrary& profiles,
                 double wavelength_nm);
// Loss from the headend up to and including the first splitter.
double post_splitter_loss(const PonTopology& topology, const ProfileLibrary& profiles,
                          double wavelength_nm);

struct VoaAdjustment {
  double setting_db = 0.0;
  PonTopology topology;
};

VoaAdjustment set_voa_for_budget(const PonTopology& topology, const ProfileLibrary& profiles,
                                 const BudgetClass& budget, double wavelength_nm);

}  // namespace ponwm

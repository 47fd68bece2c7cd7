#include "ponwm/topology.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ponwm/error.hpp"
#include "ponwm/random.hpp"

namespace ponwm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate_element(const PathElement& element) {
  std::visit(overloaded{
                 [](const FiberSpan& s) {
                   if (s.length_km < 0.0) throw ArgumentError("span length must be >= 0 km");
                   if (s.profile.empty()) throw ArgumentError("span needs a fiber profile");
                 },
                 [](const Splitter& s) { s.validate(); },
                 [](const BendSpec& b) { b.validate(); },
                 [](const Connector& c) {
                   if (c.loss_db < 0.0) throw ArgumentError("connector loss must be >= 0 dB");
                 },
                 [](const Voa& v) {
                   if (v.setting_db < 0.0) throw ArgumentError("VOA setting must be >= 0 dB");
                 },
                 [](const Vbr& v) {
                   if (v.reflectance_db > 0.0) {
                     throw ArgumentError("VBR reflectance must be <= 0 dB");
                   }
                 },
                 [](const OntTermination& o) {
                   if (o.orl_db < 0.0) throw ArgumentError("ONT ORL must be >= 0 dB");
                 },
             },
             element);
}

}  // namespace

void Splitter::validate() const {
  if (ports < 2 || ports > 128 || !is_power_of_two(ports)) {
    throw ArgumentError("splitter ports must be a power of two in [2, 128]");
  }
  if (uniformity_db < 0.0) throw ArgumentError("splitter uniformity must be >= 0 dB");
  if (excess_loss.empty()) throw ArgumentError("splitter has no excess-loss table");
  for (const auto& [wl, excess] : excess_loss.points()) {
    if (excess < 0.0) throw ArgumentError("splitter excess loss must be >= 0 dB");
  }
  if (port && (*port < 0 || *port >= ports)) {
    throw ArgumentError("splitter port index out of range");
  }
}

double ideal_split_loss(int ports) { return 10.0 * std::log10(static_cast<double>(ports)); }

Splitter default_splitter_32() {
  Splitter s;
  s.ports = 32;
  const double ideal = ideal_split_loss(32);
  s.excess_loss = WavelengthTable({{1383.0, 15.76 - ideal}, {1650.0, 16.13 - ideal}});
  s.uniformity_db = 0.69;
  return s;
}

double splitter_loss(const Splitter& splitter, double wavelength_nm) {
  double loss = ideal_split_loss(splitter.ports) + splitter.excess_loss.at(wavelength_nm);
  if (splitter.port) loss += splitter_port_offset(splitter, *splitter.port);
  return loss;
}

double splitter_port_offset(const Splitter& splitter, int port) {
  const std::uint64_t h = mix_seed(splitter.seed, static_cast<std::uint64_t>(port));
  return (unit_interval(h) - 0.5) * splitter.uniformity_db;
}

std::string_view element_kind(const PathElement& element) {
  return std::visit(overloaded{
                        [](const FiberSpan&) { return std::string_view("span"); },
                        [](const Splitter&) { return std::string_view("splitter"); },
                        [](const BendSpec&) { return std::string_view("bend"); },
                        [](const Connector&) { return std::string_view("connector"); },
                        [](const Voa&) { return std::string_view("voa"); },
                        [](const Vbr&) { return std::string_view("vbr"); },
                        [](const OntTermination&) { return std::string_view("ont"); },
                    },
                    element);
}

bool is_reflector(const PathElement& element) {
  return std::holds_alternative<Vbr>(element) || std::holds_alternative<OntTermination>(element);
}

PonTopology::PonTopology(std::string name, std::vector<PathElement> elements)
    : name_(std::move(name)), elements_(std::move(elements)) {
  validate();
}

void PonTopology::validate() const {
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    validate_element(elements_[i]);
    if (is_reflector(elements_[i]) && i + 1 != elements_.size()) {
      std::ostringstream os;
      os << "topology '" << name_ << "': reflector at element " << i
         << " must be the last element";
      throw StructuralError(os.str());
    }
  }
}

std::optional<double> PonTopology::terminal_reflectance_db() const {
  if (elements_.empty()) return std::nullopt;
  const auto& last = elements_.back();
  if (const auto* v = std::get_if<Vbr>(&last)) return v->reflectance_db;
  if (const auto* o = std::get_if<OntTermination>(&last)) return -o->orl_db;
  return std::nullopt;
}

double PonTopology::total_length_km() const {
  double total = 0.0;
  for (const auto& e : elements_) {
    if (const auto* s = std::get_if<FiberSpan>(&e)) total += s->length_km;
  }
  return total;
}

PonTopology PonTopology::with_element(std::size_t index, PathElement element) const {
  if (index >= elements_.size()) throw ArgumentError("element index out of range");
  auto copy = elements_;
  copy[index] = std::move(element);
  return PonTopology(name_, std::move(copy));
}

PonTopology PonTopology::with_termination(PathElement reflector) const {
  if (!is_reflector(reflector)) throw ArgumentError("termination must be a VBR or ONT");
  auto copy = without_termination().elements_;
  copy.push_back(std::move(reflector));
  return PonTopology(name_, std::move(copy));
}

PonTopology PonTopology::without_termination() const {
  auto copy = elements_;
  if (!copy.empty() && is_reflector(copy.back())) copy.pop_back();
  return PonTopology(name_, std::move(copy));
}

PonTopology concat(const PonTopology& head, const PonTopology& tail) {
  if (head.terminal_reflectance_db()) {
    throw StructuralError("cannot append to a topology that ends in a reflector");
  }
  auto elements = head.elements();
  elements.insert(elements.end(), tail.elements().begin(), tail.elements().end());
  return PonTopology(head.name() + "+" + tail.name(), std::move(elements));
}

std::string_view to_string(BudgetClassId id) {
  switch (id) {
    case BudgetClassId::Bplus:
      return "B+";
    case BudgetClassId::Cplus:
      return "C+";
    case BudgetClassId::D:
      return "D";
  }
  return "?";
}

BudgetClassId budget_class_from_string(std::string_view name) {
  if (name == "B+" || name == "Bplus") return BudgetClassId::Bplus;
  if (name == "C+" || name == "Cplus") return BudgetClassId::Cplus;
  if (name == "D") return BudgetClassId::D;
  throw ArgumentError("unknown budget class '" + std::string(name) +
                      "' (expected B+, C+ or D)");
}

BudgetClass budget_of(BudgetClassId id) {
  switch (id) {
    case BudgetClassId::Bplus:
      return {id, 28.0};
    case BudgetClassId::Cplus:
      return {id, 32.0};
    case BudgetClassId::D:
      return {id, 35.0};
  }
  throw ArgumentError("unknown budget class");
}

double element_loss(const PathElement& element, const ProfileLibrary& profiles,
                    double wavelength_nm) {
  return std::visit(
      overloaded{
          [&](const FiberSpan& s) {
            return span_loss(profiles.get(s.profile), s.length_km, wavelength_nm);
          },
          [&](const Splitter& s) { return splitter_loss(s, wavelength_nm); },
          [&](const BendSpec& b) { return bend_loss(b, wavelength_nm); },
          [](const Connector& c) { return c.loss_db; },
          [](const Voa& v) { return v.setting_db; },
          [](const Vbr&) { return 0.0; },
          [](const OntTermination&) { return 0.0; },
      },
      element);
}

namespace {

double accumulate_loss(const PonTopology& topology, const ProfileLibrary& profiles,
                       double wavelength_nm, std::size_t count) {
  double total = 0.0;
  const auto& elements = topology.elements();
  for (std::size_t i = 0; i < count; ++i) {
    try {
      total += element_loss(elements[i], profiles, wavelength_nm);
    } catch (const OutOfRangeError& e) {
      std::ostringstream os;
      os << "element " << i << " (" << element_kind(elements[i]) << "): " << e.what();
      throw OutOfRangeError(os.str(), e.lo(), e.hi());
    }
  }
  return total;
}

}  // namespace

double path_loss(const PonTopology& topology, const ProfileLibrary& profiles,
                 double wavelength_nm) {
  return accumulate_loss(topology, profiles, wavelength_nm, topology.elements().size());
}

double post_splitter_loss(const PonTopology& topology, const ProfileLibrary& profiles,
                          double wavelength_nm) {
  const auto& elements = topology.elements();
  auto it = std::find_if(elements.begin(), elements.end(),
                         [](const PathElement& e) { return std::holds_alternative<Splitter>(e); });
  if (it == elements.end()) {
    throw StructuralError("topology '" + topology.name() + "' has no splitter");
  }
  const auto count = static_cast<std::size_t>(std::distance(elements.begin(), it)) + 1;
  return accumulate_loss(topology, profiles, wavelength_nm, count);
}

VoaAdjustment set_voa_for_budget(const PonTopology& topology, const ProfileLibrary& profiles,
                                 const BudgetClass& budget, double wavelength_nm) {
  const auto& elements = topology.elements();
  std::optional<std::size_t> voa_index;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (std::holds_alternative<Voa>(elements[i])) {
      if (voa_index) throw StructuralError("topology has more than one VOA");
      voa_index = i;
    }
  }
  if (!voa_index) {
    throw StructuralError("topology '" + topology.name() + "' has no VOA to adjust");
  }

  const PonTopology base = topology.with_element(*voa_index, Voa{0.0});
  const double base_loss = path_loss(base, profiles, wavelength_nm);
  const double setting = budget.max_odn_loss_db - base_loss;
  if (setting < 0.0) {
    std::ostringstream os;
    os << "base loss " << base_loss << " dB exceeds the " << to_string(budget.id) << " budget of "
       << budget.max_odn_loss_db << " dB by " << -setting << " dB";
    throw InfeasibleError(os.str(), -setting);
  }
  return {setting, topology.with_element(*voa_index, Voa{setting})};
}

}  // namespace ponwm

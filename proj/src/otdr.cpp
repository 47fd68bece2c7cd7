#include "ponwm/otdr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <variant>

#include "ponwm/error.hpp"
#include "ponwm/random.hpp"

namespace ponwm {

namespace {

// Floor-level samples appended after the end of the fiber.
constexpr std::size_t kTailSamples = 16;

struct LumpedLoss {
  double position_m;
  double loss_db;
};

struct SpanSegment {
  double start_m;
  double end_m;
  double attenuation_db_per_m;
};

struct Layout {
  std::vector<LumpedLoss> lumped;
  std::vector<SpanSegment> spans;
  double end_m = 0.0;
  std::optional<double> reflectance_db;

  // One-way baseline (dB, <= 0) at distance x along the fiber.
  double baseline(double x) const {
    double level = 0.0;
    for (const auto& l : lumped) {
      if (l.position_m <= x) level -= l.loss_db;
    }
    for (const auto& s : spans) {
      const double covered = std::clamp(x, s.start_m, s.end_m) - s.start_m;
      level -= s.attenuation_db_per_m * covered;
    }
    return level;
  }
};

Layout lay_out(const PonTopology& topology, const ProfileLibrary& profiles,
               double wavelength_nm) {
  Layout layout;
  double position = 0.0;
  const auto& elements = topology.elements();
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& e = elements[i];
    try {
      if (const auto* span = std::get_if<FiberSpan>(&e)) {
        const double length_m = span->length_km * 1000.0;
        const double att = attenuation_at(profiles.get(span->profile), wavelength_nm);
        layout.spans.push_back({position, position + length_m, att / 1000.0});
        position += length_m;
      } else if (is_reflector(e)) {
        layout.reflectance_db = topology.terminal_reflectance_db();
      } else {
        layout.lumped.push_back({position, element_loss(e, profiles, wavelength_nm)});
      }
    } catch (const OutOfRangeError& err) {
      std::ostringstream os;
      os << "element " << i << " (" << element_kind(e) << "): " << err.what();
      throw OutOfRangeError(os.str(), err.lo(), err.hi());
    }
  }
  layout.end_m = position;
  return layout;
}

}  // namespace

void OtdrSpec::validate() const {
  if (!(dr_datasheet_db > 0.0)) throw ArgumentError("OTDR '" + id + "': datasheet DR must be > 0");
  if (!(datasheet_pulse_ns > 0.0) || !(operating_pulse_ns > 0.0)) {
    throw ArgumentError("OTDR '" + id + "': pulse widths must be > 0");
  }
  if (!(datasheet_averaging_s > 0.0) || !(operating_averaging_s > 0.0)) {
    throw ArgumentError("OTDR '" + id + "': averaging times must be > 0");
  }
  if (!(sample_spacing_m > 0.0)) throw ArgumentError("OTDR '" + id + "': sample spacing must be > 0");
  if (dr_effective_override_db && !(*dr_effective_override_db > 0.0)) {
    throw ArgumentError("OTDR '" + id + "': effective DR override must be > 0");
  }
}

double effective_dynamic_range(const OtdrSpec& spec) {
  if (spec.dr_effective_override_db) return *spec.dr_effective_override_db;
  return spec.dr_datasheet_db + 5.0 * std::log10(spec.operating_pulse_ns / spec.datasheet_pulse_ns) +
         2.5 * std::log10(spec.operating_averaging_s / spec.datasheet_averaging_s);
}

double backscatter_level(double b0_db, double pulse_ns) {
  if (!(pulse_ns > 0.0)) throw ArgumentError("pulse width must be > 0 ns");
  return b0_db + 10.0 * std::log10(pulse_ns);
}

double backscatter_level(const FiberProfile& profile, double wavelength_nm, double pulse_ns) {
  return backscatter_level(profile.backscatter_b0.at(wavelength_nm), pulse_ns);
}

double peak_height_from_reflectance(double reflectance_db, double backscatter_db) {
  return 5.0 * std::log10(1.0 + std::pow(10.0, (reflectance_db - backscatter_db) / 10.0));
}

double reflectance_from_peak_height(double height_db, double backscatter_db) {
  if (!(height_db > 0.0)) throw DomainError("peak height must be > 0 dB");
  // expm1 keeps precision for small heights
  return backscatter_db + 10.0 * std::log10(std::expm1(height_db / 5.0 * std::numbers::ln10));
}

double terminal_backscatter(const PonTopology& topology, const ProfileLibrary& profiles,
                            const OtdrSpec& otdr) {
  const auto& elements = topology.elements();
  for (auto it = elements.rbegin(); it != elements.rend(); ++it) {
    if (const auto* span = std::get_if<FiberSpan>(&*it)) {
      return backscatter_level(profiles.get(span->profile), otdr.wavelength_nm,
                               otdr.operating_pulse_ns);
    }
  }
  throw StructuralError("topology '" + topology.name() +
                        "' has no fiber span to define a backscatter level");
}

Trace synthesize_trace(const PonTopology& topology, const OtdrSpec& otdr,
                       const ProfileLibrary& profiles, const TraceNoise& noise) {
  otdr.validate();
  if (noise.sigma_db < 0.0) throw ArgumentError("noise sigma must be >= 0 dB");

  Trace trace;
  trace.noise_floor_db = -effective_dynamic_range(otdr);
  trace.wavelength_nm = otdr.wavelength_nm;
  trace.pulse_ns = otdr.operating_pulse_ns;
  trace.noise_sigma_db = noise.sigma_db;
  trace.seed = noise.seed;

  const double spacing = otdr.sample_spacing_m;
  const Layout layout = lay_out(topology, profiles, otdr.wavelength_nm);

  std::vector<double> raw;
  const auto fiber_samples = static_cast<std::size_t>(
      std::max(1.0, std::ceil(layout.end_m / spacing - 1e-9)));
  raw.reserve(fiber_samples + kTailSamples + 2);
  for (std::size_t i = 0; i <= fiber_samples; ++i) {
    const double d = static_cast<double>(i) * spacing;
    raw.push_back(layout.baseline(std::min(d, layout.end_m)));
  }
  if (layout.reflectance_db) {
    trace.backscatter_db = terminal_backscatter(topology, profiles, otdr);
    raw.push_back(raw.back() + peak_height_from_reflectance(*layout.reflectance_db,
                                                            trace.backscatter_db));
  } else if (!topology.empty()) {
    trace.backscatter_db = layout.spans.empty()
                               ? 0.0
                               : terminal_backscatter(topology, profiles, otdr);
  }
  if (!topology.empty()) {
    raw.insert(raw.end(), kTailSamples, -std::numeric_limits<double>::infinity());
  }

  if (noise.sigma_db > 0.0) {
    Rng rng(noise.seed);
    for (double& v : raw) v += rng.normal(0.0, noise.sigma_db);
  }

  trace.samples.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    trace.samples.push_back(
        {static_cast<double>(i) * spacing, std::max(raw[i], trace.noise_floor_db)});
  }
  return trace;
}

std::vector<ReflectiveEvent> detect_events(const Trace& trace, double margin_db) {
  if (!(margin_db > 0.0)) throw ArgumentError("detection margin must be > 0 dB");
  std::vector<ReflectiveEvent> events;
  const auto& s = trace.samples;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double level = s[i].level_db;
    const double left = s[i - 1].level_db;
    const bool local_max = level > left && (i + 1 == s.size() || level >= s[i + 1].level_db);
    if (!local_max) continue;
    const double rise = level - left;
    if (rise < margin_db) continue;

    ReflectiveEvent ev;
    ev.distance_m = s[i].distance_m;
    ev.peak_height_above_floor_db = level - trace.noise_floor_db;
    // baseline under the floor: the floor stands in, giving a lower bound on R
    const double height = left > trace.noise_floor_db ? rise : ev.peak_height_above_floor_db;
    ev.inferred_reflectance_db =
        std::min(0.0, reflectance_from_peak_height(height, trace.backscatter_db));
    events.push_back(ev);
  }
  return events;
}

double required_peak_height(double dr_effective_db, double path_loss_db, double margin_db) {
  if (!(margin_db > 0.0)) throw ArgumentError("detection margin must be > 0 dB");
  return std::max(path_loss_db - dr_effective_db + margin_db, margin_db);
}

double min_detectable_reflectance(double dr_effective_db, double path_loss_db,
                                  double backscatter_db, double margin_db) {
  const double height = required_peak_height(dr_effective_db, path_loss_db, margin_db);
  return reflectance_from_peak_height(height, backscatter_db);
}

double min_detectable_reflectance(const OtdrSpec& otdr, double path_loss_db,
                                  double backscatter_db, double margin_db) {
  return min_detectable_reflectance(effective_dynamic_range(otdr), path_loss_db, backscatter_db,
                                    margin_db);
}

double calibrate_effective_dr(std::span<const SensitivityObservation> observations,
                              double backscatter_db) {
  if (observations.empty()) throw ArgumentError("calibration needs at least one observation");

  // Seed from per-observation inversions of the threshold relation.
  double seed_sum = 0.0;
  std::size_t informative = 0;
  for (const auto& o : observations) {
    if (!(o.margin_db > 0.0)) throw ArgumentError("observation margin must be > 0 dB");
    const double height = peak_height_from_reflectance(o.min_reflectance_db, backscatter_db);
    if (height > o.margin_db) {
      seed_sum += o.path_loss_db + o.margin_db - height;
      ++informative;
    }
  }
  if (informative == 0) {
    throw DomainError("observations lie where backscatter is visible and do not constrain DR");
  }

  auto sse = [&](double dr) {
    double total = 0.0;
    for (const auto& o : observations) {
      const double r =
          min_detectable_reflectance(dr, o.path_loss_db, backscatter_db, o.margin_db) -
          o.min_reflectance_db;
      total += r * r;
    }
    return total;
  };

  // Gauss-Newton with step halving.
  double dr = seed_sum / static_cast<double>(informative);
  double current = sse(dr);
  for (int iter = 0; iter < 200; ++iter) {
    double jtr = 0.0;
    double jtj = 0.0;
    for (const auto& o : observations) {
      const double height = o.path_loss_db - dr + o.margin_db;
      if (height <= o.margin_db) continue;
      const double q = std::pow(10.0, height / 5.0);
      const double jac = -2.0 * q / (q - 1.0);
      const double r =
          min_detectable_reflectance(dr, o.path_loss_db, backscatter_db, o.margin_db) -
          o.min_reflectance_db;
      jtr += jac * r;
      jtj += jac * jac;
    }
    if (jtj == 0.0) break;
    double step = -jtr / jtj;
    double next = sse(dr + step);
    while (next > current && std::abs(step) > 1e-15) {
      step *= 0.5;
      next = sse(dr + step);
    }
    if (next > current) break;
    dr += step;
    current = next;
    if (std::abs(step) < 1e-13) break;
  }
  return dr;
}

}  // namespace ponwm

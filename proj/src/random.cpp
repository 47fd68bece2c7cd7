#include "ponwm/random.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "ponwm/error.hpp"

namespace ponwm {

namespace {

const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double Rng::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal(double mean, double stddev) {
  return mean + stddev * boost::math::quantile(kStdNormal, uniform());
}

double Rng::truncated_normal(double mean, double stddev, double lo, double hi) {
  if (!(stddev > 0.0)) throw ArgumentError("truncated normal needs stddev > 0");
  if (!(lo < hi)) throw ArgumentError("truncated normal needs lo < hi");
  const double p_lo = boost::math::cdf(kStdNormal, (lo - mean) / stddev);
  const double p_hi = boost::math::cdf(kStdNormal, (hi - mean) / stddev);
  const double u = p_lo + (p_hi - p_lo) * uniform();
  double x;
  if (u <= 0.0 || u >= 1.0 || p_hi - p_lo <= 0.0) {
    // bounds sit deep in one tail; fall back to the nearer bound
    x = std::abs(lo - mean) < std::abs(hi - mean) ? lo : hi;
  } else {
    x = mean + stddev * boost::math::quantile(kStdNormal, u);
  }
  return std::clamp(x, lo, hi);
}

double truncated_normal_mean(double mean, double stddev, double lo, double hi) {
  const double a = (lo - mean) / stddev;
  const double b = (hi - mean) / stddev;
  const double z = boost::math::cdf(kStdNormal, b) - boost::math::cdf(kStdNormal, a);
  return mean + stddev * (boost::math::pdf(kStdNormal, a) - boost::math::pdf(kStdNormal, b)) / z;
}

}  // namespace ponwm

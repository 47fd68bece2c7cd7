#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace ponwm {

// Classical fixed-step RK4 for y' = f(z, y) on [0, length]; the last step is
// shortened to land exactly on `length`. `observe(z, y)` sees every accepted state.
template <std::size_t N, class F, class Observer>
std::array<double, N> rk4_integrate(F&& f, std::array<double, N> y, double length, double step,
                                    Observer&& observe) {
  using State = std::array<double, N>;
  auto axpy = [](const State& a, double h, const State& k) {
    State out;
    for (std::size_t i = 0; i < N; ++i) out[i] = a[i] + h * k[i];
    return out;
  };

  const auto steps = static_cast<std::size_t>(std::ceil(length / step - 1e-12));
  observe(0.0, y);
  for (std::size_t n = 0; n < steps; ++n) {
    const double z = static_cast<double>(n) * step;
    const double h = std::min(step, length - z);
    const State k1 = f(z, y);
    const State k2 = f(z + 0.5 * h, axpy(y, 0.5 * h, k1));
    const State k3 = f(z + 0.5 * h, axpy(y, 0.5 * h, k2));
    const State k4 = f(z + h, axpy(y, h, k3));
    for (std::size_t i = 0; i < N; ++i) {
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    observe(z + h, y);
  }
  return y;
}

template <std::size_t N, class F>
std::array<double, N> rk4_integrate(F&& f, std::array<double, N> y, double length, double step) {
  return rk4_integrate(std::forward<F>(f), y, length, step, [](double, const auto&) {});
}

}  // namespace ponwm

#pragma once

#include <array>
#include <cstddef>

namespace ehss {

/// One classical 4th-order Runge-Kutta step for dy/dt = f(t, y).
/// f maps (double, const std::array<double,N>&) -> std::array<double,N>.
template <std::size_t N, class F>
std::array<double, N> rk4_step(const F& f, double t, const std::array<double, N>& y, double dt) {
    std::array<double, N> k1 = f(t, y);
    std::array<double, N> tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    std::array<double, N> k2 = f(t + 0.5 * dt, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    std::array<double, N> k3 = f(t + 0.5 * dt, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + dt * k3[i];
    std::array<double, N> k4 = f(t + dt, tmp);
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

}  // namespace ehss

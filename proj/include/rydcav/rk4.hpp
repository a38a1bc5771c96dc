#pragma once

namespace rydcav {

// One classical fourth-order Runge-Kutta step for an autonomous system
// dy/dt = f(y). State needs `State + State` and `double * State`.
template <class State, class Deriv>
State rk4_step(const State& y, double h, Deriv&& f) {
  const State k1 = f(y);
  const State k2 = f(y + (0.5 * h) * k1);
  const State k3 = f(y + (0.5 * h) * k2);
  const State k4 = f(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace rydcav

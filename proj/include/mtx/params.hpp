#pragma once

#include <numbers>

namespace mtx {

constexpr double kPi = std::numbers::pi;

// Exponent/weight pair of the functional (e^{alpha u^2} - 1) / |x|^beta.
struct Params {
  double alpha = 4.0 * kPi;
  double beta = 0.0;
  bool on_boundary = true;

  // Validates and snaps alpha onto the critical line when it lies within
  // a relative 1e-6 of it.
  static Params make(double alpha, double beta);
  static Params critical(double beta) { return make(4.0 * kPi * (1.0 - 0.5 * beta), beta); }

  double a() const { return 1.0 - 0.5 * beta; }
};

}  // namespace mtx

#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace kreinlab {

using Complex = std::complex<double>;

inline constexpr double kInvFourPi = 0.25 * std::numbers::inv_pi;

// conj(a) * b with a fixed operation order, so that conj_mul(b, a) is the
// exact conjugate of conj_mul(a, b).
inline Complex conj_mul(Complex a, Complex b) noexcept {
  const double re = a.real() * b.real() + a.imag() * b.imag();
  const double im = a.real() * b.imag() - a.imag() * b.real();
  return {re, im};
}

// A value together with an absolute error bound.
struct Estimate {
  Complex value{};
  double error = 0.0;
};

inline Estimate operator+(const Estimate& x, const Estimate& y) { return {x.value + y.value, x.error + y.error}; }
inline Estimate operator-(const Estimate& x, const Estimate& y) { return {x.value - y.value, x.error + y.error}; }
inline Estimate operator*(Complex s, const Estimate& x) { return {s * x.value, std::abs(s) * x.error}; }
inline Estimate operator*(const Estimate& x, const Estimate& y) {
  return {x.value * y.value,
          std::abs(x.value) * y.error + std::abs(y.value) * x.error + x.error * y.error};
}
inline Estimate conj(const Estimate& x) { return {std::conj(x.value), x.error}; }

}  // namespace kreinlab

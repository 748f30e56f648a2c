#pragma once

// Cosine/sine integrals and the Polya kernel phi_a = F^{-1} min{1, a/|xi|}.
//
// For x != 0,
//   phi_a(x) = (1/pi) ( sin(ax)/x - a Ci(a|x|) ),
// obtained by splitting the inverse transform at |xi| = a; the [a, inf)
// part reduces to the cosine integral.  phi_a has a logarithmic
// singularity at 0 and decays like cos(ax)/(pi a x^2).

#include "dissipert/core.hpp"

#include <utility>

namespace dissipert {

struct CiSi {
  double ci;
  double si;
};

/// Cosine and sine integrals for x > 0.  Power series below 2, modified
/// Lentz continued fraction for E1(ix) above.
inline CiSi cisi(double x) {
  constexpr double kEps = 1e-16;
  constexpr int kMaxIt = 300;
  constexpr double kEuler = 0.57721566490153286060651209008240243;
  if (!(x > 0.0)) throw DomainError("cisi requires x > 0");
  if (x > 2.0) {
    cplx b{1.0, x};
    cplx c{1e300, 0.0};
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 2; i <= kMaxIt; ++i) {
      const double a = -(i - 1.0) * (i - 1.0);
      b += 2.0;
      d = 1.0 / (a * d + b);
      c = b + a / c;
      const cplx del = c * d;
      h *= del;
      if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < kEps) break;
    }
    h *= cplx{std::cos(x), -std::sin(x)};
    return {-h.real(), kPi / 2.0 + h.imag()};
  }
  // series: Si = sum (-1)^k x^{2k+1} / ((2k+1)(2k+1)!),
  //         Ci = euler + ln x + sum (-1)^k x^{2k} / (2k (2k)!)
  double sums = 0.0, sumc = 0.0;
  double sum = 0.0, sign = 1.0, fact = 1.0;
  bool odd = true;
  for (int k = 1; k <= kMaxIt; ++k) {
    fact *= x / k;
    const double term = fact / k;
    sum += sign * term;
    const double err = term / std::abs(sum);
    if (odd) {
      sign = -sign;
      sums = sum;
      sum = sumc;
    } else {
      sumc = sum;
      sum = sums;
    }
    if (err < kEps) break;
    odd = !odd;
  }
  return {sumc + std::log(x) + kEuler, sums};
}

/// Pointwise Polya kernel phi_a(x); even in x, log-singular at 0.
inline double polya_kernel(double a, double x) {
  const double ax = std::abs(a * x);
  if (ax < 1e-300) return (a / kPi) * (1.0 + 690.0);  // finite stand-in at 0
  const double s = (x == 0.0) ? a : std::sin(a * x) / x;
  return (s - a * cisi(ax).ci) / kPi;
}

namespace detail {

/// Antiderivative of phi_1: F(u) = (Si(u) - u Ci(u) + sin u)/pi, F(0)=0.
inline double polya_antiderivative(double u) {
  if (u <= 0.0) return 0.0;
  const CiSi v = cisi(u);
  return (v.si - u * v.ci + std::sin(u)) / kPi;
}

inline double polya_signed(double u) {
  return std::sin(u) / u - cisi(u).ci;
}

}  // namespace detail

/// L^1 norm of phi_a.  Zeros of phi_a are located by bisection and the
/// integral between consecutive zeros is taken from the closed-form
/// antiderivative; the tail beyond a|x| = V uses the asymptotic
/// |phi_1(u)| ~ |cos u| / (pi u^2) with its oscillatory correction.
inline double polya_l1_norm(double a) {
  if (!(a > 0.0)) throw DomainError("polya_l1_norm requires a > 0");
  const double kV = 2.0e4;  // cutoff in u = a x units
  const double x_max = kV / a;

  // sign-change scan in x, step pi/(16 a)
  const double step = kPi / (16.0 * a);
  double total = 0.0;
  double x_prev = 0.05 / a;
  double f_prev = detail::polya_signed(a * x_prev);
  double last_break = 0.0;  // F(0) = 0
  double x = x_prev;
  while (x < x_max) {
    const double x_next = std::min(x + step, x_max);
    const double f_next = detail::polya_signed(a * x_next);
    if ((f_prev < 0.0) != (f_next < 0.0)) {
      double lo = x, hi = x_next, flo = f_prev;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = detail::polya_signed(a * mid);
        if ((flo < 0.0) == (fm < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
        if (hi - lo < 1e-14 * (1.0 + mid)) break;
      }
      const double z = 0.5 * (lo + hi);
      const double Fz = detail::polya_antiderivative(a * z);
      total += std::abs(Fz - last_break);
      last_break = Fz;
    }
    x = x_next;
    f_prev = f_next;
  }
  total += std::abs(detail::polya_antiderivative(a * x_max) - last_break);

  // tail: (1/pi) int_V^inf |cos u|/u^2 du plus oscillatory correction
  double corr = 0.0;
  for (int k = 1; k <= 6; ++k) {
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    corr += sgn * std::sin(2.0 * k * kV) / (k * (4.0 * k * k - 1.0) * kV * kV);
  }
  const double tail = (2.0 / (kPi * kPi)) * (1.0 / kV) + (2.0 / (kPi * kPi)) * corr;
  return 2.0 * (total + tail);
}

}  // namespace dissipert

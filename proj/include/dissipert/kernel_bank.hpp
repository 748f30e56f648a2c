#pragma once

// Littlewood-Paley kernel bank: the smooth bump w with
// supp w = [1/2, 2] and w(x) = 1 - w(x/2) on [1, 2], so that
// sum_n w(x/2^n) = 1 for every x > 0, plus the de la Vallee Poussin
// multiplier v (v = 1 on [-1,1], v(x) = w(|x|) for |x| >= 1).

#include "dissipert/core.hpp"

#include <map>

namespace dissipert {

/// exp(-1/u) for u > 0, else 0; the standard C-infinity glue.
inline double bump_psi(double u) {
  return u > 0.0 ? std::exp(-1.0 / u) : 0.0;
}

/// Smooth step: 0 for u <= 0, 1 for u >= 1, C-infinity monotone between.
inline double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = bump_psi(u);
  const double b = bump_psi(1.0 - u);
  return a / (a + b);
}

/// The base bump: w(x) = s(2x-1) on [1/2,1], w(x) = 1 - w(x/2) on [1,2].
inline double lp_bump(double x) {
  if (x <= 0.5 || x >= 2.0) return 0.0;
  if (x <= 1.0) return smooth_step(2.0 * x - 1.0);
  return 1.0 - smooth_step(x - 1.0);
}

/// de la Vallee Poussin multiplier.
inline double vp_multiplier(double x) {
  const double ax = std::abs(x);
  if (ax <= 1.0) return 1.0;
  return lp_bump(ax);
}

/// A second admissible bump (wider transition), used to check that
/// Littlewood-Paley series do not depend on the choice of w.
inline double lp_bump_alt(double x) {
  if (x <= 0.5 || x >= 2.0) return 0.0;
  auto s = [](double u) {
    // smoothstep-of-smoothstep: still C-infinity, different shape
    double v = smooth_step(u);
    return smooth_step(v);
  };
  if (x <= 1.0) return s(2.0 * x - 1.0);
  return 1.0 - s(x - 1.0);
}

class LPKernelBank {
 public:
  using Bump = double (*)(double);

  LPKernelBank(int n_min, int n_max, Bump bump = &lp_bump)
      : n_min_(n_min), n_max_(n_max), bump_(bump) {
    if (n_min > n_max) throw Error("LPKernelBank: n_min > n_max");
  }

  int n_min() const { return n_min_; }
  int n_max() const { return n_max_; }

  double w(double x) const { return bump_(x); }

  /// Frequency multiplier of W_n: x -> w(x / 2^n).
  double kernel(int n, double x) const { return bump_(std::ldexp(x, -n)); }

  /// Frequency multiplier of V_n: x -> v(x / 2^n).
  double vp_kernel(int n, double x) const {
    const double y = std::abs(std::ldexp(x, -n));
    if (y <= 1.0) return 1.0;
    return bump_(y);
  }

  /// sum over the bank range of w(x / 2^n); equals 1 on the covered range.
  double partition_sum(double x) const {
    double s = 0.0;
    for (int n = n_min_; n <= n_max_; ++n) s += kernel(n, x);
    return s;
  }

  /// True when the partition of unity is complete over [lo, hi].
  bool covers(Interval band) const {
    if (band.lo <= 0.0) return false;
    return band.lo >= std::ldexp(1.0, n_min_) &&
           band.hi <= std::ldexp(1.0, n_max_);
  }

 private:
  int n_min_;
  int n_max_;
  Bump bump_;
};

inline LPKernelBank build_kernel_bank(int n_min, int n_max) {
  return LPKernelBank(n_min, n_max);
}

}  // namespace dissipert

#pragma once

// Besov / Holder-Zygmund machinery over GridFunction: Littlewood-Paley
// pieces, seminorms, moduli of continuity and their tail transforms, the
// Polya kernel and the shifted functions f_(a).

#include "dissipert/core.hpp"
#include "dissipert/grid_function.hpp"
#include "dissipert/kernel_bank.hpp"
#include "dissipert/special_functions.hpp"

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

namespace dissipert {

// ---------------------------------------------------------------------------
// Littlewood-Paley pieces

/// f_n = f * W_n, realized as the frequency multiplier w(x/2^n).  The
/// reflected term f * W_n^sharp vanishes identically for analytic-class f
/// and non-analytic input is rejected rather than symmetrized.
inline GridFunction lp_piece(const GridFunction& f, int n,
                             const LPKernelBank& bank) {
  f.require_analytic_class("lp_piece");
  const double lo = std::ldexp(1.0, n - 1), hi = std::ldexp(1.0, n + 1);
  Interval nb{std::max(f.band().lo, lo), std::min(f.band().hi, hi)};
  if (nb.lo > nb.hi) return GridFunction::zero();
  auto mult = [&bank, n](double xi) -> cplx { return bank.kernel(n, xi); };
  return f.multiplied(mult, nb);
}

/// f * V_n (low-pass; identity when band(f) lies in [0, 2^n]).
inline GridFunction vp_piece(const GridFunction& f, int n,
                             const LPKernelBank& bank) {
  f.require_analytic_class("vp_piece");
  if (f.band().hi <= std::ldexp(1.0, n)) return f;
  Interval nb{f.band().lo, std::min(f.band().hi, std::ldexp(1.0, n + 1))};
  auto mult = [&bank, n](double xi) -> cplx { return bank.vp_kernel(n, xi); };
  return f.multiplied(mult, nb);
}

/// f - f * V_n (high-pass remainder used by the V_N split).
inline GridFunction vp_residual(const GridFunction& f, int n,
                                const LPKernelBank& bank) {
  f.require_analytic_class("vp_residual");
  const double cut = std::ldexp(1.0, n);
  if (f.band().hi <= cut) return GridFunction::zero();
  Interval nb{std::max(f.band().lo, cut), f.band().hi};
  auto mult = [&bank, n](double xi) -> cplx {
    return 1.0 - bank.vp_kernel(n, xi);
  };
  return f.multiplied(mult, nb);
}

// ---------------------------------------------------------------------------
// Sweep evaluator: fixed evaluation grid x frequency nodes, reused across
// multiplier sweeps (difference operators, LP pieces).  sup norms are grid
// maxima and therefore lower estimates of the true sup.

class SweepEvaluator {
 public:
  explicit SweepEvaluator(const GridFunction& f, double half_width = 64.0,
                          int points = 8193) {
    for (const auto& a : f.atoms()) {
      nodes_.push_back(a.node);
      coeffs_.push_back(a.coeff);
    }
    if (f.profile()) {
      auto samples = f.freq_samples(std::max(half_width, 1.0));
      for (std::size_t i = f.atoms().size(); i < samples.size(); ++i) {
        nodes_.push_back(samples[i].node);
        coeffs_.push_back(samples[i].value * samples[i].weight / kTwoPi);
      }
    }
    xs_.resize(points);
    const double h = 2.0 * half_width / (points - 1);
    for (int j = 0; j < points; ++j) xs_[j] = -half_width + j * h;
    basis_.resize(points, static_cast<Eigen::Index>(nodes_.size()));
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      const cplx rot = std::exp(kI * nodes_[k] * h);
      cplx cur = std::exp(kI * nodes_[k] * xs_[0]);
      for (int j = 0; j < points; ++j) {
        basis_(j, static_cast<Eigen::Index>(k)) = cur;
        cur *= rot;
      }
    }
  }

  std::size_t node_count() const { return nodes_.size(); }

  /// sup_x |sum_k m(nu_k) c_k e^{i nu_k x}| over the grid.
  double sup_with_multiplier(
      const std::function<cplx(double)>& m) const {
    if (nodes_.empty()) return 0.0;
    Eigen::VectorXcd d(static_cast<Eigen::Index>(nodes_.size()));
    for (std::size_t k = 0; k < nodes_.size(); ++k)
      d(static_cast<Eigen::Index>(k)) = m(nodes_[k]) * coeffs_[k];
    return (basis_ * d).cwiseAbs().maxCoeff();
  }

  /// sup of the m-th difference: multiplier (e^{i nu t} - 1)^m.
  double sup_difference(double t, int m) const {
    return sup_with_multiplier([t, m](double nu) -> cplx {
      return std::pow(std::exp(kI * nu * t) - 1.0, m);
    });
  }

  double sup() const {
    return sup_with_multiplier([](double) -> cplx { return 1.0; });
  }

 private:
  std::vector<double> nodes_;
  std::vector<cplx> coeffs_;
  std::vector<double> xs_;
  Eigen::MatrixXcd basis_;
};

// ---------------------------------------------------------------------------
// Besov seminorm

/// ell^q over n of 2^{ns} ||f_n||_{L^p}.  L^inf by grid max, L^p by grid
/// quadrature on the function's own time grid.
inline double besov_seminorm(const GridFunction& f, double s, double p,
                             double q, const LPKernelBank& bank) {
  f.require_analytic_class("besov_seminorm");
  if (f.is_zero()) return 0.0;
  if (!bank.covers(f.band()))
    throw KernelRangeError("band not covered by the kernel bank range");
  std::vector<double> piece_norms;
  std::optional<SweepEvaluator> ev;
  if (std::isinf(p)) ev.emplace(f);
  for (int n = bank.n_min(); n <= bank.n_max(); ++n) {
    const double lo = std::ldexp(1.0, n - 1), hi = std::ldexp(1.0, n + 1);
    if (hi <= f.band().lo || lo >= f.band().hi) {
      piece_norms.push_back(0.0);
      continue;
    }
    double norm_p;
    if (std::isinf(p)) {
      norm_p = ev->sup_with_multiplier(
          [&bank, n](double xi) -> cplx { return bank.kernel(n, xi); });
    } else {
      norm_p = lp_piece(f, n, bank).lp_norm(p);
    }
    piece_norms.push_back(norm_p * std::pow(2.0, n * s));
  }
  if (std::isinf(q)) {
    double mx = 0.0;
    for (double v : piece_norms) mx = std::max(mx, v);
    return mx;
  }
  double acc = 0.0;
  for (double v : piece_norms) acc += std::pow(v, q);
  return std::pow(acc, 1.0 / q);
}

// ---------------------------------------------------------------------------
// Holder / modulus machinery

namespace detail {

/// Logarithmic t-sweep, 64 points per decade, endpoints included.
inline std::vector<double> log_sweep(double t_min, double t_max,
                                     int per_decade = 64) {
  std::vector<double> ts;
  if (t_min <= 0.0 || t_max <= t_min) throw Error("log_sweep: bad range");
  const double decades = std::log10(t_max / t_min);
  const int n = std::max(2, static_cast<int>(std::ceil(decades * per_decade)));
  for (int i = 0; i <= n; ++i)
    ts.push_back(t_min * std::pow(t_max / t_min, double(i) / n));
  return ts;
}

}  // namespace detail

/// Holder-Zygmund seminorm estimate: sup over a log-spaced t-sweep of
/// ||Delta_t^m f||_inf / t^alpha.  A lower estimate of the true sup.
inline double holder_seminorm(const GridFunction& f, double alpha, int m) {
  if (m < 1 || alpha >= double(m))
    throw OrderMismatch("holder_seminorm requires m-1 <= alpha < m");
  if (f.is_zero()) return 0.0;
  SweepEvaluator ev(f);
  const double h = f.time_grid().step();
  double best = 0.0;
  for (double t : detail::log_sweep(4.0 * h, 64.0)) {
    best = std::max(best, ev.sup_difference(t, m) / std::pow(t, alpha));
  }
  return best;
}

/// Same sweep for a closed-form scalar function on the real line.
inline double holder_seminorm(const std::function<cplx(double)>& f,
                              double alpha, int m, double half_width = 64.0,
                              int points = 2049, double t_min = 1e-4,
                              double t_max = 64.0) {
  if (m < 1 || alpha >= double(m))
    throw OrderMismatch("holder_seminorm requires m-1 <= alpha < m");
  const double h = 2.0 * half_width / (points - 1);
  double best = 0.0;
  std::vector<double> binom(static_cast<std::size_t>(m) + 1, 1.0);
  for (int j = 1; j <= m; ++j)
    binom[static_cast<std::size_t>(j)] =
        binom[static_cast<std::size_t>(j - 1)] * (m - j + 1) / j;
  for (double t : detail::log_sweep(t_min, t_max, 16)) {
    double sup = 0.0;
    for (int i = 0; i < points; ++i) {
      const double x = -half_width + i * h;
      cplx acc{0.0, 0.0};
      for (int j = 0; j <= m; ++j) {
        const double sgn = ((m - j) % 2 == 0) ? 1.0 : -1.0;
        acc += sgn * binom[static_cast<std::size_t>(j)] * f(x + j * t);
      }
      sup = std::max(sup, std::abs(acc));
    }
    best = std::max(best, sup / std::pow(t, alpha));
  }
  return best;
}

/// m-th modulus of continuity omega_{f,m}(x) = sup_{0<=h<=x} ||Delta_h^m f||.
inline double modulus_of_f(const GridFunction& f, int m, double x) {
  if (m < 1) throw OrderMismatch("modulus_of_f requires m >= 1");
  if (f.is_zero() || x <= 0.0) return 0.0;
  SweepEvaluator ev(f);
  const double h_grid = f.time_grid().step();
  double best = ev.sup_difference(x, m);  // endpoint included
  const double h_min = std::min(2.0 * h_grid, 0.25 * x);
  for (double h : detail::log_sweep(h_min, x)) {
    best = std::max(best, ev.sup_difference(h, m));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Moduli of continuity and the tail transforms omega_*, omega_{*,m}

struct Modulus {
  std::function<double(double)> eval;
  int order = 1;  // m in the doubling condition omega(2x) <= 2^m omega(x)

  double operator()(double x) const { return eval(x); }

  static Modulus power(double alpha) {
    return Modulus{[alpha](double x) { return std::pow(x, alpha); },
                   static_cast<int>(std::floor(alpha)) + 1};
  }
};

/// omega_{*,m}(x) = x^m \int_x^inf omega(t) / t^{m+1} dt, by dyadic-block
/// quadrature with geometric tail extrapolation.  Blocks that stop
/// decaying signal a divergent tail.
inline double omega_star(const Modulus& omega, int m, double x) {
  if (x <= 0.0) throw DomainError("omega_star requires x > 0");
  const double xm = std::pow(x, m);
  double acc = 0.0;
  double prev_block = -1.0;
  double prev_ratio = -1.0;
  double lo = x;
  int stagnant = 0;
  for (int k = 0; k < 400; ++k) {
    const double hi = 2.0 * lo;
    double block = 0.0;
    panel_quadrature(lo, hi, 2, 24, [&](double t, double w) {
      block += w * omega(t) / std::pow(t, m + 1);
    });
    acc += block;
    if (prev_block > 0.0) {
      const double r = block / prev_block;
      if (r >= 1.0 - 1e-9) {
        if (++stagnant >= 8)
          throw DivergentTail("omega_star: dyadic blocks do not decay");
      } else {
        stagnant = 0;
        if (block < 1e-16 * acc) return xm * acc;
        if (prev_ratio > 0.0 && std::abs(r - prev_ratio) < 1e-9 * r &&
            r < 0.999) {
          // ratio stabilized: geometric tail
          return xm * (acc + block * r / (1.0 - r));
        }
      }
      prev_ratio = r;
    }
    prev_block = block;
    lo = hi;
  }
  throw DivergentTail("omega_star: tail estimator exceeded block cap");
}

// omega_* is the m = 1 case.
inline double omega_star(const Modulus& omega, double x) {
  return omega_star(omega, 1, x);
}

// ---------------------------------------------------------------------------
// Polya kernel as a GridFunction and the shifted functions f_(a)

/// phi_a = F^{-1} min{1, a/|xi|}, carried with its closed-form evaluator
/// (the multiplier is not quadrature-integrable).
inline GridFunction phi_a(double a,
                          const TimeGridSpec& grid = TimeGridSpec{}) {
  if (!(a > 0.0)) throw DomainError("phi_a requires a > 0");
  GridFunction f = GridFunction::from_profile(
      {-1e300, 1e300}, [a](double xi) -> cplx {
        return std::min(1.0, a / std::abs(xi));
      });
  f.set_time_grid(grid);
  f.set_custom_eval([a](double x) -> cplx { return polya_kernel(a, x); });
  return f;
}

inline double phi_a_l1(double a) { return polya_l1_norm(a); }

/// f_(a) via the frequency route: (F f_(a))(xi) = xi/(xi+a) (F f)(xi+a)
/// on xi >= 0.
inline GridFunction f_sub_a(const GridFunction& f, double a) {
  if (!(a > 0.0)) throw DomainError("f_sub_a requires a > 0");
  return f.shift_sub_a(a);
}

/// Time-domain route e_{-a} (f - phi_a * f): the convolution is the
/// frequency multiplier min{1, a/|xi|}, the subtraction and modulation
/// happen on time samples.
inline std::vector<cplx> f_sub_a_time_route(const GridFunction& f, double a) {
  f.require_analytic_class("f_sub_a_time_route");
  GridFunction lowpass = f.multiplied(
      [a](double xi) -> cplx { return std::min(1.0, a / std::abs(xi)); },
      std::nullopt, {a});
  const auto& sf = f.time_samples();
  const auto& sl = lowpass.time_samples();
  const TimeGridSpec& g = f.time_grid();
  std::vector<cplx> out(sf.size());
  for (std::size_t j = 0; j < sf.size(); ++j) {
    const double x = g.point(static_cast<int>(j));
    out[j] = std::exp(-kI * a * x) * (sf[j] - sl[j]);
  }
  return out;
}

}  // namespace dissipert

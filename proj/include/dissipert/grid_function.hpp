#pragma once

// Scalar test functions carried in a dual representation: frequency data
// (atoms + a smooth profile over a declared band, with quadrature generated
// on demand) and a uniform time grid synthesized lazily.  The Fourier
// convention is (Ff)(t) = \int f(x) e^{-ixt} dx with inverse
// f(x) = (1/2pi) \int (Ff)(t) e^{+ixt} dt; every constant downstream
// depends on it.

#include "dissipert/core.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

namespace dissipert {

/// Point mass in frequency: contributes coeff * e^{i node x} to f.
/// (As a density sample this is value 2*pi*coeff with unit weight.)
struct FreqAtom {
  double node = 0.0;
  cplx coeff{0.0, 0.0};
};

struct TimeGridSpec {
  double half_width = 256.0;
  int points = (1 << 16) + 1;  // odd, symmetric about 0
  double step() const { return 2.0 * half_width / (points - 1); }
  double point(int j) const { return -half_width + j * step(); }
};

namespace detail {

/// Frequency quadrature of the continuous part, valid for evaluation
/// points up to |x| <= max_abs_x (phase-per-panel budget).
struct FreqQuad {
  double max_abs_x = 0.0;
  std::vector<double> nodes;
  std::vector<cplx> values;   // profile samples
  std::vector<double> weights;
};

}  // namespace detail

class GridFunction {
 public:
  GridFunction() = default;

  static GridFunction zero() { return GridFunction(); }

  /// Pure tone e_sigma(x) = e^{i sigma x}.
  static GridFunction tone(double sigma) {
    GridFunction f;
    f.atoms_.push_back({sigma, cplx{1.0, 0.0}});
    f.band_ = {sigma, sigma};
    f.has_band_ = true;
    return f;
  }

  static GridFunction from_atoms(std::vector<FreqAtom> atoms) {
    GridFunction f;
    f.atoms_ = std::move(atoms);
    if (!f.atoms_.empty()) {
      double lo = f.atoms_.front().node, hi = lo;
      for (const auto& a : f.atoms_) {
        lo = std::min(lo, a.node);
        hi = std::max(hi, a.node);
      }
      f.band_ = {lo, hi};
      f.has_band_ = true;
    }
    return f;
  }

  /// Continuous frequency profile over the band.  The profile should be
  /// smooth inside the band; it is sampled by composite Gauss-Legendre
  /// panels whose count adapts to the evaluation range.
  static GridFunction from_profile(Interval band,
                                   std::function<cplx(double)> profile) {
    GridFunction f;
    f.band_ = band;
    f.has_band_ = true;
    f.profile_ = std::move(profile);
    return f;
  }

  /// C-infinity bump profile on [band.lo, band.hi] with peak value `amp`
  /// at the center and all derivatives vanishing at the edges.
  static GridFunction freq_bump(Interval band, double amp = 1.0) {
    const double lo = band.lo, w = band.length();
    return from_profile(band, [lo, w, amp](double xi) -> cplx {
      double u = (xi - lo) / w;
      if (u <= 0.0 || u >= 1.0) return 0.0;
      return amp * std::exp(4.0 - 1.0 / (u * (1.0 - u)));
    });
  }

  bool is_zero() const { return atoms_.empty() && !profile_; }
  bool has_band() const { return has_band_; }
  Interval band() const { return band_; }
  bool analytic_class() const { return !has_band_ || band_.lo >= -1e-12; }

  void require_analytic_class(const char* who) const {
    if (!analytic_class())
      throw AnalyticClassViolation(std::string(who) +
                                   ": band extends below 0");
  }

  const std::vector<FreqAtom>& atoms() const { return atoms_; }
  const std::function<cplx(double)>& profile() const { return profile_; }

  const TimeGridSpec& time_grid() const { return grid_; }
  void set_time_grid(const TimeGridSpec& g) {
    grid_ = g;
    cache_ = std::make_shared<Cache>();
  }

  /// Custom closed-form time evaluation (used when the frequency data is
  /// not quadrature-integrable, e.g. the Polya kernel phi_a).
  void set_custom_eval(std::function<cplx(double)> fn) {
    custom_eval_ = std::move(fn);
    cache_ = std::make_shared<Cache>();
  }

  /// f(z).  For the continuous part this is quadrature synthesis of
  /// (1/2pi) \int profile(xi) e^{i xi z} d xi.  Analytic-class functions
  /// may be evaluated anywhere in the closed upper half-plane.
  cplx eval(cplx z) const {
    if (custom_eval_) {
      if (std::abs(z.imag()) > 1e-14)
        throw DomainError("custom-eval function is defined on the real line");
      return custom_eval_(z.real());
    }
    cplx acc{0.0, 0.0};
    for (const auto& a : atoms_) acc += a.coeff * std::exp(kI * a.node * z);
    if (profile_) {
      const detail::FreqQuad& q = quad_for(std::abs(z));
      cplx s{0.0, 0.0};
      for (std::size_t k = 0; k < q.nodes.size(); ++k)
        s += q.weights[k] * q.values[k] * std::exp(kI * q.nodes[k] * z);
      acc += s / kTwoPi;
    }
    return acc;
  }

  cplx operator()(cplx z) const { return eval(z); }

  /// k-th derivative, exact for the frequency representation:
  /// multiply by (i xi)^k under the synthesis integral.
  cplx derivative(cplx z, int k) const {
    if (custom_eval_)
      throw DomainError("derivative unavailable for custom-eval functions");
    cplx acc{0.0, 0.0};
    for (const auto& a : atoms_)
      acc += a.coeff * std::pow(kI * a.node, k) * std::exp(kI * a.node * z);
    if (profile_) {
      const detail::FreqQuad& q = quad_for(std::abs(z));
      cplx s{0.0, 0.0};
      for (std::size_t j = 0; j < q.nodes.size(); ++j)
        s += q.weights[j] * q.values[j] * std::pow(kI * q.nodes[j], k) *
             std::exp(kI * q.nodes[j] * z);
      acc += s / kTwoPi;
    }
    return acc;
  }

  /// Time samples over the uniform grid (cached; rotation recurrence).
  const std::vector<cplx>& time_samples() const {
    std::call_once(cache_->once, [this] { synthesize(); });
    return cache_->samples;
  }

  /// sup |f| over the time grid.
  double sup_norm() const {
    std::call_once(cache_->once, [this] { synthesize(); });
    return cache_->sup;
  }

  /// Grid L^p norm (trapezoid over [-X, X]); p = inf delegates to sup.
  double lp_norm(double p) const {
    if (std::isinf(p)) return sup_norm();
    const auto& s = time_samples();
    const double h = grid_.step();
    double acc = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      double w = (j == 0 || j + 1 == s.size()) ? 0.5 : 1.0;
      acc += w * std::pow(std::abs(s[j]), p);
    }
    return std::pow(acc * h, 1.0 / p);
  }

  /// Apply a frequency multiplier m(xi); optionally restrict the band and
  /// declare interior kinks of the multiplier so quadrature panels align.
  GridFunction multiplied(const std::function<cplx(double)>& m,
                          std::optional<Interval> new_band = {},
                          std::vector<double> extra_breaks = {}) const {
    if (custom_eval_)
      throw DomainError("multiplier unavailable for custom-eval functions");
    GridFunction g;
    for (const auto& a : atoms_) {
      cplx c = a.coeff * m(a.node);
      if (std::abs(c) > 0.0) g.atoms_.push_back({a.node, c});
    }
    if (profile_) {
      auto base = profile_;
      g.profile_ = [base, m](double xi) { return base(xi) * m(xi); };
    }
    g.band_ = new_band ? *new_band : band_;
    g.has_band_ = true;
    g.grid_ = grid_;
    g.breaks_ = breaks_;
    for (double b : extra_breaks) g.breaks_.push_back(b);
    return g;
  }

  /// f_(a): frequency shift by a with the xi/(xi+a) taper,
  /// (F f_(a))(xi) = xi/(xi+a) (F f)(xi+a) restricted to xi >= 0.
  GridFunction shift_sub_a(double a) const {
    require_analytic_class("shift_sub_a");
    if (custom_eval_)
      throw DomainError("shift unavailable for custom-eval functions");
    GridFunction g;
    for (const auto& at : atoms_) {
      const double nu = at.node - a;
      if (nu <= 0.0) continue;
      g.atoms_.push_back({nu, at.coeff * (nu / (nu + a))});
    }
    if (profile_ && band_.hi > a) {
      auto base = profile_;
      g.profile_ = [base, a](double xi) -> cplx {
        if (xi <= 0.0) return 0.0;
        return (xi / (xi + a)) * base(xi + a);
      };
    }
    g.band_ = {std::max(band_.lo - a, 0.0), std::max(band_.hi - a, 0.0)};
    g.has_band_ = true;
    g.grid_ = grid_;
    for (double b : breaks_) g.breaks_.push_back(b - a);
    if (g.band_.length() <= 0.0 && g.atoms_.empty()) {
      g.profile_ = nullptr;
      g.band_ = {0.0, 0.0};
    }
    return g;
  }

  GridFunction operator+(const GridFunction& other) const {
    GridFunction g;
    g.atoms_ = atoms_;
    for (const auto& a : other.atoms_) g.atoms_.push_back(a);
    if (profile_ && other.profile_) {
      auto p1 = profile_, p2 = other.profile_;
      Interval b1 = band_, b2 = other.band_;
      g.profile_ = [p1, p2, b1, b2](double xi) -> cplx {
        cplx v{0.0, 0.0};
        if (b1.contains(xi)) v += p1(xi);
        if (b2.contains(xi)) v += p2(xi);
        return v;
      };
    } else if (profile_) {
      g.profile_ = profile_;
    } else {
      g.profile_ = other.profile_;
    }
    const bool both = has_band_ && other.has_band_;
    g.band_ = {both ? std::min(band_.lo, other.band_.lo)
                    : (has_band_ ? band_.lo : other.band_.lo),
               both ? std::max(band_.hi, other.band_.hi)
                    : (has_band_ ? band_.hi : other.band_.hi)};
    g.has_band_ = has_band_ || other.has_band_;
    g.grid_ = grid_;
    g.breaks_ = breaks_;
    for (double b : other.breaks_) g.breaks_.push_back(b);
    // sub-band edges become kinks of the summed profile
    if (profile_ && other.profile_) {
      g.breaks_.push_back(band_.lo);
      g.breaks_.push_back(band_.hi);
      g.breaks_.push_back(other.band_.lo);
      g.breaks_.push_back(other.band_.hi);
    }
    return g;
  }

  GridFunction scaled(cplx c) const {
    GridFunction g = *this;
    g.cache_ = std::make_shared<Cache>();
    for (auto& a : g.atoms_) a.coeff *= c;
    if (g.profile_) {
      auto base = g.profile_;
      g.profile_ = [base, c](double xi) { return c * base(xi); };
    }
    return g;
  }

  /// Spec view of the frequency data: (node, value of Ff, weight) with
  /// atoms reported as 2*pi*coeff point masses of unit weight.
  struct FreqSampleView {
    double node;
    cplx value;
    double weight;
  };
  std::vector<FreqSampleView> freq_samples(double max_abs_x = 16.0) const {
    std::vector<FreqSampleView> out;
    for (const auto& a : atoms_) out.push_back({a.node, kTwoPi * a.coeff, 1.0});
    if (profile_) {
      const detail::FreqQuad& q = quad_for(max_abs_x);
      for (std::size_t k = 0; k < q.nodes.size(); ++k)
        out.push_back({q.nodes[k], q.values[k], q.weights[k]});
    }
    return out;
  }

 private:
  struct Cache {
    std::once_flag once;
    std::vector<cplx> samples;
    double sup = 0.0;
    std::mutex quad_mutex;
    detail::FreqQuad quad;  // largest rule built so far
  };

  const detail::FreqQuad& quad_for(double max_abs_x) const {
    std::lock_guard<std::mutex> lock(cache_->quad_mutex);
    detail::FreqQuad& q = cache_->quad;
    // round the budget up to a power of two so repeated evaluations at
    // growing |z| trigger at most log-many rebuilds
    const double need = std::exp2(std::ceil(std::log2(std::max(1.0, max_abs_x))));
    if (!q.nodes.empty() && q.max_abs_x >= need) return q;
    q.nodes.clear();
    q.values.clear();
    q.weights.clear();
    // segments split at declared kinks, then composite GL-16 with the
    // phase per panel kept below ~10 for ~1e-13 synthesis accuracy
    std::vector<double> edges{band_.lo, band_.hi};
    for (double b : breaks_)
      if (b > band_.lo + 1e-14 && b < band_.hi - 1e-14) edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
      const double lo = edges[s], hi = edges[s + 1];
      if (hi - lo < 1e-14) continue;
      int panels = static_cast<int>(std::ceil((hi - lo) * need / 10.0));
      panels = std::clamp(panels, 1, 40000);
      panel_quadrature(lo, hi, panels, 16, [&](double xi, double w) {
        q.nodes.push_back(xi);
        q.values.push_back(profile_(xi));
        q.weights.push_back(w);
      });
    }
    q.max_abs_x = need;
    return q;
  }

  void synthesize() const {
    const int n = grid_.points;
    std::vector<cplx>& out = cache_->samples;
    out.assign(static_cast<std::size_t>(n), cplx{0.0, 0.0});
    if (custom_eval_) {
      for (int j = 0; j < n; ++j)
        out[static_cast<std::size_t>(j)] = custom_eval_(grid_.point(j));
    } else {
      const double x0 = grid_.point(0);
      const double h = grid_.step();
      auto accumulate = [&](double node, cplx coeff) {
        cplx cur = coeff * std::exp(kI * node * x0);
        const cplx rot = std::exp(kI * node * h);
        for (int j = 0; j < n; ++j) {
          out[static_cast<std::size_t>(j)] += cur;
          cur *= rot;
        }
      };
      for (const auto& a : atoms_) accumulate(a.node, a.coeff);
      if (profile_) {
        const detail::FreqQuad& q = quad_for(grid_.half_width);
        for (std::size_t k = 0; k < q.nodes.size(); ++k)
          accumulate(q.nodes[k], q.weights[k] * q.values[k] / kTwoPi);
      }
    }
    double sup = 0.0;
    for (const auto& v : out) sup = std::max(sup, std::abs(v));
    cache_->sup = sup;
  }

  std::vector<FreqAtom> atoms_;
  std::function<cplx(double)> profile_;
  std::function<cplx(double)> custom_eval_;
  Interval band_{0.0, 0.0};
  bool has_band_ = false;
  std::vector<double> breaks_;
  TimeGridSpec grid_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

}  // namespace dissipert

#pragma once

// Shared scalar/matrix aliases, tolerances and the error hierarchy used
// across the library.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <cmath>
#include <cstdint>
#include <vector>

namespace dissipert {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr cplx kI{0.0, 1.0};

// Default tolerances.  Values are part of the library contract; tests pin
// against these, do not retune casually.
namespace tol {
inline constexpr double psd_rel = 1e-10;    // PSD slack, relative to ||L||
inline constexpr double mass = 1e-6;        // semi-spectral mass closure
inline constexpr double round_trip = 1e-10; // Cayley round trip
inline constexpr double contraction = 1e-12;
inline constexpr double dilation = 1e-10;
inline constexpr double func_calc = 1e-6;   // cross-route f(L) agreement
inline constexpr double bound_exact = 1e-9; // exact-constant theorem gates
inline constexpr double slope = 0.05;       // scaling-exponent window
inline constexpr double synthesis = 1e-8;   // frequency/time round trips
}  // namespace tol

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define DISSIPERT_DEFINE_ERROR(NAME)                              \
  class NAME : public Error {                                     \
   public:                                                        \
    explicit NAME(const std::string& what) : Error(#NAME ": " + what) {} \
  }

DISSIPERT_DEFINE_ERROR(AnalyticClassViolation);
DISSIPERT_DEFINE_ERROR(KernelRangeError);
DISSIPERT_DEFINE_ERROR(OrderMismatch);
DISSIPERT_DEFINE_ERROR(DivergentTail);
DISSIPERT_DEFINE_ERROR(NotDissipative);
DISSIPERT_DEFINE_ERROR(SingularShift);
DISSIPERT_DEFINE_ERROR(UnitEigenvalue);
DISSIPERT_DEFINE_ERROR(HalfPlaneViolation);
DISSIPERT_DEFINE_ERROR(NegativeTime);
DISSIPERT_DEFINE_ERROR(MassDefect);
DISSIPERT_DEFINE_ERROR(NotContraction);
DISSIPERT_DEFINE_ERROR(DomainError);
DISSIPERT_DEFINE_ERROR(SynthesisError);
DISSIPERT_DEFINE_ERROR(ConfluenceError);
DISSIPERT_DEFINE_ERROR(NotSelfAdjoint);
DISSIPERT_DEFINE_ERROR(Unsupported);
DISSIPERT_DEFINE_ERROR(NoConvergence);
DISSIPERT_DEFINE_ERROR(ShapeError);
DISSIPERT_DEFINE_ERROR(NotApplicable);
DISSIPERT_DEFINE_ERROR(SweepDegenerate);
DISSIPERT_DEFINE_ERROR(ReplayCorrupt);
DISSIPERT_DEFINE_ERROR(ParseError);

#undef DISSIPERT_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Small matrix helpers

/// Operator (spectral) norm via SVD.
inline double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
}

inline double frobenius_norm(const Matrix& a) { return a.norm(); }

/// Hermitian part (A + A*)/2.
inline Matrix hermitian_part(const Matrix& a) {
  return 0.5 * (a + a.adjoint());
}

/// Imaginary part in the operator sense, (A - A*)/(2i); Hermitian.
inline Matrix imaginary_part(const Matrix& a) {
  return (a - a.adjoint()) / (2.0 * kI);
}

inline Matrix identity_like(const Matrix& a) {
  return Matrix::Identity(a.rows(), a.cols());
}

/// Smallest eigenvalue of a Hermitian matrix.
inline double min_hermitian_eigenvalue(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// Hermitian PSD square root; negative roundoff eigenvalues are clipped.
inline Matrix psd_sqrt(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  RealVector vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    vals(i) = vals(i) > 0.0 ? std::sqrt(vals(i)) : 0.0;
  return es.eigenvectors() * vals.asDiagonal() *
         es.eigenvectors().adjoint();
}

/// Condition number estimate ||A|| * ||A^-1|| from singular values.
inline double condition_estimate(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

/// Closed interval; used for frequency bands.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// ---------------------------------------------------------------------------
// Deterministic seeding (splitmix64), used to derive per-trial seeds.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 0x51ED2701u));
}

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature (nodes/weights on [-1,1], Newton on Legendre).

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline const QuadRule& gauss_legendre(int n) {
  static thread_local std::vector<QuadRule> cache(65);
  if (n < 1 || n > 64) throw Error("gauss_legendre: order out of range");
  QuadRule& r = cache[static_cast<std::size_t>(n)];
  if (!r.nodes.empty()) return r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return r;
}

/// Composite Gauss-Legendre panels over [a,b]; calls fn(node, weight).
template <typename F>
void panel_quadrature(double a, double b, int panels, int order, F&& fn) {
  if (b <= a || panels < 1) return;
  const QuadRule& rule = gauss_legendre(order);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double x = lo + 0.5 * h * (rule.nodes[k] + 1.0);
      fn(x, 0.5 * h * rule.weights[k]);
    }
  }
}

}  // namespace dissipert

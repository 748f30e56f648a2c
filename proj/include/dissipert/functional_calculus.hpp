#pragma once

// f(L) for analytic-class f and dissipative L by independent routes:
//   oracle    - eigendecomposition V f(Lambda) V^{-1}, with a
//               Schur-Parlett fallback when kappa(V) > 1e8
//   fourier   - (1/2pi) int_0^inf (Ff)(x) exp(ixL) dx, quadrature over
//               the band with panel doubling until stable
//   density   - int f d(semi-spectral measure): atoms plus the pure-part
//               density with integration-by-parts tail corrections
//   cayley    - (f o omega)(T) through the Cayley transform
// Routes agree within tol::func_calc on the validated band-limited class.

#include "dissipert/core.hpp"
#include "dissipert/dissipative.hpp"
#include "dissipert/grid_function.hpp"
#include "dissipert/semi_spectral.hpp"

#include <functional>
#include <optional>
#include <string>

namespace dissipert {

// ---------------------------------------------------------------------------
// Scalar function handle: frequency-backed or closure-backed

class ScalarFunction {
 public:
  using Eval = std::function<cplx(cplx)>;
  using Deriv = std::function<cplx(cplx, int)>;

  ScalarFunction() = default;

  ScalarFunction(GridFunction g) : grid_(std::move(g)) {}  // NOLINT

  ScalarFunction(Eval eval, Deriv deriv = nullptr)
      : eval_(std::move(eval)), deriv_(std::move(deriv)) {}

  static ScalarFunction shifted_power(double beta) {
    return ScalarFunction(
        [beta](cplx z) { return std::pow(z + kI, beta); },
        [beta](cplx z, int k) {
          cplx c{1.0, 0.0};
          for (int j = 0; j < k; ++j) c *= (beta - j);
          return c * std::pow(z + kI, beta - k);
        });
  }

  static ScalarFunction log_shift(double c) {
    return ScalarFunction(
        [c](cplx z) { return std::log(z + kI * c); },
        [c](cplx z, int k) -> cplx {
          if (k == 0) return std::log(z + kI * c);
          double fact = 1.0;
          for (int j = 1; j < k; ++j) fact *= j;
          const double sgn = (k % 2 == 1) ? 1.0 : -1.0;
          return sgn * fact * std::pow(z + kI * c, -k);
        });
  }

  bool has_grid() const { return grid_.has_value(); }
  const GridFunction& grid() const {
    if (!grid_) throw DomainError("scalar function has no frequency data");
    return *grid_;
  }

  cplx operator()(cplx z) const {
    return grid_ ? grid_->eval(z) : eval_(z);
  }

  bool has_derivatives() const { return grid_.has_value() || bool(deriv_); }

  cplx derivative(cplx z, int k) const {
    if (k == 0) return (*this)(z);
    if (grid_) return grid_->derivative(z, k);
    if (!deriv_) throw DomainError("derivative data unavailable");
    return deriv_(z, k);
  }

  /// Pointwise product, Leibniz derivatives when both factors have them.
  ScalarFunction times(const ScalarFunction& other) const {
    ScalarFunction a = *this, b = other;
    Eval ev = [a, b](cplx z) { return a(z) * b(z); };
    if (has_derivatives() && other.has_derivatives()) {
      Deriv dv = [a, b](cplx z, int k) {
        cplx acc{0.0, 0.0};
        double binom = 1.0;
        for (int j = 0; j <= k; ++j) {
          acc += binom * a.derivative(z, j) * b.derivative(z, k - j);
          binom = binom * (k - j) / (j + 1.0);
        }
        return acc;
      };
      return ScalarFunction(ev, dv);
    }
    return ScalarFunction(ev);
  }

 private:
  std::optional<GridFunction> grid_;
  Eval eval_;
  Deriv deriv_;
};

// ---------------------------------------------------------------------------
// Matrix function core (oracle route)

struct CalcResult {
  Matrix value;
  std::string route;
  double error_estimate = 0.0;
  bool schur_fallback = false;
};

namespace detail {

/// f applied to an upper-triangular matrix by the Parlett recurrence with
/// Taylor expansion on contiguous near-confluent diagonal runs.  Requires
/// coincident eigenvalues to be adjacent in the Schur form (true for the
/// constructed degenerate cases this fallback serves).
inline Matrix parlett(const Matrix& T, const ScalarFunction& f) {
  const Eigen::Index n = T.rows();
  const double scale = std::max(1.0, operator_norm(T));
  const double run_tol = 1e-6 * scale;

  // contiguous blocks of near-equal diagonal entries
  std::vector<Eigen::Index> starts{0};
  for (Eigen::Index i = 1; i < n; ++i)
    if (std::abs(T(i, i) - T(i - 1, i - 1)) > run_tol) starts.push_back(i);
  starts.push_back(n);

  Matrix F = Matrix::Zero(n, n);
  // diagonal blocks by Taylor around the block mean
  for (std::size_t b = 0; b + 1 < starts.size(); ++b) {
    const Eigen::Index lo = starts[b], len = starts[b + 1] - lo;
    const Matrix B = T.block(lo, lo, len, len);
    cplx mu{0.0, 0.0};
    for (Eigen::Index i = 0; i < len; ++i) mu += B(i, i);
    mu /= double(len);
    Matrix N = B - mu * Matrix::Identity(len, len);
    Matrix term = Matrix::Identity(len, len);
    Matrix acc = f(mu) * term;
    double fact = 1.0;
    for (int k = 1; k <= 200; ++k) {
      term = term * N;
      fact *= k;
      if (term.norm() == 0.0) break;
      const Matrix add = (f.derivative(mu, k) / fact) * term;
      acc += add;
      if (add.norm() < 1e-18 * std::max(1.0, acc.norm()) && k > int(len))
        break;
      if (k == 200)
        throw DomainError("Taylor block in Schur-Parlett did not converge");
    }
    F.block(lo, lo, len, len) = acc;
  }

  // block Parlett recurrence: T_ii X - X T_jj = F_ii T_ij - T_ij F_jj + C
  const auto nblocks = static_cast<Eigen::Index>(starts.size() - 1);
  auto blk = [&](const Matrix& M, Eigen::Index i, Eigen::Index j) {
    return M.block(starts[static_cast<std::size_t>(i)],
                   starts[static_cast<std::size_t>(j)],
                   starts[static_cast<std::size_t>(i + 1)] -
                       starts[static_cast<std::size_t>(i)],
                   starts[static_cast<std::size_t>(j + 1)] -
                       starts[static_cast<std::size_t>(j)]);
  };
  for (Eigen::Index d = 1; d < nblocks; ++d) {
    for (Eigen::Index i = 0; i + d < nblocks; ++i) {
      const Eigen::Index j = i + d;
      Matrix C = Matrix(blk(F, i, i)) * Matrix(blk(T, i, j)) -
                 Matrix(blk(T, i, j)) * Matrix(blk(F, j, j));
      for (Eigen::Index k = i + 1; k < j; ++k)
        C += Matrix(blk(F, i, k)) * Matrix(blk(T, k, j)) -
             Matrix(blk(T, i, k)) * Matrix(blk(F, k, j));
      // solve T_ii X - X T_jj = C by Kronecker (blocks are tiny)
      const Matrix Tii = blk(T, i, i), Tjj = blk(T, j, j);
      const Eigen::Index p = Tii.rows(), q = Tjj.rows();
      Matrix A = Matrix::Zero(p * q, p * q);
      Vector rhs(p * q);
      for (Eigen::Index r = 0; r < p; ++r)
        for (Eigen::Index c = 0; c < q; ++c) {
          rhs(r * q + c) = C(r, c);
          for (Eigen::Index r2 = 0; r2 < p; ++r2)
            A(r * q + c, r2 * q + c) += Tii(r, r2);
          for (Eigen::Index c2 = 0; c2 < q; ++c2)
            A(r * q + c, r * q + c2) -= Tjj(c2, c);
        }
      Eigen::PartialPivLU<Matrix> lu(A);
      Vector x = lu.solve(rhs);
      if (!x.allFinite())
        throw DomainError("Parlett Sylvester block is singular "
                          "(coincident eigenvalues not adjacent)");
      Matrix X(p, q);
      for (Eigen::Index r = 0; r < p; ++r)
        for (Eigen::Index c = 0; c < q; ++c) X(r, c) = x(r * q + c);
      F.block(starts[static_cast<std::size_t>(i)],
              starts[static_cast<std::size_t>(j)], p, q) = X;
    }
  }
  return F;
}

}  // namespace detail

/// f(A) on a raw square matrix: diagonalization when well conditioned,
/// Schur-Parlett otherwise.
inline CalcResult matrix_function(const Matrix& A, const ScalarFunction& f) {
  CalcResult out;
  out.route = "oracle_diag";
  Eigen::ComplexEigenSolver<Matrix> es(A);
  const double cond = condition_estimate(es.eigenvectors());
  if (cond <= 1e8) {
    Vector fv(es.eigenvalues().size());
    double fmax = 0.0;
    for (Eigen::Index i = 0; i < fv.size(); ++i) {
      fv(i) = f(es.eigenvalues()(i));
      fmax = std::max(fmax, std::abs(fv(i)));
    }
    const Matrix& V = es.eigenvectors();
    out.value = V * fv.asDiagonal() * V.partialPivLu().inverse();
    out.error_estimate = cond * 1e-15 * std::max(fmax, 1.0);
    return out;
  }
  Eigen::ComplexSchur<Matrix> schur(A);
  out.value = schur.matrixU() * detail::parlett(schur.matrixT(), f) *
              schur.matrixU().adjoint();
  out.schur_fallback = true;
  out.route = "oracle_schur";
  out.error_estimate = 1e-12 * std::max(1.0, operator_norm(out.value));
  return out;
}

/// Oracle route on a classified dissipative matrix (uses cached eigendata).
inline CalcResult f_of_L_oracle(const ScalarFunction& f,
                                const DissipativeMatrix& L) {
  const Eigendata& e = L.eigendata();
  CalcResult out;
  if (!e.schur_fallback) {
    Vector fv(e.values.size());
    double fmax = 0.0;
    for (Eigen::Index i = 0; i < fv.size(); ++i) {
      fv(i) = f(e.values(i));
      fmax = std::max(fmax, std::abs(fv(i)));
    }
    out.value = e.vectors * fv.asDiagonal() * e.vectors_inv;
    out.route = "oracle_diag";
    out.error_estimate = e.condition * 1e-15 * std::max(fmax, 1.0);
    return out;
  }
  out.value = e.schur_u * detail::parlett(e.schur_t, f) * e.schur_u.adjoint();
  out.route = "oracle_schur";
  out.schur_fallback = true;
  out.error_estimate = 1e-12 * std::max(1.0, operator_norm(out.value));
  return out;
}

// ---------------------------------------------------------------------------
// Fourier synthesis route

/// f(L) = (1/2pi) int_0^inf (Ff)(x) exp(ixL) dx; panels double until two
/// refinements agree within tol/4.
inline CalcResult f_of_L_fourier(const GridFunction& f,
                                 const DissipativeMatrix& L,
                                 double tol_fc = tol::func_calc) {
  f.require_analytic_class("f_of_L_fourier");
  CalcResult out;
  out.route = "fourier_synthesis";
  const Eigen::Index n = L.size();
  Matrix atoms_part = Matrix::Zero(n, n);
  for (const auto& a : f.atoms())
    atoms_part += a.coeff * semigroup_raw(L.matrix(), a.node);
  if (!f.profile()) {
    out.value = atoms_part;
    out.error_estimate = 1e-14 * std::max(1.0, operator_norm(atoms_part));
    return out;
  }
  if (f.band().lo < -1e-12)
    throw SynthesisError("frequency data not supported on [0, inf)");
  const double len = std::max(f.band().length(), 1e-9);
  int panels = std::max(
      2, static_cast<int>(std::ceil(len * std::max(1.0, L.norm()) / 8.0)));
  auto integrate = [&](int p) {
    Matrix acc = Matrix::Zero(n, n);
    panel_quadrature(f.band().lo, f.band().hi, p, 16,
                     [&](double xi, double w) {
                       acc += (w / kTwoPi) * f.profile()(xi) *
                              semigroup_raw(L.matrix(), xi);
                     });
    return acc;
  };
  Matrix coarse = integrate(panels);
  for (int it = 0; it < 6; ++it) {
    Matrix fine = integrate(2 * panels);
    const double diff = operator_norm(Matrix(fine - coarse));
    const double scale = std::max(operator_norm(fine), 1e-12);
    if (diff < tol_fc / 4.0 * scale) {
      out.value = atoms_part + fine;
      out.error_estimate = diff;
      return out;
    }
    coarse = fine;
    panels *= 2;
  }
  throw SynthesisError("fourier route did not stabilize under refinement");
}

// ---------------------------------------------------------------------------
// Density route

namespace detail {

/// Right/left integration-by-parts tails of int e^{i xi x} g(x) dx beyond
/// the window [-X, X], to three resolvent orders.
inline Matrix density_tone_tail(const PureDensity& g, double xi, double X) {
  const cplx D = 1.0 / (kI * xi);
  const cplx er = std::exp(kI * xi * X);
  const cplx el = std::exp(-kI * xi * X);
  Matrix right = -D * er * g(X) + D * D * er * g.derivative(X, 1) -
                 D * D * D * er * g.derivative(X, 2);
  Matrix left = D * el * g(-X) - D * D * el * g.derivative(-X, 1) +
                D * D * D * el * g.derivative(-X, 2);
  return right + left;
}

}  // namespace detail

/// f(L) = int f dE_L: atoms evaluated directly; the pure-part density is
/// integrated over an oscillation-resolving window with IBP tails.
inline CalcResult f_of_L_density(const GridFunction& f,
                                 const DissipativeMatrix& L,
                                 const SemiSpectralMeasure& meas) {
  f.require_analytic_class("f_of_L_density");
  CalcResult out;
  out.route = "density_quadrature";
  const Eigen::Index n = L.size();
  Matrix acc = Matrix::Zero(n, n);
  for (const auto& [loc, atom] : meas.atoms()) acc += f.eval(loc) * atom;
  if (!meas.has_pure()) {
    out.value = acc;
    out.error_estimate = 1e-14 * std::max(1.0, operator_norm(acc));
    return out;
  }

  const auto samples = f.freq_samples(std::max(2.0, 2.0 * L.norm()));
  double xi_min = 1e300;
  for (const auto& s : samples)
    if (std::abs(s.value) > 1e-14) xi_min = std::min(xi_min, s.node);
  const double sigma = std::max(f.band().hi, 0.1);

  // window sized so the cubic IBP remainder sits below 1e-9
  const double r = operator_norm(meas.pure().block);
  double X = std::max(60.0 * (1.0 + r), 64.0);
  if (xi_min < 1e200 && xi_min > 0.02) {
    const double need =
        std::cbrt((2.0 / kPi) / (std::pow(xi_min, 3) * 1e-9));
    X = std::max(X, r + need);
  } else if (xi_min <= 0.02) {
    out.error_estimate += (2.0 / kPi) / X;  // crude low-frequency tail bound
  }

  // interior quadrature: panels refined at density peaks and sized to the
  // oscillation of f
  std::vector<double> edges = meas.panel_edges(-X, X);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i], b = edges[i + 1];
    const double len = b - a;
    int panels = std::clamp(
        static_cast<int>(std::ceil(len * std::max(sigma, 2.0 / len) / 9.0)),
        1, 100000);
    panel_quadrature(a, b, panels, 16, [&](double x, double w) {
      acc += (w * f.eval(x)) * meas.pure()(x);
    });
  }

  // tails per frequency sample
  for (const auto& s : samples) {
    if (std::abs(s.value) < 1e-14 || s.node <= 0.02) continue;
    acc += (s.value * s.weight / kTwoPi) *
           detail::density_tone_tail(meas.pure(), s.node, X);
  }
  out.error_estimate += 1e-9;
  out.value = acc;
  return out;
}

inline CalcResult f_of_L_density(const GridFunction& f,
                                 const DissipativeMatrix& L) {
  return f_of_L_density(f, L, SemiSpectralMeasure(L));
}

// ---------------------------------------------------------------------------
// Cayley route

inline cplx cayley_conformal(cplx zeta) {
  return kI * (1.0 + zeta) / (1.0 - zeta);
}

/// f(L) = (f o omega)(T) evaluated through the oracle on T.
inline CalcResult f_of_L_cayley(const ScalarFunction& f,
                                const DissipativeMatrix& L) {
  const ContractionMatrix T = cayley(L);
  ScalarFunction g([f](cplx zeta) { return f(cayley_conformal(zeta)); });
  CalcResult out = matrix_function(T.entries, g);
  out.route = "cayley";
  return out;
}

}  // namespace dissipert

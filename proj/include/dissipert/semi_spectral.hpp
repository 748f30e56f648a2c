#pragma once

// Semi-spectral measure of a dissipative matrix, realized concretely:
// on the pure part an absolutely continuous matrix density
//     g(x) = (1/pi) (L-x)^{-1} Im(L) (L*-x)^{-1}
//          = (1/2 pi i) [ (L*-x)^{-1} - (L-x)^{-1} ],
// on the self-adjoint part spectral atoms at the eigenvalues.  The first
// form makes positivity manifest; the second follows from
// Im L = ((L-x) - (L*-x)) / 2i and gives the resolvent identity
// int (x-lambda)^{-1} g(x) dx = (L-lambda)^{-1} (Im lambda < 0) by contour
// integration, which pins the normalization.
//
// Also: the finite Schaffer block construction of a unitary dilation of a
// contraction, truncated to 2N+1 copies of the base space.

#include "dissipert/core.hpp"
#include "dissipert/dissipative.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

namespace dissipert {

struct SemiSpectralDensity {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<Matrix> values;                    // PSD samples of g
  std::vector<std::pair<double, Matrix>> atoms;  // self-adjoint part
  Eigen::Index dim = 0;

  Matrix mass() const {
    Matrix m = Matrix::Zero(dim, dim);
    for (std::size_t k = 0; k < nodes.size(); ++k) m += weights[k] * values[k];
    for (const auto& [x, a] : atoms) m += a;
    return m;
  }

  double mass_defect() const {
    return operator_norm(Matrix(Matrix::Identity(dim, dim) - mass()));
  }
};

namespace detail {

/// g(x) for the embedded pure block: B (1/pi) (Lp-x)^{-1} Im Lp (Lp*-x)^{-1} B*.
struct PureDensity {
  Matrix basis;   // n x k embedding
  Matrix block;   // k x k pure dissipative
  Matrix im;      // Im(block)

  Matrix operator()(double x) const {
    const Matrix I = Matrix::Identity(block.rows(), block.cols());
    Eigen::PartialPivLU<Matrix> lu(block - x * I);
    const Matrix a = lu.solve(im);                  // (L-x)^{-1} Im
    const Matrix cdag = lu.solve(Matrix(a.adjoint()));
    // cdag† = a (L*-x)^{-1} for real x
    const Matrix core = cdag.adjoint() / kPi;
    return basis * core * basis.adjoint();
  }

  /// m-th derivative of g via resolvent powers:
  /// g^(m)(x) = (m!/2 pi i) [ (L*-x)^{-m-1} - (L-x)^{-m-1} ].
  Matrix derivative(double x, int m) const {
    const Matrix I = Matrix::Identity(block.rows(), block.cols());
    Eigen::PartialPivLU<Matrix> lu(block - x * I);
    Eigen::PartialPivLU<Matrix> lus(Matrix(block.adjoint() - x * I));
    Matrix p = lu.solve(I), ps = lus.solve(I);
    double fact = 1.0;
    for (int j = 0; j < m; ++j) {
      p = lu.solve(p);
      ps = lus.solve(ps);
      fact *= (j + 1);
    }
    const Matrix core = (fact / (2.0 * kPi * kI)) * (ps - p);
    return basis * core * basis.adjoint();
  }
};

}  // namespace detail

struct DensityOptions {
  double mass_tol = tol::mass;
  int max_extensions = 64;
  double atom_merge_tol = 1e-9;
};

/// Full semi-spectral machinery of L: split, atoms, pure density handle.
class SemiSpectralMeasure {
 public:
  explicit SemiSpectralMeasure(const DissipativeMatrix& L) {
    dim_ = L.size();
    split_ = split_sa_pure(L);
    if (split_.basis_sa.cols() > 0) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(
          Matrix(0.5 * (split_.block_sa + split_.block_sa.adjoint())));
      // group near-coincident eigenvalues into single atoms
      std::map<double, Matrix> grouped;
      for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
        const double a = es.eigenvalues()(j);
        const Vector v = split_.basis_sa * es.eigenvectors().col(j);
        const Matrix p = v * v.adjoint();
        bool merged = false;
        for (auto& [loc, m] : grouped) {
          if (std::abs(loc - a) <= 1e-9 * std::max(1.0, std::abs(loc))) {
            m += p;
            merged = true;
            break;
          }
        }
        if (!merged) grouped[a] = p;
      }
      for (auto& [loc, m] : grouped) atoms_.push_back({loc, m});
    }
    if (split_.basis_pure.cols() > 0) {
      pure_ = detail::PureDensity{split_.basis_pure, split_.block_pure,
                                  imaginary_part(split_.block_pure)};
      Eigen::ComplexEigenSolver<Matrix> es(split_.block_pure);
      for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j)
        pure_eigs_.push_back(es.eigenvalues()(j));
    }
  }

  Eigen::Index dim() const { return dim_; }
  bool has_pure() const { return pure_.has_value(); }
  const detail::PureDensity& pure() const { return *pure_; }
  const std::vector<std::pair<double, Matrix>>& atoms() const {
    return atoms_;
  }
  const std::vector<cplx>& pure_eigenvalues() const { return pure_eigs_; }
  const SaPureSplit& split() const { return split_; }

  /// Panel edges resolving the density peaks (width ~ Im eigenvalue).
  std::vector<double> panel_edges(double lo, double hi) const {
    std::vector<double> edges{lo, hi};
    for (const cplx& l : pure_eigs_) {
      const double c = l.real();
      const double w = std::max(l.imag(), 1e-6);
      for (double f : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        for (double s : {-1.0, 1.0}) {
          const double e = c + s * f * w;
          if (e > lo && e < hi) edges.push_back(e);
        }
      }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double a, double b) {
                              return std::abs(a - b) < 1e-12;
                            }),
                edges.end());
    return edges;
  }

 private:
  Eigen::Index dim_ = 0;
  SaPureSplit split_;
  std::vector<std::pair<double, Matrix>> atoms_;
  std::optional<detail::PureDensity> pure_;
  std::vector<cplx> pure_eigs_;
};

/// Sampled density on an adaptive grid: eigenvalue-refined panels over a
/// base window, geometric extension until the mass defect closes.
inline SemiSpectralDensity semi_spectral_density(
    const DissipativeMatrix& L, const DensityOptions& opts = {}) {
  SemiSpectralMeasure meas(L);
  SemiSpectralDensity out;
  out.dim = L.size();
  out.atoms = meas.atoms();
  if (!meas.has_pure()) {
    if (out.mass_defect() > opts.mass_tol)
      throw MassDefect("atomic mass does not close");
    return out;
  }

  double lo = -1.0, hi = 1.0;
  {
    double rmin = 0.0, rmax = 0.0, spread = 0.0;
    bool first = true;
    for (const cplx& l : meas.pure_eigenvalues()) {
      rmin = first ? l.real() : std::min(rmin, l.real());
      rmax = first ? l.real() : std::max(rmax, l.real());
      spread = std::max(spread, std::abs(l));
      first = false;
    }
    const double r = std::max(operator_norm(imaginary_part(L.matrix())),
                              0.1 * std::max(1.0, spread));
    lo = rmin - 10.0 * r;
    hi = rmax + 10.0 * r;
  }

  auto sample_segment = [&](double a, double b, int panels) {
    panel_quadrature(a, b, panels, 16, [&](double x, double w) {
      out.nodes.push_back(x);
      out.weights.push_back(w);
      out.values.push_back(meas.pure()(x));
    });
  };

  const std::vector<double> edges = meas.panel_edges(lo, hi);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i], b = edges[i + 1];
    const int panels =
        std::clamp(static_cast<int>(std::ceil((b - a) / 0.5)), 1, 64);
    sample_segment(a, b, panels);
  }

  // geometric extension of the tails until mass closure
  double width = hi - lo;
  for (int ext = 0; ext < opts.max_extensions; ++ext) {
    if (out.mass_defect() <= opts.mass_tol) return out;
    sample_segment(lo - width, lo, 4);
    sample_segment(hi, hi + width, 4);
    lo -= width;
    hi += width;
    width *= 2.0;
  }
  if (out.mass_defect() <= opts.mass_tol) return out;
  throw MassDefect("grid extension cap reached, defect = " +
                   std::to_string(out.mass_defect()));
}

// ---------------------------------------------------------------------------
// Truncated Schaffer dilation

/// Block unitary on 2N+1 copies of the base space whose center-block
/// compressions reproduce T^k for 0 <= k <= N.  The bilateral shift is
/// closed up cyclically; the defect rotation sits in columns {-1, 0}:
///   U e_{-1} h = e_0 (D_{T*} h) + e_1 (-T* h),
///   U e_0  h = e_0 (T h)      + e_1 (D_T h),
///   U e_j  h = e_{j+1 (cyclic)} h otherwise.
inline Matrix schaffer_dilation(const ContractionMatrix& T, int N) {
  if (N < 1) throw Error("schaffer_dilation requires N >= 1");
  if (T.norm > 1.0 + tol::contraction)
    throw NotContraction("schaffer_dilation: ||T|| = " +
                         std::to_string(T.norm));
  const Eigen::Index n = T.entries.rows();
  const Matrix I = identity_like(T.entries);
  const Matrix dt = psd_sqrt(Matrix(I - T.entries.adjoint() * T.entries));
  const Matrix dts = psd_sqrt(Matrix(I - T.entries * T.entries.adjoint()));
  const int blocks = 2 * N + 1;
  Matrix U = Matrix::Zero(blocks * n, blocks * n);
  auto at = [&](int j) { return (j + N) * n; };  // block index -N..N
  for (int j = -N; j <= N; ++j) {
    if (j == -1) {
      U.block(at(0), at(-1), n, n) = dts;
      U.block(at(1), at(-1), n, n) = -T.entries.adjoint();
    } else if (j == 0) {
      U.block(at(0), at(0), n, n) = T.entries;
      U.block(at(1), at(0), n, n) = dt;
    } else {
      const int next = (j + 1 > N) ? -N : j + 1;
      U.block(at(next), at(j), n, n) = I;
    }
  }
  return U;
}

/// Compression of U^k to the center block.
inline Matrix dilation_moment(const Matrix& U, Eigen::Index n, int k) {
  const Eigen::Index blocks = U.rows() / n;
  const Eigen::Index center = ((blocks - 1) / 2) * n;
  Matrix p = Matrix::Identity(U.rows(), U.cols());
  for (int j = 0; j < k; ++j) p = U * p;
  return p.block(center, center, n, n);
}

}  // namespace dissipert

#pragma once

// Finite-dimensional dissipative matrices: Im(Lu,u) >= 0.  Every bounded
// everywhere-defined dissipative matrix is automatically maximal (a
// bounded perturbation of a maximal dissipative operator is maximal), so
// no extension bookkeeping appears here.

#include "dissipert/core.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <memory>
#include <mutex>

namespace dissipert {

struct Eigendata {
  Vector values;
  Matrix vectors;
  Matrix vectors_inv;
  double condition = 0.0;    // kappa(V)
  bool schur_fallback = false;  // condition > 1e8: use Schur data instead
  Matrix schur_t;            // upper triangular
  Matrix schur_u;            // unitary, L = U T U*
};

class DissipativeMatrix {
 public:
  enum class Kind { strict, self_adjoint, mixed };

  /// Validates Im(L) >= -tol and classifies.  tol is relative to ||L||.
  static DissipativeMatrix classify(Matrix L, double tol_rel = tol::psd_rel) {
    if (L.rows() != L.cols()) throw ShapeError("classify: matrix not square");
    DissipativeMatrix d;
    d.entries_ = std::move(L);
    d.im_ = imaginary_part(d.entries_);
    d.norm_ = operator_norm(d.entries_);
    const double tol_abs = tol_rel * std::max(d.norm_, 1.0);
    const double min_eig = min_hermitian_eigenvalue(d.im_);
    if (min_eig < -tol_abs)
      throw NotDissipative("min eig of Im part = " + std::to_string(min_eig));
    if (operator_norm(d.im_) <= tol_abs)
      d.kind_ = Kind::self_adjoint;
    else if (min_eig > tol_abs)
      d.kind_ = Kind::strict;
    else
      d.kind_ = Kind::mixed;
    return d;
  }

  const Matrix& matrix() const { return entries_; }
  const Matrix& im_part() const { return im_; }
  Kind kind() const { return kind_; }
  Eigen::Index size() const { return entries_.rows(); }
  double norm() const { return norm_; }

  /// Eigendata, computed once on first access (thread-safe).
  const Eigendata& eigendata() const {
    std::call_once(eig_->once, [this] {
      Eigendata& e = eig_->data;
      Eigen::ComplexEigenSolver<Matrix> es(entries_);
      e.values = es.eigenvalues();
      e.vectors = es.eigenvectors();
      e.condition = condition_estimate(e.vectors);
      if (e.condition <= 1e8) {
        e.vectors_inv = e.vectors.partialPivLu().inverse();
      } else {
        e.schur_fallback = true;
      }
      Eigen::ComplexSchur<Matrix> schur(entries_);
      e.schur_t = schur.matrixT();
      e.schur_u = schur.matrixU();
    });
    return eig_->data;
  }

 private:
  struct LazyEig {
    std::once_flag once;
    Eigendata data;
  };

  Matrix entries_;
  Matrix im_;
  Kind kind_ = Kind::self_adjoint;
  double norm_ = 0.0;
  std::shared_ptr<LazyEig> eig_ = std::make_shared<LazyEig>();
};

struct ContractionMatrix {
  Matrix entries;
  double norm = 0.0;
  bool one_not_eigenvalue = false;
};

/// Cayley transform T = (L - iI)(L + iI)^{-1}; a contraction without
/// eigenvalue 1.
inline ContractionMatrix cayley(const DissipativeMatrix& L) {
  const Matrix& A = L.matrix();
  const Matrix I = identity_like(A);
  Eigen::PartialPivLU<Matrix> lu(A + kI * I);
  // (L - i) and (L + i)^{-1} commute, so left division suffices
  Matrix T = lu.solve(A - kI * I);
  if (!T.allFinite()) throw SingularShift("L + iI numerically singular");
  ContractionMatrix c;
  c.norm = operator_norm(T);
  c.entries = std::move(T);
  c.one_not_eigenvalue = true;  // I - T = 2i (L+iI)^{-1} is invertible
  if (c.norm > 1.0 + tol::contraction)
    throw NotContraction("Cayley transform norm " + std::to_string(c.norm));
  return c;
}

/// Inverse Cayley transform L = i(I + T)(I - T)^{-1}.
inline DissipativeMatrix inverse_cayley(const ContractionMatrix& T,
                                        double sing_tol = 1e-12) {
  const Matrix I = identity_like(T.entries);
  const Matrix D = I - T.entries;
  Eigen::JacobiSVD<Matrix> svd(D);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= sing_tol * std::max(1.0, s(0)))
    throw UnitEigenvalue("I - T numerically singular");
  Matrix L = kI * D.partialPivLu().solve(I + T.entries);
  return DissipativeMatrix::classify(std::move(L));
}

/// Resolvent (L - lambda I)^{-1} for Im(lambda) < 0, where
/// ||(L - lambda)^{-1}|| <= 1/|Im lambda| is guaranteed.
inline Matrix resolvent(const DissipativeMatrix& L, cplx lambda) {
  if (lambda.imag() >= 0.0)
    throw HalfPlaneViolation("resolvent bound holds only for Im lambda < 0");
  const Matrix I = identity_like(L.matrix());
  return (L.matrix() - lambda * I).partialPivLu().solve(I);
}

/// exp(itL) for t >= 0 (contraction semigroup), scaling-and-squaring.
inline Matrix semigroup(const DissipativeMatrix& L, double t) {
  if (t < 0.0) throw NegativeTime("semigroup requires t >= 0");
  return (kI * t * L.matrix()).exp();
}

/// exp(itA) for a raw matrix known to be dissipative (hot paths where the
/// classified wrapper is not at hand).
inline Matrix semigroup_raw(const Matrix& A, double t) {
  if (t < 0.0) throw NegativeTime("semigroup requires t >= 0");
  return (kI * t * A).exp();
}

// ---------------------------------------------------------------------------
// Self-adjoint / completely pure splitting

struct SaPureSplit {
  Matrix basis_sa;    // n x k orthonormal
  Matrix basis_pure;  // n x (n-k)
  Matrix proj_sa;     // P_sa
  Matrix proj_pure;
  Matrix block_sa;    // k x k, self-adjoint
  Matrix block_pure;  // pure maximal dissipative
};

/// H_sa is the largest subspace of ker(Im L) invariant under both L and
/// L*; computed by the stabilizing intersection iteration with singular
/// values thresholded at 1e-8.
inline SaPureSplit split_sa_pure(const DissipativeMatrix& L,
                                 double thresh = 1e-8) {
  const Matrix& A = L.matrix();
  const Eigen::Index n = A.rows();
  const double scale = std::max(1.0, L.norm());

  // K_0 = ker(Im L)
  Eigen::SelfAdjointEigenSolver<Matrix> es(L.im_part());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(es.eigenvalues()(i)) <= thresh * scale) keep.push_back(i);
  Matrix Q(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    Q.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);

  // K_{j+1} = K_j cap L^{-1} K_j cap (L*)^{-1} K_j until stable
  while (Q.cols() > 0) {
    const Matrix P = Q * Q.adjoint();
    const Matrix I = identity_like(P);
    Matrix R(2 * n, Q.cols());
    R.topRows(n) = (I - P) * (A * Q);
    R.bottomRows(n) = (I - P) * (A.adjoint() * Q);
    Eigen::JacobiSVD<Matrix> svd(R, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index null_dim = 0;
    for (Eigen::Index i = 0; i < Q.cols(); ++i) {
      const double sv = (i < s.size()) ? s(i) : 0.0;
      if (sv <= thresh * scale) ++null_dim;
    }
    if (null_dim == Q.cols()) break;  // stable
    Q = Q * svd.matrixV().rightCols(null_dim);
    if (null_dim > 0) {
      // re-orthonormalize
      Eigen::HouseholderQR<Matrix> qr(Q);
      Q = qr.householderQ() * Matrix::Identity(n, null_dim);
    }
  }

  SaPureSplit out;
  out.basis_sa = Q;
  out.proj_sa = Q.cols() > 0 ? Matrix(Q * Q.adjoint()) : Matrix::Zero(n, n);
  out.proj_pure = Matrix::Identity(n, n) - out.proj_sa;
  // orthonormal complement from the SVD of P_pure
  Eigen::JacobiSVD<Matrix> svd(out.proj_pure, Eigen::ComputeFullU);
  const Eigen::Index k_pure = n - Q.cols();
  out.basis_pure = svd.matrixU().leftCols(k_pure);
  out.block_sa = Q.adjoint() * A * Q;
  out.block_pure = out.basis_pure.adjoint() * A * out.basis_pure;
  return out;
}

// ---------------------------------------------------------------------------
// Duhamel quadrature helper (exp(iaL) - exp(iaM) as an integral)

/// i int_0^a exp(itL) (L - M) exp(i(a-t)M) dt by composite Gauss-Legendre;
/// swapped = true integrates the other ordering
/// i int_0^a exp(itM) (L - M) exp(i(a-t)L) dt.
inline Matrix duhamel_integral(const Matrix& L, const Matrix& M, double a,
                               bool swapped = false) {
  if (a < 0.0) throw NegativeTime("duhamel_integral requires a >= 0");
  const Matrix K = L - M;
  Matrix acc = Matrix::Zero(L.rows(), L.cols());
  const double speed = a * (operator_norm(L) + operator_norm(M));
  const int panels = std::max(1, static_cast<int>(std::ceil(speed / 3.0)));
  panel_quadrature(0.0, a, panels, 24, [&](double t, double w) {
    if (!swapped)
      acc += w * (semigroup_raw(L, t) * K * semigroup_raw(M, a - t));
    else
      acc += w * (semigroup_raw(M, t) * K * semigroup_raw(L, a - t));
  });
  return kI * acc;
}

}  // namespace dissipert

#pragma once

// Seeded random matrix ensembles.  Everything downstream of a seed is
// deterministic on a given platform: mt19937_64 is fully specified and
// the normal variates use an explicit Box-Muller, not the
// implementation-defined std::normal_distribution.

#include "dissipert/core.hpp"
#include "dissipert/dissipative.hpp"

#include <random>
#include <string>

namespace dissipert {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return (eng_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    have_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }

  cplx cnormal() { return cplx{normal(), normal()} / std::sqrt(2.0); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline Matrix random_complex(Rng& rng, Eigen::Index n) {
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.cnormal();
  return a;
}

inline Matrix random_hermitian(Rng& rng, Eigen::Index n) {
  Matrix a = random_complex(rng, n);
  return 0.5 * (a + a.adjoint());
}

inline Matrix random_unitary(Rng& rng, Eigen::Index n) {
  Matrix a = random_complex(rng, n);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  // fix phases for determinism
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

struct EnsembleSpec {
  Eigen::Index n = 4;
  int count = 64;
  std::uint64_t seed = 1;
  std::string kind = "strict";  // strict | mixed | self_adjoint
  double im_floor = 0.05;
};

/// Strictly dissipative: H1 + i (G* G + eps I), normalized to unit norm.
inline DissipativeMatrix random_strict_dissipative(Rng& rng, Eigen::Index n,
                                                   double im_floor = 0.05) {
  const Matrix h = random_hermitian(rng, n);
  const Matrix g = random_complex(rng, n);
  Matrix l = h + kI * Matrix(g.adjoint() * g +
                             im_floor * double(n) * Matrix::Identity(n, n));
  l /= operator_norm(l);
  return DissipativeMatrix::classify(l);
}

inline DissipativeMatrix random_self_adjoint(Rng& rng, Eigen::Index n) {
  Matrix h = random_hermitian(rng, n);
  h /= operator_norm(h);
  return DissipativeMatrix::classify(h);
}

/// Mixed: block diag(self-adjoint, strict) conjugated by a random unitary.
inline DissipativeMatrix random_mixed_dissipative(Rng& rng, Eigen::Index n,
                                                  Eigen::Index sa_dim,
                                                  double im_floor = 0.05) {
  if (sa_dim <= 0 || sa_dim >= n)
    throw Error("random_mixed_dissipative: sa_dim must be in (0, n)");
  Matrix l = Matrix::Zero(n, n);
  const Eigen::Index p = n - sa_dim;
  l.topLeftCorner(sa_dim, sa_dim) = random_hermitian(rng, sa_dim);
  {
    const Matrix h = random_hermitian(rng, p);
    const Matrix g = random_complex(rng, p);
    l.bottomRightCorner(p, p) =
        h + kI * Matrix(g.adjoint() * g +
                        im_floor * double(p) * Matrix::Identity(p, p));
  }
  const Matrix u = random_unitary(rng, n);
  Matrix conj = u * l * u.adjoint();
  conj /= operator_norm(conj);
  return DissipativeMatrix::classify(conj);
}

inline DissipativeMatrix random_by_kind(Rng& rng, const EnsembleSpec& spec) {
  if (spec.kind == "strict")
    return random_strict_dissipative(rng, spec.n, spec.im_floor);
  if (spec.kind == "self_adjoint") return random_self_adjoint(rng, spec.n);
  if (spec.kind == "mixed")
    return random_mixed_dissipative(rng, spec.n, std::max<Eigen::Index>(
                                                     1, spec.n / 2),
                                    spec.im_floor);
  throw ParseError("unknown ensemble kind: " + spec.kind);
}

/// Hermitian perturbation scaled to the requested operator norm; adding it
/// to any dissipative matrix preserves dissipativity for every t >= 0.
inline Matrix random_hermitian_perturbation(Rng& rng, Eigen::Index n,
                                            double norm) {
  Matrix k = random_hermitian(rng, n);
  return k * (norm / operator_norm(k));
}

/// General perturbation with PSD imaginary part, scaled to `norm`.
inline Matrix random_psd_imag_perturbation(Rng& rng, Eigen::Index n,
                                           double norm) {
  const Matrix h = random_hermitian(rng, n);
  const Matrix g = random_complex(rng, n);
  Matrix k = h + kI * Matrix(g.adjoint() * g);
  return k * (norm / operator_norm(k));
}

}  // namespace dissipert

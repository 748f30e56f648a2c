#include <catch2/catch_amalgamated.hpp>

#include "dissipert/dissipative.hpp"
#include "dissipert/ensemble.hpp"
#include "dissipert/semi_spectral.hpp"

using namespace dissipert;

namespace {
Matrix scalar(cplx v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}
}  // namespace

TEST_CASE("classification") {
  CHECK(DissipativeMatrix::classify(scalar({0.0, 1.0})).kind() ==
        DissipativeMatrix::Kind::strict);
  CHECK(DissipativeMatrix::classify(scalar({0.0, 0.0})).kind() ==
        DissipativeMatrix::Kind::self_adjoint);
  CHECK_THROWS_AS(DissipativeMatrix::classify(scalar({0.0, -1.0})),
                  NotDissipative);
  Matrix mixed = Matrix::Zero(2, 2);
  mixed(0, 0) = 3.0;
  mixed(1, 1) = cplx{0.0, 1.0};
  CHECK(DissipativeMatrix::classify(mixed).kind() ==
        DissipativeMatrix::Kind::mixed);
}

TEST_CASE("cayley transform") {
  SECTION("scalar values") {
    auto T1 = cayley(DissipativeMatrix::classify(scalar({0.0, 1.0})));
    CHECK(std::abs(T1.entries(0, 0)) < 1e-15);
    auto T2 = cayley(DissipativeMatrix::classify(scalar({0.0, 2.0})));
    CHECK(std::abs(T2.entries(0, 0) - cplx{1.0 / 3.0, 0.0}) < 1e-15);
  }
  SECTION("random strict 5x5: contraction and round trip") {
    Rng rng(derive_seed(42, 0));
    auto L = random_strict_dissipative(rng, 5);
    auto T = cayley(L);
    CHECK(T.norm < 1.0);
    auto back = inverse_cayley(T);
    CHECK(operator_norm(Matrix(back.matrix() - L.matrix())) < 1e-10);
  }
  SECTION("cayley of a self-adjoint matrix is unitary") {
    Rng rng(derive_seed(42, 1));
    auto L = random_self_adjoint(rng, 4);
    auto T = cayley(L);
    const Matrix I = Matrix::Identity(4, 4);
    CHECK(operator_norm(Matrix(T.entries.adjoint() * T.entries - I)) < 1e-12);
  }
  SECTION("mixed round trip") {
    Rng rng(derive_seed(42, 2));
    auto L = random_mixed_dissipative(rng, 6, 3);
    auto T = cayley(L);
    auto back = inverse_cayley(T);
    CHECK(operator_norm(Matrix(back.matrix() - L.matrix())) < 1e-10);
  }
}

TEST_CASE("inverse cayley") {
  auto L1 = inverse_cayley({scalar({0.0, 0.0}), 0.0, true});
  CHECK(std::abs(L1.matrix()(0, 0) - cplx{0.0, 1.0}) < 1e-15);
  auto L2 = inverse_cayley({scalar({1.0 / 3.0, 0.0}), 1.0 / 3.0, true});
  CHECK(std::abs(L2.matrix()(0, 0) - cplx{0.0, 2.0}) < 1e-14);
  CHECK_THROWS_AS(inverse_cayley({scalar({1.0, 0.0}), 1.0, false}),
                  UnitEigenvalue);
}

TEST_CASE("resolvent bound") {
  SECTION("scalar checks") {
    auto L = DissipativeMatrix::classify(scalar({0.0, 1.0}));
    Matrix r = resolvent(L, cplx{0.0, -1.0});
    CHECK(std::abs(r(0, 0) - cplx{0.0, -0.5}) < 1e-15);  // 1/(2i)
    CHECK(operator_norm(r) <= 1.0 + 1e-14);
    auto Z = DissipativeMatrix::classify(scalar({0.0, 0.0}));
    CHECK(operator_norm(resolvent(Z, cplx{0.0, -1.0})) ==
          Catch::Approx(1.0));  // bound saturates for self-adjoint
  }
  SECTION("random strict 6x6 at lambda = -0.1i") {
    Rng rng(derive_seed(7, 3));
    auto L = random_strict_dissipative(rng, 6);
    CHECK(operator_norm(resolvent(L, cplx{0.0, -0.1})) <= 10.0 + 1e-9);
  }
  SECTION("upper half-plane rejected") {
    auto L = DissipativeMatrix::classify(scalar({0.0, 1.0}));
    CHECK_THROWS_AS(resolvent(L, cplx{0.0, 0.5}), HalfPlaneViolation);
    CHECK_THROWS_AS(resolvent(L, cplx{1.0, 0.0}), HalfPlaneViolation);
  }
}

TEST_CASE("semigroup") {
  SECTION("scalar and diagonal values") {
    auto L = DissipativeMatrix::classify(scalar({0.0, 1.0}));
    CHECK(std::abs(semigroup(L, 1.0)(0, 0) - std::exp(-1.0)) < 1e-14);
    CHECK(operator_norm(Matrix(semigroup(L, 0.0) -
                               Matrix::Identity(1, 1))) == 0.0);
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = cplx{0.0, 1.0};
    auto D = DissipativeMatrix::classify(d);
    Matrix e = semigroup(D, 2.0);
    CHECK(std::abs(e(0, 0) - std::exp(kI * 2.0)) < 1e-13);
    CHECK(std::abs(e(1, 1) - std::exp(-2.0)) < 1e-14);
  }
  SECTION("contraction property and the semigroup law") {
    Rng rng(derive_seed(7, 4));
    auto L = random_strict_dissipative(rng, 6);
    for (double t : {0.3, 1.0, 7.5})
      CHECK(operator_norm(semigroup(L, t)) <= 1.0 + 1e-12);
    Matrix lhs = semigroup(L, 1.7);
    Matrix rhs = semigroup(L, 1.0) * semigroup(L, 0.7);
    CHECK(operator_norm(Matrix(lhs - rhs)) < 1e-12);
  }
  SECTION("negative time rejected") {
    auto L = DissipativeMatrix::classify(scalar({0.0, 1.0}));
    CHECK_THROWS_AS(semigroup(L, -0.5), NegativeTime);
  }
}

TEST_CASE("sa/pure splitting") {
  SECTION("diag(3, i)") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 3.0;
    m(1, 1) = cplx{0.0, 1.0};
    auto split = split_sa_pure(DissipativeMatrix::classify(m));
    REQUIRE(split.basis_sa.cols() == 1);
    CHECK(std::abs(std::abs(split.basis_sa(0, 0)) - 1.0) < 1e-12);
    CHECK(std::abs(split.block_sa(0, 0) - cplx{3.0, 0.0}) < 1e-12);
    CHECK(std::abs(split.block_pure(0, 0) - cplx{0.0, 1.0}) < 1e-12);
  }
  SECTION("strict has no self-adjoint part") {
    Rng rng(derive_seed(9, 0));
    auto L = random_strict_dissipative(rng, 5);
    CHECK(split_sa_pure(L).basis_sa.cols() == 0);
  }
  SECTION("self-adjoint has no pure part") {
    Rng rng(derive_seed(9, 1));
    auto L = random_self_adjoint(rng, 5);
    CHECK(split_sa_pure(L).basis_pure.cols() == 0);
  }
  SECTION("rotated mixed matrix splits into reducing blocks") {
    Rng rng(derive_seed(9, 2));
    auto L = random_mixed_dissipative(rng, 6, 2);
    auto split = split_sa_pure(L);
    REQUIRE(split.basis_sa.cols() == 2);
    // P_sa commutes with L (reducing subspace)
    const Matrix& A = L.matrix();
    CHECK(operator_norm(Matrix(split.proj_sa * A - A * split.proj_sa)) <
          1e-7);
    // sa block is Hermitian
    CHECK(operator_norm(Matrix(split.block_sa - split.block_sa.adjoint())) <
          1e-8);
    // pure block is strictly dissipative (spectrum off the real axis)
    Eigen::ComplexEigenSolver<Matrix> es(split.block_pure);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      CHECK(es.eigenvalues()(i).imag() > 1e-9);
  }
}

TEST_CASE("semi-spectral density") {
  SECTION("scalar i gives the Poisson kernel") {
    auto L = DissipativeMatrix::classify(scalar({0.0, 1.0}));
    SemiSpectralMeasure meas(L);
    REQUIRE(meas.has_pure());
    CHECK(std::abs(meas.pure()(0.0)(0, 0) - 1.0 / kPi) < 1e-14);
    CHECK(std::abs(meas.pure()(1.0)(0, 0) - 1.0 / (2.0 * kPi)) < 1e-14);
    auto dens = semi_spectral_density(L);
    CHECK(dens.atoms.empty());
    CHECK(dens.mass_defect() < tol::mass);
  }
  SECTION("real scalar gives a single atom") {
    auto L = DissipativeMatrix::classify(scalar({0.7, 0.0}));
    auto dens = semi_spectral_density(L);
    REQUIRE(dens.atoms.size() == 1);
    CHECK(dens.atoms[0].first == Catch::Approx(0.7));
    CHECK(std::abs(dens.atoms[0].second(0, 0) - 1.0) < 1e-12);
    CHECK(dens.nodes.empty());
  }
  SECTION("random strict 4x4 mass closure and positivity") {
    Rng rng(derive_seed(11, 0));
    auto L = random_strict_dissipative(rng, 4);
    auto dens = semi_spectral_density(L);
    CHECK(dens.mass_defect() < 1e-6);
    for (std::size_t k = 0; k < dens.values.size(); k += 37)
      CHECK(min_hermitian_eigenvalue(dens.values[k]) > -1e-12);
  }
  SECTION("mixed matrix: atoms plus density close the mass") {
    Rng rng(derive_seed(11, 1));
    auto L = random_mixed_dissipative(rng, 4, 2);
    auto dens = semi_spectral_density(L);
    CHECK(dens.atoms.size() >= 1);
    CHECK(dens.mass_defect() < 1e-6);
  }
  SECTION("Cayley pullback: Haar measure of T pulls back to Poisson") {
    // L = i has T = 0 whose semi-spectral measure is Haar on the circle;
    // x = omega(e^{i theta}) = -cot(theta/2) maps it to the Poisson
    // density 1/(pi (1+x^2)).
    auto check_fn = [](auto&& test) {
      cplx circle{0.0, 0.0};
      panel_quadrature(1e-9, kTwoPi - 1e-9, 4096, 8,
                       [&](double th, double w) {
                         circle += w * test(-1.0 / std::tan(0.5 * th)) /
                                   kTwoPi;
                       });
      cplx line{0.0, 0.0};
      panel_quadrature(-3e3, 3e3, 60000, 8, [&](double x, double w) {
        line += w * test(x) / (kPi * (1.0 + x * x));
      });
      CHECK(std::abs(circle - line) < 1e-7);
    };
    check_fn([](double x) -> cplx { return std::pow(cplx{x, 2.0}, -2); });
    check_fn([](double x) -> cplx {
      return 1.0 / ((x - 3.0) * (x - 3.0) + 4.0);
    });
  }
}

TEST_CASE("schaffer dilation") {
  SECTION("zero contraction") {
    ContractionMatrix T{scalar({0.0, 0.0}), 0.0, true};
    Matrix U = schaffer_dilation(T, 3);
    CHECK(operator_norm(Matrix(U.adjoint() * U -
                               Matrix::Identity(U.rows(), U.cols()))) <
          1e-13);
    CHECK(std::abs(dilation_moment(U, 1, 0)(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(dilation_moment(U, 1, 1)(0, 0)) < 1e-15);
    CHECK(std::abs(dilation_moment(U, 1, 3)(0, 0)) < 1e-15);
  }
  SECTION("unitary input dilates block-diagonally, exact for all k") {
    Rng rng(derive_seed(13, 0));
    Matrix q = random_unitary(rng, 3);
    ContractionMatrix T{q, operator_norm(q), true};
    Matrix U = schaffer_dilation(T, 2);
    Matrix qk = Matrix::Identity(3, 3);
    for (int k = 0; k <= 7; ++k) {  // beyond N: still exact, no defect leak
      CHECK(operator_norm(Matrix(dilation_moment(U, 3, k) - qk)) < 1e-12);
      qk = q * qk;
    }
  }
  SECTION("scalar 1/3 moments up to N") {
    ContractionMatrix T{scalar({1.0 / 3.0, 0.0}), 1.0 / 3.0, true};
    Matrix U = schaffer_dilation(T, 4);
    for (int k = 0; k <= 4; ++k)
      CHECK(std::abs(dilation_moment(U, 1, k)(0, 0) -
                     std::pow(1.0 / 3.0, k)) < 1e-12);
  }
  SECTION("random contraction: compressions match through N") {
    Rng rng(derive_seed(13, 1));
    Matrix a = random_complex(rng, 3);
    a *= 0.8 / operator_norm(a);
    ContractionMatrix T{a, operator_norm(a), true};
    const int N = 5;
    Matrix U = schaffer_dilation(T, N);
    CHECK(operator_norm(Matrix(U.adjoint() * U -
                               Matrix::Identity(U.rows(), U.cols()))) <
          1e-13);
    Matrix tk = Matrix::Identity(3, 3);
    for (int k = 0; k <= N; ++k) {
      CHECK(operator_norm(Matrix(dilation_moment(U, 3, k) - tk)) <
            tol::dilation);
      tk = T.entries * tk;
    }
  }
  SECTION("non-contractions rejected") {
    ContractionMatrix bad{scalar({1.5, 0.0}), 1.5, true};
    CHECK_THROWS_AS(schaffer_dilation(bad, 2), NotContraction);
  }
}

TEST_CASE("Duhamel identity") {
  SECTION("scalar witness e^{-1} - e^{-2}") {
    const Matrix L = scalar({0.0, 1.0}), M = scalar({0.0, 2.0});
    const cplx expect = std::exp(-1.0) - std::exp(-2.0);
    Matrix got = duhamel_integral(L, M, 1.0);
    CHECK(std::abs(got(0, 0) - expect) < 1e-12);
    Matrix got_swapped = duhamel_integral(L, M, 1.0, true);
    CHECK(std::abs(got_swapped(0, 0) - expect) < 1e-12);
  }
  SECTION("random strict pairs, both orderings") {
    Rng rng(derive_seed(17, 0));
    for (int trial = 0; trial < 8; ++trial) {
      auto L = random_strict_dissipative(rng, 4);
      Matrix M = L.matrix() + random_hermitian_perturbation(rng, 4, 0.3);
      const double a = 1.0 + trial * 0.25;
      Matrix direct = semigroup_raw(L.matrix(), a) - semigroup_raw(M, a);
      const double scale = operator_norm(direct);
      CHECK(operator_norm(Matrix(duhamel_integral(L.matrix(), M, a) -
                                 direct)) < 1e-8 * std::max(scale, 1e-3));
      CHECK(operator_norm(Matrix(duhamel_integral(L.matrix(), M, a, true) -
                                 direct)) < 1e-8 * std::max(scale, 1e-3));
    }
  }
}

TEST_CASE("exponential Lipschitz bound on a small ensemble") {
  Rng rng(derive_seed(19, 0));
  for (int trial = 0; trial < 16; ++trial) {
    auto L = random_strict_dissipative(rng, 5);
    Matrix M = L.matrix() + random_hermitian_perturbation(rng, 5, 0.4);
    for (double a : {0.1, 1.0, 10.0}) {
      const double lhs = operator_norm(
          Matrix(semigroup_raw(L.matrix(), a) - semigroup_raw(M, a)));
      const double rhs = a * operator_norm(Matrix(L.matrix() - M));
      CHECK(lhs <= rhs * (1.0 + 1e-10));
    }
  }
}

TEST_CASE("strong derivative of t -> exp(itL) exp(i(a-t)M)") {
  Rng rng(derive_seed(23, 0));
  auto Ld = random_strict_dissipative(rng, 4);
  const Matrix L = Ld.matrix();
  const Matrix M = L + random_hermitian_perturbation(rng, 4, 0.5);
  const double a = 1.0, t0 = 0.4;
  auto theta = [&](double t) {
    return Matrix(semigroup_raw(L, t) * semigroup_raw(M, a - t));
  };
  const Matrix formula =
      kI * semigroup_raw(L, t0) * (L - M) * semigroup_raw(M, a - t0);
  double prev_err = -1.0;
  for (double h : {1e-2, 5e-3, 2.5e-3}) {
    const Matrix fd = (theta(t0 + h) - theta(t0 - h)) / (2.0 * h);
    const double err = operator_norm(Matrix(fd - formula));
    if (prev_err > 0.0) {
      const double rate = prev_err / err;  // expect ~4 for O(h^2)
      CHECK(rate > 3.6);
      CHECK(rate < 4.4);
    }
    prev_err = err;
  }
}

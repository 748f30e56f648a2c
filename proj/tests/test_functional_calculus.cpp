#include <catch2/catch_amalgamated.hpp>

#include "dissipert/ensemble.hpp"
#include "dissipert/functional_calculus.hpp"

using namespace dissipert;

namespace {
Matrix scalar(cplx v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}
}  // namespace

TEST_CASE("oracle route basics") {
  SECTION("tones reproduce the semigroup") {
    Rng rng(derive_seed(31, 0));
    auto L = random_strict_dissipative(rng, 5);
    for (double t : {0.5, 2.0}) {
      auto r = f_of_L_oracle(GridFunction::tone(t), L);
      CHECK(operator_norm(Matrix(r.value - semigroup(L, t))) < 1e-11);
    }
  }
  SECTION("constant one gives the identity") {
    Rng rng(derive_seed(31, 1));
    auto L = random_strict_dissipative(rng, 4);
    auto r = f_of_L_oracle(GridFunction::tone(0.0), L);
    CHECK(operator_norm(Matrix(r.value - Matrix::Identity(4, 4))) < 1e-12);
  }
  SECTION("diagonal principal branch") {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = cplx{0.0, 1.0};
    d(1, 1) = cplx{0.0, 2.0};
    auto L = DissipativeMatrix::classify(d);
    auto r = f_of_L_oracle(ScalarFunction::shifted_power(0.5), L);
    CHECK(std::abs(r.value(0, 0) - std::sqrt(cplx{0.0, 2.0})) < 1e-14);
    CHECK(std::abs(r.value(1, 1) - std::sqrt(cplx{0.0, 3.0})) < 1e-14);
  }
  SECTION("Jordan block goes through the Schur-Parlett fallback") {
    Matrix j = Matrix::Zero(2, 2);
    j(0, 0) = j(1, 1) = cplx{0.0, 1.0};
    j(0, 1) = 1.0;
    auto L = DissipativeMatrix::classify(j);
    const double s = 0.7;
    auto r = f_of_L_oracle(GridFunction::tone(s), L);
    CHECK(r.schur_fallback);
    // exp(is(iI+N)) = e^{-s} (I + isN)
    CHECK(std::abs(r.value(0, 0) - std::exp(-s)) < 1e-12);
    CHECK(std::abs(r.value(0, 1) - kI * s * std::exp(-s)) < 1e-12);
    CHECK(std::abs(r.value(1, 0)) < 1e-12);
  }
}

TEST_CASE("fourier route") {
  SECTION("tone atom reproduces the semigroup") {
    Rng rng(derive_seed(37, 0));
    auto L = random_strict_dissipative(rng, 4);
    auto r = f_of_L_fourier(GridFunction::tone(1.3), L);
    CHECK(operator_norm(Matrix(r.value - semigroup(L, 1.3))) < 1e-12);
  }
  SECTION("scalar bump against 1-D quadrature") {
    auto f = GridFunction::freq_bump({0.0, 1.0});
    auto L = DissipativeMatrix::classify(scalar({0.0, 1.0}));
    auto r = f_of_L_fourier(f, L);
    cplx expect{0.0, 0.0};
    panel_quadrature(0.0, 1.0, 64, 16, [&](double x, double w) {
      expect += (w / kTwoPi) * f.profile()(x) * std::exp(-x);
    });
    CHECK(std::abs(r.value(0, 0) - expect) < 1e-12);
  }
  SECTION("zero function") {
    Rng rng(derive_seed(37, 1));
    auto L = random_strict_dissipative(rng, 3);
    auto r = f_of_L_fourier(GridFunction::zero(), L);
    CHECK(operator_norm(r.value) == 0.0);
  }
}

TEST_CASE("density route") {
  SECTION("Poisson reproduction at the scalar i") {
    auto L = DissipativeMatrix::classify(scalar({0.0, 1.0}));
    SemiSpectralMeasure meas(L);
    for (double s : {0.3, 1.0, 4.0}) {
      auto r = f_of_L_density(GridFunction::tone(s), L, meas);
      CHECK(std::abs(r.value(0, 0) - std::exp(-s)) < 1e-8);
    }
  }
  SECTION("real diagonal reduces to atom sums") {
    Matrix d = Matrix::Zero(3, 3);
    d(0, 0) = -1.0;
    d(1, 1) = 0.5;
    d(2, 2) = 2.0;
    auto L = DissipativeMatrix::classify(d);
    auto f = GridFunction::tone(0.9);
    auto r = f_of_L_density(f, L);
    auto oracle = f_of_L_oracle(f, L);
    CHECK(operator_norm(Matrix(r.value - oracle.value)) < 1e-12);
  }
  SECTION("random mixed 4x4 against the semigroup") {
    Rng rng(derive_seed(41, 0));
    auto L = random_mixed_dissipative(rng, 4, 2);
    auto r = f_of_L_density(GridFunction::tone(1.0), L);
    CHECK(operator_norm(Matrix(r.value - semigroup(L, 1.0))) < 1e-6);
  }
}

TEST_CASE("route agreement on random pairs") {
  Rng rng(derive_seed(43, 0));
  for (int trial = 0; trial < 12; ++trial) {
    const Eigen::Index n = 2 + (trial % 3) * 2;
    auto L = (trial % 4 == 3) ? random_mixed_dissipative(rng, n, n / 2)
                              : random_strict_dissipative(rng, n);
    const double lo = 0.25 + 0.5 * rng.uniform();
    const double hi = lo + 0.5 + 2.5 * rng.uniform();
    auto f = GridFunction::freq_bump({lo, hi});
    auto oracle = f_of_L_oracle(f, L);
    auto fourier = f_of_L_fourier(f, L);
    auto density = f_of_L_density(f, L);
    const double scale = std::max(operator_norm(oracle.value), 1e-9);
    CHECK(operator_norm(Matrix(fourier.value - oracle.value)) / scale <
          1e-6);
    CHECK(operator_norm(Matrix(density.value - oracle.value)) / scale <
          1e-6);
  }
}

TEST_CASE("multiplicativity on tones") {
  Rng rng(derive_seed(47, 0));
  auto L = random_strict_dissipative(rng, 5);
  const double s = 0.6, t = 1.1;
  auto fs = f_of_L_oracle(GridFunction::tone(s), L).value;
  auto ft = f_of_L_oracle(GridFunction::tone(t), L).value;
  auto fst = f_of_L_oracle(GridFunction::tone(s + t), L).value;
  CHECK(operator_norm(Matrix(fst - fs * ft)) < 1e-11);
}

TEST_CASE("H-infinity norm bound") {
  Rng rng(derive_seed(53, 0));
  for (int trial = 0; trial < 6; ++trial) {
    auto L = random_strict_dissipative(rng, 4);
    auto f = GridFunction::freq_bump({0.3, 2.0 + trial * 0.5});
    const double bound = f.sup_norm();
    CHECK(operator_norm(f_of_L_oracle(f, L).value) <=
          bound * (1.0 + 1e-3));
  }
}

TEST_CASE("cayley route consistency") {
  Rng rng(derive_seed(59, 0));
  for (int trial = 0; trial < 6; ++trial) {
    auto L = random_strict_dissipative(rng, 4);
    auto f = GridFunction::freq_bump({0.4, 2.4});
    auto direct = f_of_L_oracle(f, L);
    auto via_cayley = f_of_L_cayley(ScalarFunction(f), L);
    CHECK(operator_norm(Matrix(via_cayley.value - direct.value)) < 1e-8);
  }
  SECTION("conformal map hits known points") {
    CHECK(std::abs(cayley_conformal(cplx{0.0, 0.0}) - kI) < 1e-15);
    // omega((z-i)/(z+i)) = z on a sample point
    const cplx z{0.7, 0.4};
    const cplx zeta = (z - kI) / (z + kI);
    CHECK(std::abs(cayley_conformal(zeta) - z) < 1e-14);
  }
}

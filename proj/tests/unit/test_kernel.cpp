#include "helpers.hpp"

#include "sandwich/kernel.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>

using namespace sandwich;
using testing::matrix_power;
using testing::random_reversible;

namespace {

TransitionMatrix two_state(double a, double b) {
  Matrix m(2, 2);
  m << 1 - a, a, b, 1 - b;
  return TransitionMatrix(m);
}

// Positive joint law f(x, y) on |X| x |Y| and its two conditionals.
struct Joint {
  Matrix f;
  Matrix x_given_y;  // |Y| x |X|
  Matrix y_given_x;  // |X| x |Y|
};

Joint random_joint(int nx, int ny, Rng& rng) {
  Joint j;
  j.f = Matrix(nx, ny);
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) j.f(x, y) = 0.05 + rng.uniform();
  j.f /= j.f.sum();
  j.y_given_x = j.f;
  for (int x = 0; x < nx; ++x) j.y_given_x.row(x) /= j.f.row(x).sum();
  j.x_given_y = j.f.transpose();
  for (int y = 0; y < ny; ++y) j.x_given_y.row(y) /= j.f.col(y).sum();
  return j;
}

Vector sorted_real_eigenvalues(const Matrix& m) {
  Eigen::EigenSolver<Matrix> solver(m, false);
  Vector v = solver.eigenvalues().real();
  std::sort(v.data(), v.data() + v.size(), std::greater<>());
  return v;
}

}  // namespace

TEST_SUITE("kernel_core") {
  TEST_CASE("two-state chain against its closed forms") {
    const auto m = two_state(0.3, 0.1);
    const auto pi = kernel::stationary_distribution(m);
    CHECK(pi[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(kernel::detailed_balance_residual(m, pi) <= 1e-16);
    const auto eig = kernel::spectrum(m, pi);
    REQUIRE(eig.eigenvalues.size() == 1);
    CHECK(eig.eigenvalues(0) == doctest::Approx(0.6).epsilon(1e-14));
    CHECK_FALSE(eig.trivial_unverified);
    const auto general = kernel::spectrum(m);
    CHECK(general.method == SpectrumMethod::GeneralNumeric);
    CHECK(general.eigenvalues(0) == doctest::Approx(0.6).epsilon(1e-14));
    CHECK_FALSE(general.eigenvectors.has_value());
  }

  TEST_CASE("reducible chains are rejected") {
    CHECK_THROWS_AS(kernel::stationary_distribution(TransitionMatrix::identity(3)), NonErgodicError);
  }

  TEST_CASE("single state has an empty spectrum") {
    const auto one = TransitionMatrix::identity(1);
    CHECK(kernel::spectrum(one).eigenvalues.size() == 0);
    CHECK(kernel::spectrum(one, Distribution::uniform(1)).eigenvalues.size() == 0);
  }

  TEST_CASE("non-reversible cycle: reversible path refuses, general path warns") {
    Matrix m(3, 3);
    m << 0.1, 0.9, 0.0, 0.0, 0.1, 0.9, 0.9, 0.0, 0.1;
    const TransitionMatrix t(m);
    const auto pi = kernel::stationary_distribution(t);
    CHECK(pi[0] == doctest::Approx(1.0 / 3.0));
    CHECK(kernel::detailed_balance_residual(t, pi) > 0.1);
    CHECK_THROWS_AS(kernel::spectrum(t, pi), NotReversibleError);
    const auto general = kernel::spectrum(t);
    CHECK(general.complex_warning);
    CHECK(general.max_imaginary > 0.5);
  }

  TEST_CASE("pi must be strictly positive and of matching size") {
    const auto m = two_state(0.3, 0.1);
    Vector w(2);
    w << 1.0, 0.0;
    CHECK_THROWS_AS(kernel::spectrum(m, Distribution(w)), NotReversibleError);
    CHECK_THROWS_AS(kernel::spectrum(m, Distribution::uniform(3)), DimensionError);
  }

  TEST_CASE("reversible solver agrees with the general solver") {
    Rng rng(11);
    for (Eigen::Index n : {3, 7, 20}) {
      Vector target;
      const Matrix m = random_reversible(n, rng, target);
      const TransitionMatrix t(m);
      const auto pi = kernel::stationary_distribution(t);
      CHECK((pi.weights() - target).cwiseAbs().maxCoeff() <= 1e-12);
      const auto rev = kernel::spectrum(t, pi);
      const auto gen = kernel::spectrum(t);
      CHECK((rev.eigenvalues - gen.eigenvalues).cwiseAbs().maxCoeff() <= 1e-10);
      // Right eigenvectors, orthonormal in L2(pi).
      const Matrix& g = *rev.eigenvectors;
      CHECK((m * g - g * rev.eigenvalues.asDiagonal()).cwiseAbs().maxCoeff() <= 1e-10);
      const Matrix gram = g.transpose() * pi.weights().asDiagonal() * g;
      CHECK((gram - Matrix::Identity(n - 1, n - 1)).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  TEST_CASE("large reversible matrices take the tridiagonal path") {
    Rng rng(12);
    Vector target;
    const Matrix m = random_reversible(300, rng, target);
    const TransitionMatrix t(m);
    const auto pi = kernel::stationary_distribution(t);
    const auto rev = kernel::spectrum(t, pi);
    CHECK(rev.eigenvalues.size() == 299);
    CHECK((rev.eigenvalues - sorted_real_eigenvalues(m).tail(299)).cwiseAbs().maxCoeff() <= 1e-9);
  }

  TEST_CASE("DA composition matches the defining sums") {
    Rng rng(5);
    const Joint j = random_joint(4, 6, rng);
    const auto da = kernel::compose_da(ConditionalMatrix(j.x_given_y), ConditionalMatrix(j.y_given_x));
    // k(x'|x) = sum_y f(y|x) f(x'|y)
    Matrix k = Matrix::Zero(4, 4);
    for (int x = 0; x < 4; ++x)
      for (int xp = 0; xp < 4; ++xp)
        for (int y = 0; y < 6; ++y) k(x, xp) += j.y_given_x(x, y) * j.x_given_y(y, xp);
    CHECK((da.k.entries() - k).cwiseAbs().maxCoeff() <= 1e-15);
    const Distribution fx(j.f.rowwise().sum());
    const Distribution fy(Vector(j.f.colwise().sum().transpose()));
    CHECK(kernel::detailed_balance_residual(da.k, fx) <= 1e-15);
    CHECK(kernel::detailed_balance_residual(da.k_hat, fy) <= 1e-15);
    // Nonzero eigenvalues coincide; k_hat has |Y| - |X| extra zeros.
    const Vector small = kernel::spectrum(da.k, fx).eigenvalues;
    const Vector big = kernel::spectrum(da.k_hat, fy).eigenvalues;
    CHECK((big.head(3) - small).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(big.tail(2).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK_THROWS_AS(kernel::compose_da(ConditionalMatrix(j.x_given_y), ConditionalMatrix(j.x_given_y)),
                    DimensionError);
  }

  TEST_CASE("sandwich with an idempotent reversible middle step is dominated") {
    Rng rng(9);
    const Joint j = random_joint(5, 6, rng);
    const Vector fy = j.f.colwise().sum().transpose();
    // R resamples within the blocks {0,1,2} and {3,4,5} from f_Y restricted to the block.
    Matrix r = Matrix::Zero(6, 6);
    for (int block = 0; block < 2; ++block) {
      const double mass = fy.segment(3 * block, 3).sum();
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) r(3 * block + a, 3 * block + b) = fy(3 * block + b) / mass;
    }
    const TransitionMatrix rt(r);
    CHECK((r * r - r).cwiseAbs().maxCoeff() <= 1e-15);
    const auto sw = kernel::sandwich_compose(ConditionalMatrix(j.x_given_y), rt, ConditionalMatrix(j.y_given_x));
    const auto da = kernel::compose_da(ConditionalMatrix(j.x_given_y), ConditionalMatrix(j.y_given_x));
    const Distribution fx(j.f.rowwise().sum());
    CHECK(kernel::detailed_balance_residual(sw.k_tilde, fx) <= 1e-15);
    const auto result = kernel::domination_check(kernel::spectrum(sw.k_tilde, fx), kernel::spectrum(da.k, fx), 1e-12);
    CHECK(result.dominated);
    CHECK_FALSE(result.first_violation.has_value());

    // With R = identity the sandwich is the DA chain itself.
    const auto same = kernel::sandwich_compose(ConditionalMatrix(j.x_given_y), TransitionMatrix::identity(6),
                                               ConditionalMatrix(j.y_given_x));
    CHECK((same.k_tilde.entries() - da.k.entries()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((same.y_chain.entries() - da.k_hat.entries()).cwiseAbs().maxCoeff() <= 1e-15);
  }

  TEST_CASE("domination check names the first violation") {
    SpectrumReport a, b;
    a.eigenvalues = Vector(3);
    b.eigenvalues = Vector(3);
    a.eigenvalues << 0.5, 0.4, 0.1;
    b.eigenvalues << 0.6, 0.3, 0.2;
    const auto r = kernel::domination_check(a, b, 1e-10);
    CHECK_FALSE(r.dominated);
    CHECK(r.first_violation == 1);
    b.eigenvalues.resize(2);
    CHECK_THROWS_AS(kernel::domination_check(a, b, 0.0), DimensionError);
  }

  TEST_CASE("dominant eigenvalue by deflated power iteration") {
    Rng rng(3);
    Vector target;
    const TransitionMatrix t(random_reversible(12, rng, target));
    const auto eig = kernel::spectrum(t, kernel::stationary_distribution(t));
    const double largest = eig.eigenvalues.cwiseAbs().maxCoeff();
    const auto dom = kernel::dominant_eigenvalue(t);
    CHECK(std::abs(std::abs(dom.value) - largest) <= 1e-9);

    const auto flip = two_state(1.0, 1.0);
    CHECK(kernel::dominant_eigenvalue(flip).value == doctest::Approx(-1.0));
    CHECK(kernel::dominant_eigenvalue(two_state(0.5, 0.5)).value == doctest::Approx(0.0));

    Tolerances tight;
    tight.power_max_iterations = 2;
    tight.power_tolerance = 0.0;
    CHECK_THROWS_AS(kernel::dominant_eigenvalue(t, tight), ConvergenceError);
  }

  TEST_CASE("chi-square distance: direct powering and the spectral sum") {
    Rng rng(21);
    Vector target;
    const Matrix m = random_reversible(6, rng, target);
    const TransitionMatrix t(m);
    const auto pi = kernel::stationary_distribution(t);
    const auto eig = kernel::spectrum(t, pi);
    for (int n : {1, 2, 5, 17}) {
      const Matrix p = matrix_power(m, n);
      for (Eigen::Index x0 = 0; x0 < 6; ++x0) {
        double oracle = 0.0;
        for (Eigen::Index j = 0; j < 6; ++j) oracle += std::pow(p(x0, j) - pi[j], 2) / pi[j];
        const double direct = kernel::chi_square_distance(t, pi, x0, n);
        CHECK(direct == doctest::Approx(oracle).epsilon(1e-10));
        CHECK(std::abs(kernel::chi_square_spectral(eig, x0, n) - direct) <= 1e-12);
      }
    }
    CHECK_THROWS_AS(kernel::chi_square_distance(t, pi, 6, 1), std::out_of_range);
    CHECK_THROWS_AS(kernel::chi_square_distance(t, pi, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(kernel::chi_square_spectral(kernel::spectrum(t), 0, 1), std::invalid_argument);
  }
}

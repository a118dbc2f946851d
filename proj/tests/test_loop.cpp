#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "minkcmc/loop.hpp"
#include "oracles.hpp"

using namespace minkcmc;

TEST_CASE("eval: identity and omega_1") {
  MatrixLoop I = MatrixLoop::identity();
  CHECK((I.eval(cplx(0, 1)) - Mat2::Identity()).norm() == doctest::Approx(0.0));

  MatrixLoop w1 = omega_loop(1);
  Mat2 expect;
  expect << 1, 0, 0.5, 1;
  CHECK((w1.eval(2.0) - expect).norm() < 1e-15);
}

TEST_CASE("eval matches brute-force summation on random bands") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 20; ++it) {
    MatrixLoop L = oracles::random_loop(rng, 2);
    cplx lam = unit_circle(M_PI / 3);
    CHECK((L.eval(lam) - oracles::brute_force_eval(L, lam)).norm() < 1e-13);
    // also off the circle and for bands not containing symmetric powers
    CHECK((L.eval(cplx(0.3, -1.2)) - oracles::brute_force_eval(L, cplx(0.3, -1.2))).norm() <
          1e-11);
    MatrixLoop P = project_band(L, 1, 2);
    CHECK((P.eval(lam) - oracles::brute_force_eval(P, lam)).norm() < 1e-13);
  }
}

TEST_CASE("algebra: identity, unipotent inverse, psi = F B") {
  std::mt19937_64 rng(5);
  MatrixLoop L = oracles::random_loop(rng, 2);
  CHECK(loop_distance(mul(MatrixLoop::identity(), L), L) == doctest::Approx(0.0));

  MatrixLoop w1inv = inverse_unimodular(omega_loop(1));
  Mat2 low;
  low << 0, 0, -1, 0;
  MatrixLoop expect = MatrixLoop::identity() + MatrixLoop::monomial(-1, low);
  CHECK(loop_distance(w1inv, expect) == doctest::Approx(0.0));

  cplx z = 0.5;
  MatrixLoop F = oracles::closed_F_psi(1, z), B = oracles::closed_B_psi(1, z);
  CHECK(loop_distance(mul(F, B), psi_loop(1, z)) < 1e-12);
}

TEST_CASE("algebra: errors and truncation diagnostics") {
  MatrixLoop bad = MatrixLoop::constant(2.0 * Mat2::Identity());
  CHECK_THROWS_AS(inverse_unimodular(bad), Error);

  std::mt19937_64 rng(7);
  MatrixLoop L = oracles::random_loop(rng, 4, 1.0);
  BandPolicy tight;
  tight.max_band = 4;
  tight.tail_tol = 1e-12;
  double dropped = 0;
  MatrixLoop prod = mul(L, L, tight, &dropped);
  CHECK(prod.lo() >= -4);
  CHECK(prod.hi() <= 4);
  CHECK(dropped > tight.tail_tol);  // the caller escalates this as BandOverflow
}

TEST_CASE("project_band cases") {
  MatrixLoop w1 = omega_loop(1);
  MatrixLoop p00 = project_band(w1, 0, 0);
  CHECK(loop_distance(p00, MatrixLoop::identity()) == doctest::Approx(0.0));

  MatrixLoop neg = project_band(w1, w1.lo(), -1);
  Mat2 low;
  low << 0, 0, 1, 0;
  CHECK(loop_distance(neg, MatrixLoop::monomial(-1, low)) == doctest::Approx(0.0));

  std::mt19937_64 rng(3);
  MatrixLoop L = oracles::random_loop(rng, 3);
  int p = -1, q = 2;
  MatrixLoop sum = project_band(L, L.lo(), q) + project_band(L, q + 1, L.hi());
  CHECK(loop_distance(sum, L) < 1e-15);
  (void)p;
}

TEST_CASE("involutions: tau, rho, sigma parity") {
  MatrixLoop I = MatrixLoop::identity();
  CHECK(loop_distance(tau_involution(I), I) == doctest::Approx(0.0));

  // tau(omega_1) = [[1, lambda], [0, 1]], checked against pointwise evaluation
  MatrixLoop t = tau_involution(omega_loop(1));
  Mat2 up;
  up << 0, 1, 0, 0;
  MatrixLoop expect = MatrixLoop::identity() + MatrixLoop::monomial(1, up);
  CHECK(loop_distance(t, expect) < 1e-14);
  const Mat2 s3 = sigma3();
  for (int s = 0; s < 8; ++s) {
    cplx lam = unit_circle(2 * M_PI * s / 8 + 0.1);
    Mat2 direct = s3 * adjugate(omega_loop(1).eval(1.0 / std::conj(lam)).conjugate().transpose()) * s3;
    CHECK((t.eval(lam) - direct).norm() < 1e-13);
  }

  CHECK(is_twisted(omega_loop(1)));
  Mat2 upc;
  upc << 1, 1, 0, 1;
  CHECK_FALSE(is_twisted(MatrixLoop::constant(upc)));

  CHECK_THROWS_AS(tau_involution(MatrixLoop::constant(2.0 * Mat2::Identity())), Error);
}

TEST_CASE("tau is an involution; rho = inv o tau") {
  std::mt19937_64 rng(17);
  for (int it = 0; it < 10; ++it) {
    MatrixLoop F = oracles::random_real_form_loop(rng, 3);
    MatrixLoop B = oracles::random_plus_loop(rng);
    MatrixLoop L = mul(F, B);  // unimodular by construction
    CHECK(loop_distance(tau_involution(tau_involution(L)), L) < 1e-12 * std::max(1.0, L.norm()));
    CHECK(loop_distance(rho_involution(L), inverse_unimodular(tau_involution(L))) < 1e-12);
  }
}

TEST_CASE("twist map: identity, constant unipotent to omega_1, round trip") {
  CHECK(loop_distance(twist_map(MatrixLoop::identity()), MatrixLoop::identity()) ==
        doctest::Approx(0.0));

  Mat2 lowc;
  lowc << 1, 0, 1, 1;
  CHECK(loop_distance(twist_map(MatrixLoop::constant(lowc)), omega_loop(1)) == doctest::Approx(0.0));

  std::mt19937_64 rng(23);
  for (int it = 0; it < 10; ++it) {
    MatrixLoop L = oracles::random_loop(rng, 2);
    CHECK(loop_distance(untwist_map(twist_map(L)), L) < 1e-14);
  }
  CHECK_THROWS_AS(untwist_map(MatrixLoop::constant(lowc)), Error);
}

TEST_CASE("twist map is a group homomorphism") {
  std::mt19937_64 rng(29);
  for (int it = 0; it < 8; ++it) {
    MatrixLoop A = oracles::random_loop(rng, 2), B = oracles::random_loop(rng, 2);
    CHECK(loop_distance(twist_map(mul(A, B)), mul(twist_map(A), twist_map(B))) < 1e-11);
  }
}

TEST_CASE("lambda_derivative") {
  CHECK(lambda_derivative(MatrixLoop::identity()).norm() == doctest::Approx(0.0));

  MatrixLoop d = lambda_derivative(omega_loop(1));
  Mat2 low;
  low << 0, 0, -1, 0;
  CHECK(loop_distance(d, MatrixLoop::monomial(-1, low)) == doctest::Approx(0.0));

  std::mt19937_64 rng(31);
  MatrixLoop L = oracles::random_loop(rng, 3);
  for (double th : {0.2, 1.4, 3.0}) {
    cplx lam = unit_circle(th);
    CHECK((lambda_derivative(L).eval(lam) - oracles::fd_lambda_derivative(L, lam)).norm() < 1e-6);
  }
}

TEST_CASE("project_band idempotent and linear; mul associative") {
  std::mt19937_64 rng(37);
  MatrixLoop A = oracles::random_loop(rng, 3), B = oracles::random_loop(rng, 3);
  MatrixLoop P1 = project_band(A, -1, 2);
  CHECK(loop_distance(project_band(P1, -1, 2), P1) == doctest::Approx(0.0));
  CHECK(loop_distance(project_band(A + B, -1, 2),
                      project_band(A, -1, 2) + project_band(B, -1, 2)) < 1e-15);
  MatrixLoop C = oracles::random_loop(rng, 2);
  CHECK(loop_distance(mul(mul(A, B), C), mul(A, mul(B, C))) < 1e-10);
}

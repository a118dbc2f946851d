#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "minkcmc/families.hpp"
#include "minkcmc/symsurface.hpp"
#include "oracles.hpp"

using namespace minkcmc;

namespace {

double pt_dist(const AmbientPoint& a, const AmbientPoint& b) { return euclid_norm(a - b); }

Potential hyperboloid_potential() {
  Potential p;
  p.H = 0.5;
  p.lam_lo = -1;
  p.lam_hi = -1;
  p.name = "hyperboloid";
  p.terms[-1][1].c = {1.0};
  return p;
}

Potential cylinder_potential() {
  Potential p = hyperboloid_potential();
  p.name = "cylinder";
  p.terms[-1][2].c = {1.0};
  return p;
}

}  // namespace

TEST_CASE("ambient conversion and the trace form") {
  AmbientPoint e1{1, 0, 0}, e2{0, 1, 0}, e3{0, 0, 1};
  CHECK(minkowski_dot(e1, e1) == 1.0);
  CHECK(minkowski_dot(e2, e2) == 1.0);
  CHECK(minkowski_dot(e3, e3) == -1.0);
  // <X,Y> = (1/2) tr(XY) on matrices
  std::mt19937_64 rng(71);
  std::normal_distribution<double> g;
  for (int it = 0; it < 10; ++it) {
    AmbientPoint a{g(rng), g(rng), g(rng)}, b{g(rng), g(rng), g(rng)};
    cplx tr = (from_ambient(a) * from_ambient(b)).trace();
    CHECK(std::abs(0.5 * tr.real() - minkowski_dot(a, b)) < 1e-13);
    CHECK(std::abs(tr.imag()) < 1e-13);
    double resid;
    AmbientPoint back = to_ambient(from_ambient(a), &resid);
    CHECK(pt_dist(back, a) < 1e-14);
    CHECK(resid < 1e-14);
  }
}

TEST_CASE("sym_point: identity frame") {
  AmbientPoint f = sym_point(MatrixLoop::identity(), 1.0, 0.5);
  CHECK(pt_dist(f, AmbientPoint{0, 0, -1}) < 1e-14);
}

TEST_CASE("sym_point: cylinder closed form") {
  for (cplx z : {cplx(0.2, 0.3), cplx(-0.4, 0.1), cplx(0.45, -0.45)}) {
    MatrixLoop F = oracles::cylinder_F(z, 26);
    AmbientPoint f = sym_point(F, 1.0, 0.5);
    CHECK(pt_dist(f, oracles::cylinder_point(z, 0.5)) < 1e-9);
  }
}

TEST_CASE("sym_point: hyperboloid closed form on both components") {
  for (cplx z : {cplx(0.3, 0.4), cplx(-0.5, 0.2), cplx(1.1, 0.4), cplx(-0.9, 0.9)}) {
    MatrixLoop F = oracles::closed_F_psi(2, z);
    AmbientPoint f = sym_point(F, 1.0, 0.5);
    CHECK(pt_dist(f, oracles::hyperboloid_point(z, 0.5)) < 1e-11);
    AmbientPoint n = normal_vec(F, 1.0);
    CHECK(std::abs(minkowski_dot(n, n) + 1.0) < 1e-11);
  }
}

TEST_CASE("normal_vec: identity and the component formula") {
  AmbientPoint n = normal_vec(MatrixLoop::identity(), 1.0);
  CHECK(pt_dist(n, AmbientPoint{0, 0, 1}) < 1e-14);

  std::mt19937_64 rng(73);
  for (int it = 0; it < 6; ++it) {
    MatrixLoop F = oracles::random_real_form_loop(rng, 2);
    cplx lam = unit_circle(0.9);
    Mat2 Fv = F.eval(lam);
    AmbientPoint n2 = normal_vec(F, lam);
    double aa_bb = std::norm(Fv(0, 0)) + std::norm(Fv(0, 1));
    CHECK(n2.x0 == doctest::Approx(aa_bb).epsilon(1e-10));
    CHECK(std::abs(minkowski_dot(n2, n2) + 1.0) < 1e-10);
  }
}

TEST_CASE("normal is tangent-orthogonal on the cylinder (finite differences)") {
  double h = 1e-5;
  cplx z(0.1, 0.2);
  AmbientPoint n = normal_vec(oracles::cylinder_F(z, 26), 1.0);
  AmbientPoint fx = (1.0 / (2 * h)) * (oracles::cylinder_point(z + h, 0.5) -
                                       oracles::cylinder_point(z - h, 0.5));
  AmbientPoint fy = (1.0 / (2 * h)) * (oracles::cylinder_point(z + cplx(0, h), 0.5) -
                                       oracles::cylinder_point(z - cplx(0, h), 0.5));
  CHECK(std::abs(minkowski_dot(n, fx)) < 1e-8 * euclid_norm(fx));
  CHECK(std::abs(minkowski_dot(n, fy)) < 1e-8 * euclid_norm(fy));
}

TEST_CASE("parallel surfaces") {
  double H = 0.5;
  ParallelPoints pp = parallel_points(MatrixLoop::identity(), 1.0, H);
  CHECK(pt_dist(pp.parallel, AmbientPoint{0, 0, 1.0 / (2 * H)}) < 1e-14);
  CHECK(pt_dist(pp.gauss, AmbientPoint{0, 0, 0}) < 1e-14);

  std::mt19937_64 rng(79);
  for (int it = 0; it < 8; ++it) {
    MatrixLoop F = oracles::random_real_form_loop(rng, 3);
    cplx lam = unit_circle(1.3);
    AmbientPoint f = sym_point(F, lam, H);
    AmbientPoint n = normal_vec(F, lam);
    ParallelPoints q = parallel_points(F, lam, H);
    CHECK(pt_dist(q.parallel - f, (1.0 / H) * n) < 1e-9);
    CHECK(pt_dist(q.gauss - f, (1.0 / (2 * H)) * n) < 1e-9);
    // so <f_gauss - f, N> = -1/(2H) with <N,N> = -1
    CHECK(std::abs(minkowski_dot(q.gauss - f, n) + 1.0 / (2 * H)) < 1e-9);
  }
}

TEST_CASE("sym is invariant under constant diagonal right factors") {
  std::mt19937_64 rng(83);
  for (int it = 0; it < 8; ++it) {
    MatrixLoop F = oracles::random_real_form_loop(rng, 3);
    std::uniform_real_distribution<double> ang(0, 2 * M_PI);
    Mat2 D;
    cplx ph = std::polar(1.0, ang(rng));
    D << ph, 0, 0, std::conj(ph);
    MatrixLoop FD = mul(F, MatrixLoop::constant(D));
    cplx lam = unit_circle(0.4);
    CHECK(pt_dist(sym_point(F, lam, 0.5), sym_point(FD, lam, 0.5)) < 1e-11);
    // the raw S-loop is invariant for any constant diagonal, unitary or not
    Mat2 D2;
    D2 << 1.7, 0, 0, 1 / 1.7;
    MatrixLoop FD2 = mul(F, MatrixLoop::constant(D2));
    CHECK(loop_distance(sym_lie_loop(FD2), sym_lie_loop(F)) < 1e-10);
  }
}

TEST_CASE("sym_point rejects non real-form input") {
  std::mt19937_64 rng(89);
  MatrixLoop L = mul(oracles::random_real_form_loop(rng, 2), oracles::random_plus_loop(rng, 1));
  CHECK_THROWS_AS(sym_point(L, 1.0, 0.5), Error);
}

TEST_CASE("metric_rho") {
  CHECK(metric_rho(MatrixLoop::identity()).rho == doctest::Approx(1.0));
  MatrixLoop B = oracles::closed_B_psi(2, cplx(0.3, 0.4));
  // closed B for psi^2 has B(0) = diag(1/s, s) with s = sqrt(1-|z|^2); our
  // normalized convention requires positive diagonal, which it satisfies
  MetricData md = metric_rho(B);
  CHECK(md.rho == doctest::Approx(1.0 / std::sqrt(0.75)).epsilon(1e-12));
  CHECK(md.u == doctest::Approx(2 * std::log(md.rho)));

  MatrixLoop bad = MatrixLoop::constant([] {
    Mat2 m;
    m << 1, 0.5, 0, 1;
    return m;
  }());
  CHECK_THROWS_AS(metric_rho(bad), Error);
}

TEST_CASE("extended_sym: psi^1 gives i sigma3 on the big cell and at omega_1") {
  MatrixLoop is3 = MatrixLoop::constant(cplx(0, 1) * sigma3());
  for (cplx z : {cplx(0.5, 0), cplx(0.99, 0), cplx(1.01, 0), cplx(0.7, 0.6)}) {
    MatrixLoop S = extended_sym(psi_loop(1, z));
    CHECK(loop_distance(S, is3) < 1e-9);
  }
  P1Aux aux;
  aux.F0 = MatrixLoop::identity();
  aux.B0 = MatrixLoop::identity();
  MatrixLoop S = extended_sym(omega_loop(1), aux);
  CHECK(loop_distance(S, is3) < 1e-12);
}

TEST_CASE("extended_sym: psi^2 values match the explicit formula and diverge") {
  for (cplx z : {cplx(0.5, 0), cplx(0.9, 0.1)}) {
    MatrixLoop S = extended_sym(psi_loop(2, z));
    CHECK(loop_distance(S, oracles::closed_sym_psi(2, z)) < 1e-9);
  }
  double prev = 0;
  for (double t : {0.9, 0.99, 0.999}) {
    MatrixLoop S = extended_sym(psi_loop(2, t));
    double mag = S.norm();
    CHECK(mag > prev);
    prev = mag;
  }
  CHECK(prev > 1e3);
  CHECK_THROWS_AS(extended_sym(omega_loop(2)), Error);
  try {
    extended_sym(omega_loop(2));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SecondSmallCell);
  }
  try {
    extended_sym(omega_loop(1));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingAux);
  }
}

TEST_CASE("build_surface: cylinder patch matches the closed form") {
  Potential p = cylinder_potential();
  GridSpec g;
  g.x0 = g.y0 = -0.3;
  g.x1 = g.y1 = 0.3;
  g.nx = g.ny = 11;
  g.z0 = 0;
  BandPolicy policy;
  policy.max_band = 24;
  SurfaceMesh mesh = build_surface(p, g, MatrixLoop::identity(), 1.0, policy);
  CHECK(mesh.flagged_count() == 0);
  double worst = 0, worst_rho = 0;
  for (const auto& s : mesh.samples) {
    REQUIRE(s.valid_point);
    worst = std::max(worst, pt_dist(s.point, oracles::cylinder_point(s.z, 0.5)));
    worst_rho = std::max(worst_rho, std::abs(s.rho - 1.0));
    CHECK(std::abs(s.q - cplx(-1, 0)) < 1e-12);
  }
  CHECK(worst < 1e-8);
  CHECK(worst_rho < 1e-9);
}

TEST_CASE("build_surface: hyperboloid disk flags the unit circle as P2") {
  Potential p = hyperboloid_potential();
  GridSpec g;
  g.x0 = g.y0 = -1.5;
  g.x1 = g.y1 = 1.5;
  g.nx = g.ny = 21;
  g.z0 = 0;
  g.mask_radius = 1.5;
  BandPolicy policy;
  SurfaceMesh mesh = build_surface(p, g, MatrixLoop::identity(), 1.0, policy);
  double h = g.hx();
  int checked_flag = 0, checked_good = 0;
  for (const auto& s : mesh.samples) {
    if (s.masked) continue;
    double d = std::abs(std::abs(s.z) - 1.0);
    if (d < h) {
      CHECK(s.cell.tag == CellTag::P2);
      CHECK(s.cell.evidence.rho_slope < -0.4);
      ++checked_flag;
    }
    if (std::abs(s.z) < 1.0 - 1.35 * h || std::abs(s.z) > 1.0 + 1.35 * h) {
      REQUIRE(s.valid_point);
      CHECK(pt_dist(s.point, oracles::hyperboloid_point(s.z, 0.5)) < 1e-8);
      CHECK(std::abs(s.rho - oracles::hyperboloid_rho(s.z)) < 1e-9);
      ++checked_good;
    }
  }
  CHECK(checked_flag > 20);
  CHECK(checked_good > 100);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "minkcmc/families.hpp"
#include "minkcmc/meshio.hpp"
#include "minkcmc/potential.hpp"
#include "oracles.hpp"

using namespace minkcmc;
using nlohmann::json;

namespace {

Potential cylinder_potential() {
  Potential p;
  p.H = 0.5;
  p.lam_lo = -1;
  p.lam_hi = -1;
  p.name = "cylinder";
  p.terms[-1][1].c = {1.0};
  p.terms[-1][2].c = {1.0};
  return p;
}

Potential hyperboloid_potential() {
  Potential p;
  p.H = 0.5;
  p.lam_lo = -1;
  p.lam_hi = -1;
  p.name = "hyperboloid";
  p.terms[-1][1].c = {1.0};
  return p;
}

GridSpec small_grid(double ext = 0.4, int n = 9) {
  GridSpec g;
  g.kind = GridSpec::Kind::Rect;
  g.x0 = -ext;
  g.x1 = ext;
  g.y0 = -ext;
  g.y1 = ext;
  g.nx = n;
  g.ny = n;
  g.z0 = 0;
  return g;
}

}  // namespace

TEST_CASE("parse: example documents") {
  json doc = {
      {"H", 0.5},
      {"lambda_band", {-1, -1}},
      {"entries",
       {{{"row", 0}, {"col", 1}, {"power", -1}, {"poly", {{1.0, 0.0}}}},
        {{"row", 1}, {"col", 0}, {"power", -1}, {"poly", {{1.0, 0.0}}}}}},
      {"domain", {{"type", "rect"}, {"x0", -0.5}, {"x1", 0.5}, {"y0", -0.5}, {"y1", 0.5}}},
      {"grid", {{"nx", 5}, {"ny", 5}}},
  };
  RunSpec spec = parse_run_spec(doc);
  CHECK(spec.potential.a_minus1().eval(0.3) == cplx(1, 0));
  CHECK(spec.potential.b_minus1().eval(0.3) == cplx(1, 0));

  // diagonal entry at an odd lambda power violates the parity rule
  json bad = doc;
  bad["entries"].push_back({{"row", 0}, {"col", 0}, {"power", -1}, {"poly", {{1.0, 0.0}}}});
  CHECK_THROWS_AS(parse_run_spec(bad), Error);

  // Smyth document with c = 100, k = 1
  json smyth = doc;
  smyth["entries"][1]["poly"] = {{0.0, 0.0}, {100.0, 0.0}};
  RunSpec sm = parse_run_spec(smyth);
  CHECK(sm.potential.b_minus1().eval(0.5) == cplx(50, 0));
}

TEST_CASE("parse: trace violation and vanishing a_{-1}") {
  json doc = {
      {"H", 0.5},
      {"entries",
       {{{"row", 0}, {"col", 0}, {"power", 0}, {"poly", {{1.0, 0.0}}}},
        {{"row", 1}, {"col", 1}, {"power", 0}, {"poly", {{1.0, 0.0}}}},
        {{"row", 0}, {"col", 1}, {"power", -1}, {"poly", {{1.0, 0.0}}}}}},
  };
  CHECK_THROWS_AS(parse_run_spec(doc), Error);

  json nov = {{"H", 0.5},
              {"entries", {{{"row", 1}, {"col", 0}, {"power", -1}, {"poly", {{1.0, 0.0}}}}}}};
  CHECK_THROWS_AS(parse_run_spec(nov), Error);
}

TEST_CASE("hopf_q for the three model potentials") {
  CHECK(std::abs(hopf_q(cylinder_potential(), cplx(0.3, 0.2)) - cplx(-1, 0)) < 1e-15);
  CHECK(std::abs(hopf_q(hyperboloid_potential(), cplx(0.3, 0.2))) < 1e-15);
  Potential sm = smyth_potential(100, 1);
  cplx z(0.2, 0.1);
  CHECK(std::abs(hopf_q(sm, z) - (-2.0 * 0.5 * 100.0 * z)) < 1e-12);
}

TEST_CASE("integrate: cylinder closed form") {
  Potential p = cylinder_potential();
  GridSpec g = small_grid(0.4, 9);
  BandPolicy policy;
  policy.max_band = 24;
  FrameField ff = integrate_frame(p, g, MatrixLoop::identity(), policy);
  int checked = 0;
  for (int idx : {0, 12, 24, 40, 44, 60, 70, 80, 35, 55}) {
    int i = idx % 9, j = idx / 9;
    cplx z = g.vertex(i, j);
    MatrixLoop expect = oracles::cylinder_phi(z, 20);
    double d = 0;
    for (int s = 0; s < 6; ++s) {
      cplx lam = unit_circle(2 * M_PI * s / 6 + 0.15);
      d = std::max(d, (ff.at(i, j).eval(lam) - expect.eval(lam)).norm());
    }
    CHECK(d < 1e-9);
    ++checked;
  }
  CHECK(checked == 10);
}

TEST_CASE("integrate: nilpotent potential is exact") {
  Potential p = hyperboloid_potential();
  GridSpec g = small_grid(0.4, 7);
  BandPolicy policy;
  FrameField ff = integrate_frame(p, g, MatrixLoop::identity(), policy);
  for (int j = 0; j < 7; ++j) {
    for (int i = 0; i < 7; ++i) {
      cplx z = g.vertex(i, j);
      CHECK(loop_distance(ff.at(i, j), psi_loop(2, z)) < 1e-12);
    }
  }
}

TEST_CASE("integrate: zero one-form keeps phi0") {
  // xi = 0 is not a valid potential document (a_{-1} must not vanish), but the
  // integrator itself must fix phi in that case
  Potential p;
  p.H = 0.5;
  MatrixLoop phi = omega_loop(1);
  MatrixLoop out = integrate_segment(p, phi, cplx(-0.2, 0.1), cplx(0.3, -0.4), BandPolicy{},
                                     1e-10, 1e-12, 0.1);
  CHECK(loop_distance(out, phi) == doctest::Approx(0.0));
}

TEST_CASE("integrate: path independence across grid routes") {
  Potential p = smyth_potential(2.0, 1);
  BandPolicy policy;
  policy.max_band = 30;
  cplx target(0.35, 0.25);
  MatrixLoop direct = integrate_segment(p, MatrixLoop::identity(), 0, target, policy, 1e-11,
                                        1e-13, 0.05);
  MatrixLoop via_x = integrate_segment(p, MatrixLoop::identity(), 0, cplx(0.35, 0), policy,
                                       1e-11, 1e-13, 0.05);
  via_x = integrate_segment(p, via_x, cplx(0.35, 0), target, policy, 1e-11, 1e-13, 0.05);
  CHECK(loop_distance(direct, via_x) < 1e-8 * std::max(1.0, direct.norm()));
}

TEST_CASE("integrate: det stays 1 and twisting is preserved") {
  Potential p = smyth_potential(1.0, 2);
  GridSpec g = small_grid(0.5, 7);
  BandPolicy policy;
  policy.max_band = 30;
  FrameField ff = integrate_frame(p, g, omega_loop(1), policy);
  for (int j = 0; j < 7; ++j) {
    for (int i = 0; i < 7; ++i) {
      CHECK(unimodular_deviation(ff.at(i, j), 8) < 1e-8);
      CHECK(is_twisted(ff.at(i, j), 1e-9));
    }
  }
}

TEST_CASE("integrate: fixed-step order is at least four on the cylinder") {
  Potential p = cylinder_potential();
  cplx target(0.5, 0);
  MatrixLoop ref = oracles::cylinder_phi(target, 22);
  auto err_at = [&](double h) {
    MatrixLoop phi = integrate_segment(p, MatrixLoop::identity(), 0, target, BandPolicy{28, 1e-12},
                                       1e30, 1e30, 1.0, nullptr, h);
    double d = 0;
    for (int s = 0; s < 6; ++s) {
      cplx lam = unit_circle(2 * M_PI * s / 6 + 0.35);
      d = std::max(d, (phi.eval(lam) - ref.eval(lam)).norm());
    }
    return d;
  };
  double e1 = err_at(0.05), e2 = err_at(0.025);
  CHECK(e1 / e2 >= 16.0);
}

TEST_CASE("grid spec validation") {
  GridSpec g = small_grid();
  g.z0 = cplx(0.1234, 0);  // off the grid
  CHECK_THROWS_AS(g.validate(), Error);
  GridSpec p;
  p.kind = GridSpec::Kind::Polar;
  p.rmin = 0.1;
  p.rmax = 1.0;
  p.nr = 5;
  p.ntheta = 12;
  p.z0 = 0;
  CHECK_NOTHROW(p.validate());
}

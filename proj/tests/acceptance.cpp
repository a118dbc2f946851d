// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are fixed here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "minkcmc/families.hpp"
#include "minkcmc/geomcheck.hpp"
#include "minkcmc/symsurface.hpp"
#include "oracles.hpp"

using namespace minkcmc;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s  (%s)\n", pass ? "PASS" : "FAIL", idx, name,
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Potential cylinder_potential() {
  Potential p;
  p.H = 0.5;
  p.lam_lo = p.lam_hi = -1;
  p.name = "cylinder";
  p.terms[-1][1].c = {1.0};
  p.terms[-1][2].c = {1.0};
  return p;
}

Potential hyperboloid_potential() {
  Potential p;
  p.H = 0.5;
  p.lam_lo = p.lam_hi = -1;
  p.name = "hyperboloid";
  p.terms[-1][1].c = {1.0};
  return p;
}

// ---------------------------------------------------------------- criterion 1
void criterion_cylinder() {
  auto t0 = std::chrono::steady_clock::now();
  Potential p = cylinder_potential();
  GridSpec g;
  g.x0 = g.y0 = -0.5;
  g.x1 = g.y1 = 0.5;
  g.nx = g.ny = 41;
  g.z0 = 0;
  BandPolicy policy;
  policy.max_band = 20;
  policy.tail_tol = 1e-12;
  SurfaceMesh mesh = build_surface(p, g, MatrixLoop::identity(), 1.0, policy);
  double worst = 0, image_worst = 0;
  bool all_valid = true;
  for (const auto& s : mesh.samples) {
    if (!s.valid_point) {
      all_valid = false;
      continue;
    }
    worst = std::max(worst, euclid_norm(s.point - oracles::cylinder_point(s.z, 0.5)));
    image_worst = std::max(image_worst,
                           std::abs(s.point.x0 * s.point.x0 - s.point.x2 * s.point.x2 - 1.0));
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool pass = all_valid && worst < 1e-6 && image_worst < 1e-8 && secs < 30.0;
  report(1, "cylinder pipeline oracle", pass,
         "max err " + fmt(worst) + ", image err " + fmt(image_worst) + ", " + fmt(secs) + " s");
}

// ---------------------------------------------------------------- criterion 2
void criterion_hyperboloid() {
  Potential p = hyperboloid_potential();
  GridSpec g;
  g.x0 = g.y0 = -1.5;
  g.x1 = g.y1 = 1.5;
  g.nx = g.ny = 41;
  g.z0 = 0;
  g.mask_radius = 1.5;
  BandPolicy policy;
  SurfaceMesh mesh = build_surface(p, g, MatrixLoop::identity(), 1.0, policy);
  double h = g.hx();
  double worst = 0;
  int flagged_ok = 0, flagged_bad = 0, good = 0, invalid_good_region = 0;
  for (const auto& s : mesh.samples) {
    if (s.masked) continue;
    double r = std::abs(s.z);
    if (std::abs(r - 1.0) < h) {
      bool ok = s.cell.tag == CellTag::P2 && s.cell.evidence.rho_slope < -0.4;
      (ok ? flagged_ok : flagged_bad)++;
    }
    if (r <= 0.9 || (r >= 1.1 && r <= 1.5)) {
      if (!s.valid_point) {
        ++invalid_good_region;
        continue;
      }
      worst = std::max(worst, euclid_norm(s.point - oracles::hyperboloid_point(s.z, 0.5)));
      ++good;
    }
  }
  bool pass = worst < 1e-6 && flagged_bad == 0 && flagged_ok > 0 && invalid_good_region == 0 &&
              good > 500;
  report(2, "hyperboloid oracle with P2 ring", pass,
         "max err " + fmt(worst) + ", ring P2 " + std::to_string(flagged_ok) + "/" +
             std::to_string(flagged_ok + flagged_bad) + ", unflagged good " +
             std::to_string(good) + ", bad-invalid " + std::to_string(invalid_good_region));
}

// ---------------------------------------------------------------- criterion 3
void criterion_constant() {
  std::mt19937_64 rng(20240001);
  double worst = 0;
  int dispatch_bad = 0, sign_bad = 0;
  for (int it = 0; it < 1000; ++it) {
    Mat2 X = oracles::random_sl2(rng);
    ConstantIwasawa r = iwasawa_constant(X);
    worst = std::max(worst, (r.F * r.B - X).norm() / X.norm());
    double a11 = std::abs(X(0, 0)), a21 = std::abs(X(1, 0));
    int expect = a11 > a21 ? 1 : (a11 < a21 ? 2 : 3);
    if (r.case_id != expect) ++dispatch_bad;
    if (expect != 3) {
      double sig = std::norm(r.u) - std::norm(r.v);
      if (sig * (expect == 1 ? 1.0 : -1.0) <= 0) ++sign_bad;
    }
  }
  bool pass = worst < 1e-10 && dispatch_bad == 0 && sign_bad == 0;
  report(3, "constant-loop Iwasawa split", pass,
         "max resid " + fmt(worst) + ", dispatch errors " + std::to_string(dispatch_bad) +
             ", sign errors " + std::to_string(sign_bad));
}

// ---------------------------------------------------------------- criterion 4
void criterion_kernel_closed_forms() {
  double worst = 0;
  bool cells_ok = true;
  for (int m : {1, 2}) {
    for (cplx z : {cplx(0.5, 0), cplx(0.9, 0), cplx(1.1, 0) * unit_circle(M_PI / 4)}) {
      IwasawaResult r = iwasawa_kernel(psi_loop(m, z));
      worst = std::max(worst, oracles::diag_phase_distance(r.F, oracles::closed_F_psi(m, z)));
    }
    KernelOutcome k = try_iwasawa_kernel(omega_loop(m));
    if (k.status != FactorStatus::SmallCellSuspected) cells_ok = false;
  }
  bool pass = worst < 1e-8 && cells_ok;
  report(4, "kernel method closed forms", pass,
         "max F dist " + fmt(worst) + (cells_ok ? ", omega_m rejected" : ", omega_m NOT rejected"));
}

// ---------------------------------------------------------------- criterion 5
void criterion_round_trip() {
  std::mt19937_64 rng(20240005);
  double worst = 0, rho_rep = 0;
  for (int it = 0; it < 200; ++it) {
    int n = 1 + it % 4;
    MatrixLoop F = oracles::random_real_form_loop(rng, n, it % 5 == 3);
    MatrixLoop B = oracles::random_plus_loop(rng, std::min(2 * (it % 2) + 1, 3));
    MatrixLoop X = mul(F, B);
    IwasawaResult r1 = iwasawa_kernel(X);
    IwasawaResult r2 = iwasawa_kernel(X);
    worst = std::max(worst, oracles::diag_phase_distance(r1.F, F) / std::max(1.0, F.norm()));
    rho_rep = std::max(rho_rep, std::abs(r1.rho0 - r2.rho0));
  }
  bool pass = worst < 1e-8 && rho_rep < 1e-10;
  report(5, "round-trip recovery of (F, B)", pass,
         "max F err " + fmt(worst) + ", rho0 reproducibility " + fmt(rho_rep));
}

// ---------------------------------------------------------------- criterion 6
void criterion_extended_sym() {
  MatrixLoop is3 = MatrixLoop::constant(cplx(0, 1) * sigma3());
  double worst = 0;
  for (double r : {0.5, 0.99, 1.01}) {
    MatrixLoop S = extended_sym(psi_loop(1, cplx(r, 0)));
    worst = std::max(worst, loop_distance(S, is3));
  }
  double grow = 1e300;
  for (double r : {1.0 - 1e-3, 1.0 + 1e-3}) {
    MatrixLoop S = extended_sym(psi_loop(2, cplx(r, 0)));
    double comp = 0;
    for (int j = S.lo(); j <= S.hi(); ++j) comp = std::max(comp, S[j].cwiseAbs().maxCoeff());
    grow = std::min(grow, comp);
  }
  bool pass = worst < 1e-9 && grow >= 1e3;
  report(6, "extended Sym on P1, divergence at P2", pass,
         "S~(psi^1) err " + fmt(worst) + ", min growth " + fmt(grow));
}

// ---------------------------------------------------------------- criterion 7
void criterion_revolution() {
  std::mt19937_64 rng(20240007);
  std::uniform_real_distribution<double> ar(0.7, 1.3), br(0.2, 0.45), cr(-0.5, 0.5);
  double worst_split = 0, worst_detb = 0, worst_kernel = 0, worst_H = 0;
  int axis_bad = 0, done = 0;
  while (done < 5) {
    RevolutionParams p{ar(rng), br(rng), cr(rng)};
    ProfileSolution prof = solve_profile_v(p, -0.25, 0.45);
    if (prof.left_clipped || prof.right_clipped) continue;
    ++done;
    // explicit factors at sampled z, against exp(zA) and the kernel route
    for (cplx z : {cplx(0.1, 0.05), cplx(-0.12, 0.22), cplx(0.15, -0.07)}) {
      RevolutionFrame fr = revolution_frame(p, prof, z);
      worst_split = std::max(worst_split, fr.split_residual);
      worst_detb = std::max(worst_detb, fr.det_b_dev);
      IwasawaResult r = iwasawa_kernel(mul(fr.F, fr.B));
      worst_kernel = std::max(worst_kernel, oracles::diag_phase_distance(r.F, fr.F) /
                                                std::max(1.0, fr.F.norm()));
    }
    // lambda0 = 1 surface on an h = 1/80 grid; mean curvature vs -2ab
    GridSpec g;
    g.x0 = -0.15;
    g.x1 = 0.15;
    g.y0 = 0;
    g.y1 = 0.3;
    g.nx = g.ny = 25;
    g.z0 = cplx(-0.15, 0);
    SurfaceMesh mesh;
    mesh.grid = g;
    mesh.H = p.H();
    mesh.lambda0 = 1.0;
    mesh.samples.assign(static_cast<size_t>(g.size()), SurfaceSample{});
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        SurfaceSample& s = mesh.at(i, j);
        s.z = g.vertex(i, j);
        RevolutionFrame fr = revolution_frame(p, prof, s.z, 20, 96);
        s.point = sym_point(fr.F, 1.0, p.H());
        s.normal = normal_vec(fr.F, 1.0);
        s.rho = metric_rho(fr.B).rho;
        s.u = 2 * std::log(s.rho);
        s.valid_point = true;
        s.cell.tag = CellTag::BigCell;
      }
    }
    CheckResult mc = mean_curvature_residual(mesh, p.H(), 1e-3);
    worst_H = std::max(worst_H, mc.max_residual);
    double d = (p.a + p.b) * (p.a + p.b) - p.c * p.c;
    AxisClass cls = axis_classify(p.a, p.b, p.c);
    AxisClass expect = std::abs(d) < 1e-12 ? AxisClass::Null
                                           : (d > 0 ? AxisClass::Spacelike : AxisClass::Timelike);
    if (cls != expect) ++axis_bad;
  }
  bool pass = worst_split < 1e-7 && worst_detb < 1e-9 && worst_kernel < 1e-7 &&
              worst_H < 1e-3 && axis_bad == 0;
  report(7, "revolution frames and surfaces", pass,
         "split " + fmt(worst_split) + ", detB " + fmt(worst_detb) + ", kernel " +
             fmt(worst_kernel) + ", |H_est - H| " + fmt(worst_H));
}

// ---------------------------------------------------------------- criterion 8
void criterion_profile() {
  RevolutionParams p{1.0, 0.25, -0.5};
  ProfileSolution prof = solve_profile_v(p, -0.4, 0.4);
  SnClosedForm cf = sn_closed_form(p);
  double worst = 0;
  for (size_t i = 0; i < prof.x.size(); ++i) {
    worst = std::max(worst, std::abs(prof.v[i] - cf.eval(prof.x[i], p)));
  }
  bool pass = cf.valid && worst < 1e-8 && prof.max_first_order_residual < 1e-8;
  report(8, "profile ODE vs Jacobi sn closed form", pass,
         "sn err " + fmt(worst) + ", first-order resid " + fmt(prof.max_first_order_residual));
}

// ---------------------------------------------------------------- criterion 9
void criterion_smyth() {
  Potential p = smyth_potential(1.0, 1);
  BandPolicy policy;
  policy.max_band = 32;

  auto smyth_mesh = [&](double hr, int ntheta) {
    GridSpec g;
    g.kind = GridSpec::Kind::Polar;
    g.rmin = 0.05;
    g.rmax = 0.75;
    g.nr = static_cast<int>(std::lround((g.rmax - g.rmin) / hr)) + 1;
    g.ntheta = ntheta;
    g.z0 = 0;
    ScanOptions scan;
    scan.enabled = false;  // smooth region, checked below by completeness
    return build_surface(p, g, MatrixLoop::identity(), 1.0, policy, FactorizeOptions{}, scan);
  };

  SurfaceMesh mesh = smyth_mesh(0.01, 48);
  bool complete = mesh.flagged_count() == 0;
  CheckResult rot = symmetry_rotational_metric(mesh, 1e-6);
  CheckResult refl = symmetry_reflective(mesh, 1e-5);
  CheckResult pain = painleve_residual(mesh, 1e-3);

  SurfaceMesh fine = smyth_mesh(0.005, 12);
  CheckResult pain_fine = painleve_residual(fine, 1e-3);
  double order = std::log2(pain.max_residual / std::max(pain_fine.max_residual, 1e-300));
  bool order_ok = order > 1.3 && order < 2.9;

  bool pass = complete && rot.pass && refl.pass && pain.pass && order_ok;
  report(9, "Smyth suite (c=1, k=1)", pass,
         "rot " + fmt(rot.max_residual) + ", refl " + fmt(refl.max_residual) + ", painleve " +
             fmt(pain.max_residual) + " -> " + fmt(pain_fine.max_residual) + ", order " +
             fmt(order));
}

// --------------------------------------------------------------- criterion 10
void criterion_singular_smyth() {
  Potential p = smyth_potential(100.0, 1);
  BandPolicy policy;
  policy.max_band = 36;
  GridSpec g;
  g.x0 = g.y0 = -0.06;
  g.x1 = g.y1 = 0.06;
  g.nx = g.ny = 13;
  g.z0 = 0;
  SurfaceMesh mesh = build_surface(p, g, omega_loop(1), 1.0, policy);
  const SurfaceSample& origin = mesh.at(6, 6);
  bool p1_at_zero = origin.cell.tag == CellTag::P1;

  // trend probe along a ray toward z = 0 over shrinking radii
  cplx dir = unit_circle(0.39);
  double point_bound = 0, prev_norm = 0;
  bool normals_grow = true;
  std::vector<double> norms;
  for (int i = 0; i <= 5; ++i) {
    double r = 0.04 * std::pow(0.5, i);
    cplx z = r * dir;
    MatrixLoop phi = integrate_segment(p, omega_loop(1), 0, z, policy, 1e-11, 1e-13, 0.02);
    IwasawaResult res = iwasawa_kernel(phi);
    AmbientPoint f = sym_point(res.F, 1.0, p.H);
    AmbientPoint n = normal_vec(res.F, 1.0);
    point_bound = std::max(point_bound, euclid_norm(f));
    norms.push_back(euclid_norm(n));
  }
  for (size_t i = 1; i < norms.size(); ++i) {
    if (norms[i] <= norms[i - 1]) normals_grow = false;
  }
  double total_growth = norms.back() / norms.front();
  bool pass = p1_at_zero && point_bound < 100.0 && normals_grow && total_growth > 10.0;
  (void)prev_norm;
  report(10, "singular-set behavior at the Smyth origin", pass,
         std::string("origin ") + (p1_at_zero ? "P1" : "not P1") + ", |f| <= " +
             fmt(point_bound) + ", |N| growth x" + fmt(total_growth));
}

}  // namespace

int main() {
  criterion_cylinder();
  criterion_hyperboloid();
  criterion_constant();
  criterion_kernel_closed_forms();
  criterion_round_trip();
  criterion_extended_sym();
  criterion_revolution();
  criterion_profile();
  criterion_smyth();
  criterion_singular_smyth();
  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", g_failures);
  return 1;
}

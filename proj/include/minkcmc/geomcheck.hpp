#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "minkcmc/symsurface.hpp"

namespace minkcmc {

struct CheckResult {
  std::string name;
  double max_residual = 0;
  double tolerance = 0;
  bool pass = false;
  int excluded = 0;
  std::string note;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  double grid_h = 0;
  bool all_pass() const;
  void print(std::ostream& os) const;
};

// First and second fundamental forms in the grid parameter coordinates, by
// centered differences over valid 4-neighborhoods. ok = false where the
// neighborhood is incomplete. Mean curvature from these is parameter-free.
struct Forms {
  double E = 0, F = 0, G = 0;
  double L = 0, M = 0, N = 0;
  bool ok = false;
};
std::vector<Forms> fundamental_forms(const SurfaceMesh& mesh);

CheckResult mean_curvature_residual(const SurfaceMesh& mesh, double H_target, double tol);

// Gauss equation u_ww~ - H^2 e^{2u} + (1/4)|Q|^2 e^{-2u} in the conformal
// coordinate w with dw/dz = (i/H) a_{-1}.
CheckResult gauss_residual(const SurfaceMesh& mesh, double tol);

// Radial sinh-Gordon / Painleve III residual for Smyth meshes (H = 1/2):
// v_mumu + v_mu / mu - 2 sinh(2v) with v = u - log(c)/2 - (k/2) log r and
// mu = (1 + k/2)^{-1} r^{1+k/2} sqrt(c).
CheckResult painleve_residual(const SurfaceMesh& mesh, double tol);

// Circle-averaged radial profile (r, mean u, max |u - mean|, all_valid).
struct RadialSample {
  double r = 0, u_mean = 0, u_dev = 0;
  bool complete = false;
};
std::vector<RadialSample> radial_profile_u(const SurfaceMesh& mesh);

// Reflective symmetry f(R_l(z)) = -A_l conj(f(z)) A_l^{-1} for the mesh's
// symmetry order; rotational-metric invariance of u over circles;
// translational orbit flatness for cylinder-type meshes.
CheckResult symmetry_reflective(const SurfaceMesh& mesh, double tol);
CheckResult symmetry_rotational_metric(const SurfaceMesh& mesh, double tol);
CheckResult symmetry_translational(const SurfaceMesh& mesh, double tol);

// Property-style residuals shared with the test suites.
CheckResult unit_normal_residual(const SurfaceMesh& mesh, double tol);
CheckResult tangency_residual(const SurfaceMesh& mesh, double tol);
CheckResult conformality_residual(const SurfaceMesh& mesh, double tol);
// <f_x, f_x> = 4 rho^4 |dw/dz|^2 at interior vertices (relative).
CheckResult metric_identity_residual(const SurfaceMesh& mesh, double tol);
// Hopf coefficient estimate <N, f_zz> vs lambda0^{-2} q (relative).
CheckResult hopf_residual(const SurfaceMesh& mesh, double tol);

ValidationReport standard_report(const SurfaceMesh& mesh);

}  // namespace minkcmc

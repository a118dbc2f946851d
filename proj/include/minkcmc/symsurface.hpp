#pragma once

#include <functional>
#include <optional>

#include "minkcmc/factorize.hpp"
#include "minkcmc/potential.hpp"

namespace minkcmc {

// Coordinates in the basis e1 = sigma1, e2 = -sigma2, e3 = i sigma3 of
// su(1,1) ~ R^{2,1}; <X,Y> = (1/2) tr(XY) has signature (+, +, -).
struct AmbientPoint {
  double x1 = 0, x2 = 0, x0 = 0;
};

AmbientPoint to_ambient(const Mat2& m, double* su11_residual = nullptr);
Mat2 from_ambient(const AmbientPoint& p);
double minkowski_dot(const AmbientPoint& a, const AmbientPoint& b);
double euclid_norm(const AmbientPoint& a);
AmbientPoint operator-(const AmbientPoint& a, const AmbientPoint& b);
AmbientPoint operator+(const AmbientPoint& a, const AmbientPoint& b);
AmbientPoint operator*(double s, const AmbientPoint& a);

struct SymOptions {
  double realform_tol = 1e-7;  // NotRealForm threshold on tau(F) -/+ F
  // Remap shifted-component output by the ambient reflection -Ad_{sigma1}.
  // Off by default: the plain formula already produces the closed-form
  // surfaces on both components (see Example 3.9 across |z| = 1).
  bool shifted_isometric_representative = false;
};

// f = -(1/2H) [F i sigma3 F^{-1} + 2 i lambda dF/dlambda F^{-1}] at lambda0.
AmbientPoint sym_point(const MatrixLoop& F, cplx lambda0, double H,
                       const SymOptions& opt = {});
// N = F e3 F^{-1} at lambda0; <N,N> = -1.
AmbientPoint normal_vec(const MatrixLoop& F, cplx lambda0, const SymOptions& opt = {});
// Parallel CMC -H surface and parallel constant-curvature surface points.
struct ParallelPoints {
  AmbientPoint parallel;
  AmbientPoint gauss;
};
ParallelPoints parallel_points(const MatrixLoop& F, cplx lambda0, double H,
                               const SymOptions& opt = {});

// S(F) = F i sigma3 F^{-1} + 2 i lambda dF F^{-1} as a matrix loop.
MatrixLoop sym_lie_loop(const MatrixLoop& F);
AmbientPoint lie_loop_to_point(const MatrixLoop& S, cplx lambda0, double H);

struct MetricData {
  double rho = 1;
  double u = 0;  // u = 2 log rho; metric 4 rho^4 |dw|^2
};
// rho from the normalized plus factor, B(0) = diag(rho, 1/rho).
MetricData metric_rho(const MatrixLoop& B, double tol = 1e-8);

// Extended Sym formula: S~ on the big cell is S(F); on the first small cell it
// is defined through phi -> phi B0^{-1} omega_1^{-1} using a known
// decomposition phi = F0 omega_1 B0.
struct P1Aux {
  MatrixLoop F0;
  MatrixLoop B0;
};
MatrixLoop extended_sym(const MatrixLoop& phi, const std::optional<P1Aux>& aux = {},
                        const CellContext& ctx = {}, const FactorizeOptions& opt = {});

struct SurfaceSample {
  cplx z;
  bool masked = false;      // outside the requested domain
  bool valid_point = false; // big-cell vertex with all data
  AmbientPoint point, normal;
  double rho = 0, u = 0;
  CellClass cell;
  int component_sign = 1;
  double tau_resid = 0, recon_resid = 0, det_drift = 0, dropped = 0;
  cplx q = 0;     // Hopf coefficient in the w-coordinate
  cplx dwdz = 0;  // (i/H) a_{-1}(z)
};

struct SurfaceMesh {
  GridSpec grid;
  double H = 0.5;
  cplx lambda0{1, 0};
  std::vector<SurfaceSample> samples;
  std::string potential_name;
  double smyth_c = -1;
  int smyth_k = -1;
  int symmetry_order = 0;

  SurfaceSample& at(int i, int j) { return samples[static_cast<size_t>(grid.index(i, j))]; }
  const SurfaceSample& at(int i, int j) const {
    return samples[static_cast<size_t>(grid.index(i, j))];
  }
  int flagged_count() const;
};

struct ScanOptions {
  bool enabled = true;
  double jump_factor = 8;      // edge point-jump vs median to trigger a probe
  double logrho_jump = 0.7;    // |d log rho| along an edge to trigger a probe
  double crossing_cond = 1e-6; // conditioning below this marks a cell crossing
  double flag_radius_steps = 1.2;
  double slope_tol = 0.45;
  int trend_samples = 6;
  int max_probes = 4000;
};

SurfaceMesh build_surface(const Potential& p, const GridSpec& grid, const MatrixLoop& phi0,
                          cplx lambda0, const BandPolicy& policy,
                          const FactorizeOptions& fopt = {}, const ScanOptions& scan = {});

// Mesh assembly from a precomputed frame field (used by build_surface and by
// callers that integrate separately).
SurfaceMesh assemble_surface(const Potential& p, const FrameField& ff, cplx lambda0,
                             const BandPolicy& policy, const FactorizeOptions& fopt = {},
                             const ScanOptions& scan = {});

}  // namespace minkcmc

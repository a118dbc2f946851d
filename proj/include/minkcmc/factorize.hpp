#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minkcmc/loop.hpp"

namespace minkcmc {

struct FactorizeOptions {
  double svd_rtol = 1e-9;     // relative threshold for kernel counting
  double det_tol = 1e-8;      // |det W| below this: singular kernel element
  double cond_tol = 1e-10;    // conditioning below this: IllConditioned
  double boundary_tol = 1e-9; // switch-factor trichotomy boundary width
  double recon_tol = 1e-8;    // reconstruction residual bound
  double unimodular_tol = 1e-6;
  int circle_samples = 20;
  bool force_untwisted = false;  // ignore parity even for twisted input (cross-check route)
};

enum class FactorStatus {
  Ok,
  SmallCellSuspected,
  IllConditioned,
  ResidualTooLarge,
  NonUnimodular,
};

struct IwasawaResult {
  MatrixLoop F;            // real-form factor, band [-n, n]
  MatrixLoop B;            // plus factor, B(0) = diag(rho0, 1/rho0)
  int component_sign = 1;  // tau(F) = component_sign * F
  double rho0 = 1.0;
  // sigma_ratio * |det What| of the unit kernel element; tends to 0 on the
  // boundary of the big cell (the raw sigma gap need not, in the
  // parity-reduced system).
  double conditioning = 0;
  double sigma_ratio = 0;      // second-smallest / largest singular value
  double det_w = 0;            // |det| of the unit-norm kernel element
  double det_lambda_dev = 0;   // max variation of det W over circle samples
  double residual = 0;         // relative reconstruction error of F*B vs X
  int kernel_dim = 1;
};

struct KernelOutcome {
  FactorStatus status = FactorStatus::Ok;
  IwasawaResult result;
  std::string detail;
  bool ok() const { return status == FactorStatus::Ok; }
};

// Iwasawa factorization of a Laurent loop with pole order n at lambda = 0,
// by the nullspace of the finite linear system (16n+4 equations in the 8n+4
// coefficients of W, halved by parity for twisted input).
KernelOutcome try_iwasawa_kernel(const MatrixLoop& X, const FactorizeOptions& opt = {});
IwasawaResult iwasawa_kernel(const MatrixLoop& X, const FactorizeOptions& opt = {});

// Constant-loop case, three-way split on |X11| vs |X21|.
struct ConstantIwasawa {
  Mat2 F, B;
  int case_id = 1;  // 1, 2, 3
  cplx u, v;        // cases 1-2
  double r = 1;     // positive diagonal of B
};
ConstantIwasawa iwasawa_constant(const Mat2& X, double det_tol = 1e-12,
                                 double case_tol = 1e-12);

enum class CellTag { BigCell, P1, P2, HigherOrUnknown };

struct CellEvidence {
  int kernel_dim = 0;
  double det_w = 0;
  double sigma_ratio = 0;
  double conditioning = 0;
  double rho_slope = 0;  // log rho vs log distance fit, when trend data given
  int rho_samples = 0;
  std::string note;
};

struct CellClass {
  CellTag tag = CellTag::HigherOrUnknown;
  CellEvidence evidence;
};

struct CellContext {
  // Known decomposition F0 omega_m B0 (canonical small-cell form).
  std::optional<int> canonical_m;
  // (distance-to-singular-set proxy, rho) samples along an approach path.
  std::vector<std::pair<double, double>> rho_trend;
  double slope_tol = 0.45;
};

CellClass classify_cell(const MatrixLoop& X, const CellContext& ctx = {},
                        const FactorizeOptions& opt = {});

// Least-squares slope of log(rho) against log(distance).
double rho_trend_slope(const std::vector<std::pair<double, double>>& samples);

enum class SwitchCase { K1, K2, Boundary };

struct SwitchFactorization {
  MatrixLoop X;     // k1 / k2 / omega_1^theta factor (Ad_sigma1 of those for m=2)
  MatrixLoop Bhat;  // plus factor
  SwitchCase kind = SwitchCase::K1;
  cplx u = 1, v = 0;
  double theta = 0;  // boundary case phase
};

// Factorization B omega_m^{-1} = X Bhat for twisted plus loops B, m in {1,2}.
SwitchFactorization switch_factor(const MatrixLoop& B, int m,
                                  const FactorizeOptions& opt = {});

// Small-cell representatives and the density path through them.
MatrixLoop omega_loop(int m);
MatrixLoop psi_loop(int m, cplx z);

}  // namespace minkcmc

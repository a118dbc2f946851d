#pragma once

#include <functional>
#include <string>
#include <vector>

#include "minkcmc/potential.hpp"

namespace minkcmc {

// Jacobi elliptic sn with parameter m (= modulus squared), by descending
// Landen / AGM. The closed-form profile below uses sn_{k}, k = b/(l^2 a),
// which in this convention is sn(., m = k^2).
double jacobi_sn(double u, double m);
double jacobi_K(double m);

struct RevolutionParams {
  double a = 1, b = 0.25, c = 0;
  double H() const { return -2 * a * b; }
};

enum class AxisClass { Timelike, Null, Spacelike };
AxisClass axis_classify(double a, double b, double c, double tol = 1e-12);
const char* axis_name(AxisClass cls);

// Profile equation (v')^2 = (v^2-4a^2)(v^2-4b^2) + 4c^2 v^2 with
// v'' = 2v(v^2 - 2a^2 - 2b^2 + 2c^2), v(0) = 2b, v'(0) = -4bc.
// Solved on a uniform fine grid, clipped to the maximal interval on which v
// stays finite and bounded away from zero.
struct ProfileSolution {
  RevolutionParams params;
  double dx = 0;
  double xmin = 0, xmax = 0;
  bool left_clipped = false, right_clipped = false;
  std::vector<double> x, v, vp;
  double max_first_order_residual = 0;

  double v_at(double xq) const;   // cubic Hermite
  double vp_at(double xq) const;
  bool contains(double xq) const { return xq >= xmin - 1e-12 && xq <= xmax + 1e-12; }
};

ProfileSolution solve_profile_v(const RevolutionParams& params, double want_xmin,
                                double want_xmax, double dx = 5e-4);

// x0 and modulus data for the sn closed form v = (2b/l) sn(2 l a (x + x0), (b/(a l^2))^2)
// valid for 0 < b < a, c <= 0.
struct SnClosedForm {
  double ell = 0, m = 0, x0 = 0;
  bool valid = false;
  double eval(double x, const RevolutionParams& p) const;
};
SnClosedForm sn_closed_form(const RevolutionParams& params);

// Explicit Iwasawa splitting of phi = exp(z A):
//   F = phi exp(-f A) B1^{-1},  B = B1 exp(f A),
//   f = int_0^x 2 dt / (1 + v^2/(4ab lambda^2)),
//   B1 = B0 / sqrt(det B0),  B0 = [[2v(b + a l^2), (2cv + v')l], [0, 4ab l^2 + v^2]].
struct RevolutionFrame {
  MatrixLoop F, B;
  double split_residual = 0;   // F B vs exp(z A) over circle samples
  double tau_residual = 0;     // tau(F) - F
  double plus_residual = 0;    // negative-power mass of B
  double det_b_dev = 0;
};

Mat2 revolution_a_matrix(const RevolutionParams& p, cplx lambda);

RevolutionFrame revolution_frame(const RevolutionParams& params, const ProfileSolution& prof,
                                 cplx z, int band = 24, int samples = 128);

// The potential A dz for the DPW pipeline route.
Potential revolution_potential(const RevolutionParams& params);

// (p, P, v0) with P the constant Hopf datum P = q lambda0^{-2}.
struct EquivariantPoint {
  double p = 0;
  cplx P = 1;
  double v0 = 1;
};
struct EquivariantData {
  double a, b, c;
  cplx lambda0;
  double H;
};
EquivariantData equivariant_to_potential(const EquivariantPoint& e, int h_sign = 1);

struct ModuliPoint {
  double p = 0, q = 0, v0 = 0;
};
// Canonical representative of (p, q, v0) under v -> +/- r v(r x + const):
// q scaled into {0, 1}, v0 replaced by the orbit's turning value.
ModuliPoint moduli_normalize(const ModuliPoint& r, double tol = 1e-9);

Potential smyth_potential(double c, int k, double H = 0.5);

// Moduli-figure region over the (b, c) half-plane at a = 1: axis type letter
// and the blowdown invariant (1 + b^2 - c^2)/b along hyperbola leaves.
struct RegionInfo {
  char axis_letter;  // 'S', 'T' or 'L'
  double hyperbola_invariant;
};
RegionInfo region_label(double b, double c);

}  // namespace minkcmc

#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "minkcmc/loop.hpp"

namespace minkcmc {

struct Polynomial {
  std::vector<cplx> c;  // c[k] is the z^k coefficient
  cplx eval(cplx z) const {
    cplx s = 0;
    for (size_t k = c.size(); k-- > 0;) s = s * z + c[k];
    return s;
  }
  bool is_zero(double tol = 0.0) const {
    for (auto v : c)
      if (std::abs(v) > tol) return false;
    return true;
  }
  int degree() const { return static_cast<int>(c.size()) - 1; }
};

// Holomorphic potential xi = sum_{i=-1}^{M} A_i(z) lambda^i dz with polynomial
// entries, trace-free and twisted (diagonal at even powers, off-diagonal odd),
// and a_{-1} nowhere zero on the working domain.
struct Potential {
  double H = 0.5;
  int lam_lo = -1;
  int lam_hi = 1;
  // power -> entries in row-major order (00, 01, 10, 11)
  std::map<int, std::array<Polynomial, 4>> terms;

  std::string name;
  int symmetry_order = 0;  // k+2 for Smyth potentials, else 0
  double smyth_c = -1;
  int smyth_k = -1;

  const Polynomial* entry(int power, int r, int c) const;
  Polynomial a_minus1() const;
  Polynomial b_minus1() const;

  MatrixLoop coefficient_loop(cplx z) const;  // A(z, .)

  // Trace, parity and band checks; throws TraceViolation / ParityViolation /
  // SchemaError with the offending location.
  void validate() const;
};

// Q(z) = -2 H b_{-1}(z) / a_{-1}(z); throws VanishingA at a zero of a_{-1}.
cplx hopf_q(const Potential& p, cplx z);

struct GridSpec {
  enum class Kind { Rect, Polar };
  Kind kind = Kind::Rect;

  // rect: nx x ny vertices over [x0,x1] x [y0,y1]
  double x0 = -0.5, x1 = 0.5, y0 = -0.5, y1 = 0.5;
  int nx = 41, ny = 41;
  double mask_radius = 0;  // rect-with-disk-domain: vertices outside are masked

  // polar: nr radii in [rmin, rmax], ntheta equally spaced angles
  double rmin = 0.02, rmax = 1.0;
  int nr = 50, ntheta = 48;

  cplx z0{0, 0};  // integration base point
  double rtol = 1e-10, atol = 1e-12, max_step = 0.1;

  int ni() const { return kind == Kind::Rect ? nx : nr; }
  int nj() const { return kind == Kind::Rect ? ny : ntheta; }
  int size() const { return ni() * nj(); }
  int index(int i, int j) const { return j * ni() + i; }
  double hx() const { return nx > 1 ? (x1 - x0) / (nx - 1) : 0; }
  double hy() const { return ny > 1 ? (y1 - y0) / (ny - 1) : 0; }
  double hr() const { return nr > 1 ? (rmax - rmin) / (nr - 1) : 0; }
  double htheta() const { return 2.0 * M_PI / ntheta; }
  cplx vertex(int i, int j) const;
  bool masked(int i, int j) const;
  double step_scale() const;  // representative spacing
  void validate() const;
};

struct StepStats {
  double det_drift = 0;
  double dropped = 0;
  int steps = 0;
  int rejects = 0;
};

// One straight segment of the holomorphic linear ODE d phi = phi A(z) dz,
// adaptive Runge-Kutta-Fehlberg 4(5). fixed_step > 0 disables adaptivity.
MatrixLoop integrate_segment(const Potential& p, MatrixLoop phi, cplx za, cplx zb,
                             const BandPolicy& policy, double rtol, double atol,
                             double max_step, StepStats* stats = nullptr,
                             double fixed_step = 0);

struct FrameField {
  GridSpec grid;
  std::vector<MatrixLoop> phi;
  std::vector<StepStats> stats;
  const MatrixLoop& at(int i, int j) const { return phi[static_cast<size_t>(grid.index(i, j))]; }
};

// Integrate over the grid: rect grids go along the row through z0 and then
// along columns; polar grids go out along each ray from the center.
// Throws DetDrift when |det phi - 1| exceeds 1e-6 at a vertex.
FrameField integrate_frame(const Potential& p, const GridSpec& grid,
                           const MatrixLoop& phi0, const BandPolicy& policy);

}  // namespace minkcmc

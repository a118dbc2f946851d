#include "minkcmc/potential.hpp"

#include <algorithm>
#include <cmath>

namespace minkcmc {

const Polynomial* Potential::entry(int power, int r, int c) const {
  auto it = terms.find(power);
  if (it == terms.end()) return nullptr;
  return &it->second[static_cast<size_t>(2 * r + c)];
}

Polynomial Potential::a_minus1() const {
  const Polynomial* p = entry(-1, 0, 1);
  return p ? *p : Polynomial{};
}

Polynomial Potential::b_minus1() const {
  const Polynomial* p = entry(-1, 1, 0);
  return p ? *p : Polynomial{};
}

MatrixLoop Potential::coefficient_loop(cplx z) const {
  MatrixLoop A(lam_lo, lam_hi);
  for (const auto& [power, e] : terms) {
    Mat2 m;
    m << e[0].eval(z), e[1].eval(z), e[2].eval(z), e[3].eval(z);
    A[power] = m;
  }
  return A;
}

void Potential::validate() const {
  if (lam_lo < -1) throw Error(ErrorCode::SchemaError, "lambda band must start at -1");
  if (lam_hi < lam_lo) throw Error(ErrorCode::SchemaError, "empty lambda band");
  for (const auto& [power, e] : terms) {
    if (power < lam_lo || power > lam_hi) {
      throw Error(ErrorCode::SchemaError,
                  "entry at lambda power " + std::to_string(power) + " outside band");
    }
    bool even = ((power % 2) == 0);
    if (even && (!e[1].is_zero() || !e[2].is_zero())) {
      throw Error(ErrorCode::ParityViolation,
                  "off-diagonal entry at even lambda power " + std::to_string(power));
    }
    if (!even && (!e[0].is_zero() || !e[3].is_zero())) {
      throw Error(ErrorCode::ParityViolation,
                  "diagonal entry at odd lambda power " + std::to_string(power));
    }
    // trace-free at every power
    size_t n = std::max(e[0].c.size(), e[3].c.size());
    for (size_t k = 0; k < n; ++k) {
      cplx t = (k < e[0].c.size() ? e[0].c[k] : 0.0) + (k < e[3].c.size() ? e[3].c[k] : 0.0);
      if (std::abs(t) > 1e-12) {
        throw Error(ErrorCode::TraceViolation,
                    "nonzero trace at lambda power " + std::to_string(power) + ", z^" +
                        std::to_string(k));
      }
    }
  }
  if (H == 0) throw Error(ErrorCode::SchemaError, "H must be nonzero");
  if (a_minus1().is_zero()) {
    throw Error(ErrorCode::VanishingA, "a_{-1} is identically zero");
  }
}

cplx hopf_q(const Potential& p, cplx z) {
  cplx a = p.a_minus1().eval(z);
  if (std::abs(a) < 1e-14) {
    throw Error(ErrorCode::VanishingA, "a_{-1} vanishes at z = (" + std::to_string(z.real()) +
                                           ", " + std::to_string(z.imag()) + ")");
  }
  return -2.0 * p.H * p.b_minus1().eval(z) / a;
}

cplx GridSpec::vertex(int i, int j) const {
  if (kind == Kind::Rect) {
    return cplx(x0 + i * hx(), y0 + j * hy());
  }
  double r = rmin + i * hr();
  double th = j * htheta();
  return std::polar(r, th);
}

bool GridSpec::masked(int i, int j) const {
  if (kind != Kind::Rect || mask_radius <= 0) return false;
  return std::abs(vertex(i, j)) > mask_radius + 1e-12;
}

double GridSpec::step_scale() const {
  if (kind == Kind::Rect) return std::max(hx(), hy());
  return hr();
}

void GridSpec::validate() const {
  if (kind == Kind::Rect) {
    if (nx < 2 || ny < 2) throw Error(ErrorCode::SchemaError, "rect grid needs >= 2 per axis");
    if (!(x1 > x0) || !(y1 > y0)) throw Error(ErrorCode::SchemaError, "degenerate rect extents");
    double dx = std::abs(z0.real() - (x0 + std::round((z0.real() - x0) / hx()) * hx()));
    double dy = std::abs(z0.imag() - (y0 + std::round((z0.imag() - y0) / hy()) * hy()));
    if (z0.real() < x0 - 1e-12 || z0.real() > x1 + 1e-12 || z0.imag() < y0 - 1e-12 ||
        z0.imag() > y1 + 1e-12 || dx > 1e-9 || dy > 1e-9) {
      throw Error(ErrorCode::SchemaError, "base point z0 must lie on the grid");
    }
  } else {
    if (nr < 2 || ntheta < 2) throw Error(ErrorCode::SchemaError, "polar grid needs >= 2 per axis");
    if (!(rmax > rmin) || rmin < 0) throw Error(ErrorCode::SchemaError, "bad polar extents");
    if (std::abs(z0) > 1e-12) {
      throw Error(ErrorCode::SchemaError, "polar grids integrate from the center, z0 = 0");
    }
  }
}

namespace {

// d phi / dt along z(t) = za + t (zb - za):  phi' = phi A(z) dz
MatrixLoop ode_rhs(const Potential& p, const MatrixLoop& phi, cplx z, cplx dz,
                   const BandPolicy& policy, double* dropped) {
  MatrixLoop A = p.coefficient_loop(z);
  return mul(phi, dz * A, policy, dropped);
}

}  // namespace

MatrixLoop integrate_segment(const Potential& p, MatrixLoop phi, cplx za, cplx zb,
                             const BandPolicy& policy, double rtol, double atol,
                             double max_step, StepStats* stats, double fixed_step) {
  const double len = std::abs(zb - za);
  if (len == 0) return phi;
  const cplx dz = zb - za;
  double t = 0;
  double h = fixed_step > 0 ? fixed_step / len : std::min(max_step / len, 1.0);
  h = std::min(h, 1.0);
  const int max_steps = 200000;
  int steps = 0;

  while (t < 1.0 - 1e-15) {
    h = std::min(h, 1.0 - t);
    double dropped = 0;
    auto f = [&](double s, const MatrixLoop& y) {
      return ode_rhs(p, y, za + (t + s) * dz, dz, policy, &dropped);
    };
    MatrixLoop k1 = f(0.0, phi);
    MatrixLoop k2 = f(h / 4.0, phi + (h / 4.0) * k1);
    MatrixLoop k3 = f(3.0 * h / 8.0, phi + (3.0 * h / 32.0) * k1 + (9.0 * h / 32.0) * k2);
    MatrixLoop k4 = f(12.0 * h / 13.0, phi + (1932.0 * h / 2197.0) * k1 -
                                           (7200.0 * h / 2197.0) * k2 +
                                           (7296.0 * h / 2197.0) * k3);
    MatrixLoop k5 = f(h, phi + (439.0 * h / 216.0) * k1 - (8.0 * h) * k2 +
                             (3680.0 * h / 513.0) * k3 - (845.0 * h / 4104.0) * k4);
    MatrixLoop k6 = f(h / 2.0, phi - (8.0 * h / 27.0) * k1 + (2.0 * h) * k2 -
                                   (3544.0 * h / 2565.0) * k3 + (1859.0 * h / 4104.0) * k4 -
                                   (11.0 * h / 40.0) * k5);
    MatrixLoop y4 = phi + (25.0 * h / 216.0) * k1 + (1408.0 * h / 2565.0) * k3 +
                    (2197.0 * h / 4104.0) * k4 - (h / 5.0) * k5;
    MatrixLoop y5 = phi + (16.0 * h / 135.0) * k1 + (6656.0 * h / 12825.0) * k3 +
                    (28561.0 * h / 56430.0) * k4 - (9.0 * h / 50.0) * k5 +
                    (2.0 * h / 55.0) * k6;
    double err = loop_distance(y5, y4);
    double scale = atol + rtol * std::max(phi.norm(), y5.norm());
    if (fixed_step > 0 || err <= scale) {
      t += h;
      phi = y5.trimmed(1e-17);
      if (stats) {
        stats->steps++;
        stats->dropped += dropped;
      }
      if (fixed_step <= 0) {
        double grow = err > 0 ? 0.9 * std::pow(scale / err, 0.2) : 5.0;
        h = std::min({h * std::clamp(grow, 0.2, 5.0), max_step / len, 1.0});
      }
    } else {
      if (stats) stats->rejects++;
      h *= std::clamp(0.9 * std::pow(scale / err, 0.25), 0.1, 0.9);
    }
    if (++steps > max_steps) {
      throw Error(ErrorCode::BandOverflow, "integrator failed to reach segment end");
    }
  }
  return phi;
}

FrameField integrate_frame(const Potential& p, const GridSpec& grid,
                           const MatrixLoop& phi0, const BandPolicy& policy) {
  p.validate();
  grid.validate();
  if (unimodular_deviation(phi0) > 1e-8) {
    throw Error(ErrorCode::NonUnimodular, "initial frame must have det 1");
  }
  FrameField ff;
  ff.grid = grid;
  ff.phi.assign(static_cast<size_t>(grid.size()), MatrixLoop());
  ff.stats.assign(static_cast<size_t>(grid.size()), StepStats{});

  auto run = [&](int i, int j, const MatrixLoop& from, cplx za) {
    StepStats st;
    cplx zb = grid.vertex(i, j);
    MatrixLoop phi = integrate_segment(p, from, za, zb, policy, grid.rtol, grid.atol,
                                       grid.max_step, &st);
    st.det_drift = unimodular_deviation(phi, 8);
    if (st.det_drift > 1e-6) {
      throw Error(ErrorCode::DetDrift,
                  "determinant drift " + std::to_string(st.det_drift) + " at vertex (" +
                      std::to_string(i) + "," + std::to_string(j) + ")");
    }
    ff.phi[static_cast<size_t>(grid.index(i, j))] = phi;
    ff.stats[static_cast<size_t>(grid.index(i, j))] = st;
  };

  if (grid.kind == GridSpec::Kind::Rect) {
    int i0 = static_cast<int>(std::round((grid.z0.real() - grid.x0) / grid.hx()));
    int j0 = static_cast<int>(std::round((grid.z0.imag() - grid.y0) / grid.hy()));
    // row through z0
    run(i0, j0, phi0, grid.z0);
    for (int i = i0 + 1; i < grid.nx; ++i) run(i, j0, ff.at(i - 1, j0), grid.vertex(i - 1, j0));
    for (int i = i0 - 1; i >= 0; --i) run(i, j0, ff.at(i + 1, j0), grid.vertex(i + 1, j0));
    // columns
    for (int i = 0; i < grid.nx; ++i) {
      for (int j = j0 + 1; j < grid.ny; ++j) run(i, j, ff.at(i, j - 1), grid.vertex(i, j - 1));
      for (int j = j0 - 1; j >= 0; --j) run(i, j, ff.at(i, j + 1), grid.vertex(i, j + 1));
    }
  } else {
    // out along each ray from the center
    for (int j = 0; j < grid.ntheta; ++j) {
      run(0, j, phi0, cplx(0, 0));
      for (int i = 1; i < grid.nr; ++i) run(i, j, ff.at(i - 1, j), grid.vertex(i - 1, j));
    }
  }
  return ff;
}

}  // namespace minkcmc

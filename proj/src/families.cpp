#include "minkcmc/families.hpp"

#include <algorithm>
#include <cmath>

namespace minkcmc {

double jacobi_sn(double u, double m) {
  if (m < 0.0 || m > 1.0) throw Error(ErrorCode::ModulusRange, "sn parameter must be in [0,1]");
  if (m < 1e-14) return std::sin(u);
  if (m > 1.0 - 1e-14) return std::tanh(u);
  // descending Landen via the arithmetic-geometric mean
  constexpr int kMax = 32;
  double a[kMax], c[kMax];
  a[0] = 1.0;
  double b = std::sqrt(1.0 - m);
  c[0] = std::sqrt(m);
  int n = 0;
  while (n + 1 < kMax && std::abs(c[n]) > 1e-16 * a[n]) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }
  double phi = std::ldexp(a[n] * u, n);
  for (int k = n; k >= 1; --k) {
    phi = 0.5 * (phi + std::asin(std::clamp(c[k] * std::sin(phi) / a[k], -1.0, 1.0)));
  }
  return std::sin(phi);
}

double jacobi_K(double m) {
  if (m < 0.0 || m > 1.0) throw Error(ErrorCode::ModulusRange, "K parameter must be in [0,1]");
  if (m > 1.0 - 1e-14) return std::numeric_limits<double>::infinity();
  double a = 1.0, b = std::sqrt(1.0 - m);
  for (int it = 0; it < 64 && std::abs(a - b) > 4e-16 * a; ++it) {
    double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return M_PI / (2.0 * a);
}

AxisClass axis_classify(double a, double b, double c, double tol) {
  double d = (a + b) * (a + b) - c * c;
  if (std::abs(d) < tol) return AxisClass::Null;
  return d > 0 ? AxisClass::Spacelike : AxisClass::Timelike;
}

const char* axis_name(AxisClass cls) {
  switch (cls) {
    case AxisClass::Timelike: return "timelike";
    case AxisClass::Null: return "null";
    case AxisClass::Spacelike: return "spacelike";
  }
  return "?";
}

namespace {

double profile_rhs(double v, const RevolutionParams& p) {
  return 2.0 * v * (v * v - 2 * p.a * p.a - 2 * p.b * p.b + 2 * p.c * p.c);
}

double first_order_poly(double v, const RevolutionParams& p) {
  return (v * v - 4 * p.a * p.a) * (v * v - 4 * p.b * p.b) + 4 * p.c * p.c * v * v;
}

}  // namespace

double ProfileSolution::v_at(double xq) const {
  if (!contains(xq)) throw Error(ErrorCode::LeftMaximalInterval, "x outside profile interval");
  double s = (xq - xmin) / dx;
  int i = std::clamp(static_cast<int>(std::floor(s)), 0, static_cast<int>(x.size()) - 2);
  double t = s - i;
  double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  size_t iu = static_cast<size_t>(i);
  return h00 * v[iu] + h10 * dx * vp[iu] + h01 * v[iu + 1] + h11 * dx * vp[iu + 1];
}

double ProfileSolution::vp_at(double xq) const {
  if (!contains(xq)) throw Error(ErrorCode::LeftMaximalInterval, "x outside profile interval");
  double s = (xq - xmin) / dx;
  int i = std::clamp(static_cast<int>(std::floor(s)), 0, static_cast<int>(x.size()) - 2);
  double t = s - i;
  size_t iu = static_cast<size_t>(i);
  double a0 = profile_rhs(v[iu], params), a1 = profile_rhs(v[iu + 1], params);
  double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * vp[iu] + h10 * dx * a0 + h01 * vp[iu + 1] + h11 * dx * a1;
}

ProfileSolution solve_profile_v(const RevolutionParams& params, double want_xmin,
                                double want_xmax, double dx) {
  if (params.a == 0 || params.b == 0) {
    throw Error(ErrorCode::SchemaError, "revolution parameters need a, b nonzero");
  }
  if (want_xmin > 0 || want_xmax < 0) {
    throw Error(ErrorCode::SchemaError, "profile interval must contain 0");
  }
  ProfileSolution out;
  out.params = params;
  out.dx = dx;
  const double v0 = 2 * params.b;
  const double vp0 = -4 * params.b * params.c;
  const double floor_v = 5e-3 * std::abs(v0);
  const double cap_v = 64.0 * std::max({std::abs(params.a), std::abs(params.b), 1.0});

  auto step = [&](double& v, double& w, double h) {
    // RK4 on v' = w, w' = profile_rhs(v)
    double k1v = w, k1w = profile_rhs(v, params);
    double k2v = w + 0.5 * h * k1w, k2w = profile_rhs(v + 0.5 * h * k1v, params);
    double k3v = w + 0.5 * h * k2w, k3w = profile_rhs(v + 0.5 * h * k2v, params);
    double k4v = w + h * k3w, k4w = profile_rhs(v + h * k3v, params);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    w += h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
  };

  auto sweep = [&](double dir, double limit, bool* clipped) {
    std::vector<double> xs{0.0}, vs{v0}, ws{vp0};
    double v = v0, w = vp0;
    int nmax = static_cast<int>(std::ceil(std::abs(limit) / dx));
    for (int i = 1; i <= nmax; ++i) {
      step(v, w, dir * dx);
      if (!std::isfinite(v) || std::abs(v) < floor_v || std::abs(v) > cap_v) {
        *clipped = true;
        break;
      }
      xs.push_back(dir * i * dx);
      vs.push_back(v);
      ws.push_back(w);
    }
    return std::tuple{xs, vs, ws};
  };

  auto [xr, vr, wr] = sweep(+1.0, want_xmax, &out.right_clipped);
  auto [xl, vl, wl] = sweep(-1.0, want_xmin, &out.left_clipped);
  for (size_t i = xl.size(); i-- > 1;) {
    out.x.push_back(xl[i]);
    out.v.push_back(vl[i]);
    out.vp.push_back(wl[i]);
  }
  out.x.insert(out.x.end(), xr.begin(), xr.end());
  out.v.insert(out.v.end(), vr.begin(), vr.end());
  out.vp.insert(out.vp.end(), wr.begin(), wr.end());
  out.xmin = out.x.front();
  out.xmax = out.x.back();
  for (size_t i = 0; i < out.x.size(); ++i) {
    double r = out.vp[i] * out.vp[i] - first_order_poly(out.v[i], params);
    out.max_first_order_residual = std::max(out.max_first_order_residual, std::abs(r));
  }
  return out;
}

SnClosedForm sn_closed_form(const RevolutionParams& p) {
  SnClosedForm out;
  if (!(0 < p.b && p.b < p.a && p.c <= 0)) return out;
  // largest real root of a^2 l^4 + (c^2 - a^2 - b^2) l^2 + b^2 = 0
  double A = p.a * p.a, B = p.c * p.c - p.a * p.a - p.b * p.b, C = p.b * p.b;
  double disc = B * B - 4 * A * C;
  if (disc < 0) return out;
  double l2 = (-B + std::sqrt(disc)) / (2 * A);
  if (l2 <= 0) return out;
  out.ell = std::sqrt(l2);
  double k = p.b / (p.a * l2);
  out.m = k * k;
  if (out.m > 1.0 || out.ell > 1.0) return out;
  // x0: sn(2 l a x0, m) = l with v'(0) = -4bc >= 0 (rising branch)
  double target = out.ell;
  double K = jacobi_K(out.m);
  double lo = 0.0, hi = K;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (jacobi_sn(mid, out.m) < target) lo = mid;
    else hi = mid;
  }
  out.x0 = 0.5 * (lo + hi) / (2 * out.ell * p.a);
  out.valid = true;
  return out;
}

double SnClosedForm::eval(double x, const RevolutionParams& p) const {
  return 2 * p.b / ell * jacobi_sn(2 * ell * p.a * (x + x0), m);
}

Mat2 revolution_a_matrix(const RevolutionParams& p, cplx lambda) {
  Mat2 A;
  A << p.c, p.a / lambda + p.b * lambda, -p.a * lambda - p.b / lambda, -p.c;
  return A;
}

namespace {

// Laurent coefficients from samples on an offset circle grid.
MatrixLoop fit_circle_samples(const std::vector<Mat2>& vals, const std::vector<cplx>& lams,
                              int band) {
  const int N = static_cast<int>(vals.size());
  MatrixLoop L(-band, band);
  for (int k = -band; k <= band; ++k) {
    Mat2 acc = Mat2::Zero();
    for (int j = 0; j < N; ++j) acc += vals[static_cast<size_t>(j)] * std::pow(lams[static_cast<size_t>(j)], -k);
    L[k] = acc / double(N);
  }
  return L.trimmed(1e-15);
}

}  // namespace

RevolutionFrame revolution_frame(const RevolutionParams& params, const ProfileSolution& prof,
                                 cplx z, int band, int samples) {
  const double x = z.real();
  if (!prof.contains(x)) {
    throw Error(ErrorCode::LeftMaximalInterval,
                "x = " + std::to_string(x) + " outside the maximal interval");
  }
  std::vector<cplx> lams(static_cast<size_t>(samples));
  for (int j = 0; j < samples; ++j) {
    lams[static_cast<size_t>(j)] = unit_circle(2.0 * M_PI * j / samples + 0.413);
  }

  // f(x, lambda) = int_0^x 2 dt / (1 + v^2/(4ab lambda^2)), composite Simpson
  // on Hermite-interpolated v with substep ~ prof.dx
  int nseg = std::max(2, static_cast<int>(std::ceil(std::abs(x) / prof.dx)));
  if (nseg % 2 == 1) ++nseg;
  std::vector<double> v2(static_cast<size_t>(nseg) + 1);
  for (int i = 0; i <= nseg; ++i) {
    double t = x * double(i) / nseg;
    double v = prof.v_at(t);
    v2[static_cast<size_t>(i)] = v * v;
  }
  const double fourab = 4.0 * params.a * params.b;
  auto f_of = [&](cplx lambda) {
    cplx denom_c = fourab * lambda * lambda;
    cplx s = 0;
    double h = x / nseg;
    for (int i = 0; i <= nseg; ++i) {
      cplx g = 2.0 / (1.0 + v2[static_cast<size_t>(i)] / denom_c);
      double w = (i == 0 || i == nseg) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      s += w * g;
    }
    return s * h / 3.0;
  };

  const double vv = prof.v_at(x), vvp = prof.vp_at(x);
  std::vector<Mat2> Fs(static_cast<size_t>(samples)), Bs(static_cast<size_t>(samples)),
      Phis(static_cast<size_t>(samples));
  std::vector<cplx> sq(static_cast<size_t>(samples));
  for (int j = 0; j < samples; ++j) {
    cplx l = lams[static_cast<size_t>(j)];
    Mat2 B0;
    B0 << 2 * vv * (params.b + params.a * l * l), (2 * params.c * vv + vvp) * l, 0,
        fourab * l * l + vv * vv;
    cplx det = B0(0, 0) * B0(1, 1);
    cplx s = std::sqrt(det);
    if (j > 0) {
      // continuous branch around the circle
      if (std::abs(s - sq[static_cast<size_t>(j - 1)]) > std::abs(s + sq[static_cast<size_t>(j - 1)])) s = -s;
    }
    sq[static_cast<size_t>(j)] = s;
    Mat2 A = revolution_a_matrix(params, l);
    cplx f = std::abs(x) > 0 ? f_of(l) : cplx(0);
    Mat2 phi = exp_tracefree(z * A);
    Mat2 B1 = B0 / s;
    Mat2 F = phi * exp_tracefree(-f * A) * adjugate(B1);
    Mat2 B = B1 * exp_tracefree(f * A);
    Phis[static_cast<size_t>(j)] = phi;
    Fs[static_cast<size_t>(j)] = F;
    Bs[static_cast<size_t>(j)] = B;
  }
  // global sign: B(lambda=0) diagonal must be positive; its (0,0) entry is
  // sqrt(2b/v) up to the branch sign, so probe the dc Fourier coefficient
  MatrixLoop Bloop = fit_circle_samples(Bs, lams, band);
  if (Bloop.coeff(0)(0, 0).real() < 0) {
    for (int j = 0; j < samples; ++j) {
      Fs[static_cast<size_t>(j)] = -Fs[static_cast<size_t>(j)];
      Bs[static_cast<size_t>(j)] = -Bs[static_cast<size_t>(j)];
    }
    Bloop = fit_circle_samples(Bs, lams, band);
  }
  RevolutionFrame out;
  out.B = Bloop;
  out.F = fit_circle_samples(Fs, lams, band);

  for (int j = 0; j < samples; ++j) {
    cplx l = lams[static_cast<size_t>(j)];
    out.split_residual = std::max(
        out.split_residual,
        ((out.F.eval(l) * out.B.eval(l) - Phis[static_cast<size_t>(j)]).norm()) /
            std::max(1.0, Phis[static_cast<size_t>(j)].norm()));
    out.det_b_dev = std::max(out.det_b_dev,
                             std::abs(Bs[static_cast<size_t>(j)].determinant() - cplx(1, 0)));
  }
  double neg = 0;
  for (int j = out.B.lo(); j <= -1; ++j) neg += out.B[j].squaredNorm();
  out.plus_residual = std::sqrt(neg) / std::max(out.B.norm(), 1e-300);
  out.B = project_band(out.B, 0, std::max(out.B.hi(), 0));
  MatrixLoop tF = tau_involution(out.F, 1e-3);
  out.tau_residual = loop_distance(tF, out.F) / out.F.norm();
  return out;
}

Potential revolution_potential(const RevolutionParams& p) {
  Potential pot;
  pot.H = p.H();
  pot.lam_lo = -1;
  pot.lam_hi = 1;
  pot.name = "revolution";
  auto& t0 = pot.terms[0];
  t0[0].c = {p.c};
  t0[3].c = {-p.c};
  auto& tm = pot.terms[-1];
  tm[1].c = {p.a};
  tm[2].c = {-p.b};
  auto& tp = pot.terms[1];
  tp[1].c = {p.b};
  tp[2].c = {-p.a};
  return pot;
}

EquivariantData equivariant_to_potential(const EquivariantPoint& e, int h_sign) {
  double q = std::abs(e.P);
  if (q == 0) {
    throw Error(ErrorCode::TotallyUmbilic, "P = 0 is the totally umbilic stratum");
  }
  if (e.v0 == 0) {
    throw Error(ErrorCode::InfeasibleP, "v0 = 0 leaves the metric degenerate at the base point");
  }
  double mem = e.v0 * e.v0 * e.v0 * e.v0 - 2 * e.p * e.v0 * e.v0 + q * q;
  if (mem < -1e-12 * std::max(1.0, q * q)) {
    throw Error(ErrorCode::NotInR, "membership v0^4 - 2 p v0^2 + |P|^2 >= 0 fails");
  }
  EquivariantData out;
  out.b = e.v0 / 2;
  out.a = (h_sign >= 0 ? -1.0 : 1.0) * q / (2 * e.v0);
  out.H = -2 * out.a * out.b;
  double c2 = out.a * out.a + out.b * out.b - e.p / 2;
  if (c2 < -1e-14) {
    throw Error(ErrorCode::InfeasibleP, "a^2 + b^2 - p/2 < 0");
  }
  out.c = std::sqrt(std::max(c2, 0.0));
  out.lambda0 = std::sqrt(q / e.P);  // lambda0^{-2} = P/q
  out.lambda0 /= std::abs(out.lambda0);
  return out;
}

ModuliPoint moduli_normalize(const ModuliPoint& r, double tol) {
  double p = r.p, q = std::abs(r.q), v0 = std::abs(r.v0);
  double mem = v0 * v0 * v0 * v0 - 2 * p * v0 * v0 + q * q;
  double scale = std::max({1.0, v0 * v0 * v0 * v0, std::abs(p) * v0 * v0, q * q});
  if (mem < -tol * scale) throw Error(ErrorCode::NotInR, "not in the solution space R");

  if (q > tol) {
    double s = 1.0 / q;  // r^2
    p *= s;
    v0 *= std::sqrt(s);
    q = 1.0;
  } else if (std::abs(p) > tol) {
    double s = 1.0 / std::abs(p);
    v0 *= std::sqrt(s);
    p = p > 0 ? 1.0 : -1.0;
    q = 0.0;
  } else {
    p = 0.0;
    q = 0.0;
    v0 = v0 > tol ? 1.0 : 0.0;
    return {p, q, v0};
  }

  // canonical v0: the turning value of the orbit (root of v^4 - 2pv^2 + q^2
  // in the closure of the orbit's range)
  if (q == 1.0) {
    double disc = p * p - 1.0;
    if (disc < 0 || p < 0) {
      v0 = 0.0;  // no real turning points; single orbit through every value
    } else {
      double vm = std::sqrt(p - std::sqrt(disc));
      double vp = std::sqrt(p + std::sqrt(disc));
      v0 = (v0 <= vm + tol) ? vm : vp;
    }
  } else {
    // q = 0, p = +/-1
    if (p > 0) {
      v0 = (v0 < tol) ? 0.0 : std::sqrt(2.0 * p);
    } else {
      v0 = (v0 < tol) ? 0.0 : 1.0;
    }
  }
  return {p, q, v0};
}

Potential smyth_potential(double c, int k, double H) {
  if (c < 0) throw Error(ErrorCode::SchemaError, "smyth potential needs c >= 0");
  if (k < 0) throw Error(ErrorCode::SchemaError, "smyth potential needs k >= 0");
  Potential pot;
  pot.H = H;
  pot.lam_lo = -1;
  pot.lam_hi = -1;
  pot.name = "smyth";
  pot.symmetry_order = k + 2;
  pot.smyth_c = c;
  pot.smyth_k = k;
  auto& tm = pot.terms[-1];
  tm[1].c = {1.0};
  if (c > 0) {
    tm[2].c.assign(static_cast<size_t>(k) + 1, 0.0);
    tm[2].c[static_cast<size_t>(k)] = c;
  }
  return pot;
}

RegionInfo region_label(double b, double c) {
  RegionInfo out;
  AxisClass cls = axis_classify(1.0, b, c);
  out.axis_letter = cls == AxisClass::Spacelike ? 'S' : (cls == AxisClass::Timelike ? 'T' : 'L');
  out.hyperbola_invariant = b != 0 ? (1.0 + b * b - c * c) / b : 0.0;
  return out;
}

}  // namespace minkcmc

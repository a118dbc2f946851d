#include "minkcmc/symsurface.hpp"

#include <algorithm>
#include <cmath>

namespace minkcmc {

AmbientPoint to_ambient(const Mat2& m, double* su11_residual) {
  // x1 sigma1 + x2 (-sigma2) + x0 (i sigma3) = [[i x0, x1 + i x2], [x1 - i x2, -i x0]]
  AmbientPoint p;
  p.x0 = 0.5 * (m(0, 0).imag() - m(1, 1).imag());
  p.x1 = 0.5 * (m(0, 1) + m(1, 0)).real();
  p.x2 = 0.5 * (m(0, 1) - m(1, 0)).imag();
  if (su11_residual) {
    Mat2 back = from_ambient(p);
    *su11_residual = (m - back).norm();
  }
  return p;
}

Mat2 from_ambient(const AmbientPoint& p) {
  Mat2 m;
  m << cplx(0, p.x0), cplx(p.x1, p.x2), cplx(p.x1, -p.x2), cplx(0, -p.x0);
  return m;
}

double minkowski_dot(const AmbientPoint& a, const AmbientPoint& b) {
  return a.x1 * b.x1 + a.x2 * b.x2 - a.x0 * b.x0;
}

double euclid_norm(const AmbientPoint& a) {
  return std::sqrt(a.x1 * a.x1 + a.x2 * a.x2 + a.x0 * a.x0);
}

AmbientPoint operator-(const AmbientPoint& a, const AmbientPoint& b) {
  return {a.x1 - b.x1, a.x2 - b.x2, a.x0 - b.x0};
}
AmbientPoint operator+(const AmbientPoint& a, const AmbientPoint& b) {
  return {a.x1 + b.x1, a.x2 + b.x2, a.x0 + b.x0};
}
AmbientPoint operator*(double s, const AmbientPoint& a) {
  return {s * a.x1, s * a.x2, s * a.x0};
}

namespace {

void check_real_form(const MatrixLoop& F, const SymOptions& opt, int* sign_out) {
  MatrixLoop tF = tau_involution(F, 1e-6);
  double nf = F.norm();
  double rp = loop_distance(tF, F) / nf;
  double rm = loop_distance(tF, cplx(-1, 0) * F) / nf;
  if (std::min(rp, rm) > opt.realform_tol) {
    throw Error(ErrorCode::NotRealForm,
                "tau(F) -/+ F residual " + std::to_string(std::min(rp, rm)));
  }
  if (sign_out) *sign_out = rp <= rm ? 1 : -1;
}

Mat2 sym_matrix_at(const MatrixLoop& F, cplx lambda0) {
  Mat2 Fv = F.eval(lambda0);
  Mat2 Fi = adjugate(Fv);
  Mat2 dF = lambda_derivative(F).eval(lambda0);  // lambda dF/dlambda at lambda0
  const cplx i(0, 1);
  return Fv * (i * sigma3()) * Fi + 2.0 * i * dF * Fi;
}

Mat2 maybe_reflect(const Mat2& m, int sign, const SymOptions& opt) {
  if (sign < 0 && opt.shifted_isometric_representative) return -ad_sigma1(m);
  return m;
}

}  // namespace

AmbientPoint sym_point(const MatrixLoop& F, cplx lambda0, double H, const SymOptions& opt) {
  int sign = 1;
  check_real_form(F, opt, &sign);
  Mat2 S = maybe_reflect(sym_matrix_at(F, lambda0), sign, opt);
  return to_ambient((-1.0 / (2.0 * H)) * S);
}

AmbientPoint normal_vec(const MatrixLoop& F, cplx lambda0, const SymOptions& opt) {
  int sign = 1;
  check_real_form(F, opt, &sign);
  Mat2 Fv = F.eval(lambda0);
  Mat2 N = Fv * (cplx(0, 1) * sigma3()) * adjugate(Fv);
  return to_ambient(maybe_reflect(N, sign, opt));
}

ParallelPoints parallel_points(const MatrixLoop& F, cplx lambda0, double H,
                               const SymOptions& opt) {
  int sign = 1;
  check_real_form(F, opt, &sign);
  Mat2 Fv = F.eval(lambda0);
  Mat2 Fi = adjugate(Fv);
  const cplx i(0, 1);
  Mat2 rot = Fv * (i * sigma3()) * Fi;
  Mat2 der = 2.0 * i * lambda_derivative(F).eval(lambda0) * Fi;
  ParallelPoints out;
  out.parallel = to_ambient(maybe_reflect((-1.0 / (2.0 * H)) * (-rot + der), sign, opt));
  out.gauss = to_ambient(maybe_reflect((-1.0 / (2.0 * H)) * der, sign, opt));
  return out;
}

MatrixLoop sym_lie_loop(const MatrixLoop& F) {
  MatrixLoop Fi = loop_adjugate(F);
  MatrixLoop rot = mul(mul(F, MatrixLoop::constant(cplx(0, 1) * sigma3())), Fi);
  MatrixLoop der = cplx(0, 2) * mul(lambda_derivative(F), Fi);
  return (rot + der).trimmed(1e-15);
}

AmbientPoint lie_loop_to_point(const MatrixLoop& S, cplx lambda0, double H) {
  return to_ambient((-1.0 / (2.0 * H)) * S.eval(lambda0));
}

MetricData metric_rho(const MatrixLoop& B, double tol) {
  if (B.trimmed(1e-12).lo() < 0) {
    throw Error(ErrorCode::NotNormalized, "plus factor has negative powers");
  }
  Mat2 b0 = B.coeff(0);
  double off = std::max(std::abs(b0(0, 1)), std::abs(b0(1, 0)));
  double scale = std::max(1.0, b0.norm());
  if (off > tol * scale) {
    throw Error(ErrorCode::NotNormalized, "B(0) is not diagonal");
  }
  cplx d = b0(0, 0);
  if (std::abs(d.imag()) > tol * scale || d.real() <= 0) {
    throw Error(ErrorCode::NotNormalized, "B(0) diagonal is not positive real");
  }
  MetricData out;
  out.rho = d.real();
  out.u = 2.0 * std::log(out.rho);
  return out;
}

MatrixLoop extended_sym(const MatrixLoop& phi, const std::optional<P1Aux>& aux,
                        const CellContext& ctx, const FactorizeOptions& opt) {
  KernelOutcome k = try_iwasawa_kernel(phi, opt);
  if (k.ok()) {
    return sym_lie_loop(k.result.F);
  }
  // Off the big cell. With a known P1 decomposition phi = F0 omega_1 B0, the
  // shifted loop phi B0^{-1} omega_1^{-1} is in the big cell and carries the
  // extension; the switch-factor matrices k_i stabilize S, so the value is
  // consistent with the big-cell formula.
  CellClass cls = classify_cell(phi, ctx, opt);
  if (aux) {
    MatrixLoop shifted = mul(mul(phi, inverse_unimodular(aux->B0, 1e-6)),
                             inverse_unimodular(omega_loop(1), 1e-6));
    KernelOutcome ks = try_iwasawa_kernel(shifted, opt);
    if (!ks.ok()) {
      throw Error(ErrorCode::SecondSmallCell,
                  "shifted loop is not in the big cell; decomposition is not P1: " + ks.detail);
    }
    return sym_lie_loop(ks.result.F);
  }
  if (cls.tag == CellTag::P1) {
    throw Error(ErrorCode::MissingAux, "P1 input needs its F0 omega_1 B0 decomposition");
  }
  if (cls.tag == CellTag::P2) {
    throw Error(ErrorCode::SecondSmallCell,
                "no finite extension on the second small cell");
  }
  throw Error(ErrorCode::SmallCellSuspected, "unclassified small-cell input: " + k.detail);
}

int SurfaceMesh::flagged_count() const {
  int n = 0;
  for (const auto& s : samples) {
    if (!s.masked && !s.valid_point) ++n;
  }
  return n;
}

namespace {

struct EdgeRef {
  int i0, j0, i1, j1;
};

// conditioning of the factorization at an interior point of a segment,
// integrating the frame from the nearer endpoint
struct ProbePoint {
  double t;
  double cond;
  double rho;
  bool ok;
  AmbientPoint normal;
  AmbientPoint point;
};

class EdgeProber {
 public:
  EdgeProber(const Potential& p, const FrameField& ff, const BandPolicy& policy,
             const FactorizeOptions& fopt, cplx lambda0, double H)
      : p_(p), ff_(ff), policy_(policy), fopt_(fopt), lambda0_(lambda0), H_(H) {}

  ProbePoint eval(cplx za, const MatrixLoop& phia, cplx z, double t) const {
    ProbePoint out;
    out.t = t;
    MatrixLoop phi = integrate_segment(p_, phia, za, z, policy_, ff_.grid.rtol,
                                       ff_.grid.atol, ff_.grid.max_step);
    KernelOutcome k = try_iwasawa_kernel(phi, fopt_);
    out.cond = k.result.conditioning;
    out.ok = k.ok();
    if (k.ok()) {
      out.rho = k.result.rho0;
      SymOptions so;
      out.point = sym_point(k.result.F, lambda0_, H_, so);
      out.normal = normal_vec(k.result.F, lambda0_, so);
    } else {
      out.rho = 0;
      out.cond = std::min(out.cond, 0.0);
    }
    return out;
  }

 private:
  const Potential& p_;
  const FrameField& ff_;
  const BandPolicy& policy_;
  const FactorizeOptions& fopt_;
  cplx lambda0_;
  double H_;
};

}  // namespace

SurfaceMesh assemble_surface(const Potential& p, const FrameField& ff, cplx lambda0,
                             const BandPolicy& policy, const FactorizeOptions& fopt,
                             const ScanOptions& scan) {
  if (std::abs(std::abs(lambda0) - 1.0) > 1e-12) {
    throw Error(ErrorCode::SchemaError, "lambda0 must lie on the unit circle");
  }
  const GridSpec& grid = ff.grid;
  SurfaceMesh mesh;
  mesh.grid = grid;
  mesh.H = p.H;
  mesh.lambda0 = lambda0;
  mesh.potential_name = p.name;
  mesh.smyth_c = p.smyth_c;
  mesh.smyth_k = p.smyth_k;
  mesh.symmetry_order = p.symmetry_order;
  mesh.samples.assign(static_cast<size_t>(grid.size()), SurfaceSample{});

  SymOptions sopt;
  for (int j = 0; j < grid.nj(); ++j) {
    for (int i = 0; i < grid.ni(); ++i) {
      SurfaceSample& s = mesh.at(i, j);
      s.z = grid.vertex(i, j);
      s.masked = grid.masked(i, j);
      if (s.masked) continue;
      const StepStats& st = ff.stats[static_cast<size_t>(grid.index(i, j))];
      s.det_drift = st.det_drift;
      s.dropped = st.dropped;
      s.dwdz = cplx(0, 1) / p.H * p.a_minus1().eval(s.z);
      try {
        s.q = hopf_q(p, s.z);
      } catch (const Error&) {
        s.q = 0;
      }
      KernelOutcome k = try_iwasawa_kernel(ff.at(i, j), fopt);
      s.cell.evidence.kernel_dim = k.result.kernel_dim;
      s.cell.evidence.det_w = k.result.det_w;
      s.cell.evidence.sigma_ratio = k.result.sigma_ratio;
      s.cell.evidence.conditioning = k.result.conditioning;
      if (!k.ok()) {
        s.cell.tag = CellTag::HigherOrUnknown;
        s.cell.evidence.note = k.detail;
        continue;
      }
      const IwasawaResult& r = k.result;
      s.cell.tag = CellTag::BigCell;
      s.component_sign = r.component_sign;
      s.rho = r.rho0;
      s.u = 2.0 * std::log(r.rho0);
      s.recon_resid = r.residual;
      s.point = sym_point(r.F, lambda0, p.H, sopt);
      s.normal = normal_vec(r.F, lambda0, sopt);
      MatrixLoop tF = tau_involution(r.F, 1e-6);
      s.tau_resid = std::min(loop_distance(tF, r.F), loop_distance(tF, cplx(-1, 0) * r.F)) /
                    r.F.norm();
      s.valid_point = true;
    }
  }

  if (!scan.enabled) return mesh;

  // --- singular-set scan ---------------------------------------------------
  // Edges whose endpoints jump suspiciously (or touch a failed vertex) are
  // probed by minimizing the factorization conditioning along the edge; a
  // crossing is logged when it collapses. The rho trend along the approach
  // classifies the stratum (P1: rho -> 0, P2: rho -> infinity).
  std::vector<EdgeRef> edges;
  std::vector<double> jumps;
  auto add_edge = [&](int i0, int j0, int i1, int j1) {
    const SurfaceSample& a = mesh.at(i0, j0);
    const SurfaceSample& b = mesh.at(i1, j1);
    if (a.masked || b.masked) return;
    edges.push_back({i0, j0, i1, j1});
    if (a.valid_point && b.valid_point) {
      jumps.push_back(euclid_norm(a.point - b.point));
    } else {
      jumps.push_back(-1);  // failed endpoint: always probe
    }
  };
  for (int j = 0; j < grid.nj(); ++j) {
    for (int i = 0; i < grid.ni(); ++i) {
      if (i + 1 < grid.ni()) add_edge(i, j, i + 1, j);
      if (j + 1 < grid.nj()) add_edge(i, j, i, j + 1);
      else if (grid.kind == GridSpec::Kind::Polar) add_edge(i, j, i, 0);  // wrap
    }
  }
  std::vector<double> valid_jumps;
  for (double v : jumps)
    if (v >= 0) valid_jumps.push_back(v);
  double median_jump = 0;
  if (!valid_jumps.empty()) {
    size_t mid = valid_jumps.size() / 2;
    std::nth_element(valid_jumps.begin(), valid_jumps.begin() + static_cast<long>(mid),
                     valid_jumps.end());
    median_jump = valid_jumps[mid];
  }

  EdgeProber prober(p, ff, policy, fopt, lambda0, p.H);
  struct Crossing {
    cplx z;
    CellTag tag;
    double slope;
    int samples;
  };
  std::vector<Crossing> crossings;
  int probes = 0;

  for (size_t e = 0; e < edges.size(); ++e) {
    const EdgeRef& er = edges[e];
    const SurfaceSample& a = mesh.at(er.i0, er.j0);
    const SurfaceSample& b = mesh.at(er.i1, er.j1);
    bool suspicious = jumps[e] < 0;
    if (!suspicious && median_jump > 0 && jumps[e] > scan.jump_factor * median_jump) {
      suspicious = true;
    }
    if (!suspicious && a.valid_point && b.valid_point && a.rho > 0 && b.rho > 0 &&
        std::abs(std::log(a.rho / b.rho)) > scan.logrho_jump) {
      suspicious = true;
    }
    if (!suspicious || probes >= scan.max_probes) continue;
    ++probes;

    cplx za = a.z, zb = b.z;
    const MatrixLoop& phia = ff.at(er.i0, er.j0);
    auto eval_t = [&](double t) { return prober.eval(za, phia, za + t * (zb - za), t); };

    // golden-section minimization of the conditioning along the edge
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = 1.0;
    double t1 = hi - gr * (hi - lo), t2 = lo + gr * (hi - lo);
    ProbePoint p1 = eval_t(t1), p2 = eval_t(t2);
    for (int it = 0; it < 36 && (hi - lo) > 1e-10; ++it) {
      if ((p1.ok ? p1.cond : -1) <= (p2.ok ? p2.cond : -1)) {
        hi = t2;
        t2 = t1;
        p2 = p1;
        t1 = hi - gr * (hi - lo);
        p1 = eval_t(t1);
      } else {
        lo = t1;
        t1 = t2;
        p1 = p2;
        t2 = lo + gr * (hi - lo);
        p2 = eval_t(t2);
      }
    }
    double tstar = 0.5 * (lo + hi);
    ProbePoint pmin = eval_t(tstar);
    double edge_len = std::abs(zb - za);
    if (pmin.ok && pmin.cond > scan.crossing_cond) continue;  // no crossing

    // rho trend approaching t* from both sides
    std::vector<std::pair<double, double>> trend;
    for (int s = 1; s <= scan.trend_samples; ++s) {
      double d = std::pow(0.5, s + 1);  // fraction of the edge
      for (double side : {-1.0, 1.0}) {
        double t = tstar + side * d;
        if (t <= 0 || t >= 1) continue;
        ProbePoint pp = eval_t(t);
        if (pp.ok) trend.push_back({d * edge_len, pp.rho});
      }
    }
    double slope = rho_trend_slope(trend);
    CellTag tag = CellTag::HigherOrUnknown;
    if (static_cast<int>(trend.size()) >= 5) {
      if (slope >= scan.slope_tol) tag = CellTag::P1;
      else if (slope <= -scan.slope_tol) tag = CellTag::P2;
    }
    crossings.push_back({za + tstar * (zb - za), tag, slope, static_cast<int>(trend.size())});
  }

  // flag vertices near detected crossings
  double flag_radius = scan.flag_radius_steps * grid.step_scale();
  for (auto& s : mesh.samples) {
    if (s.masked) continue;
    for (const auto& c : crossings) {
      if (std::abs(s.z - c.z) <= flag_radius) {
        s.valid_point = false;
        if (s.cell.tag == CellTag::BigCell || s.cell.tag == CellTag::HigherOrUnknown) {
          s.cell.tag = c.tag;
          s.cell.evidence.rho_slope = c.slope;
          s.cell.evidence.rho_samples = c.samples;
          s.cell.evidence.note = "near detected cell crossing";
        }
        break;
      }
    }
  }
  // failed vertices that sit near a crossing inherit its class; isolated
  // failures fall back to a radial rho-trend probe around the vertex
  for (int j = 0; j < grid.nj(); ++j) {
    for (int i = 0; i < grid.ni(); ++i) {
      SurfaceSample& s = mesh.at(i, j);
      if (s.masked || s.valid_point || s.cell.tag != CellTag::HigherOrUnknown) continue;
      // probe along shrinking radii toward the vertex from the +x direction,
      // starting at the nearest valid neighbor
      const SurfaceSample* nb = nullptr;
      int ni = -1, nj_ = -1;
      for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        int ii = i + di, jj = j + dj;
        if (grid.kind == GridSpec::Kind::Polar) jj = (jj + grid.ntheta) % grid.ntheta;
        if (ii < 0 || ii >= grid.ni() || jj < 0 || jj >= grid.nj()) continue;
        const SurfaceSample& cand = mesh.at(ii, jj);
        if (cand.valid_point || cand.cell.tag == CellTag::BigCell) {
          nb = &cand;
          ni = ii;
          nj_ = jj;
          break;
        }
      }
      if (!nb) continue;
      cplx dir = nb->z - s.z;
      std::vector<std::pair<double, double>> trend;
      for (int t = 1; t <= scan.trend_samples; ++t) {
        double frac = std::pow(0.5, t);
        cplx z = s.z + frac * dir;
        ProbePoint pp = prober.eval(nb->z, ff.at(ni, nj_), z, frac);
        if (pp.ok) trend.push_back({frac * std::abs(dir), pp.rho});
      }
      double slope = rho_trend_slope(trend);
      s.cell.evidence.rho_slope = slope;
      s.cell.evidence.rho_samples = static_cast<int>(trend.size());
      if (static_cast<int>(trend.size()) >= 5) {
        if (slope >= scan.slope_tol) s.cell.tag = CellTag::P1;
        else if (slope <= -scan.slope_tol) s.cell.tag = CellTag::P2;
      }
    }
  }
  return mesh;
}

SurfaceMesh build_surface(const Potential& p, const GridSpec& grid, const MatrixLoop& phi0,
                          cplx lambda0, const BandPolicy& policy,
                          const FactorizeOptions& fopt, const ScanOptions& scan) {
  FrameField ff = integrate_frame(p, grid, phi0, policy);
  return assemble_surface(p, ff, lambda0, policy, fopt, scan);
}

}  // namespace minkcmc

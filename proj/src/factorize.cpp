#include "minkcmc/factorize.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace minkcmc {

namespace {

struct Unknown {
  int power;
  int row, col;
};

// Coefficient basis of W in Lambda_{-n,n}, parity-restricted when twisted.
std::vector<Unknown> unknown_basis(int n, bool twisted) {
  std::vector<Unknown> idx;
  for (int j = -n; j <= n; ++j) {
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        if (twisted) {
          bool diag = (r == c);
          bool even = ((j % 2) == 0);
          if (diag != even) continue;
        }
        idx.push_back({j, r, c});
      }
    }
  }
  return idx;
}

// The linear system rows of L_X: the conditions
//   P_{-inf,-1}(W X) = 0,
//   P_{-inf,-1}(adj(rho W) X) = 0,
//   lambda^0 entries: (WX - conj(adj(rho W) X))_{11} = (..)_{22} = 0,
//   (WX)_{21} = 0, (adj(rho W) X)_{21} = 0.
// A row for conj(adj(rho W) X)_m[r,c] is linear in W because rho conjugates:
// conj(adj(rho W) X)_m = sum_j adj(sigma3 W_j^T sigma3) conj(X_{m+j}),
// and adj(sigma3 W_j^T sigma3)[r,u] = W_j[1-r, 1-u].
Eigen::MatrixXcd build_system(const MatrixLoop& X, int n,
                              const std::vector<Unknown>& idx) {
  const int N = static_cast<int>(idx.size());
  const int mlo = -n + std::min(X.lo(), 0);
  const int neg_rows = -mlo;  // powers mlo .. -1
  const int M = 8 * neg_rows + 4;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(M, N);

  auto add_WX = [&](int rowi, int m, int r, int c, cplx w) {
    // entry (r,c) of (WX)_m = sum_j W_j X_{m-j}
    for (int i = 0; i < N; ++i) {
      const auto& u = idx[i];
      if (u.row != r) continue;
      Mat2 xm = X.coeff(m - u.power);
      A(rowi, i) += w * xm(u.col, c);
    }
  };
  auto add_CARX = [&](int rowi, int m, int r, int c, cplx w) {
    // entry (r,c) of conj(adj(rho W) X)_m
    for (int i = 0; i < N; ++i) {
      const auto& u = idx[i];
      if (u.row != 1 - r) continue;
      Mat2 xm = X.coeff(m + u.power).conjugate();
      A(rowi, i) += w * xm(1 - u.col, c);
    }
  };

  int rowi = 0;
  for (int m = mlo; m <= -1; ++m) {
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        add_WX(rowi++, m, r, c, 1.0);
        add_CARX(rowi++, m, r, c, 1.0);
      }
    }
  }
  add_WX(rowi, 0, 0, 0, 1.0);
  add_CARX(rowi++, 0, 0, 0, -1.0);
  add_WX(rowi, 0, 1, 1, 1.0);
  add_CARX(rowi++, 0, 1, 1, -1.0);
  add_WX(rowi++, 0, 1, 0, 1.0);
  add_CARX(rowi++, 0, 1, 0, 1.0);
  return A;
}

struct NullspaceInfo {
  Eigen::VectorXcd kernel;
  double sigma_ratio = 0;  // sigma[N-2] / sigma[0]
  int kernel_dim = 0;
  double sigma_max = 0;
};

// Smallest right-singular direction plus the spectrum summary needed for the
// cell diagnostics. Gram-matrix eigendecomposition is used for speed; the
// bidiagonal SVD is the fallback whenever the spectrum is too collapsed for
// the Gram route to certify the kernel count.
NullspaceInfo svd_nullspace(const Eigen::MatrixXcd& A, double svd_rtol) {
  const int N = static_cast<int>(A.cols());
  NullspaceInfo out;
  bool need_direct = N <= 24;
  if (!need_direct) {
    Eigen::MatrixXcd H = A.adjoint() * A;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    const auto& ev = es.eigenvalues();
    double lmax = std::max(ev(N - 1), 0.0);
    double l2 = N >= 2 ? std::max(ev(1), 0.0) : 0.0;
    // the squared spectrum floors out near eps * lmax; below ~100x that the
    // kernel multiplicity cannot be certified from the Gram matrix
    double floor2 = 1e-12 * lmax;
    if (lmax <= 0 || l2 <= 100 * floor2) {
      need_direct = true;
    } else {
      out.sigma_max = std::sqrt(lmax);
      out.sigma_ratio = std::sqrt(l2 / lmax);
      out.kernel = es.eigenvectors().col(0);
      // the kernel direction is well separated here, so || A w || recovers the
      // smallest singular value without the squaring loss
      double sigma_min = (A * out.kernel).norm();
      out.kernel_dim = sigma_min <= svd_rtol * out.sigma_max ? 1 : 0;
      return out;
    }
  }
  if (N <= 24) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int ns = static_cast<int>(s.size());
    out.sigma_max = ns > 0 ? s(0) : 0;
    auto sigma = [&](int i) { return i < ns ? s(i) : 0.0; };  // implicit zeros if M < N
    out.sigma_ratio = out.sigma_max > 0 ? sigma(N - 2) / out.sigma_max : 0;
    out.kernel = svd.matrixV().col(N - 1);
    out.kernel_dim = 0;
    for (int i = 0; i < N; ++i) {
      if (sigma(i) <= svd_rtol * std::max(out.sigma_max, 1e-300)) out.kernel_dim++;
    }
    return out;
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int ns = static_cast<int>(s.size());
  out.sigma_max = ns > 0 ? s(0) : 0;
  auto sigma = [&](int i) { return i < ns ? s(i) : 0.0; };
  out.sigma_ratio = out.sigma_max > 0 ? sigma(N - 2) / out.sigma_max : 0;
  out.kernel = svd.matrixV().col(N - 1);
  out.kernel_dim = 0;
  for (int i = 0; i < N; ++i) {
    if (sigma(i) <= svd_rtol * std::max(out.sigma_max, 1e-300)) out.kernel_dim++;
  }
  return out;
}

MatrixLoop loop_from_vector(const Eigen::VectorXcd& w, int n,
                            const std::vector<Unknown>& idx) {
  MatrixLoop W(-n, n);
  for (size_t i = 0; i < idx.size(); ++i) {
    W[idx[i].power](idx[i].row, idx[i].col) = w(static_cast<Eigen::Index>(i));
  }
  return W;
}

Mat2 i_sigma3_power(int k) {
  Mat2 m = Mat2::Identity();
  Mat2 is3 = cplx(0, 1) * sigma3();
  for (int i = 0; i < ((k % 4) + 4) % 4; ++i) m = is3 * m;
  return m;
}

}  // namespace

KernelOutcome try_iwasawa_kernel(const MatrixLoop& X, const FactorizeOptions& opt) {
  KernelOutcome out;
  double udev = unimodular_deviation(X, opt.circle_samples);
  if (udev > opt.unimodular_tol) {
    out.status = FactorStatus::NonUnimodular;
    out.detail = "det X deviates from 1 by " + std::to_string(udev);
    return out;
  }
  MatrixLoop Xt = X.trimmed(1e-15);
  const int n = std::max(0, -Xt.lo());
  const bool twisted = !opt.force_untwisted && is_twisted(Xt, 1e-9);

  auto idx = unknown_basis(n, twisted);
  Eigen::MatrixXcd A = build_system(Xt, n, idx);
  NullspaceInfo ns = svd_nullspace(A, opt.svd_rtol);

  IwasawaResult& r = out.result;
  r.kernel_dim = ns.kernel_dim;
  r.sigma_ratio = ns.sigma_ratio;

  if (ns.kernel_dim != 1) {
    out.status = FactorStatus::SmallCellSuspected;
    out.detail = "kernel dimension " + std::to_string(ns.kernel_dim);
    return out;
  }

  MatrixLoop W = loop_from_vector(ns.kernel, n, idx);

  // det W is lambda-independent on the big cell; measure and normalize.
  cplx det_mean = 0;
  std::vector<cplx> dets(static_cast<size_t>(opt.circle_samples));
  for (int s = 0; s < opt.circle_samples; ++s) {
    cplx lambda = unit_circle(2.0 * M_PI * s / opt.circle_samples + 0.29);
    dets[static_cast<size_t>(s)] = W.eval(lambda).determinant();
    det_mean += dets[static_cast<size_t>(s)];
  }
  det_mean /= double(opt.circle_samples);
  double det_dev = 0;
  for (auto d : dets) det_dev = std::max(det_dev, std::abs(d - det_mean));
  r.det_w = std::abs(det_mean);
  r.det_lambda_dev = det_dev;
  r.conditioning = r.sigma_ratio * r.det_w;

  if (r.det_w < opt.det_tol) {
    out.status = FactorStatus::SmallCellSuspected;
    out.detail = "singular kernel element, |det W| = " + std::to_string(r.det_w);
    return out;
  }
  if (r.conditioning < opt.cond_tol) {
    out.status = FactorStatus::IllConditioned;
    out.detail = "conditioning " + std::to_string(r.conditioning);
    return out;
  }

  W = (1.0 / std::sqrt(det_mean)) * W;

  // F = ((i sigma3)^k W)^{-1}, k chosen so that tau(F) = +/- F.
  MatrixLoop bestF;
  int best_sign = 1;
  double best_resid = -1;
  for (int k = 0; k <= 1; ++k) {
    MatrixLoop Wk = W;
    if (k == 1) {
      Mat2 is3 = i_sigma3_power(1);
      for (int j = Wk.lo(); j <= Wk.hi(); ++j) Wk[j] = is3 * Wk[j];
    }
    MatrixLoop F = loop_adjugate(Wk);  // det Wk = +/-1... see below
    // det(i sigma3 W) = det W, so adjugate is the inverse for both k
    MatrixLoop tF = tau_involution(F, 1e308);  // det checked already via W
    double nf = F.norm();
    double rp = loop_distance(tF, F) / nf;
    double rm = loop_distance(tF, cplx(-1, 0) * F) / nf;
    if (best_resid < 0 || std::min(rp, rm) < best_resid - 1e-14) {
      best_resid = std::min(rp, rm);
      best_sign = rp <= rm ? 1 : -1;
      bestF = F;
    }
  }
  MatrixLoop F = bestF;
  r.component_sign = best_sign;

  // B = F^{-1} X; negative powers must cancel.
  MatrixLoop B0 = mul(loop_adjugate(F), Xt);
  double neg_mass = 0;
  for (int j = B0.lo(); j <= -1; ++j) neg_mass += B0[j].squaredNorm();
  neg_mass = std::sqrt(neg_mass) / std::max(B0.norm(), 1e-300);
  B0 = project_band(B0, 0, std::max(B0.hi(), 0)).trimmed(1e-16);

  // Right-multiply F by a diagonal unitary so that B(0) = diag(rho0, 1/rho0),
  // rho0 > 0 (equivalently B(0) real-positive upper triangular, untwisted).
  cplx beta = B0[0](0, 0);
  double rho0 = std::abs(beta);
  if (rho0 < 1e-300) {
    out.status = FactorStatus::SmallCellSuspected;
    out.detail = "vanishing leading diagonal in plus factor";
    return out;
  }
  cplx ph = beta / rho0;
  Mat2 D;
  D << ph, 0, 0, std::conj(ph);
  Mat2 Dinv = D.adjoint();
  for (int j = F.lo(); j <= F.hi(); ++j) F[j] = F[j] * D;
  for (int j = B0.lo(); j <= B0.hi(); ++j) B0[j] = Dinv * B0[j];
  r.rho0 = rho0;

  double recon = (loop_distance(mul(F, B0), Xt) / std::max(Xt.norm(), 1e-300));
  r.residual = std::max(recon, neg_mass);
  r.F = F.trimmed(1e-16);
  r.B = B0;
  if (r.residual > opt.recon_tol) {
    out.status = FactorStatus::ResidualTooLarge;
    out.detail = "reconstruction residual " + std::to_string(r.residual);
    return out;
  }
  return out;
}

IwasawaResult iwasawa_kernel(const MatrixLoop& X, const FactorizeOptions& opt) {
  KernelOutcome out = try_iwasawa_kernel(X, opt);
  switch (out.status) {
    case FactorStatus::Ok: return out.result;
    case FactorStatus::SmallCellSuspected:
      throw Error(ErrorCode::SmallCellSuspected, out.detail);
    case FactorStatus::IllConditioned:
      throw Error(ErrorCode::IllConditioned, out.detail);
    case FactorStatus::ResidualTooLarge:
      throw Error(ErrorCode::ResidualTooLarge, out.detail);
    case FactorStatus::NonUnimodular:
      throw Error(ErrorCode::NonUnimodular, out.detail);
  }
  throw Error(ErrorCode::SmallCellSuspected, "unreachable");
}

ConstantIwasawa iwasawa_constant(const Mat2& X, double det_tol, double case_tol) {
  if (std::abs(X.determinant() - cplx(1, 0)) > det_tol) {
    throw Error(ErrorCode::NonUnimodular, "constant Iwasawa requires det X = 1");
  }
  ConstantIwasawa out;
  double a11 = std::abs(X(0, 0)), a21 = std::abs(X(1, 0));
  double scale = std::max({a11, a21, 1.0});
  if (std::abs(a11 - a21) <= case_tol * scale) {
    // |X11| = |X21|: lower-triangular-with-phase factor
    out.case_id = 3;
    out.r = a11;
    if (out.r < det_tol) throw Error(ErrorCode::SmallCellSuspected, "zero first column");
    cplx eith = X(0, 0) / out.r;
    cplx eig = X(1, 0) / out.r;
    out.F << eith, 0, eig, 1.0 / eith;
    out.u = eith;
    out.v = 0;
  } else if (a11 > a21) {
    out.case_id = 1;
    out.r = std::sqrt(a11 * a11 - a21 * a21);
    out.u = X(0, 0) / out.r;
    out.v = std::conj(X(1, 0) / out.r);
    out.F << out.u, out.v, std::conj(out.v), std::conj(out.u);
  } else {
    out.case_id = 2;
    out.r = std::sqrt(a21 * a21 - a11 * a11);
    out.u = X(0, 0) / out.r;
    out.v = -std::conj(X(1, 0) / out.r);
    out.F << out.u, out.v, -std::conj(out.v), -std::conj(out.u);
  }
  out.B = adjugate(out.F) * X;
  out.B(1, 0) = 0;  // exact by construction; scrub roundoff
  return out;
}

double rho_trend_slope(const std::vector<std::pair<double, double>>& samples) {
  // least squares of log(rho) against log(d)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (auto [d, rho] : samples) {
    if (d <= 0 || rho <= 0) continue;
    double x = std::log(d), y = std::log(rho);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return 0;
  double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) return 0;
  return (n * sxy - sx * sy) / denom;
}

namespace {

// Recognize the literal canonical loops psi^m_z (omega_m at z = 1):
// identity plus a single off-diagonal monomial at the right power.
std::optional<std::pair<int, cplx>> recognize_psi(const MatrixLoop& X) {
  MatrixLoop T = X.trimmed(1e-14);
  double off = 0;
  int pow = 0;
  cplx val = 0;
  int row = -1, col = -1;
  for (int j = T.lo(); j <= T.hi(); ++j) {
    Mat2 m = T[j];
    Mat2 expect = (j == 0) ? Mat2(Mat2::Identity()) : Mat2(Mat2::Zero());
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        cplx d = m(r, c) - expect(r, c);
        if (std::abs(d) > 1e-12) {
          if (r == c) return std::nullopt;   // diagonal deviation
          if (off > 0) return std::nullopt;  // more than one extra entry
          off = std::abs(d);
          pow = j;
          val = d;
          row = r;
          col = c;
        }
      }
    }
  }
  if (off == 0) return std::nullopt;
  if (row == 1 && col == 0 && pow < 0 && (-pow) % 2 == 1) return std::make_pair(-pow, val);
  if (row == 0 && col == 1 && pow <= 0 && (1 - pow) % 2 == 0) return std::make_pair(1 - pow, val);
  return std::nullopt;
}

}  // namespace

CellClass classify_cell(const MatrixLoop& X, const CellContext& ctx,
                        const FactorizeOptions& opt) {
  CellClass out;
  KernelOutcome k = try_iwasawa_kernel(X, opt);
  out.evidence.kernel_dim = k.result.kernel_dim;
  out.evidence.det_w = k.result.det_w;
  out.evidence.sigma_ratio = k.result.sigma_ratio;
  out.evidence.conditioning = k.result.conditioning;
  if (k.ok()) {
    out.tag = CellTag::BigCell;
    return out;
  }
  out.evidence.note = k.detail;
  if (ctx.canonical_m) {
    int m = *ctx.canonical_m;
    out.tag = m == 1 ? CellTag::P1 : (m == 2 ? CellTag::P2 : CellTag::HigherOrUnknown);
    out.evidence.note += "; canonical decomposition m=" + std::to_string(m);
    return out;
  }
  if (auto psi = recognize_psi(X)) {
    auto [m, z] = *psi;
    if (std::abs(std::abs(z) - 1.0) < 1e-9) {
      out.tag = m == 1 ? CellTag::P1 : (m == 2 ? CellTag::P2 : CellTag::HigherOrUnknown);
      out.evidence.note += "; psi^m form, m=" + std::to_string(m);
      return out;
    }
  }
  if (ctx.rho_trend.size() >= 5) {
    double slope = rho_trend_slope(ctx.rho_trend);
    out.evidence.rho_slope = slope;
    out.evidence.rho_samples = static_cast<int>(ctx.rho_trend.size());
    if (slope >= ctx.slope_tol) {
      out.tag = CellTag::P1;  // rho -> 0 with distance
      return out;
    }
    if (slope <= -ctx.slope_tol) {
      out.tag = CellTag::P2;  // rho diverges
      return out;
    }
  }
  out.tag = CellTag::HigherOrUnknown;
  return out;
}

SwitchFactorization switch_factor(const MatrixLoop& Bin, int m,
                                  const FactorizeOptions& opt) {
  if (m != 1 && m != 2) throw Error(ErrorCode::SchemaError, "switch_factor needs m in {1,2}");
  if (Bin.trimmed(1e-13).lo() < 0) {
    throw Error(ErrorCode::NotPlusLoop, "switch_factor input has negative powers");
  }
  if (!is_twisted(Bin, 1e-9)) {
    throw Error(ErrorCode::NotPlusLoop, "switch_factor input is not twisted");
  }
  if (unimodular_deviation(Bin, opt.circle_samples) > opt.unimodular_tol) {
    throw Error(ErrorCode::NonUnimodular, "switch_factor input must have det 1");
  }

  // m = 2 reduces to m = 1 through Ad_{sigma1}.
  MatrixLoop B = (m == 2) ? loop_ad_sigma1(Bin) : Bin;

  cplx a0 = B.coeff(0)(0, 0);
  cplx b1 = B.coeff(1)(0, 1);
  cplx g = (b1 - a0) * a0;
  double t = std::abs(g);

  SwitchFactorization out;
  MatrixLoop X;
  if (std::abs(t - 1.0) <= opt.boundary_tol) {
    out.kind = SwitchCase::Boundary;
    out.theta = -std::arg(g);
    Mat2 low = Mat2::Identity();
    X = MatrixLoop(-1, 0);
    X[0] = low;
    X[-1](1, 0) = std::exp(cplx(0, out.theta));
    out.u = 1.0 / std::sqrt(2.0);
    out.v = -std::exp(cplx(0, -out.theta)) / std::sqrt(2.0);
  } else {
    double eps = t > 1.0 ? 1.0 : -1.0;
    out.kind = t > 1.0 ? SwitchCase::K1 : SwitchCase::K2;
    // u / conj(v) = eps*g and eps(|u|^2 - |v|^2) = 1, phase of v fixed real
    double v2 = 1.0 / (eps * (t * t - 1.0));
    double vabs = std::sqrt(v2);
    out.v = vabs;
    out.u = eps * g * vabs;
    X = MatrixLoop(-1, 1);
    X[0](0, 0) = out.u;
    X[0](1, 1) = eps * std::conj(out.u);
    X[1](0, 1) = out.v;
    X[-1](1, 0) = eps * std::conj(out.v);
  }
  MatrixLoop rhs = mul(B, inverse_unimodular(omega_loop(1), opt.unimodular_tol));
  MatrixLoop Bhat = mul(loop_adjugate(X), rhs);
  double neg = 0;
  for (int j = Bhat.lo(); j <= -1; ++j) neg += Bhat[j].squaredNorm();
  neg = std::sqrt(neg) / std::max(Bhat.norm(), 1e-300);
  if (neg > 1e-7) {
    throw Error(ErrorCode::ResidualTooLarge,
                "switch factor plus part residual " + std::to_string(neg));
  }
  out.Bhat = project_band(Bhat, 0, std::max(0, Bhat.hi())).trimmed(1e-15);
  out.X = X;
  if (m == 2) {
    out.X = loop_ad_sigma1(out.X);
    out.Bhat = loop_ad_sigma1(out.Bhat);
  }
  return out;
}

MatrixLoop omega_loop(int m) { return psi_loop(m, 1.0); }

MatrixLoop psi_loop(int m, cplx z) {
  if (m < 1) throw Error(ErrorCode::SchemaError, "psi_loop needs m >= 1");
  MatrixLoop L = MatrixLoop::identity();
  if (m % 2 == 1) {
    Mat2 e;
    e << 0, 0, z, 0;
    return L + MatrixLoop::monomial(-m, e);
  }
  Mat2 e;
  e << 0, z, 0, 0;
  return L + MatrixLoop::monomial(1 - m, e);
}

}  // namespace minkcmc

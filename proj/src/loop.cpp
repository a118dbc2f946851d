#include "minkcmc/loop.hpp"

#include <algorithm>
#include <cmath>

namespace minkcmc {

Mat2 MatrixLoop::eval(cplx lambda) const {
  // Horner in lambda for the nonnegative part, in 1/lambda for the rest.
  Mat2 pos = Mat2::Zero();
  for (int j = hi(); j >= std::max(0, lo()); --j) {
    pos = lambda * pos + (*this)[j];
  }
  if (lo() >= 0) {
    // account for a band starting above zero: pos currently equals
    // sum c_j lambda^{j - max(0,lo)} ... handled below only when lo()>0
    if (lo() > 0) {
      Mat2 shifted = Mat2::Zero();
      for (int j = hi(); j >= lo(); --j) shifted = lambda * shifted + (*this)[j];
      return shifted * std::pow(lambda, lo());
    }
    return pos;
  }
  Mat2 neg = Mat2::Zero();
  cplx mu = 1.0 / lambda;
  for (int j = lo(); j <= -1; ++j) {
    neg = mu * neg + (*this)[j];
  }
  return pos + mu * neg;
}

double MatrixLoop::norm() const {
  double s = 0;
  for (const auto& m : c_) s += m.squaredNorm();
  return std::sqrt(s);
}

MatrixLoop MatrixLoop::trimmed(double rel_eps) const {
  double thresh = rel_eps * norm();
  int a = lo(), b = hi();
  while (a < 0 && a < b && (*this)[a].norm() <= thresh) ++a;
  while (b > 0 && b > a && (*this)[b].norm() <= thresh) --b;
  a = std::min(a, 0);
  b = std::max(b, 0);
  return project_band(*this, a, b);
}

MatrixLoop operator+(const MatrixLoop& a, const MatrixLoop& b) {
  MatrixLoop r(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
  for (int j = r.lo(); j <= r.hi(); ++j) r[j] = a.coeff(j) + b.coeff(j);
  return r;
}

MatrixLoop operator-(const MatrixLoop& a, const MatrixLoop& b) {
  MatrixLoop r(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
  for (int j = r.lo(); j <= r.hi(); ++j) r[j] = a.coeff(j) - b.coeff(j);
  return r;
}

MatrixLoop operator*(cplx s, const MatrixLoop& a) {
  MatrixLoop r(a.lo(), a.hi());
  for (int j = a.lo(); j <= a.hi(); ++j) r[j] = s * a[j];
  return r;
}

MatrixLoop mul(const MatrixLoop& a, const MatrixLoop& b) {
  MatrixLoop r(a.lo() + b.lo(), a.hi() + b.hi());
  for (int ja = a.lo(); ja <= a.hi(); ++ja) {
    if (a[ja].isZero(0.0)) continue;
    for (int jb = b.lo(); jb <= b.hi(); ++jb) {
      r[ja + jb] += a[ja] * b[jb];
    }
  }
  return r;
}

MatrixLoop mul(const MatrixLoop& a, const MatrixLoop& b, const BandPolicy& policy,
               double* dropped) {
  MatrixLoop full = mul(a, b);
  if (full.lo() >= -policy.max_band && full.hi() <= policy.max_band) return full;
  double cut = 0;
  for (int j = full.lo(); j <= full.hi(); ++j) {
    if (j < -policy.max_band || j > policy.max_band) cut += full[j].squaredNorm();
  }
  double total = full.norm();
  if (dropped && total > 0) *dropped += std::sqrt(cut) / total;
  return project_band(full, std::max(full.lo(), -policy.max_band),
                      std::min(full.hi(), policy.max_band));
}

MatrixLoop loop_adjugate(const MatrixLoop& a) {
  MatrixLoop r(a.lo(), a.hi());
  for (int j = a.lo(); j <= a.hi(); ++j) r[j] = adjugate(a[j]);
  return r;
}

MatrixLoop inverse_unimodular(const MatrixLoop& a, double tol) {
  double dev = unimodular_deviation(a);
  if (dev > tol) {
    throw Error(ErrorCode::NonUnimodular,
                "loop determinant deviates from 1 by " + std::to_string(dev));
  }
  return loop_adjugate(a);
}

MatrixLoop project_band(const MatrixLoop& a, int p, int q) {
  if (p > q) return MatrixLoop();
  MatrixLoop r(p, q);
  for (int j = p; j <= q; ++j) r[j] = a.coeff(j);
  return r;
}

double unimodular_deviation(const MatrixLoop& a, int samples) {
  double worst = 0;
  for (int s = 0; s < samples; ++s) {
    cplx lambda = unit_circle(2.0 * M_PI * s / samples + 0.37);
    Mat2 m = a.eval(lambda);
    worst = std::max(worst, std::abs(m.determinant() - cplx(1, 0)));
  }
  return worst;
}

MatrixLoop tau_involution(const MatrixLoop& a, double tol) {
  double dev = unimodular_deviation(a);
  if (dev > tol) {
    throw Error(ErrorCode::NonUnimodular,
                "tau needs det == 1, deviation " + std::to_string(dev));
  }
  // (tau L)_j = sigma3 adj(conj(L_{-j})^T) sigma3
  const Mat2 s3 = sigma3();
  MatrixLoop r(-a.hi(), -a.lo());
  for (int j = r.lo(); j <= r.hi(); ++j) {
    r[j] = s3 * adjugate(a.coeff(-j).conjugate().transpose()) * s3;
  }
  return r;
}

MatrixLoop rho_involution(const MatrixLoop& a) {
  const Mat2 s3 = sigma3();
  MatrixLoop r(-a.hi(), -a.lo());
  for (int j = r.lo(); j <= r.hi(); ++j) {
    r[j] = s3 * a.coeff(-j).conjugate().transpose() * s3;
  }
  return r;
}

bool is_twisted(const MatrixLoop& a, double rel_tol) {
  double bad = 0;
  for (int j = a.lo(); j <= a.hi(); ++j) {
    const Mat2& m = a[j];
    if (j % 2 == 0) {
      bad = std::max({bad, std::abs(m(0, 1)), std::abs(m(1, 0))});
    } else {
      bad = std::max({bad, std::abs(m(0, 0)), std::abs(m(1, 1))});
    }
  }
  double n = a.norm();
  return bad <= rel_tol * (n > 0 ? n : 1.0);
}

MatrixLoop twist_map(const MatrixLoop& a) {
  MatrixLoop r(2 * a.lo() - 1, 2 * a.hi() + 1);
  for (int j = a.lo(); j <= a.hi(); ++j) {
    const Mat2& m = a[j];
    r[2 * j](0, 0) += m(0, 0);
    r[2 * j](1, 1) += m(1, 1);
    r[2 * j + 1](0, 1) += m(0, 1);
    r[2 * j - 1](1, 0) += m(1, 0);
  }
  return r.trimmed();
}

MatrixLoop untwist_map(const MatrixLoop& a, double rel_tol) {
  if (!is_twisted(a, rel_tol)) {
    throw Error(ErrorCode::NotTwisted, "untwist requires a twisted loop");
  }
  // even powers 2j of the diagonal go to power j; off-diagonal powers
  // 2j+1 (top) and 2j-1 (bottom) go to power j.
  int lo = a.lo() % 2 == 0 ? a.lo() / 2 : (a.lo() - 1) / 2;
  int hi = a.hi() % 2 == 0 ? a.hi() / 2 : (a.hi() + 1) / 2;
  MatrixLoop r(lo, hi);
  for (int j = a.lo(); j <= a.hi(); ++j) {
    const Mat2& m = a[j];
    if (j % 2 == 0) {
      r[j / 2](0, 0) += m(0, 0);
      r[j / 2](1, 1) += m(1, 1);
    } else {
      int ju = (j - 1) / 2;  // power of b(l^2) with l b -> power 2ju+1
      r[ju](0, 1) += m(0, 1);
      int jl = (j + 1) / 2;
      r[jl](1, 0) += m(1, 0);
    }
  }
  return r.trimmed();
}

MatrixLoop lambda_derivative(const MatrixLoop& a) {
  MatrixLoop r(a.lo(), a.hi());
  for (int j = a.lo(); j <= a.hi(); ++j) r[j] = double(j) * a[j];
  return r;
}

MatrixLoop loop_ad_sigma1(const MatrixLoop& a) {
  MatrixLoop r(a.lo(), a.hi());
  for (int j = a.lo(); j <= a.hi(); ++j) r[j] = ad_sigma1(a[j]);
  return r;
}

double loop_distance(const MatrixLoop& a, const MatrixLoop& b) { return (a - b).norm(); }

}  // namespace minkcmc

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace minkcmc {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

inline Mat2 sigma1() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}
inline Mat2 sigma2() {
  Mat2 m;
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
inline Mat2 sigma3() {
  Mat2 m;
  m << 1, 0, 0, -1;
  return m;
}

// adjugate of a 2x2 matrix; equals the inverse when det = 1
inline Mat2 adjugate(const Mat2& m) {
  Mat2 a;
  a << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return a;
}

inline Mat2 ad_sigma1(const Mat2& m) {
  Mat2 a;
  a << m(1, 1), m(1, 0), m(0, 1), m(0, 0);
  return a;
}

// exp of a trace-free 2x2: cosh(mu) I + sinhc(mu) M with mu^2 = -det M
inline Mat2 exp_tracefree(const Mat2& m) {
  cplx mu2 = -(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
  cplx ch, shc;
  if (std::abs(mu2) < 1e-8) {
    ch = 1.0 + mu2 / 2.0 + mu2 * mu2 / 24.0 + mu2 * mu2 * mu2 / 720.0;
    shc = 1.0 + mu2 / 6.0 + mu2 * mu2 / 120.0 + mu2 * mu2 * mu2 / 5040.0;
  } else {
    cplx mu = std::sqrt(mu2);
    ch = std::cosh(mu);
    shc = std::sinh(mu) / mu;
  }
  return ch * Mat2::Identity() + shc * m;
}

inline cplx unit_circle(double theta) { return std::polar(1.0, theta); }

}  // namespace minkcmc

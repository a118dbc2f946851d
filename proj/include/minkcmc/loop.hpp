#pragma once

#include <vector>

#include "minkcmc/errors.hpp"
#include "minkcmc/types.hpp"

namespace minkcmc {

// Truncation policy for loop products. Coefficients beyond max_band are
// dropped; the dropped relative mass is reported so callers can escalate
// when it exceeds tail_tol.
struct BandPolicy {
  int max_band = 64;
  double tail_tol = 1e-9;
};

/// 2x2 complex matrix Laurent polynomial on a finite power band [lo, hi].
/// Immutable by convention once built; all operations return new values.
class MatrixLoop {
 public:
  MatrixLoop() : lo_(0), c_(1, Mat2::Zero()) {}
  MatrixLoop(int lo, int hi) : lo_(lo), c_(static_cast<size_t>(hi - lo + 1), Mat2::Zero()) {}

  static MatrixLoop identity() { return constant(Mat2::Identity()); }
  static MatrixLoop constant(const Mat2& m) {
    MatrixLoop L(0, 0);
    L.c_[0] = m;
    return L;
  }
  static MatrixLoop monomial(int power, const Mat2& m) {
    MatrixLoop L(power, power);
    L.c_[0] = m;
    return L;
  }

  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(c_.size()) - 1; }
  bool in_band(int j) const { return j >= lo() && j <= hi(); }

  const Mat2& operator[](int j) const { return c_[static_cast<size_t>(j - lo_)]; }
  Mat2& operator[](int j) { return c_[static_cast<size_t>(j - lo_)]; }
  Mat2 coeff(int j) const { return in_band(j) ? (*this)[j] : Mat2::Zero(); }

  Mat2 eval(cplx lambda) const;

  // Frobenius norm over all coefficients.
  double norm() const;

  // Drop zero-ish coefficients at the band edges (absolute threshold
  // eps * norm()); keeps at least the power-0 slot.
  MatrixLoop trimmed(double rel_eps = 0.0) const;

 private:
  int lo_;
  std::vector<Mat2> c_;
};

MatrixLoop operator+(const MatrixLoop& a, const MatrixLoop& b);
MatrixLoop operator-(const MatrixLoop& a, const MatrixLoop& b);
MatrixLoop operator*(cplx s, const MatrixLoop& a);

// Coefficient-band convolution (exact).
MatrixLoop mul(const MatrixLoop& a, const MatrixLoop& b);
// Convolution followed by truncation to [-max_band, max_band]; the relative
// Frobenius mass of dropped coefficients is added to *dropped when given.
MatrixLoop mul(const MatrixLoop& a, const MatrixLoop& b, const BandPolicy& policy,
               double* dropped = nullptr);

// Pointwise adjugate, taken coefficientwise (adj is linear in the entries).
MatrixLoop loop_adjugate(const MatrixLoop& a);

// Inverse for det == 1 loops (the adjugate). Throws NonUnimodular if the
// sampled determinant deviates from 1 by more than tol.
MatrixLoop inverse_unimodular(const MatrixLoop& a, double tol = 1e-8);

// P_{p,q}: keep exactly the coefficients with p <= j <= q.
MatrixLoop project_band(const MatrixLoop& a, int p, int q);

// max over unit-circle samples of |det L(lambda) - 1|
double unimodular_deviation(const MatrixLoop& a, int samples = 20);

// tau(L)(lambda) = sigma3 (conj(L(1/conj(lambda)))^T)^{-1} sigma3, computed on
// coefficients. Requires det == 1 (uses the adjugate as inverse).
MatrixLoop tau_involution(const MatrixLoop& a, double tol = 1e-8);

// rho(L)(lambda) = sigma3 conj(L(1/conj(lambda)))^T sigma3 (anti-involution).
MatrixLoop rho_involution(const MatrixLoop& a);

// Twisting test: Ad_{sigma3} L(-lambda) == L, i.e. diagonal entries carry only
// even powers and off-diagonal entries only odd powers.
bool is_twisted(const MatrixLoop& a, double rel_tol = 1e-12);

// The isomorphism from the untwisted to the twisted loop group:
// a(l) -> a(l^2) on the diagonal, b(l) -> l b(l^2), c(l) -> l^{-1} c(l^2).
MatrixLoop twist_map(const MatrixLoop& a);
// Its inverse; throws NotTwisted on untwisted input.
MatrixLoop untwist_map(const MatrixLoop& a, double rel_tol = 1e-9);

// lambda d/dlambda on coefficients: coefficient j becomes j * coeff(j).
MatrixLoop lambda_derivative(const MatrixLoop& a);

// Ad_{sigma1} applied coefficientwise.
MatrixLoop loop_ad_sigma1(const MatrixLoop& a);

double loop_distance(const MatrixLoop& a, const MatrixLoop& b);

}  // namespace minkcmc

#include "ssolab/pade.hpp"

#include <stdexcept>

namespace ssolab {

Complex PadeBlock::eval(Complex s) const {
  if (order == 0) return Complex(1.0, 0.0);
  // strictly proper part has coefficients c, denominator s^r + sum q_k s^k
  // with q_k read off the companion bottom row
  int r = order;
  Complex num(0.0, 0.0), den(0.0, 0.0), sk(1.0, 0.0);
  for (int k = 0; k < r; ++k) {
    num += c(k) * sk;
    den += (-a(r - 1, k)) * sk;
    sk *= s;
  }
  den += sk;
  return num / den + d;
}

PadeBlock pade_delay(Real tau, int order) {
  if (order < 0 || order > 12) throw std::invalid_argument("pade order out of range");
  if (tau < 0.0) throw std::invalid_argument("pade delay must be nonnegative");
  PadeBlock blk;
  blk.tau = tau;
  if (tau == 0.0 || order == 0) {
    blk.order = 0;
    blk.d = 1.0;
    return blk;
  }
  int r = order;
  blk.order = r;

  // diagonal approximant coefficients c_k = r!(2r-k)! / ((2r)! k! (r-k)!)
  VecX coef(r + 1);
  for (int k = 0; k <= r; ++k) {
    Real v = 1.0;
    for (int j = 1; j <= k; ++j) v *= Real(r - j + 1) / (Real(2 * r - j + 1) * Real(j));
    coef(k) = v;
  }

  // monic normalization by c_r tau^r; numerator picks up (-1)^k signs
  Real scale = coef(r) * std::pow(tau, r);
  blk.d = (r % 2 == 0) ? 1.0 : -1.0;
  blk.a = MatX::Zero(r, r);
  blk.b = VecX::Zero(r);
  blk.c = Eigen::RowVectorXd::Zero(r);
  for (int k = 0; k + 1 < r; ++k) blk.a(k, k + 1) = 1.0;
  blk.b(r - 1) = 1.0;
  for (int k = 0; k < r; ++k) {
    Real qk = coef(k) * std::pow(tau, k) / scale;
    Real nk = coef(k) * std::pow(-tau, k) / scale;
    blk.a(r - 1, k) = -qk;
    blk.c(k) = nk - blk.d * qk;
  }
  return blk;
}

}  // namespace ssolab

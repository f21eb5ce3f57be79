#pragma once
// All-pass Pade rationalization of the pure delay e^{-s tau}, used when
// linearizing models with delay taps.

#include "ssolab/types.hpp"

namespace ssolab {

struct PadeBlock {
  MatX a;  // r x r, empty when tau = 0
  VecX b;  // r
  Eigen::RowVectorXd c;  // r
  Real d = 1.0;
  Real tau = 0.0;
  int order = 0;

  Complex eval(Complex s) const;  // transfer function value
};

/// Diagonal (r, r) Pade approximant of e^{-s tau} in controllable canonical
/// form. tau = 0 degenerates to the identity (no states, d = 1).
PadeBlock pade_delay(Real tau, int order);

}  // namespace ssolab

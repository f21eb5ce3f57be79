#pragma once
// Largest-singular-value frequency response of a LinearModel.

#include "ssolab/linearize.hpp"

namespace ssolab {

struct FreqResponse {
  VecX f_hz;
  VecX sigma_max;  // absolute gain; +inf marks a singular solve (undamped pole)
};

/// sigma_max of G(j 2 pi f) = C (j 2 pi f I - A)^{-1} B + D over an
/// ascending grid of nonnegative frequencies. Grid points are independent;
/// jobs > 1 fans them out across threads.
FreqResponse sigma_max_response(const LinearModel& lm, const VecX& f_grid, int jobs = 1);

}  // namespace ssolab

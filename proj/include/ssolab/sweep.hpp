#pragma once
// Delay sweep: re-initialize and re-linearize the system per droop-loop
// delay value and track the subsynchronous modes across the sweep.

#include <optional>
#include <vector>

#include "ssolab/modes.hpp"

namespace ssolab {

struct SweepRow {
  Real tau = 0.0;  // seconds
  int mode_id = 0;
  Real f_hz = 0.0;
  Real zeta = 0.0;
  Real sigma = 0.0;    // 1/s
  bool jumped = false; // > 5 Hz move between adjacent delays
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ordered by (tau, mode_id)
  int n_tracked = 0;
};

/// Every converter's measurement delay is set to each tau in turn; the
/// model is re-assembled, re-linearized and its modes inside [f_lo, f_hi]
/// at the first tau are continued across the list by nearest neighbor in
/// (f, zeta) with 1 Hz equivalent to 1 percentage point. Delay points are
/// independent and fan out over `jobs` threads; tracking is sequential.
SweepResult delay_sweep(const SystemSpec& spec, const std::vector<Real>& taus,
                        int pade_order = 2, Real f_lo = 5.0, Real f_hi = 55.0,
                        std::optional<Framework> fw = std::nullopt, int jobs = 1);

}  // namespace ssolab

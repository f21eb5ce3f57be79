#pragma once
// Ringdown modal identification: least-squares Prony and a matrix-pencil
// cross-check, turning a uniformly sampled channel into damped-sinusoid
// (f, sigma, zeta, amplitude, phase) estimates.

#include <stdexcept>
#include <vector>

#include "ssolab/types.hpp"

namespace ssolab {

struct IdentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PronyMode {
  Real f_hz = 0.0;
  Real sigma = 0.0;      // 1/s, real part of the continuous-time pole
  Real zeta = 0.0;       // -sigma / sqrt(sigma^2 + (2 pi f)^2)
  Real amplitude = 0.0;  // peak amplitude (conjugate pairs folded)
  Real phase = 0.0;      // rad at the window start
};

struct PronyEstimate {
  std::vector<PronyMode> modes;  // amplitude descending
  Real residual = 0.0;           // relative RMS of the reconstruction error
  int order = 0;
  Real t0 = 0.0;
  Real t1 = 0.0;
};

/// Least-squares linear-prediction Prony on the window [t0, t1] of a
/// uniformly sampled signal: demean, fit LP coefficients with SVD rank
/// truncation, root the characteristic polynomial, map z to s = ln(z)/dt and
/// solve amplitudes/phases by complex least squares. Returns modes with
/// f in [0, Nyquist).
PronyEstimate prony_fit(const VecX& t, const VecX& y, Real t0, Real t1, int order = 8);

/// Matrix-pencil estimator on the same window, as an independent cross-check.
PronyEstimate matrix_pencil(const VecX& t, const VecX& y, Real t0, Real t1,
                            int order = 8);

/// Largest-amplitude oscillatory mode with f inside [f_lo, f_hi].
PronyMode dominant_mode(const PronyEstimate& est, Real f_lo = 5.0, Real f_hi = 55.0);

}  // namespace ssolab

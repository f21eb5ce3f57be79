#pragma once
// Reference-frame math shared by every model: Park transform, space
// phasors, frame rotation and per-unit bases.
//
// Scaling convention is peak-invariant (2/3): a balanced three-phase set
// with 1 pu peak maps to a space phasor of magnitude 1.

#include "ssolab/types.hpp"

namespace ssolab {

/// d-q pair interpreted as x = d + jq in some rotating frame.
struct SpacePhasor {
  Real d = 0.0;
  Real q = 0.0;

  Complex c() const { return {d, q}; }
  Real mag() const { return std::hypot(d, q); }
  static SpacePhasor from(Complex z) { return {z.real(), z.imag()}; }
};

/// Frame angle with its speed; rho is stored unwrapped so d(rho)/dt = omega
/// stays integrable.
struct FrameAngle {
  Real rho = 0.0;    // rad
  Real omega = 0.0;  // rad/s
};

struct PerUnitBase {
  Real s_base;  // MVA
  Real v_base;  // kV, line-line RMS
  Real f_base;  // Hz

  Real z_base() const { return v_base * v_base / s_base; }
  Real omega_base() const { return 2.0 * kPi * f_base; }
};

/// Peak-invariant Park matrix. Rows are d, q, zero-sequence; satisfies
/// P * P^T = diag(2/3, 2/3, 1/3).
template <class T>
Eigen::Matrix<T, 3, 3> park_matrix(T rho) {
  const T k = T(2) / T(3);
  const T third = T(2) * T(kPi) / T(3);
  Eigen::Matrix<T, 3, 3> p;
  p << k * std::cos(rho), k * std::cos(rho - third), k * std::cos(rho + third),
      -k * std::sin(rho), -k * std::sin(rho - third), -k * std::sin(rho + third),
      k / T(2), k / T(2), k / T(2);
  return p;
}

/// Exact inverse of park_matrix (any input, zero sequence included).
template <class T>
Eigen::Matrix<T, 3, 3> inverse_park_matrix(T rho) {
  const T third = T(2) * T(kPi) / T(3);
  Eigen::Matrix<T, 3, 3> p;
  p << std::cos(rho), -std::sin(rho), T(1),
      std::cos(rho - third), -std::sin(rho - third), T(1),
      std::cos(rho + third), -std::sin(rho + third), T(1);
  return p;
}

/// First two rows of P(rho) * abc.
inline SpacePhasor to_space_phasor(const Vec3& abc, Real rho) {
  const Vec3 dq0 = park_matrix(rho) * abc;
  return {dq0[0], dq0[1]};
}

/// Instantaneous abc for a zero-sequence-free phasor.
inline Vec3 from_space_phasor(const SpacePhasor& p, Real rho) {
  return inverse_park_matrix(rho) * Vec3(p.d, p.q, 0.0);
}

/// p * e^{-j dtheta}; moves a phasor into a frame rotated ahead by dtheta.
inline SpacePhasor frame_rotate(const SpacePhasor& p, Real dtheta) {
  return SpacePhasor::from(p.c() * cis(-dtheta));
}

inline Complex frame_rotate(Complex z, Real dtheta) { return z * cis(-dtheta); }

}  // namespace ssolab

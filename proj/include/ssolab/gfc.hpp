#pragma once
// Droop grid-forming converter: LC filter + transformer branch, dc link fed
// by a constant-power functional source, power-frequency droop with a delay
// on the filtered power feedback, and cascaded outer-magnitude / inner
// voltage / inner current PI loops. Identical in both frameworks.

#include <string>
#include <vector>

#include "ssolab/system_spec.hpp"

namespace ssolab::gfc {

enum : int {
  IFD,    // filter inductor current d (converter frame, machine base)
  IFQ,
  VCD,    // filter capacitor voltage d
  VCQ,
  ITD,    // transformer (grid-side) current d
  ITQ,
  VDC,    // dc-link voltage
  DELTA,  // converter frame angle relative to the synchronous frame
  PF,     // low-pass-filtered output power (the delayed tap)
  XIO,    // outer voltage-magnitude integrator
  XIVD,   // inner voltage-loop integrators
  XIVQ,
  XICD,   // inner current-loop integrators
  XICQ,
  NSTATES
};

struct Setpoints {
  Real p_star = 0.0;
  Real v_star = 1.0;
  Real p_src = 0.0;  // dc-side source power
};

struct Init {
  Eigen::Matrix<Real, NSTATES, 1> x;
  Setpoints sp;
};

/// Back-solve equilibrium from the terminal condition (machine base,
/// network frame); every integrator input lands at zero.
Init initialize(const GfcParams& p, Complex v_bus, Complex i_inj, const std::string& who);

/// Writes the 14 derivatives and returns the current injected into the grid
/// (machine base, network frame). p_delayed is the droop tap at t - tau_p;
/// du modulates p_star.
Complex residual(const GfcParams& p, const Setpoints& sp, Real omega_b,
                 Eigen::Ref<const VecX> x, Complex v_bus, Real p_delayed, Real du,
                 Eigen::Ref<VecX> dx);

std::vector<std::string> state_names();

}  // namespace ssolab::gfc

#pragma once
// Subtransient synchronous machine (two damper circuits), static exciter
// and droop governor. The SPC variant keeps the stator flux pair as states;
// the QPC variant replaces the stator differential equations with the
// algebraic phasor stator behind (r_a + j x'').

#include <string>
#include <vector>

#include "ssolab/system_spec.hpp"

namespace ssolab::sg {

enum : int {
  DELTA,  // rotor angle vs synchronous frame
  DW,     // speed deviation, pu
  EQP,    // E'_q
  PSI1D,  // d-axis damper flux
  EDP,    // E'_d
  PSI2Q,  // q-axis damper flux
  EFD,    // exciter output
  PM,     // governor mechanical power
  PSID,   // stator flux d (SPC only)
  PSIQ,
};

inline int n_states(Framework fw) { return fw == Framework::SPC ? 10 : 8; }

struct Setpoints {
  Real v_ref = 1.0;
  Real p_ref = 0.0;
};

struct Init {
  VecX x;
  Setpoints sp;
};

Init initialize(const SgParams& p, Framework fw, Complex v_bus, Complex i_inj,
                const std::string& who);

/// SPC: stator fluxes are states; returns the injected stator current
/// (machine base, network frame).
Complex residual_spc(const SgParams& p, const Setpoints& sp, Real omega_b,
                     Eigen::Ref<const VecX> x, Complex v_bus, Real du, Eigen::Ref<VecX> dx);

/// QPC: terminal voltage comes from the algebraic network solve.
void residual_qpc(const SgParams& p, const Setpoints& sp, Real omega_b,
                  Eigen::Ref<const VecX> x, Complex v_bus, Real du, Eigen::Ref<VecX> dx);

/// Norton pieces for the QPC Y-bus (machine base).
Complex norton_admittance(const SgParams& p);
Complex norton_current(const SgParams& p, Eigen::Ref<const VecX> x);

std::vector<std::string> state_names(Framework fw);

}  // namespace ssolab::sg

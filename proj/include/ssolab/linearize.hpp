#pragma once
// Small-signal extraction: central-difference Jacobians about a checked
// equilibrium, with each delay tap closed through a Pade block so the
// result is a plain LTI quadruple (A, B, C, D).

#include <string>
#include <vector>

#include "ssolab/assemble.hpp"
#include "ssolab/pade.hpp"

namespace ssolab {

struct LinearModel {
  MatX a, b, c, d;
  std::vector<StateInfo> states;  // plant states then appended pade states
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;
  std::vector<DelayTap> taps;
  VecX x0, u0;       // plant-state operating point (pade states sit at zero)
  int n_plant = 0;   // states before pade augmentation
  int pade_order = 0;

  int n() const { return static_cast<int>(a.rows()); }
  int state_index(const std::string& name) const;
};

/// Model requirements: n_states/n_inputs/n_outputs/n_taps, state_map,
/// delay_taps, input_names, output_names, eval(x, u, delayed),
/// tap_values(x), outputs(x). AssembledModel satisfies all of them.
///
/// The residual at (x0, u0) must already be below 1e-6; linearizing a
/// non-equilibrium point is rejected rather than silently producing an
/// affine model.
template <class Model>
LinearModel linearize(const Model& m, const OperatingPoint& op, int pade_order) {
  const int n = m.n_states();
  const int nu = m.n_inputs();
  const int ny = m.n_outputs();
  const int nt = m.n_taps();
  VecX x0 = op.x0, u0 = op.u0;
  if (x0.size() != n || u0.size() != nu)
    throw ModelError("operating point does not match model dimensions");
  VecX d0 = m.tap_values(x0);
  VecX f0 = m.eval(x0, u0, d0);
  if (f0.size() && f0.cwiseAbs().maxCoeff() > 1e-6)
    throw ModelError("operating point is not an equilibrium (|f| = " +
                     std::to_string(f0.cwiseAbs().maxCoeff()) + ")");

  auto step = [](Real v) { return std::max(1e-6, 1e-6 * std::abs(v)); };

  MatX ax(n, n), bu(n, nu), e(n, nt), cx(ny, n);
  for (int i = 0; i < n; ++i) {
    Real h = step(x0(i));
    VecX xp = x0, xm = x0;
    xp(i) += h;
    xm(i) -= h;
    ax.col(i) = (m.eval(xp, u0, d0) - m.eval(xm, u0, d0)) / (2 * h);
    if (ny) cx.col(i) = (m.outputs(xp) - m.outputs(xm)) / (2 * h);
  }
  for (int j = 0; j < nu; ++j) {
    Real h = step(u0(j));
    VecX up = u0, um = u0;
    up(j) += h;
    um(j) -= h;
    bu.col(j) = (m.eval(x0, up, d0) - m.eval(x0, um, d0)) / (2 * h);
  }
  for (int k = 0; k < nt; ++k) {
    Real h = step(d0(k));
    VecX dp = d0, dm = d0;
    dp(k) += h;
    dm(k) -= h;
    e.col(k) = (m.eval(x0, u0, dp) - m.eval(x0, u0, dm)) / (2 * h);
  }

  // close each tap through its pade block, appending the block states
  std::vector<DelayTap> taps = m.delay_taps();
  std::vector<PadeBlock> blks;
  int n_pade = 0;
  for (const DelayTap& tap : taps) {
    blks.push_back(pade_delay(tap.tau, pade_order));
    n_pade += blks.back().order;
  }

  LinearModel lm;
  lm.n_plant = n;
  lm.pade_order = pade_order;
  lm.taps = taps;
  lm.input_names = m.input_names();
  lm.output_names = m.output_names();
  lm.states = m.state_map();
  lm.x0 = x0;
  lm.u0 = u0;
  const int na = n + n_pade;
  lm.a = MatX::Zero(na, na);
  lm.b = MatX::Zero(na, nu);
  lm.c = MatX::Zero(ny, na);
  lm.d = MatX::Zero(ny, nu);
  lm.a.topLeftCorner(n, n) = ax;
  lm.b.topRows(n) = bu;
  if (ny) lm.c.leftCols(n) = cx;

  int off = n;
  for (int k = 0; k < nt; ++k) {
    const DelayTap& tap = taps[k];
    const PadeBlock& blk = blks[k];
    int si = tap.state_index;
    if (si < 0 || si >= n) throw ModelError("delay tap state index out of range");
    if (blk.order == 0) {
      lm.a.col(si).head(n) += e.col(k) * blk.d;  // identity feedthrough
      continue;
    }
    int r = blk.order;
    lm.a.col(si).head(n) += e.col(k) * blk.d;
    lm.a.block(0, off, n, r) = e.col(k) * blk.c;
    lm.a.block(off, si, r, 1) = blk.b;
    lm.a.block(off, off, r, r) = blk.a;
    int area = 0;
    for (const StateInfo& s : lm.states)
      if (s.machine == tap.machine) {
        area = s.area;
        break;
      }
    for (int j = 0; j < r; ++j)
      lm.states.push_back({tap.machine + ".pade" + std::to_string(j + 1), tap.machine, area});
    off += r;
  }
  return lm;
}

}  // namespace ssolab

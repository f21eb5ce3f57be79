#include "ssolab/assemble.hpp"

#include <algorithm>

namespace ssolab {

namespace {

MatXc qpc_ybus(const ExpandedGraph& g, const PowerFlowSolution& pf,
               const std::vector<AssembledModel::Machine>& machines) {
  const int n = static_cast<int>(g.nodes.size());
  MatXc y = MatXc::Zero(n, n);
  for (const auto& e : g.edges) {
    const Complex ys = 1.0 / Complex(e.r, e.x);
    y(e.from, e.from) += ys / (e.ratio * e.ratio);
    y(e.from, e.to) -= ys / e.ratio;
    y(e.to, e.from) -= ys / e.ratio;
    y(e.to, e.to) += ys;
  }
  for (int i = 0; i < n; ++i) y(i, i) += Complex(0.0, g.nodes[i].b_shunt);
  for (size_t l = 0; l < g.loads.size(); ++l) {
    if (std::abs(pf.load_z[l]) < 1e-12) continue;  // open
    y(g.loads[l].node, g.loads[l].node) += 1.0 / pf.load_z[l];
  }
  for (const auto& m : machines) {
    if (m.ms.kind != MachineKind::SG) continue;
    y(m.node, m.node) += sg::norton_admittance(m.ms.sg) * m.s_ratio;
  }
  return y;
}

}  // namespace

int AssembledModel::state_index(const std::string& name) const {
  for (size_t i = 0; i < state_map_.size(); ++i)
    if (state_map_[i].name == name) return static_cast<int>(i);
  throw ModelError("unknown state name: " + name);
}

AssembledModel assemble(const SystemSpec& spec) {
  AssembledModel m;
  m.spec_ = spec;
  m.fw_ = spec.framework;
  m.pf_ = run_power_flow(spec);
  const ExpandedGraph& g = m.pf_.graph;
  const Real wb = spec.omega_base();
  (void)wb;

  // machine blocks first, in spec order
  int off = 0;
  for (size_t k = 0; k < spec.machines.size(); ++k) {
    const MachineSpec& ms = spec.machines[k];
    AssembledModel::Machine mach;
    mach.ms = ms;
    mach.node = g.node_of_bus(ms.bus);
    mach.offset = off;
    mach.s_ratio = ms.s_rated_mva / spec.s_base_mva;
    const Complex v0 = m.pf_.v[mach.node];
    const Complex i0 = m.pf_.machine_current[k] / mach.s_ratio;  // machine base

    if (ms.kind == MachineKind::GFC) {
      mach.nx = gfc::NSTATES;
      auto init = gfc::initialize(ms.gfc, v0, i0, ms.name);
      mach.x_init = init.x;
      mach.gsp = init.sp;
      mach.tap = static_cast<int>(m.taps_.size());
      m.taps_.push_back({ms.name + ".p_f", ms.name, mach.offset + gfc::PF, ms.gfc.tau_p});
      for (const auto& s : gfc::state_names())
        m.state_map_.push_back({ms.name + "." + s, ms.name, ms.area});
    } else {
      if (m.fw_ == Framework::QPC &&
          std::abs(ms.sg.xpp_d - ms.sg.xpp_q) > 1e-9)
        throw ModelError(ms.name + ": QPC Norton stator needs equal subtransient reactances");
      mach.nx = sg::n_states(m.fw_);
      auto init = sg::initialize(ms.sg, m.fw_, v0, i0, ms.name);
      mach.x_init = init.x;
      mach.ssp = init.sp;
      for (const auto& s : sg::state_names(m.fw_))
        m.state_map_.push_back({ms.name + "." + s, ms.name, ms.area});
    }
    off += mach.nx;
    m.machines_.push_back(mach);
    m.input_names_.push_back(ms.name + ".dP");
  }

  // network states (SPC only)
  if (m.fw_ == Framework::SPC) {
    m.edge_off_.resize(g.edges.size());
    for (size_t e = 0; e < g.edges.size(); ++e) {
      m.edge_off_[e] = off;
      m.state_map_.push_back({"net." + g.edges[e].name + ".iD", "", g.nodes[g.edges[e].to].area});
      m.state_map_.push_back({"net." + g.edges[e].name + ".iQ", "", g.nodes[g.edges[e].to].area});
      off += 2;
    }
    m.node_off_.resize(g.nodes.size());
    for (size_t n = 0; n < g.nodes.size(); ++n) {
      if (!(g.nodes[n].b_shunt > 0.0))
        throw ModelError("node " + g.nodes[n].name +
                         " has zero shunt susceptance; the SPC network needs a capacitor "
                         "state at every node (set shunt_b or min_bus_shunt_b)");
      m.node_off_[n] = off;
      m.state_map_.push_back({"net." + g.nodes[n].name + ".vD", "", g.nodes[n].area});
      m.state_map_.push_back({"net." + g.nodes[n].name + ".vQ", "", g.nodes[n].area});
      off += 2;
    }
    m.load_off_.assign(g.loads.size(), -1);
    for (size_t l = 0; l < g.loads.size(); ++l) {
      if (g.loads[l].model != LoadModel::Dynamic) continue;
      if (std::abs(m.pf_.load_z[l]) < 1e-12) continue;
      if (m.pf_.load_z[l].imag() <= 0.0)
        throw ModelError("dynamic load at " + g.nodes[g.loads[l].node].name +
                         " needs inductive Q > 0 for a series RL branch");
      m.load_off_[l] = off;
      const std::string nm = "net.load." + g.nodes[g.loads[l].node].name;
      m.state_map_.push_back({nm + ".iD", "", g.nodes[g.loads[l].node].area});
      m.state_map_.push_back({nm + ".iQ", "", g.nodes[g.loads[l].node].area});
      off += 2;
    }
  } else {
    m.y_qpc_ = qpc_ybus(g, m.pf_, m.machines_);
    m.y_lu_.compute(m.y_qpc_);
    // islanding / singular Y guard
    const VecXc probe = m.y_lu_.solve(VecXc::Ones(g.nodes.size()));
    if (!probe.allFinite()) throw ModelError("QPC Y-bus is singular (islanded network?)");
  }

  // outputs: per converter v_dc and transformer current pair
  for (const auto& mach : m.machines_) {
    if (mach.ms.kind != MachineKind::GFC) continue;
    m.output_names_.push_back(mach.ms.name + ".v_dc");
    m.output_names_.push_back(mach.ms.name + ".i_t_d");
    m.output_names_.push_back(mach.ms.name + ".i_t_q");
  }

  // equilibrium state vector
  m.x0_ = VecX::Zero(off);
  for (const auto& mach : m.machines_) m.x0_.segment(mach.offset, mach.nx) = mach.x_init;
  if (m.fw_ == Framework::SPC) {
    for (size_t e = 0; e < g.edges.size(); ++e) {
      m.x0_[m.edge_off_[e]] = m.pf_.edge_current[e].real();
      m.x0_[m.edge_off_[e] + 1] = m.pf_.edge_current[e].imag();
    }
    for (size_t n = 0; n < g.nodes.size(); ++n) {
      m.x0_[m.node_off_[n]] = m.pf_.v[n].real();
      m.x0_[m.node_off_[n] + 1] = m.pf_.v[n].imag();
    }
    for (size_t l = 0; l < g.loads.size(); ++l) {
      if (m.load_off_[l] < 0) continue;
      m.x0_[m.load_off_[l]] = m.pf_.load_current[l].real();
      m.x0_[m.load_off_[l] + 1] = m.pf_.load_current[l].imag();
    }
  }
  return m;
}

VecX AssembledModel::eval(const VecX& x, const VecX& u, const VecX& delayed, Real) const {
  if (x.size() != n_states() || u.size() != n_inputs() ||
      delayed.size() != static_cast<Eigen::Index>(taps_.size()))
    throw ModelError("eval: dimension mismatch");
  const ExpandedGraph& g = pf_.graph;
  const Real wb = spec_.omega_base();
  const int nn = static_cast<int>(g.nodes.size());
  VecX dx = VecX::Zero(n_states());

  std::vector<Complex> v_node(nn);
  std::vector<Complex> inj(nn, Complex(0, 0));

  if (fw_ == Framework::QPC) {
    VecXc ivec = VecXc::Zero(nn);
    for (const auto& mach : machines_) {
      const auto xm = x.segment(mach.offset, mach.nx);
      if (mach.ms.kind == MachineKind::GFC) {
        const Complex it(xm[gfc::ITD], xm[gfc::ITQ]);
        ivec[mach.node] += mach.s_ratio * it * cis(xm[gfc::DELTA]);
      } else {
        ivec[mach.node] += mach.s_ratio * sg::norton_current(mach.ms.sg, xm);
      }
    }
    const VecXc v = y_lu_.solve(ivec);
    for (int i = 0; i < nn; ++i) v_node[i] = v[i];
  } else {
    for (int i = 0; i < nn; ++i)
      v_node[i] = Complex(x[node_off_[i]], x[node_off_[i] + 1]);
  }

  for (size_t k = 0; k < machines_.size(); ++k) {
    const auto& mach = machines_[k];
    auto xm = x.segment(mach.offset, mach.nx);
    auto dxm = dx.segment(mach.offset, mach.nx);
    const Complex v_bus = v_node[mach.node];
    if (mach.ms.kind == MachineKind::GFC) {
      const Complex im = gfc::residual(mach.ms.gfc, mach.gsp, wb, xm, v_bus,
                                       delayed[mach.tap], u[k], dxm);
      if (fw_ == Framework::SPC) inj[mach.node] += mach.s_ratio * im;
    } else if (fw_ == Framework::SPC) {
      const Complex im = sg::residual_spc(mach.ms.sg, mach.ssp, wb, xm, v_bus, u[k], dxm);
      inj[mach.node] += mach.s_ratio * im;
    } else {
      sg::residual_qpc(mach.ms.sg, mach.ssp, wb, xm, v_bus, u[k], dxm);
    }
  }

  if (fw_ == Framework::SPC) {
    const Complex jw(0.0, wb);
    for (size_t e = 0; e < g.edges.size(); ++e) {
      const auto& ed = g.edges[e];
      const Complex ie(x[edge_off_[e]], x[edge_off_[e] + 1]);
      const Complex die =
          (wb / ed.x) * (v_node[ed.from] / ed.ratio - v_node[ed.to] - ed.r * ie) - jw * ie;
      dx[edge_off_[e]] = die.real();
      dx[edge_off_[e] + 1] = die.imag();
      inj[ed.from] -= ie / ed.ratio;
      inj[ed.to] += ie;
    }
    for (size_t l = 0; l < g.loads.size(); ++l) {
      const Complex z = pf_.load_z[l];
      if (std::abs(z) < 1e-12) continue;
      const int node = g.loads[l].node;
      if (load_off_[l] >= 0) {
        const Complex il(x[load_off_[l]], x[load_off_[l] + 1]);
        const Complex dil = (wb / z.imag()) * (v_node[node] - z.real() * il) - jw * il;
        dx[load_off_[l]] = dil.real();
        dx[load_off_[l] + 1] = dil.imag();
        inj[node] -= il;
      } else {
        inj[node] -= v_node[node] / z;  // static: algebraic draw
      }
    }
    for (int n = 0; n < nn; ++n) {
      const Complex dv = (wb / g.nodes[n].b_shunt) * inj[n] - jw * v_node[n];
      dx[node_off_[n]] = dv.real();
      dx[node_off_[n] + 1] = dv.imag();
    }
  }
  return dx;
}

VecX AssembledModel::tap_values(const VecX& x) const {
  VecX t(taps_.size());
  for (size_t k = 0; k < taps_.size(); ++k) t[k] = x[taps_[k].state_index];
  return t;
}

VecX AssembledModel::outputs(const VecX& x) const {
  VecX y(n_outputs());
  int k = 0;
  for (const auto& mach : machines_) {
    if (mach.ms.kind != MachineKind::GFC) continue;
    y[k++] = x[mach.offset + gfc::VDC];
    y[k++] = x[mach.offset + gfc::ITD];
    y[k++] = x[mach.offset + gfc::ITQ];
  }
  return y;
}

OperatingPoint initialize_states(const AssembledModel& model) {
  OperatingPoint op;
  op.x0 = model.equilibrium();
  op.u0 = VecX::Zero(model.n_inputs());
  op.framework = model.framework();
  const VecX f = model.eval(op.x0, op.u0, model.tap_values(op.x0));
  op.residual_inf = f.cwiseAbs().maxCoeff();
  return op;
}

OperatingPoint initialize_states(const SystemSpec& spec, const PowerFlowSolution& pf,
                                 Framework fw) {
  SystemSpec s = spec;
  s.framework = fw;
  // the model re-runs the (deterministic) power flow internally; the passed
  // solution only sanity-checks that the caller solved the same case
  AssembledModel model = assemble(s);
  if (pf.v_mag.size() == model.pf().v_mag.size() &&
      (pf.v_mag - model.pf().v_mag).cwiseAbs().maxCoeff() > 1e-6)
    throw ModelError("initialize_states: power-flow solution does not match the spec");
  return initialize_states(model);
}

}  // namespace ssolab

#include "ssolab/powerflow.hpp"

#include <Eigen/LU>
#include <algorithm>

namespace ssolab {

namespace {

MatXc build_ybus(const ExpandedGraph& g) {
  const int n = static_cast<int>(g.nodes.size());
  MatXc y = MatXc::Zero(n, n);
  for (const auto& e : g.edges) {
    const Complex ys = 1.0 / Complex(e.r, e.x);
    const Real t = e.ratio;
    y(e.from, e.from) += ys / (t * t);
    y(e.from, e.to) -= ys / t;
    y(e.to, e.from) -= ys / t;
    y(e.to, e.to) += ys;
  }
  for (int i = 0; i < n; ++i) y(i, i) += Complex(0.0, g.nodes[i].b_shunt);
  return y;
}

}  // namespace

PowerFlowSolution run_power_flow(const SystemSpec& spec) {
  PowerFlowSolution sol;
  sol.graph = expand_graph(spec);
  const ExpandedGraph& g = sol.graph;
  const int n = static_cast<int>(g.nodes.size());
  const MatXc ybus = build_ybus(g);
  const MatX gmat = ybus.real();
  const MatX bmat = ybus.imag();

  // scheduled injections and node classification
  enum { PQ, PV, SLACK };
  std::vector<int> type(n, PQ);
  VecX p_spec = VecX::Zero(n), q_spec = VecX::Zero(n);
  VecX vm = VecX::Ones(n), va = VecX::Zero(n);
  for (const auto& m : spec.machines) {
    const int node = g.node_of_bus(m.bus);
    type[node] = m.slack ? SLACK : PV;
    vm[node] = m.v_setpoint_pu;
    p_spec[node] += m.p_dispatch_mw / spec.s_base_mva;
  }
  for (const auto& ld : g.loads) {
    p_spec[ld.node] -= ld.s.real();
    q_spec[ld.node] -= ld.s.imag();
  }

  std::vector<int> ang_idx, mag_idx;
  for (int i = 0; i < n; ++i) {
    if (type[i] != SLACK) ang_idx.push_back(i);
    if (type[i] == PQ) mag_idx.push_back(i);
  }
  const int na = static_cast<int>(ang_idx.size());
  const int nm = static_cast<int>(mag_idx.size());

  auto calc_pq = [&](VecX& pc, VecX& qc) {
    pc.setZero(n);
    qc.setZero(n);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        if (gmat(i, k) == 0.0 && bmat(i, k) == 0.0) continue;
        const Real th = va[i] - va[k];
        const Real c = std::cos(th), s = std::sin(th);
        pc[i] += vm[i] * vm[k] * (gmat(i, k) * c + bmat(i, k) * s);
        qc[i] += vm[i] * vm[k] * (gmat(i, k) * s - bmat(i, k) * c);
      }
    }
  };

  VecX pc(n), qc(n);
  auto mismatch_norm = [&]() {
    calc_pq(pc, qc);
    Real mx = 0.0;
    for (int i : ang_idx) mx = std::max(mx, std::abs(p_spec[i] - pc[i]));
    for (int i : mag_idx) mx = std::max(mx, std::abs(q_spec[i] - qc[i]));
    return mx;
  };

  const Real tol = spec.defaults.newton_tol;
  const int max_iter = spec.defaults.newton_max_iter;
  int it = 0;
  int polish = 2;  // extra quadratic steps once inside tolerance
  while (true) {
    const Real norm = mismatch_norm();
    sol.mismatch_inf = norm;
    if (norm <= tol) {
      if (polish-- == 0) break;
    } else if (it >= max_iter) {
      throw PowerFlowError("power flow did not converge after " + std::to_string(it) +
                           " iterations (mismatch " + std::to_string(norm) + ")");
    }
    if (norm <= 1e-14) break;

    MatX jac = MatX::Zero(na + nm, na + nm);
    VecX rhs(na + nm);
    for (int a = 0; a < na; ++a) {
      const int i = ang_idx[a];
      rhs[a] = p_spec[i] - pc[i];
      for (int b = 0; b < na; ++b) {
        const int k = ang_idx[b];
        if (i == k)
          jac(a, b) = -qc[i] - bmat(i, i) * vm[i] * vm[i];
        else {
          const Real th = va[i] - va[k];
          jac(a, b) = vm[i] * vm[k] * (gmat(i, k) * std::sin(th) - bmat(i, k) * std::cos(th));
        }
      }
      for (int b = 0; b < nm; ++b) {
        const int k = mag_idx[b];
        if (i == k)
          jac(a, na + b) = pc[i] / vm[i] + gmat(i, i) * vm[i];
        else {
          const Real th = va[i] - va[k];
          jac(a, na + b) = vm[i] * (gmat(i, k) * std::cos(th) + bmat(i, k) * std::sin(th));
        }
      }
    }
    for (int a = 0; a < nm; ++a) {
      const int i = mag_idx[a];
      rhs[na + a] = q_spec[i] - qc[i];
      for (int b = 0; b < na; ++b) {
        const int k = ang_idx[b];
        if (i == k)
          jac(na + a, b) = pc[i] - gmat(i, i) * vm[i] * vm[i];
        else {
          const Real th = va[i] - va[k];
          jac(na + a, b) = -vm[i] * vm[k] * (gmat(i, k) * std::cos(th) + bmat(i, k) * std::sin(th));
        }
      }
      for (int b = 0; b < nm; ++b) {
        const int k = mag_idx[b];
        if (i == k)
          jac(na + a, na + b) = qc[i] / vm[i] - bmat(i, i) * vm[i];
        else {
          const Real th = va[i] - va[k];
          jac(na + a, na + b) = vm[i] * (gmat(i, k) * std::sin(th) - bmat(i, k) * std::cos(th));
        }
      }
    }

    Eigen::PartialPivLU<MatX> lu(jac);
    const VecX dx = lu.solve(rhs);
    if (!dx.allFinite() || (jac * dx - rhs).cwiseAbs().maxCoeff() > 1e-6 * (1.0 + rhs.cwiseAbs().maxCoeff()))
      throw PowerFlowError("power-flow Jacobian is singular");
    for (int a = 0; a < na; ++a) va[ang_idx[a]] += dx[a];
    for (int b = 0; b < nm; ++b) vm[mag_idx[b]] += dx[na + b];
    ++it;
  }
  sol.iterations = it;
  sol.v_mag = vm;
  sol.v_ang = va;

  // exact phasor back-fill
  sol.v.resize(n);
  for (int i = 0; i < n; ++i) sol.v[i] = vm[i] * cis(va[i]);
  std::vector<Complex> node_in(n, Complex(0, 0));  // edge + load currents entering each node
  sol.edge_current.resize(g.edges.size());
  sol.edge_s_from.resize(g.edges.size());
  sol.edge_s_to.resize(g.edges.size());
  for (size_t e = 0; e < g.edges.size(); ++e) {
    const auto& ed = g.edges[e];
    const Complex i_ser = (sol.v[ed.from] / ed.ratio - sol.v[ed.to]) / Complex(ed.r, ed.x);
    sol.edge_current[e] = i_ser;
    sol.edge_s_from[e] = sol.v[ed.from] * std::conj(i_ser / ed.ratio);
    sol.edge_s_to[e] = sol.v[ed.to] * std::conj(i_ser);
    node_in[ed.from] -= i_ser / ed.ratio;
    node_in[ed.to] += i_ser;
  }
  sol.load_z.resize(g.loads.size());
  sol.load_current.resize(g.loads.size());
  for (size_t l = 0; l < g.loads.size(); ++l) {
    const auto& ld = g.loads[l];
    const Complex vld = sol.v[ld.node];
    if (std::abs(ld.s) < 1e-12) {
      sol.load_z[l] = Complex(0, 0);  // open circuit marker
      sol.load_current[l] = Complex(0, 0);
      continue;
    }
    sol.load_z[l] = std::norm(vld) / std::conj(ld.s);
    sol.load_current[l] = vld / sol.load_z[l];
    node_in[ld.node] -= sol.load_current[l];
  }
  // machine injection = whatever closes KCL at its node
  sol.machine_current.assign(spec.machines.size(), Complex(0, 0));
  sol.machine_s.assign(spec.machines.size(), Complex(0, 0));
  for (size_t m = 0; m < spec.machines.size(); ++m) {
    const int node = g.node_of_bus(spec.machines[m].bus);
    const Complex inj = Complex(0.0, g.nodes[node].b_shunt) * sol.v[node] - node_in[node];
    sol.machine_current[m] = inj;
    sol.machine_s[m] = sol.v[node] * std::conj(inj);
  }

  sol.tie_flow_pu = 0.0;
  for (const auto& [fb, tb] : spec.tie_corridor) {
    const std::string fwd = "line" + std::to_string(fb) + "-" + std::to_string(tb);
    const std::string rev = "line" + std::to_string(tb) + "-" + std::to_string(fb);
    for (size_t e = 0; e < g.edges.size(); ++e) {
      const auto& ed = g.edges[e];
      const std::string base = ed.name.substr(0, ed.name.find('.'));
      if (base == fwd && ed.from == g.node_of_bus(fb))
        sol.tie_flow_pu += sol.edge_s_from[e].real();
      else if (base == rev && ed.to == g.node_of_bus(fb))
        sol.tie_flow_pu -= sol.edge_s_to[e].real();
    }
  }
  return sol;
}

}  // namespace ssolab

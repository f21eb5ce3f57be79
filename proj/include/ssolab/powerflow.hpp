#pragma once
// Newton power flow on the expanded graph, plus the exact phasor back-fill
// (edge currents, load impedances, implied machine injections) that the
// dynamic initializers consume. Back-filled quantities satisfy the circuit
// equations to linear-solver precision, so the equilibrium residual of the
// assembled model is far tighter than the Newton power tolerance.

#include <vector>

#include "ssolab/network_graph.hpp"
#include "ssolab/system_spec.hpp"

namespace ssolab {

struct PowerFlowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PowerFlowSolution {
  ExpandedGraph graph;
  VecX v_mag;   // per node, pu
  VecX v_ang;   // per node, rad
  int iterations = 0;
  Real mismatch_inf = 0.0;

  // phasor back-fill
  std::vector<Complex> v;             // per node
  std::vector<Complex> edge_current;  // series (to-side) current per edge
  std::vector<Complex> edge_s_from;   // complex power entering at from side
  std::vector<Complex> edge_s_to;     // complex power leaving at to side
  std::vector<Complex> load_z;        // impedance pinned from the solution
  std::vector<Complex> load_current;
  std::vector<Complex> machine_current;  // injection per spec machine, system base
  std::vector<Complex> machine_s;        // implied injection v * conj(i)
  Real tie_flow_pu = 0.0;                // active power, sum over the corridor

  Complex node_v(int node) const { return v[node]; }
};

PowerFlowSolution run_power_flow(const SystemSpec& spec);

}  // namespace ssolab

#pragma once
// Composition of machine blocks and the network into one residual
// dx/dt = f(x, u, x_delayed) with a named state map, declared delay taps,
// input map (per-machine power-reference modulation) and output map
// (per-converter v_dc and transformer current pair).
//
// SPC: branch currents, bus capacitor voltages and dynamic-load currents
// are states. QPC: the network is an algebraic Y-bus solve per evaluation;
// synchronous machines enter as Norton equivalents, converters as current
// sources. Converter models are identical in both frameworks.

#include <Eigen/LU>
#include <string>
#include <vector>

#include "ssolab/gfc.hpp"
#include "ssolab/powerflow.hpp"
#include "ssolab/sg.hpp"

namespace ssolab {

struct StateInfo {
  std::string name;     // e.g. "GFC1.i_t_d" or "net.line7-8.1.iD"
  std::string machine;  // owning machine name, empty for network states
  int area = 0;
};

struct DelayTap {
  std::string name;  // "<machine>.p_f"
  std::string machine;
  int state_index = -1;  // tapped signal is a state (filtered power)
  Real tau = 0.0;        // seconds
};

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class AssembledModel {
 public:
  struct Machine {
    MachineSpec ms;
    int node = 0;    // terminal node in the expanded graph
    int offset = 0;  // first state index
    int nx = 0;
    Real s_ratio = 1.0;  // machine rating / system base
    gfc::Setpoints gsp;
    sg::Setpoints ssp;
    VecX x_init;
    int tap = -1;  // index into taps_ for converters
  };

  Framework framework() const { return fw_; }
  int n_states() const { return static_cast<int>(state_map_.size()); }
  int n_inputs() const { return static_cast<int>(input_names_.size()); }
  int n_outputs() const { return static_cast<int>(output_names_.size()); }
  int n_taps() const { return static_cast<int>(taps_.size()); }

  const std::vector<StateInfo>& state_map() const { return state_map_; }
  const std::vector<DelayTap>& delay_taps() const { return taps_; }
  const std::vector<std::string>& input_names() const { return input_names_; }
  const std::vector<std::string>& output_names() const { return output_names_; }
  const std::vector<Machine>& machines() const { return machines_; }
  const PowerFlowSolution& pf() const { return pf_; }
  const SystemSpec& spec() const { return spec_; }
  Real omega_b() const { return spec_.omega_base(); }

  int state_index(const std::string& name) const;

  /// delayed[k] is tap k evaluated at t - tau_k; pass tap_values(x) for the
  /// undelayed (or equilibrium) evaluation.
  VecX eval(const VecX& x, const VecX& u, const VecX& delayed, Real t = 0.0) const;
  VecX tap_values(const VecX& x) const;
  VecX outputs(const VecX& x) const;

  const VecX& equilibrium() const { return x0_; }

 private:
  friend AssembledModel assemble(const SystemSpec& spec);

  SystemSpec spec_;
  Framework fw_ = Framework::SPC;
  PowerFlowSolution pf_;
  std::vector<Machine> machines_;
  std::vector<StateInfo> state_map_;
  std::vector<DelayTap> taps_;
  std::vector<std::string> input_names_;
  std::vector<std::string> output_names_;
  VecX x0_;

  // SPC network layout
  std::vector<int> edge_off_;
  std::vector<int> node_off_;
  std::vector<int> load_off_;  // -1 for static (algebraic) loads

  // QPC network
  MatXc y_qpc_;
  Eigen::PartialPivLU<MatXc> y_lu_;
};

AssembledModel assemble(const SystemSpec& spec);

struct OperatingPoint {
  VecX x0;
  VecX u0;
  Framework framework = Framework::SPC;
  Real residual_inf = 0.0;
};

OperatingPoint initialize_states(const AssembledModel& model);
OperatingPoint initialize_states(const SystemSpec& spec, const PowerFlowSolution& pf,
                                 Framework fw);

}  // namespace ssolab

#pragma once
// Nonlinear time-domain simulation of an assembled model: fixed-step RK4
// (optional frozen-Jacobian trapezoidal) with true transport delays served
// by ring buffers, P*-modulation disturbances and decimated recording.

#include <string>
#include <vector>

#include "ssolab/assemble.hpp"

namespace ssolab {

enum class Waveform { Step, Pulse, Sine };

/// Modulation added to one machine's power reference (machine-base pu).
struct Disturbance {
  std::string machine;
  Waveform waveform = Waveform::Pulse;
  Real magnitude = 0.0;
  Real t_start = 0.0;
  Real t_stop = 0.0;  // exclusive; unused for Step
  Real freq_hz = 1.0; // Sine only
};

enum class Integrator { RK4, Trapezoidal };

struct Scenario {
  Real duration = 5.0;
  Real dt = 5e-5;
  int decimation = 10;
  Integrator integrator = Integrator::RK4;
  std::vector<Disturbance> disturbances;
  /// Channel names: state names plus the algebraic "<gfc>.omega_c".
  /// Empty means every state plus omega_c for every converter.
  std::vector<std::string> record;
};

/// Scenario from JSON: duration/dt/decimation/integrator ("rk4" or
/// "trapezoidal"), a disturbances array and an optional record list.
/// Value checking is left to simulate().
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

struct TimeSeries {
  VecX t;
  std::vector<std::string> names;
  MatX data;  // one row per sample, one column per channel
  bool diverged = false;

  Framework framework = Framework::SPC;
  Real f_base_hz = 60.0;
  Scenario scenario;
  struct MachineTag {
    std::string name;
    MachineKind kind = MachineKind::GFC;
    Real s_ratio = 1.0;
    Real r_t = 0.0;
  };
  std::vector<MachineTag> machines;

  int col(const std::string& name) const;  // -1 if absent
};

/// Uniform-step transport delay: push one sample per step, read the signal
/// at an earlier absolute time with 4-point Lagrange interpolation. History
/// before the first push reads as the fill value.
class DelayBuffer {
 public:
  DelayBuffer(Real tau, Real dt, Real fill);
  void push(Real v);          // sample at time (++steps) * dt
  Real at(Real t_read) const; // requires t_read <= steps * dt
  Real tau() const { return tau_; }

 private:
  Real tau_ = 0.0;
  Real dt_ = 1.0;
  long long steps_ = 0;
  std::vector<Real> ring_;
};

/// Fixed-step integration from op over scn.duration. Divergence (non-finite
/// or |state| > 1e6) truncates the series and sets the diverged flag.
TimeSeries simulate(const AssembledModel& model, const OperatingPoint& op,
                    const Scenario& scn);

enum class ChannelKind { Frequency, Power, VoltageMag };

/// Algebraic post-processing of recorded channels: per-machine frequency in
/// Hz, grid-side electrical power (system-base pu) or terminal voltage
/// magnitude. Throws SpecError when the source channels were not recorded.
VecX derive_channel(const TimeSeries& ts, ChannelKind kind, const std::string& machine);

}  // namespace ssolab

#include "ssolab/simulate.hpp"

#include <Eigen/LU>
#include <cmath>
#include <limits>

namespace ssolab {

namespace {

constexpr Real kDivergeLimit = 1e6;

// Disturbance edges snap to the nearest integration step and all on/off
// decisions run on integer half-step indices, so the realized waveform is
// identical across step refinements and the integrator keeps its order
// through the jumps. The right-endpoint stage of a step takes the limit from
// below, charging an edge to the step it starts rather than the one it ends.
struct InputMap {
  struct Lane {
    int input;
    const Disturbance* d;
    long long start2, stop2;  // edges in half-steps
  };
  std::vector<Lane> lanes;
  VecX u;
  Real dt = 0.0;

  void add(int input, const Disturbance& d) {
    lanes.push_back({input, &d, 2 * std::llround(d.t_start / dt),
                     2 * std::llround(d.t_stop / dt)});
  }

  // stage: 0 = step begin, 1 = midpoint, 2 = step end (left limit)
  const VecX& at(long long step, int stage) {
    const long long h = 2 * step + stage;
    u.setZero();
    for (const Lane& l : lanes) {
      const bool on =
          (stage == 2 ? h > l.start2 : h >= l.start2) &&
          (l.d->waveform == Waveform::Step || (stage == 2 ? h <= l.stop2 : h < l.stop2));
      if (!on) continue;
      if (l.d->waveform == Waveform::Sine)
        u[l.input] += l.d->magnitude *
                      std::sin(kPi * l.d->freq_hz * dt * static_cast<Real>(h - l.start2));
      else
        u[l.input] += l.d->magnitude;
    }
    return u;
  }
};

// A recorded channel is either a state or one converter's droop frequency.
struct Channel {
  int state = -1;
  int machine = -1;  // index into model.machines() when state < 0
};

}  // namespace

int TimeSeries::col(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

DelayBuffer::DelayBuffer(Real tau, Real dt, Real fill) : tau_(tau), dt_(dt) {
  const int cap = tau > 0.0 ? static_cast<int>(std::ceil(tau / dt)) + 3 : 1;
  ring_.assign(cap, fill);
}

void DelayBuffer::push(Real v) {
  ++steps_;
  ring_[static_cast<size_t>(steps_ % static_cast<long long>(ring_.size()))] = v;
}

Real DelayBuffer::at(Real t_read) const {
  const Real pos = t_read / dt_;
  const Real j0 = std::floor(pos);
  const Real w = pos - j0;
  const auto slot = [&](Real j) {
    long long idx = static_cast<long long>(j);
    if (idx > steps_) idx = steps_;  // guard against roundoff at the newest edge
    const long long cap = static_cast<long long>(ring_.size());
    return ring_[static_cast<size_t>(((idx % cap) + cap) % cap)];
  };
  // 4-point Lagrange: keeps the delay path from capping the integrator order
  const Real wm1 = -w * (w - 1.0) * (w - 2.0) / 6.0;
  const Real w0 = (w - 1.0) * (w + 1.0) * (w - 2.0) / 2.0;
  const Real wp1 = -w * (w + 1.0) * (w - 2.0) / 2.0;
  const Real wp2 = w * (w + 1.0) * (w - 1.0) / 6.0;
  return wm1 * slot(j0 - 1.0) + w0 * slot(j0) + wp1 * slot(j0 + 1.0) +
         wp2 * slot(j0 + 2.0);
}

namespace {

struct DelayBank {
  std::vector<DelayBuffer> buf;  // one per tap, unused slot for tau = 0
  std::vector<int> state_of;
  std::vector<Real> tau;

  DelayBank(const AssembledModel& m, const VecX& x0, Real dt) {
    const VecX fill = m.tap_values(x0);
    for (int k = 0; k < m.n_taps(); ++k) {
      const DelayTap& t = m.delay_taps()[k];
      buf.emplace_back(t.tau, dt, fill[k]);
      state_of.push_back(t.state_index);
      tau.push_back(t.tau);
    }
  }

  // delayed tap vector seen by a stage at absolute time t with stage state xs
  VecX read(const VecX& xs, Real t) const {
    VecX d(static_cast<int>(buf.size()));
    for (size_t k = 0; k < buf.size(); ++k)
      d[static_cast<int>(k)] =
          tau[k] > 0.0 ? buf[k].at(t - tau[k]) : xs[state_of[k]];
    return d;
  }

  void push(const VecX& x) {
    for (size_t k = 0; k < buf.size(); ++k) buf[k].push(x[state_of[k]]);
  }
};

std::vector<Channel> resolve_channels(const AssembledModel& model, const Scenario& scn,
                                      std::vector<std::string>* names) {
  std::vector<Channel> out;
  const auto& machines = model.machines();
  auto omega_c_machine = [&](const std::string& name) {
    for (size_t i = 0; i < machines.size(); ++i)
      if (machines[i].ms.kind == MachineKind::GFC &&
          machines[i].ms.name + ".omega_c" == name)
        return static_cast<int>(i);
    return -1;
  };
  const auto state_of = [&](const std::string& name) {
    for (size_t i = 0; i < model.state_map().size(); ++i)
      if (model.state_map()[i].name == name) return static_cast<int>(i);
    return -1;
  };
  if (scn.record.empty()) {
    for (size_t i = 0; i < model.state_map().size(); ++i) {
      names->push_back(model.state_map()[i].name);
      out.push_back({static_cast<int>(i), -1});
    }
    for (size_t i = 0; i < machines.size(); ++i)
      if (machines[i].ms.kind == MachineKind::GFC) {
        names->push_back(machines[i].ms.name + ".omega_c");
        out.push_back({-1, static_cast<int>(i)});
      }
    return out;
  }
  for (const auto& name : scn.record) {
    const int si = state_of(name);
    if (si >= 0) {
      names->push_back(name);
      out.push_back({si, -1});
      continue;
    }
    const int mi = omega_c_machine(name);
    if (mi < 0) throw SpecError("unknown record channel '" + name + "'");
    names->push_back(name);
    out.push_back({-1, mi});
  }
  return out;
}

void validate(const AssembledModel& model, const OperatingPoint& op, const Scenario& scn) {
  if (!(scn.duration > 0.0)) throw SpecError("scenario duration must be positive");
  if (!(scn.dt > 0.0)) throw SpecError("scenario step must be positive");
  if (scn.decimation < 1) throw SpecError("scenario decimation must be >= 1");
  if (op.x0.size() != model.n_states())
    throw ModelError("operating point does not match the model state count");
  for (const DelayTap& t : model.delay_taps())
    if (t.tau > 0.0 && scn.dt > t.tau / 4.0)
      throw SpecError("step " + std::to_string(scn.dt) + " s cannot resolve the " +
                      std::to_string(t.tau) + " s delay on " + t.name +
                      " (need step <= tau/4)");
  for (const Disturbance& d : scn.disturbances) {
    bool found = false;
    for (const auto& m : model.machines()) found = found || m.ms.name == d.machine;
    if (!found) throw SpecError("disturbance targets unknown machine '" + d.machine + "'");
    if (d.t_start < 0.0 || d.t_start > scn.duration ||
        (d.waveform != Waveform::Step &&
         (d.t_stop < d.t_start || d.t_stop > scn.duration)))
      throw SpecError("disturbance on " + d.machine + " lies outside [0, duration]");
    if (d.waveform == Waveform::Sine && !(d.freq_hz > 0.0))
      throw SpecError("sine disturbance on " + d.machine + " needs freq_hz > 0");
  }
}

}  // namespace

TimeSeries simulate(const AssembledModel& model, const OperatingPoint& op,
                    const Scenario& scn) {
  validate(model, op, scn);
  const int n = model.n_states();
  const Real dt = scn.dt;
  const long long steps = std::llround(scn.duration / dt);

  TimeSeries ts;
  ts.framework = model.framework();
  ts.f_base_hz = model.spec().f_base_hz;
  ts.scenario = scn;
  for (const auto& m : model.machines())
    ts.machines.push_back({m.ms.name, m.ms.kind, m.s_ratio, m.ms.gfc.r_t});
  const std::vector<Channel> channels = resolve_channels(model, scn, &ts.names);

  InputMap in;
  in.u = VecX::Zero(model.n_inputs());
  in.dt = dt;
  for (const Disturbance& d : scn.disturbances)
    for (int i = 0; i < model.n_inputs(); ++i)
      if (model.input_names()[i] == d.machine + ".dP") in.add(i, d);

  DelayBank bank(model, op.x0, dt);

  const long long n_rec = steps / scn.decimation + 1;
  ts.t.resize(n_rec);
  ts.data.resize(n_rec, static_cast<int>(channels.size()));

  VecX x = op.x0;
  long long rec = 0;
  const auto record = [&](long long step, const VecX& xs) {
    const Real t = static_cast<Real>(step) * dt;
    ts.t[rec] = t;
    const VecX& u = in.at(step, 0);
    for (size_t c = 0; c < channels.size(); ++c) {
      if (channels[c].state >= 0) {
        ts.data(rec, static_cast<int>(c)) = xs[channels[c].state];
        continue;
      }
      const auto& m = model.machines()[channels[c].machine];
      const Real tau = m.ms.gfc.tau_p;
      const Real pd = tau > 0.0 ? bank.buf[m.tap].at(t - tau) : xs[m.offset + gfc::PF];
      Real du = 0.0;
      for (int i = 0; i < model.n_inputs(); ++i)
        if (model.input_names()[i] == m.ms.name + ".dP") du = u[i];
      ts.data(rec, static_cast<int>(c)) =
          m.ms.gfc.omega_star + m.ms.gfc.m_p * (m.gsp.p_star + du - pd);
    }
    ++rec;
  };

  record(0, x);

  VecX k1(n), k2(n), k3(n), k4(n);
  Eigen::PartialPivLU<MatX> newton;
  if (scn.integrator == Integrator::Trapezoidal) {
    // frozen Jacobian at the launch point
    MatX j0(n, n);
    const VecX d0 = bank.read(x, 0.0);
    const VecX u0 = in.at(0, 0);
    for (int i = 0; i < n; ++i) {
      const Real h = std::max(Real(1e-6), Real(1e-6) * std::abs(x[i]));
      VecX xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      j0.col(i) = (model.eval(xp, u0, d0) - model.eval(xm, u0, d0)) / (2.0 * h);
    }
    newton.compute(MatX::Identity(n, n) - 0.5 * dt * j0);
  }

  for (long long i = 0; i < steps; ++i) {
    const Real t = static_cast<Real>(i) * dt;
    if (scn.integrator == Integrator::RK4) {
      k1 = model.eval(x, in.at(i, 0), bank.read(x, t), t);
      VecX xs = x + 0.5 * dt * k1;
      k2 = model.eval(xs, in.at(i, 1), bank.read(xs, t + 0.5 * dt), t + 0.5 * dt);
      xs = x + 0.5 * dt * k2;
      k3 = model.eval(xs, in.at(i, 1), bank.read(xs, t + 0.5 * dt), t + 0.5 * dt);
      xs = x + dt * k3;
      k4 = model.eval(xs, in.at(i, 2), bank.read(xs, t + dt), t + dt);
      x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
      k1 = model.eval(x, in.at(i, 0), bank.read(x, t), t);
      VecX y = x + dt * k1;  // explicit predictor
      bool ok = false;
      for (int it = 0; it < 50; ++it) {
        const VecX g = y - x -
                       0.5 * dt *
                           (k1 + model.eval(y, in.at(i, 2), bank.read(y, t + dt), t + dt));
        if (!g.allFinite()) break;
        const VecX step = newton.solve(g);
        y -= step;
        if (step.cwiseAbs().maxCoeff() <= 1e-12 * std::max(Real(1), y.cwiseAbs().maxCoeff())) {
          ok = true;
          break;
        }
      }
      x = ok ? y : VecX::Constant(n, std::numeric_limits<Real>::quiet_NaN());
    }

    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergeLimit) {
      ts.diverged = true;
      break;
    }
    bank.push(x);
    if ((i + 1) % scn.decimation == 0) record(i + 1, x);
  }

  if (rec < n_rec) {
    ts.t.conservativeResize(rec);
    ts.data.conservativeResize(rec, Eigen::NoChange);
  }
  return ts;
}

VecX derive_channel(const TimeSeries& ts, ChannelKind kind, const std::string& machine) {
  const TimeSeries::MachineTag* tag = nullptr;
  for (const auto& m : ts.machines)
    if (m.name == machine) tag = &m;
  if (!tag) throw SpecError("unknown machine '" + machine + "'");

  const auto need = [&](const std::string& suffix) {
    const int c = ts.col(machine + "." + suffix);
    if (c < 0)
      throw SpecError("channel " + machine + "." + suffix + " was not recorded");
    return ts.data.col(c);
  };

  switch (kind) {
    case ChannelKind::Frequency: {
      if (tag->kind == MachineKind::GFC) return ts.f_base_hz * need("omega_c");
      return ts.f_base_hz * (need("dw").array() + 1.0).matrix();
    }
    case ChannelKind::Power: {
      if (tag->kind != MachineKind::GFC)
        throw SpecError("power channel needs converter states for '" + machine + "'");
      const auto vcd = need("v_c_d"), vcq = need("v_c_q");
      const auto itd = need("i_t_d"), itq = need("i_t_q");
      return tag->s_ratio *
             (vcd.cwiseProduct(itd) + vcq.cwiseProduct(itq) -
              tag->r_t * (itd.cwiseProduct(itd) + itq.cwiseProduct(itq)));
    }
    case ChannelKind::VoltageMag: {
      if (tag->kind != MachineKind::GFC)
        throw SpecError("voltage channel needs converter states for '" + machine + "'");
      const auto vcd = need("v_c_d"), vcq = need("v_c_q");
      return (vcd.cwiseProduct(vcd) + vcq.cwiseProduct(vcq)).cwiseSqrt();
    }
  }
  throw SpecError("unknown derived channel kind");
}

}  // namespace ssolab

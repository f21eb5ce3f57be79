#include "ssolab/sweep.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <thread>

namespace ssolab {

namespace {

std::vector<Mode> band_modes_at(const SystemSpec& spec, Real tau, int pade_order) {
  SystemSpec s = spec;
  for (MachineSpec& m : s.machines)
    if (m.kind == MachineKind::GFC) m.gfc.tau_p = tau;
  AssembledModel model = assemble(s);
  OperatingPoint op = initialize_states(model);
  LinearModel lm = linearize(model, op, pade_order);
  return eig_modes(lm).modes;
}

Real distance(const Mode& a, const Mode& b) {
  // 1 Hz equivalent to 1 percentage point of damping
  return std::abs(a.f_hz - b.f_hz) + 100.0 * std::abs(a.zeta - b.zeta);
}

}  // namespace

SweepResult delay_sweep(const SystemSpec& spec, const std::vector<Real>& taus, int pade_order,
                        Real f_lo, Real f_hi, std::optional<Framework> fw, int jobs) {
  if (taus.empty()) throw std::invalid_argument("delay list is empty");
  for (Real t : taus)
    if (t < 0.0) throw std::invalid_argument("delay must be nonnegative");

  SystemSpec base = spec;
  if (fw) base.framework = *fw;

  const int nt = static_cast<int>(taus.size());
  std::vector<std::vector<Mode>> per_tau(nt);
  std::vector<std::exception_ptr> errs(nt);
  jobs = std::max(1, jobs);
  if (jobs == 1 || nt == 1) {
    for (int i = 0; i < nt; ++i) per_tau[i] = band_modes_at(base, taus[i], pade_order);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min(jobs, nt); ++w)
      pool.emplace_back([&, w] {
        for (int i = w; i < nt; i += jobs) {
          try {
            per_tau[i] = band_modes_at(base, taus[i], pade_order);
          } catch (...) {
            errs[i] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }

  // chains seeded by the oscillatory band modes at the first delay,
  // least damped first
  std::vector<Mode> heads;
  for (const Mode& m : per_tau[0])
    if (m.f_hz >= f_lo && m.f_hz <= f_hi) heads.push_back(m);
  if (heads.empty())
    throw ModelError("no oscillatory mode between " + std::to_string(f_lo) + " and " +
                     std::to_string(f_hi) + " Hz at the first delay");
  std::sort(heads.begin(), heads.end(), [](const Mode& a, const Mode& b) {
    return a.zeta < b.zeta;
  });

  SweepResult out;
  out.n_tracked = static_cast<int>(heads.size());
  std::vector<Mode> prev = heads;
  for (int i = 0; i < nt; ++i) {
    for (size_t c = 0; c < prev.size(); ++c) {
      const Mode* pick = nullptr;
      if (i == 0) {
        pick = &prev[c];
      } else {
        Real best = std::numeric_limits<Real>::infinity();
        for (const Mode& m : per_tau[i]) {
          if (m.lambda.imag() <= 0.0) continue;  // follow oscillatory modes only
          Real d = distance(prev[c], m);
          if (d < best) {
            best = d;
            pick = &m;
          }
        }
        if (!pick) pick = &prev[c];  // nothing oscillatory left; hold last point
      }
      SweepRow row;
      row.tau = taus[i];
      row.mode_id = static_cast<int>(c);
      row.f_hz = pick->f_hz;
      row.zeta = pick->zeta;
      row.sigma = pick->lambda.real();
      row.jumped = i > 0 && std::abs(pick->f_hz - prev[c].f_hz) > 5.0;
      out.rows.push_back(row);
      prev[c] = *pick;
    }
  }
  return out;
}

}  // namespace ssolab

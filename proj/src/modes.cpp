#include "ssolab/modes.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>

namespace ssolab {

namespace {

struct Decomp {
  VecXc lambda;
  MatXc v;   // right eigenvectors in columns
  MatXc w;   // rows biorthonormal to v's columns (w = v^{-1})
  bool vectors_ok = true;
};

Decomp decompose(const MatX& a) {
  if (!a.allFinite()) throw ModelError("linear model has non-finite entries");
  Eigen::EigenSolver<MatX> es(a, true);
  if (es.info() != Eigen::Success) throw ModelError("eigensolver did not converge");
  Decomp d;
  d.lambda = es.eigenvalues();
  d.v = es.eigenvectors();
  Eigen::PartialPivLU<MatXc> lu(d.v);
  d.w = lu.solve(MatXc::Identity(a.rows(), a.cols()));
  Real err = (d.v * d.w - MatXc::Identity(a.rows(), a.cols())).cwiseAbs().maxCoeff();
  if (!std::isfinite(err) || err > 1e-6) d.vectors_ok = false;
  return d;
}

Real damping_ratio(Complex lambda) {
  Real mag = std::abs(lambda);
  if (mag < 1e-12) return 0.0;
  return -lambda.real() / mag;
}

}  // namespace

ModeSet eig_modes(const LinearModel& lm) {
  Decomp d = decompose(lm.a);
  const int n = lm.n();
  ModeSet ms;
  ms.states = lm.states;
  ms.vectors_ok = d.vectors_ok;
  for (int i = 0; i < n; ++i) {
    if (d.lambda(i).imag() < 0.0) continue;  // conjugate partner carries it
    Mode m;
    m.lambda = d.lambda(i);
    m.f_hz = m.lambda.imag() / (2.0 * kPi);
    m.zeta = damping_ratio(m.lambda);
    if (d.vectors_ok) {
      m.right = d.v.col(i);
      m.left = d.w.row(i).transpose();
      VecX p = (d.v.col(i).array() * d.w.row(i).transpose().array()).abs();
      Real pmax = p.maxCoeff();
      m.part = pmax > 0.0 ? VecX(p / pmax) : p;
    }
    ms.modes.push_back(std::move(m));
  }
  std::sort(ms.modes.begin(), ms.modes.end(), [](const Mode& a, const Mode& b) {
    if (a.f_hz != b.f_hz) return a.f_hz < b.f_hz;
    return a.lambda.real() < b.lambda.real();
  });
  return ms;
}

MatX participation(const LinearModel& lm) {
  Decomp d = decompose(lm.a);
  if (!d.vectors_ok) throw ModelError("defective eigenbasis, participation undefined");
  const int n = lm.n();
  MatX p(n, n);
  for (int i = 0; i < n; ++i) {
    p.col(i) = (d.v.col(i).array() * d.w.row(i).transpose().array()).abs();
    Real pmax = p.col(i).maxCoeff();
    if (pmax > 0.0) p.col(i) /= pmax;
  }
  return p;
}

std::vector<std::string> dominant_states(const ModeSet& ms, const Mode& mode, Real threshold) {
  std::vector<std::string> out;
  if (!mode.part.size()) return out;
  std::vector<int> idx;
  for (int k = 0; k < mode.part.size(); ++k)
    if (mode.part(k) >= threshold) idx.push_back(k);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return mode.part(a) > mode.part(b); });
  for (int k : idx) out.push_back(ms.states[k].name);
  return out;
}

std::vector<std::pair<std::string, std::string>> default_observables(const AssembledModel& m) {
  std::vector<std::pair<std::string, std::string>> obs;
  for (const auto& mach : m.machines()) {
    const std::string& name = mach.ms.name;
    obs.emplace_back(name, mach.ms.kind == MachineKind::GFC ? name + ".i_t_d" : name + ".dw");
  }
  return obs;
}

std::vector<ShapeEntry> mode_shape(
    const LinearModel& lm, const Mode& mode,
    const std::vector<std::pair<std::string, std::string>>& observables) {
  if (!mode.right.size()) throw ModelError("mode carries no eigenvectors");
  std::vector<ShapeEntry> shape;
  int best = -1;
  Real best_mag = -1.0;
  for (const auto& [machine, state] : observables) {
    int k = lm.state_index(state);
    if (k < 0) throw ModelError("observable state missing: " + state);
    ShapeEntry e;
    e.machine = machine;
    e.area = lm.states[k].area;
    e.value = mode.right(k);
    Real mag = std::abs(e.value);
    if (mag > best_mag) {
      best_mag = mag;
      best = static_cast<int>(shape.size());
    }
    shape.push_back(e);
  }
  if (best >= 0 && best_mag > 0.0) {
    Complex ref = shape[best].value;
    for (ShapeEntry& e : shape) e.value /= ref;
  }
  return shape;
}

int LinearModel::state_index(const std::string& name) const {
  for (size_t k = 0; k < states.size(); ++k)
    if (states[k].name == name) return static_cast<int>(k);
  return -1;
}

}  // namespace ssolab

#include "ssolab/prony.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "ssolab/modes.hpp"

namespace ssolab {

namespace {

struct Window {
  VecX y;     // demeaned samples
  Real dt = 0.0;
  Real mean = 0.0;
  Real scale = 0.0;  // max |y - mean|
};

Window cut_window(const VecX& t, const VecX& y, Real t0, Real t1, int order) {
  if (t.size() != y.size() || t.size() < 2) throw IdentError("signal and time axis disagree");
  if (!(t1 > t0)) throw IdentError("analysis window is empty");
  const Real dt = t[1] - t[0];
  const Real slack = 0.5 * dt;
  if (t0 < t[0] - slack || t1 > t[t.size() - 1] + slack)
    throw IdentError("analysis window lies outside the series");
  int i0 = 0;
  while (i0 < t.size() && t[i0] < t0 - slack * 1e-6) ++i0;
  int i1 = i0;
  while (i1 < t.size() && t[i1] <= t1 + slack * 1e-6) ++i1;
  const int n = i1 - i0;
  if (order < 1) throw IdentError("model order must be positive");
  if (n < 4 * order)
    throw IdentError("window too short: " + std::to_string(n) + " samples for order " +
                     std::to_string(order) + " (need >= " + std::to_string(4 * order) + ")");
  Window w;
  w.dt = dt;
  w.y = y.segment(i0, n);
  w.mean = w.y.mean();
  w.y.array() -= w.mean;
  w.scale = w.y.cwiseAbs().maxCoeff();
  return w;
}

// report conjugate pairs once with doubled amplitude; keep f in [0, Nyquist)
std::vector<PronyMode> modes_from_roots(const VecXc& z, const VecXc& amp, Real dt) {
  std::vector<PronyMode> out;
  for (int k = 0; k < z.size(); ++k) {
    const Real mag = std::abs(z[k]);
    if (!(mag > 1e-8) || !std::isfinite(mag)) continue;  // decayed-in-one-sample artifacts
    const Real arg = std::arg(z[k]);
    if (arg < -1e-9) continue;                    // conjugate twin
    if (arg > kPi * (1.0 - 1e-12)) continue;      // exactly Nyquist
    const bool oscillatory = arg > 1e-9;
    PronyMode m;
    m.sigma = std::log(mag) / dt;
    m.f_hz = arg / (2.0 * kPi * dt);
    const Real lam = std::hypot(m.sigma, 2.0 * kPi * m.f_hz);
    m.zeta = lam < 1e-12 ? 0.0 : -m.sigma / lam;
    m.amplitude = (oscillatory ? 2.0 : 1.0) * std::abs(amp[k]);
    m.phase = std::arg(amp[k]);
    out.push_back(m);
  }
  std::sort(out.begin(), out.end(),
            [](const PronyMode& a, const PronyMode& b) { return a.amplitude > b.amplitude; });
  return out;
}

// complex Vandermonde least squares for amplitudes, plus relative residual.
// A trailing ones column absorbs the offset left over after demeaning (a
// truncated transient has nonzero window mean, so the subtraction is inexact).
PronyEstimate finish(const Window& w, const VecXc& z, int order, Real t0, Real t1) {
  const int n = static_cast<int>(w.y.size());
  PronyEstimate est;
  est.order = order;
  est.t0 = t0;
  est.t1 = t1;
  if (z.size() == 0) return est;

  MatXc v(n, z.size() + 1);
  for (int k = 0; k < z.size(); ++k) {
    v(0, k) = Complex(1.0, 0.0);
    for (int r = 1; r < n; ++r) v(r, k) = v(r - 1, k) * z[k];
  }
  v.col(z.size()).setConstant(Complex(1.0, 0.0));
  const VecXc a = v.colPivHouseholderQr().solve(w.y.cast<Complex>());
  const Real err = (v * a - w.y.cast<Complex>()).norm();
  const Real ref = w.y.norm();
  est.residual = ref > 0.0 ? err / ref : 0.0;
  est.modes = modes_from_roots(z, a.head(z.size()), w.dt);
  return est;
}

}  // namespace

PronyEstimate prony_fit(const VecX& t, const VecX& y, Real t0, Real t1, int order) {
  const Window w = cut_window(t, y, t0, t1, order);
  const int n = static_cast<int>(w.y.size());

  PronyEstimate empty;
  empty.order = order;
  empty.t0 = t0;
  empty.t1 = t1;
  if (w.scale <= 1e-12 * std::max(Real(1), std::abs(w.mean))) return empty;

  // affine linear prediction y[i] = sum_k c_k y[i-1-k] + c0; the free constant
  // keeps the leftover window offset out of the recursion roots
  const int rows = n - order;
  MatX a(rows, order + 1);
  VecX b(rows);
  for (int r = 0; r < rows; ++r) {
    for (int k = 0; k < order; ++k) a(r, k) = w.y[order - 1 + r - k];
    a(r, order) = 1.0;
    b[r] = w.y[order + r];
  }
  Eigen::JacobiSVD<MatX> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecX sv = svd.singularValues();
  const Real cut = sv[0] * 1e-10;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cut) ++rank;
  if (rank == 0)
    throw IdentError("linear-prediction system is rank deficient; try a lower order");
  svd.setThreshold(1e-10);
  const VecX c = svd.solve(b).head(order);

  // companion matrix of z^p - c0 z^{p-1} - ... - c_{p-1}
  MatX comp = MatX::Zero(order, order);
  comp.row(0) = c.transpose();
  comp.block(1, 0, order - 1, order - 1).setIdentity();
  const VecXc z = Eigen::EigenSolver<MatX>(comp, false).eigenvalues();

  return finish(w, z, order, t0, t1);
}

PronyEstimate matrix_pencil(const VecX& t, const VecX& y, Real t0, Real t1, int order) {
  const Window w = cut_window(t, y, t0, t1, order);
  const int n = static_cast<int>(w.y.size());

  PronyEstimate empty;
  empty.order = order;
  empty.t0 = t0;
  empty.t1 = t1;
  if (w.scale <= 1e-12 * std::max(Real(1), std::abs(w.mean))) return empty;

  const int l = std::min(n / 3 + order, n / 2);  // pencil parameter
  const int rows = n - l;
  MatX h(rows, l + 1);
  for (int r = 0; r < rows; ++r)
    for (int k = 0; k <= l; ++k) h(r, k) = w.y[r + k];

  Eigen::BDCSVD<MatX> svd(h.leftCols(l), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecX sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size() && i < order; ++i)
    if (sv[i] > sv[0] * 1e-10) ++rank;
  if (rank == 0)
    throw IdentError("pencil matrix is rank deficient; try a lower order");

  const MatX u = svd.matrixU().leftCols(rank);
  const MatX v = svd.matrixV().leftCols(rank);
  const VecX s = sv.head(rank);
  const MatX zr = s.cwiseInverse().asDiagonal() * u.transpose() * h.rightCols(l) * v;
  const VecXc z = Eigen::EigenSolver<MatX>(zr, false).eigenvalues();

  return finish(w, z, order, t0, t1);
}

PronyMode dominant_mode(const PronyEstimate& est, Real f_lo, Real f_hi) {
  const PronyMode* best = nullptr;
  for (const PronyMode& m : est.modes)
    if (m.f_hz > 0.0 && m.f_hz >= f_lo && m.f_hz <= f_hi && (!best || m.amplitude > best->amplitude))
      best = &m;
  if (!best)
    throw IdentError("no oscillatory mode identified in [" + std::to_string(f_lo) + ", " +
                     std::to_string(f_hi) + "] Hz");
  return *best;
}

}  // namespace ssolab

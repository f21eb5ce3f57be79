#include "ssolab/freq_response.hpp"

#include <Eigen/SVD>
#include <limits>
#include <stdexcept>
#include <thread>

namespace ssolab {

FreqResponse sigma_max_response(const LinearModel& lm, const VecX& f_grid, int jobs) {
  const int np = static_cast<int>(f_grid.size());
  for (int i = 0; i < np; ++i) {
    if (f_grid(i) < 0.0) throw std::invalid_argument("frequency grid must be nonnegative");
    if (i > 0 && f_grid(i) <= f_grid(i - 1))
      throw std::invalid_argument("frequency grid must be strictly ascending");
  }
  FreqResponse fr;
  fr.f_hz = f_grid;
  fr.sigma_max = VecX::Zero(np);

  const int n = lm.n();
  const MatXc bc = lm.b.cast<Complex>();
  const MatXc cc = lm.c.cast<Complex>();
  const MatXc dc = lm.d.cast<Complex>();
  const Real bnorm = std::max(lm.b.size() ? lm.b.cwiseAbs().maxCoeff() : 0.0, 1.0);

  auto eval_point = [&](int i) {
    Complex s(0.0, 2.0 * kPi * f_grid(i));
    MatXc g;
    if (n == 0) {
      g = dc;
    } else {
      MatXc m = -lm.a.cast<Complex>();
      m.diagonal().array() += s;
      Eigen::PartialPivLU<MatXc> lu(m);
      MatXc x = lu.solve(bc);
      // an exactly singular shift (undamped pole on the grid) surfaces as a
      // non-finite solve or a residual far beyond backward-stable rounding
      Real resid = x.allFinite() ? (m * x - bc).cwiseAbs().maxCoeff()
                                 : std::numeric_limits<Real>::infinity();
      Real scale = m.cwiseAbs().maxCoeff() * (x.size() ? x.cwiseAbs().maxCoeff() : 0.0) + bnorm;
      if (!std::isfinite(resid) || resid > 1e-6 * scale) {
        fr.sigma_max(i) = std::numeric_limits<Real>::infinity();
        return;
      }
      g = cc * x + dc;
    }
    if (g.size() == 0) {
      fr.sigma_max(i) = 0.0;
      return;
    }
    if (!g.allFinite()) {
      fr.sigma_max(i) = std::numeric_limits<Real>::infinity();
      return;
    }
    Eigen::JacobiSVD<MatXc> svd(g);
    fr.sigma_max(i) = svd.singularValues()(0);
  };

  jobs = std::max(1, jobs);
  if (jobs == 1 || np < 2 * jobs) {
    for (int i = 0; i < np; ++i) eval_point(i);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&, w] {
        for (int i = w; i < np; i += jobs) eval_point(i);
      });
    for (auto& t : pool) t.join();
  }
  return fr;
}

}  // namespace ssolab

#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace ssolab {

using Real = double;
using Complex = std::complex<Real>;

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using VecXc = Eigen::VectorXcd;
using MatXc = Eigen::MatrixXcd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr Real kPi = 3.14159265358979323846;

/// e^{j theta}
inline Complex cis(Real theta) { return {std::cos(theta), std::sin(theta)}; }

}  // namespace ssolab

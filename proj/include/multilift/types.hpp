#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace multilift {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec7 = Eigen::Matrix<double, 7, 1>;
using Mat7 = Eigen::Matrix<double, 7, 7>;
using Vec13 = Eigen::Matrix<double, 13, 1>;
using Mat13 = Eigen::Matrix<double, 13, 13>;

// State vector layout: [n e d | qw qx qy qz | vn ve vd | P Q R]
inline constexpr int kStateDim = 13;
inline constexpr int kPosIdx = 0;
inline constexpr int kQuatIdx = 3;
inline constexpr int kVelIdx = 7;
inline constexpr int kRateIdx = 10;

// Raised when a covariance or information matrix can no longer be
// inverted reliably (filter divergence).
struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace multilift

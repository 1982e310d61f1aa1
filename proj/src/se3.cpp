// Copyright 2026 The gplfd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gplfd/se3.hpp"

#include <cmath>
#include <numbers>

#include "gplfd/error.hpp"

namespace gplfd {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kComponentZero = 1e-12;

// Flips u into the canonical hemisphere used at theta == pi.
Eigen::Vector3d HemisphereAxis(Eigen::Vector3d u) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(u[i]) <= kComponentZero) u[i] = 0.0;
  }
  u.normalize();
  const bool flip = u.z() < 0.0 || (u.z() == 0.0 && u.y() < 0.0) ||
                    (u.z() == 0.0 && u.y() == 0.0 && u.x() < 0.0);
  return flip ? Eigen::Vector3d(-u) : u;
}

}  // namespace

RotationVector RotationVector::FromAxisAngle(const Eigen::Vector3d& axis,
                                             double angle) {
  if (!std::isfinite(angle)) {
    throw Error(ErrorCode::kInvalidInput, "rotation angle is not finite");
  }
  if (angle == 0.0) return RotationVector();
  const double norm = axis.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::kInvalidInput,
                "rotation axis has zero norm but the angle is nonzero");
  }
  Eigen::Vector3d u = axis / norm;
  double theta = std::fmod(angle, kTwoPi);
  if (theta < 0.0) theta += kTwoPi;
  if (theta > kPi) {
    theta = kTwoPi - theta;
    u = -u;
  }
  if (std::abs(theta - kPi) <= kPiSnapTolerance) {
    return RotationVector(kPi * HemisphereAxis(u));
  }
  if (theta == 0.0) return RotationVector();
  return RotationVector(theta * u);
}

RotationVector RotationVector::FromVector(const Eigen::Vector3d& r) {
  const double theta = r.norm();
  if (theta == 0.0) return RotationVector();
  if (std::isfinite(theta) && theta < M_PI - kPiSnapTolerance) {
    return RotationVector(r);
  }
  return FromAxisAngle(r / theta, theta);
}

RotationVector RotationVector::FromQuaternion(double w, double x, double y,
                                              double z) {
  Eigen::Vector4d q(w, x, y, z);
  const double norm = q.norm();
  if (!std::isfinite(norm) ||
      std::abs(norm - 1.0) > kUnitQuaternionTolerance) {
    throw Error(ErrorCode::kInvalidInput,
                "quaternion is not unit length (norm " + std::to_string(norm) +
                    ")");
  }
  q /= norm;
  if (q[0] < 0.0) q = -q;
  const Eigen::Vector3d v = q.tail<3>();
  const double s = v.norm();
  if (s == 0.0) return RotationVector();
  const double theta = 2.0 * std::atan2(s, q[0]);
  return FromAxisAngle(v / s, theta);
}

RotationVector RotationVector::FromQuaternion(const Eigen::Quaterniond& q) {
  return FromQuaternion(q.w(), q.x(), q.y(), q.z());
}

Eigen::Vector3d RotationVector::axis() const {
  const double theta = angle();
  if (theta < kIdentityAngle) return Eigen::Vector3d::UnitX();
  return r_ / theta;
}

Eigen::Quaterniond RotationVector::quaternion() const {
  const double theta = angle();
  if (theta == 0.0) return Eigen::Quaterniond::Identity();
  const Eigen::Vector3d u = r_ / theta;
  const double s = std::sin(0.5 * theta);
  return Eigen::Quaterniond(std::cos(0.5 * theta), s * u.x(), s * u.y(),
                            s * u.z());
}

Eigen::Matrix3d RotationVector::matrix() const {
  return quaternion().toRotationMatrix();
}

bool RotationVector::IsCanonical() const {
  const double theta = angle();
  if (!std::isfinite(theta) || theta > kPi) return false;
  if (std::abs(theta - kPi) > kPiSnapTolerance) return true;
  const Eigen::Vector3d u = r_ / theta;
  if (u.z() < 0.0) return false;
  if (u.z() == 0.0 && u.y() < 0.0) return false;
  if (u.z() == 0.0 && u.y() == 0.0 && u.x() < 0.0) return false;
  return true;
}

Vector6d Pose::ToVector() const {
  Vector6d v;
  v << position, rotation.vector();
  return v;
}

Pose Pose::FromVector(const Vector6d& v) {
  return Pose{v.head<3>(), RotationVector::FromVector(v.tail<3>())};
}

DistanceWeights::DistanceWeights(double rotation, double translation)
    : rotation_(rotation), translation_(translation) {
  if (!(rotation >= 0.0) || !(translation >= 0.0) ||
      std::abs(rotation + translation - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidInput,
                "distance weights must be nonnegative and sum to one");
  }
}

RotationVector canonicalize_rotation(const Eigen::Vector3d& axis,
                                     double angle) {
  return RotationVector::FromAxisAngle(axis, angle);
}

RotationVector rotvec_from_quaternion(double w, double x, double y, double z) {
  return RotationVector::FromQuaternion(w, x, y, z);
}

Eigen::Quaterniond quaternion_of(const RotationVector& r) {
  return r.quaternion();
}

double arc_distance(const RotationVector& a, const RotationVector& b) {
  // 2 acos|w| of the relative quaternion, evaluated through atan2 so that
  // identical rotations give exactly zero.
  const Eigen::Quaterniond qa = a.quaternion();
  const Eigen::Quaterniond qb = b.quaternion();
  const double w = qa.w() * qb.w() + qa.vec().dot(qb.vec());
  const Eigen::Vector3d v =
      qa.w() * qb.vec() - qb.w() * qa.vec() - qa.vec().cross(qb.vec());
  return 2.0 * std::atan2(v.norm(), std::abs(w));
}

double pose_distance(const Pose& a, const Pose& b, const DistanceWeights& w) {
  const double arc = arc_distance(a.rotation, b.rotation);
  const double lin = (a.position - b.position).squaredNorm();
  return std::sqrt(w.rotation() * arc * arc + w.translation() * lin);
}

}  // namespace gplfd

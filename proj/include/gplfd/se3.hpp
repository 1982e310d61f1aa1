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

// Axis-angle rotations restricted to the closed ball of radius pi, with a
// fixed axis hemisphere at theta == pi so that every rotation has exactly one
// representative. Poses pair such a rotation vector with a translation and
// serialize as (x, y, z, theta*ux, theta*uy, theta*uz).

#ifndef GPLFD_SE3_HPP_
#define GPLFD_SE3_HPP_

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace gplfd {

using Vector6d = Eigen::Matrix<double, 6, 1>;

// Tolerance on |theta - pi| below which the hemisphere rule is applied.
inline constexpr double kPiSnapTolerance = 1e-9;
// Below this angle the axis is undefined and reported as (1, 0, 0).
inline constexpr double kIdentityAngle = 1e-12;
// Allowed deviation of a quaternion norm from one.
inline constexpr double kUnitQuaternionTolerance = 1e-6;

class RotationVector {
 public:
  RotationVector() = default;

  // Canonical representative of the rotation by `angle` about `axis`.
  // Throws kInvalidInput for a zero or non-finite axis with nonzero angle.
  static RotationVector FromAxisAngle(const Eigen::Vector3d& axis, double angle);

  // Canonicalizes an arbitrary rotation vector (any norm).
  static RotationVector FromVector(const Eigen::Vector3d& r);

  // Scalar-first quaternion (w, x, y, z); q and -q give the same result.
  static RotationVector FromQuaternion(double w, double x, double y, double z);
  static RotationVector FromQuaternion(const Eigen::Quaterniond& q);

  const Eigen::Vector3d& vector() const { return r_; }
  double angle() const { return r_.norm(); }
  Eigen::Vector3d axis() const;

  Eigen::Quaterniond quaternion() const;
  Eigen::Matrix3d matrix() const;

  // True when the stored vector satisfies the ball and hemisphere invariants.
  bool IsCanonical() const;

  bool operator==(const RotationVector& other) const { return r_ == other.r_; }

 private:
  explicit RotationVector(const Eigen::Vector3d& r) : r_(r) {}

  Eigen::Vector3d r_ = Eigen::Vector3d::Zero();
};

struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  RotationVector rotation;

  Vector6d ToVector() const;
  // Re-canonicalizes the rotation part.
  static Pose FromVector(const Vector6d& v);
};

// Convex weights of the rotation and translation terms of the pose distance.
class DistanceWeights {
 public:
  DistanceWeights() = default;
  // Throws kInvalidInput unless both are >= 0 and sum to one (1e-9).
  DistanceWeights(double rotation, double translation);

  double rotation() const { return rotation_; }
  double translation() const { return translation_; }

 private:
  double rotation_ = 0.5;
  double translation_ = 0.5;
};

RotationVector canonicalize_rotation(const Eigen::Vector3d& axis, double angle);
RotationVector rotvec_from_quaternion(double w, double x, double y, double z);
Eigen::Quaterniond quaternion_of(const RotationVector& r);

// Geodesic angle between two rotations, in [0, pi].
double arc_distance(const RotationVector& a, const RotationVector& b);

double pose_distance(const Pose& a, const Pose& b, const DistanceWeights& w);

}  // namespace gplfd

#endif  // GPLFD_SE3_HPP_

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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gplfd/error.hpp"
#include "gplfd/se3.hpp"

namespace gplfd {
namespace {

using Eigen::Vector3d;

RotationVector RandomRotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, M_PI);
  const Vector3d axis(n(rng), n(rng), n(rng));
  return RotationVector::FromAxisAngle(axis.normalized(), u(rng));
}

void ExpectVec(const Vector3d& a, const Vector3d& b, double tol) {
  EXPECT_LE((a - b).norm(), tol) << a.transpose() << " vs " << b.transpose();
}

TEST(Canonicalize, IdentityIsZero) {
  ExpectVec(canonicalize_rotation({0, 0, 1}, 0.0).vector(), Vector3d::Zero(), 0.0);
}

TEST(Canonicalize, HemisphereRuleAtPi) {
  ExpectVec(canonicalize_rotation({0, 0, -1}, M_PI).vector(), {0, 0, M_PI}, 1e-15);
  ExpectVec(canonicalize_rotation({0, 0, -1}, M_PI + 5e-10).vector(), {0, 0, M_PI}, 1e-15);
}

TEST(Canonicalize, WrapsBeyondPi) {
  const RotationVector r = canonicalize_rotation({1, 0, 0}, 1.5 * M_PI);
  ExpectVec(r.vector(), {-M_PI / 2, 0, 0}, 1e-12);
  const Eigen::Matrix3d raw(Eigen::AngleAxisd(1.5 * M_PI, Vector3d::UnitX()));
  EXPECT_LE((r.matrix() - raw).norm(), 1e-12);
}

TEST(Canonicalize, ZeroAxisWithAngleRejected) {
  try {
    canonicalize_rotation(Vector3d::Zero(), 0.3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidInput);
  }
}

TEST(Canonicalize, Idempotent) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> big(-10.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    const Vector3d raw(big(rng), big(rng), big(rng));
    const RotationVector once = RotationVector::FromVector(raw);
    EXPECT_TRUE(once.IsCanonical());
    EXPECT_EQ(RotationVector::FromVector(once.vector()), once);
    const Eigen::Matrix3d m(Eigen::AngleAxisd(raw.norm(), raw.normalized()));
    EXPECT_LE((once.matrix() - m).norm(), 1e-9);
  }
}

TEST(Canonicalize, SmallAngleAxisConvention) {
  ExpectVec(RotationVector().axis(), Vector3d::UnitX(), 0.0);
}

TEST(Quaternion, KnownValues) {
  ExpectVec(rotvec_from_quaternion(1, 0, 0, 0).vector(), Vector3d::Zero(), 0.0);
  ExpectVec(rotvec_from_quaternion(0, 0, 0, 1).vector(), {0, 0, M_PI}, 1e-15);
  ExpectVec(rotvec_from_quaternion(std::cos(M_PI / 8), std::sin(M_PI / 8), 0, 0).vector(),
            {M_PI / 4, 0, 0}, 1e-14);
}

TEST(Quaternion, NonUnitRejected) {
  EXPECT_THROW(rotvec_from_quaternion(1.1, 0, 0, 0), Error);
  EXPECT_NO_THROW(rotvec_from_quaternion(1.0 + 5e-7, 0, 0, 0));
}

TEST(Quaternion, SignInvarianceAndRoundTrip) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const RotationVector r = RandomRotation(rng);
    const Eigen::Quaterniond q = quaternion_of(r);
    const RotationVector a = rotvec_from_quaternion(q.w(), q.x(), q.y(), q.z());
    const RotationVector b = rotvec_from_quaternion(-q.w(), -q.x(), -q.y(), -q.z());
    EXPECT_EQ(a, b);
    if (r.angle() < M_PI - 1e-6) ExpectVec(a.vector(), r.vector(), 1e-10);
  }
}

TEST(ArcDistance, KnownValues) {
  const RotationVector id;
  EXPECT_EQ(arc_distance(id, id), 0.0);
  const RotationVector b = RotationVector::FromAxisAngle(Vector3d(1, 2, 3).normalized(), 1.2);
  EXPECT_NEAR(arc_distance(id, b), 1.2, 1e-14);
  EXPECT_NEAR(arc_distance(RotationVector::FromVector({M_PI, 0, 0}),
                           RotationVector::FromVector({0, M_PI, 0})),
              M_PI, 1e-14);
}

TEST(ArcDistance, MatchesClampedArccosForm) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const RotationVector a = RandomRotation(rng);
    const RotationVector b = RandomRotation(rng);
    const double ha = 0.5 * a.angle(), hb = 0.5 * b.angle();
    const double c = std::cos(ha) * std::cos(hb) +
                     std::sin(ha) * std::sin(hb) * a.axis().dot(b.axis());
    const double oracle = 2.0 * std::acos(std::min(1.0, std::abs(c)));
    const double d = arc_distance(a, b);
    EXPECT_NEAR(d, oracle, 1e-7);
    EXPECT_EQ(d, arc_distance(b, a));
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, M_PI);
    EXPECT_EQ(arc_distance(a, a), 0.0);
  }
}

TEST(PoseDistance, KnownValues) {
  Pose a, b;
  EXPECT_EQ(pose_distance(a, a, DistanceWeights()), 0.0);
  b.position = Vector3d(3, 4, 0);
  EXPECT_NEAR(pose_distance(a, b, DistanceWeights(0.0, 1.0)), 5.0, 1e-15);
  Pose c;
  c.rotation = RotationVector::FromAxisAngle(Vector3d::UnitZ(), M_PI / 2);
  EXPECT_NEAR(pose_distance(a, c, DistanceWeights(0.5, 0.5)), 1.1107207345395915, 1e-12);
}

TEST(PoseDistance, LimbsAndSymmetry) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Pose a, b;
    a.position = Vector3d(n(rng), n(rng), n(rng));
    b.position = Vector3d(n(rng), n(rng), n(rng));
    a.rotation = RandomRotation(rng);
    b.rotation = RandomRotation(rng);
    EXPECT_NEAR(pose_distance(a, b, DistanceWeights(0, 1)), (a.position - b.position).norm(), 1e-12);
    EXPECT_NEAR(pose_distance(a, b, DistanceWeights(1, 0)), arc_distance(a.rotation, b.rotation), 1e-12);
    const DistanceWeights w(0.3, 0.7);
    EXPECT_EQ(pose_distance(a, b, w), pose_distance(b, a, w));
  }
}

TEST(DistanceWeights, Validation) {
  EXPECT_THROW(DistanceWeights(0.6, 0.6), Error);
  EXPECT_THROW(DistanceWeights(-0.1, 1.1), Error);
  EXPECT_NO_THROW(DistanceWeights(1.0, 0.0));
}

TEST(PoseVector, RoundTrip) {
  Pose p;
  p.position = Vector3d(1, 2, 3);
  p.rotation = RotationVector::FromVector({0.1, -0.2, 0.3});
  const Pose q = Pose::FromVector(p.ToVector());
  EXPECT_EQ(q.position, p.position);
  EXPECT_EQ(q.rotation, p.rotation);
}

}  // namespace
}  // namespace gplfd

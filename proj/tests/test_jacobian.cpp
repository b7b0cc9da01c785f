#include "crplan/jacobian.hpp"
#include "crplan/kinematics.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

namespace crplan {
namespace {

using test::central_differences;
using test::relative_error;

PointDescriptor random_descriptor(std::mt19937_64& rng, const ManipulatorParams& params) {
  std::uniform_int_distribution<int> link(0, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto id = static_cast<LinkId>(link(rng));
  const double coord = is_continuum(id) ? unit(rng) : unit(rng) * params.rigid_length(segment_of(id));
  return {id, coord};
}

TEST(EndEffectorJacobian, StraightFirstSegmentHasNoWristColumn) {
  const ManipulatorParams params;
  const Mat34 j = end_effector_jacobian({0.0, 1.3, 0.7, 2.0}, params);
  EXPECT_LT(j.col(1).norm(), 1e-12);
}

TEST(EndEffectorJacobian, MatchesCentralDifferences) {
  const ManipulatorParams params;
  std::mt19937_64 rng(11);
  const auto fk = [&](const Config& q) { return end_effector(q, params); };
  for (int n = 0; n < 200; ++n) {
    const Config q = test::random_config(rng);
    EXPECT_LT(relative_error(end_effector_jacobian(q, params), central_differences(fk, q)), 1e-5);
  }
}

TEST(EndEffectorJacobian, MatchesFrozenClosedFormDifferences) {
  const ManipulatorParams params;
  for (const auto& c : test::oracles()["ee_jacobian_fd"]) {
    Mat34 ref;
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 4; ++k) ref(r, k) = c["jacobian"][r][k];
    EXPECT_LT(relative_error(end_effector_jacobian(test::config(c["q"]), params), ref), 1e-5);
  }
}

TEST(EndEffectorJacobian, SmallBendIsContinuous) {
  const ManipulatorParams params;
  const auto fk = [&](const Config& q) { return end_effector(q, params); };
  for (double t : {1e-3, 1e-5, 2e-6}) {
    const Config q{t, 0.4, 0.8, 1.1};
    EXPECT_LT(relative_error(end_effector_jacobian(q, params), central_differences(fk, q, 1e-7)),
              1e-5);
  }
}

TEST(PointJacobian, BaseIsFixed) {
  const ManipulatorParams params;
  const Mat34 j = point_jacobian({0.5, 1.0, 0.5, 1.0}, {LinkId::Continuum1, 0.0}, params);
  EXPECT_LT(j.norm(), 1e-12);
}

TEST(PointJacobian, ProximalPointIgnoresDistalJoints) {
  const ManipulatorParams params;
  std::mt19937_64 rng(12);
  for (int n = 0; n < 20; ++n) {
    const Mat34 j = point_jacobian(test::random_config(rng), {LinkId::Rigid1, 10.0}, params);
    EXPECT_EQ(j.col(2).norm(), 0.0);
    EXPECT_EQ(j.col(3).norm(), 0.0);
  }
}

TEST(PointJacobian, MatchesCentralDifferences) {
  const ManipulatorParams params;
  std::mt19937_64 rng(13);
  for (int n = 0; n < 400; ++n) {
    const Config q = test::random_config(rng);
    const PointDescriptor pd = random_descriptor(rng, params);
    const auto f = [&](const Config& x) { return point_position(x, pd, params); };
    const Mat34 ref = central_differences(f, q);
    if (ref.norm() < 1e-9) continue;
    EXPECT_LT(relative_error(point_jacobian(q, pd, params), ref), 1e-5)
        << link_name(pd.link) << " " << pd.local_coord;
  }
}

TEST(PointJacobian, FiniteDifferenceModeAgrees) {
  ManipulatorParams params;
  params.jacobian_mode = JacobianMode::FiniteDifference;
  std::mt19937_64 rng(14);
  for (int n = 0; n < 50; ++n) {
    const Config q = test::random_config(rng);
    const PointDescriptor pd = random_descriptor(rng, params);
    EXPECT_LT((point_jacobian(q, pd, params) - analytic_point_jacobian(q, pd, params)).norm(),
              1e-4);
  }
}

TEST(PointDescriptor, OutOfRangeThrows) {
  const ManipulatorParams params;
  EXPECT_THROW(validate_descriptor({LinkId::Continuum2, 1.5}, params), std::invalid_argument);
  EXPECT_THROW(validate_descriptor({LinkId::Rigid2, params.rigid_length2 + 1}, params),
               std::invalid_argument);
  EXPECT_NO_THROW(validate_descriptor(end_effector_descriptor(params), params));
}

TEST(PseudoInverse, IdentityAndZero) {
  const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_TRUE(pseudo_inverse(i, 1e-8).isApprox(i));
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(3, 4);
  const Eigen::MatrixXd zi = pseudo_inverse(z, 1e-8);
  EXPECT_EQ(zi.rows(), 4);
  EXPECT_EQ(zi.cols(), 3);
  EXPECT_EQ(zi.norm(), 0.0);
}

TEST(PseudoInverse, PenroseConditions) {
  std::srand(15);
  for (int n = 0; n < 100; ++n) {
    const Mat34 m = Mat34::Random() * 20.0;
    const Mat43 p = pseudo_inverse(m, 1e-10);
    EXPECT_LT((m * p * m - m).norm(), 1e-9);
    EXPECT_LT((p * m * p - p).norm(), 1e-9);
    EXPECT_LT((m * p - (m * p).transpose()).norm(), 1e-9);
    EXPECT_LT((p * m - (p * m).transpose()).norm(), 1e-9);
    const Eigen::MatrixXd dyn = pseudo_inverse(Eigen::MatrixXd(m), 1e-10);
    EXPECT_LT((dyn - p).norm(), 1e-12);
  }
}

TEST(PseudoInverse, DampedShrinksTowardZero) {
  const Mat34 m = Mat34::Random();
  EXPECT_LT((damped_pseudo_inverse(m, 0.0) - pseudo_inverse(m, 1e-12)).norm(), 1e-9);
  EXPECT_LT(damped_pseudo_inverse(m, 1e6).norm(), 1e-5);
  // Tikhonov form as an independent reference.
  const double lambda = 0.3;
  const Mat43 ref = m.transpose() * (m * m.transpose() + lambda * lambda * Mat3::Identity()).inverse();
  EXPECT_LT((damped_pseudo_inverse(m, lambda) - ref).norm(), 1e-12);
}

TEST(NullSpaceProjector, RankOneForFullRowRank) {
  const Mat34 j = Mat34::Random();
  const Mat4 p = null_space_projector(j, 1e-10);
  Eigen::JacobiSVD<Mat4> svd(p);
  EXPECT_NEAR(svd.singularValues()[0], 1.0, 1e-9);
  EXPECT_LT(svd.singularValues()[1], 1e-9);
}

TEST(NullSpaceProjector, ZeroJacobianGivesIdentity) {
  EXPECT_TRUE(null_space_projector(Mat34::Zero(), 1e-10).isApprox(Mat4::Identity()));
}

TEST(NullSpaceProjector, Identities) {
  const ManipulatorParams params;
  std::mt19937_64 rng(16);
  for (int n = 0; n < 100; ++n) {
    const Mat34 j = end_effector_jacobian(test::random_config(rng), params);
    const Mat4 p = null_space_projector(j, 1e-10);
    EXPECT_LT((j * p).norm(), 1e-9);
    EXPECT_LT((p * p - p).norm(), 1e-9);
  }
}

TEST(JointLimitWeights, MidRangeIsIdentity) {
  const ManipulatorParams params;
  const Config q{0.0, 1.0, 0.0, 2.0};
  const auto state = WeightState::at(q, params.joint_limits);
  EXPECT_TRUE(joint_limit_weights(q, state, params.joint_limits).isApprox(Mat4::Identity()));
}

TEST(JointLimitWeights, MovingAwayFromLimitIsOne) {
  const ManipulatorParams params;
  const Config prev{2.9, 1.0, 1.0, 2.0};
  const Config now{2.8, 1.0, 1.0, 2.0};
  const Mat4 w = joint_limit_weights(now, WeightState::at(prev, params.joint_limits),
                                     params.joint_limits);
  EXPECT_DOUBLE_EQ(w(0, 0), 1.0);
}

TEST(JointLimitWeights, ApproachingLimitGrows) {
  const ManipulatorParams params;
  const double hi = params.joint_limits[0].hi;
  const Config prev{0.99 * hi, 1.0, 1.0, 2.0};
  const Config now{0.999 * hi, 1.0, 1.0, 2.0};
  const Mat4 w = joint_limit_weights(now, WeightState::at(prev, params.joint_limits),
                                     params.joint_limits);
  EXPECT_GT(w(0, 0), 10.0);
  EXPECT_DOUBLE_EQ(w(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(w(3, 3), 1.0);
}

TEST(JointLimitGradient, MatchesDifferenceOfCriterion) {
  const ManipulatorParams params;
  const auto& lim = params.joint_limits[0];
  const auto h = [&](double x) {
    return (lim.hi - lim.lo) * (lim.hi - lim.lo) / (4.0 * (lim.hi - x) * (x - lim.lo));
  };
  for (double x : {-2.5, -0.3, 0.7, 2.9}) {
    const Vec4 g = joint_limit_gradient({x, 0.0, 0.0, 0.0}, params.joint_limits);
    const double fd = (h(x + 1e-6) - h(x - 1e-6)) / 2e-6;
    EXPECT_NEAR(g[0], std::abs(fd), 1e-6 * std::max(1.0, std::abs(fd)));
    EXPECT_EQ(g[1], 0.0);
  }
}

}  // namespace
}  // namespace crplan

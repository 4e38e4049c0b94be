#include <gtest/gtest.h>

#include <cmath>

#include "ppfpose/filter.hpp"
#include "ppfpose/ppf.hpp"
#include "ppfpose/recon.hpp"
#include "ppfpose/sim.hpp"
#include "testing.hpp"

using namespace ppfpose;
using ppfpose::testutil::axis_angle;
using ppfpose::testutil::random_pose;
using ppfpose::testutil::random_rot;
using ppfpose::testutil::random_unit;
using ppfpose::testutil::random_vec;
using ppfpose::testutil::uniform;

// Properties checked over random samples. Oracles go through angle/axis
// (Eigen) rather than the library's own maps.

TEST(Property, VexPaNormIsSinSquared) {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 20000; ++i) {
    const double theta = uniform(rng, 0.0, M_PI);
    const RotationMatrix r = RotationMatrix::renormalized(axis_angle(random_unit(rng), theta));
    const double d = dist_so3(r);
    const double lhs = vex(pa(r.matrix())).squaredNorm();
    ASSERT_NEAR(lhs, std::pow(std::sin(theta), 2), 1e-12);
    ASSERT_NEAR(lhs, 4.0 * (1.0 - d) * d, 1e-12);
  }
}

TEST(Property, TraceOfPaTimesSkew) {
  std::mt19937_64 rng(102);
  for (int i = 0; i < 10000; ++i) {
    const Mat3 m = random_rot(rng).matrix() * uniform(rng, 0.1, 3.0) + skew(random_vec(rng));
    const Vec3 y = random_vec(rng, 2.0);
    const double lhs = -(pa(m) * skew(y)).trace();
    ASSERT_NEAR(lhs, 2.0 * vex(pa(m)).dot(y), 1e-11 * (1.0 + m.norm() * y.norm()));
  }
}

TEST(Property, RodriguesIdentities) {
  std::mt19937_64 rng(103);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 u = random_unit(rng);
    const double theta = uniform(rng, 0.0, 0.999 * M_PI);
    const Vec3 rho = std::tan(theta / 2.0) * u;
    const double n2 = rho.squaredNorm();
    const RotationMatrix r = rodriguez_map(rho);
    ASSERT_LT((r.matrix() - axis_angle(u, theta)).cwiseAbs().maxCoeff(), 1e-12);
    ASSERT_NEAR(dist_so3(r), n2 / (1.0 + n2), 1e-12);
    ASSERT_LT((vex(pa(r.matrix())) - 2.0 * rho / (1.0 + n2)).norm(), 1e-12);
    ASSERT_NEAR(r.matrix().trace(), (3.0 - n2) / (1.0 + n2), 1e-12);
  }
}

TEST(Property, DistanceInUnitInterval) {
  std::mt19937_64 rng(104);
  for (int i = 0; i < 10000; ++i) {
    const double d = dist_so3(random_rot(rng));
    ASSERT_GE(d, 0.0);
    ASSERT_LE(d, 1.0);
  }
  EXPECT_EQ(dist_so3(RotationMatrix()), 0.0);
  EXPECT_NEAR(dist_so3(RotationMatrix::renormalized(axis_angle(Vec3::UnitY(), M_PI))), 1.0,
              1e-15);
}

TEST(Property, GroupAxioms) {
  std::mt19937_64 rng(105);
  auto near = [](const Pose& a, const Pose& b) {
    return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
  };
  for (int i = 0; i < 5000; ++i) {
    const Pose a = random_pose(rng);
    const Pose b = random_pose(rng);
    const Pose c = random_pose(rng);
    ASSERT_LE(near(compose(compose(a, b), c), compose(a, compose(b, c))), 1e-12);
    ASSERT_LE(near(compose(a, inverse(a)), Pose::identity()), 1e-12);
    ASSERT_LE(near(compose(inverse(a), a), Pose::identity()), 1e-12);
    ASSERT_LE(near(compose(a, Pose::identity()), a), 0.0);
    ASSERT_LE((compose(a, b).matrix() - a.matrix() * b.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Property, TransformIsABijection) {
  std::mt19937_64 rng(106);
  for (int i = 0; i < 10000; ++i) {
    PpfChannelConfig cfg;
    cfg.xi0 = uniform(rng, 0.05, 10.0);
    cfg.xi_inf = uniform(rng, 0.01, 0.9) * cfg.xi0;
    cfg.ell = uniform(rng, 0.1, 5.0);
    cfg.delta_bar = uniform(rng, 0.2, 6.0);
    cfg.delta_under = uniform(rng, 0.2, 6.0);
    const PpfState st = ppf_eval(cfg, uniform(rng, 0.0, 10.0));
    const double r = uniform(rng, -0.95 * cfg.delta_under, 0.95 * cfg.delta_bar);
    const double e = r * st.xi;
    const double big_e = transform_error(e, st, cfg);
    ASSERT_NEAR(smooth_z(big_e, cfg), r, 1e-10 * (1.0 + std::abs(r)));
    // Zero of the map sits at the band midpoint.
    ASSERT_EQ(big_e > 0.0, r > 0.5 * (cfg.delta_bar - cfg.delta_under));
    ASSERT_GT(mu(e, st, cfg), 0.0);
  }
}

TEST(Property, WahbaWeightScaleInvariance) {
  std::mt19937_64 rng(107);
  for (int i = 0; i < 1000; ++i) {
    VectorPairs pairs;
    const RotationMatrix truth = random_rot(rng);
    for (int j = 0; j < 4; ++j) {
      const Vec3 v = random_unit(rng);
      pairs.inertial.push_back(v);
      pairs.body.push_back((truth.matrix().transpose() * v + random_vec(rng, 0.05)).normalized());
      pairs.weights.push_back(uniform(rng, 0.1, 2.0));
    }
    const RotationMatrix base = wahba_svd(pairs);
    VectorPairs scaled = pairs;
    const double c = uniform(rng, 1e-3, 1e3);
    for (double& w : scaled.weights) w *= c;
    ASSERT_LE((wahba_svd(scaled).matrix() - base.matrix()).cwiseAbs().maxCoeff(), 1e-12);
    ASSERT_NEAR(base.matrix().determinant(), 1.0, 1e-12);
  }
}

TEST(Property, NoisyReconstructionIsProperRotation) {
  std::mt19937_64 rng(108);
  const ScenarioConfig paper = paper_scenario();
  for (int i = 0; i < 2000; ++i) {
    const Pose truth = random_pose(rng);
    const BodyMeasurements meas = synthesize_measurements(
        truth, paper.refs, paper.measurement_bias, paper.measurement_noise, rng);
    const Pose y = reconstruct_pose(paper.refs, meas);
    ASSERT_LE(orthogonality_defect(y.r.matrix()), 1e-12);
    ASSERT_NEAR(y.r.matrix().determinant(), 1.0, 1e-12);
  }
}

TEST(Property, LandmarkNoiseAveragesOut) {
  std::mt19937_64 rng(109);
  const ScenarioConfig paper = paper_scenario();
  const double sigma = 0.3;
  MeasurementNoise noise;
  noise.landmarks = {sigma};
  const Pose truth = random_pose(rng);
  const int n = 10000;
  Vec3 mean = Vec3::Zero();
  for (int i = 0; i < n; ++i) {
    const BodyMeasurements meas =
        synthesize_measurements(truth, paper.refs, MeasurementBias{}, noise, rng);
    mean += reconstruct_pose(paper.refs, meas).p / n;
  }
  const double tol = 3.0 * sigma / std::sqrt(static_cast<double>(n));
  EXPECT_LT((mean - truth.p).cwiseAbs().maxCoeff(), tol);
}

TEST(Property, NoiseFreeReconstructionIsExact) {
  std::mt19937_64 rng(110);
  const ScenarioConfig paper = paper_scenario();
  for (int i = 0; i < 100; ++i) {
    const Pose truth = random_pose(rng);
    const BodyMeasurements meas =
        synthesize_measurements(truth, paper.refs, MeasurementBias{}, MeasurementNoise{}, rng);
    const Pose y = reconstruct_pose(paper.refs, meas);
    ASSERT_LE((y.r.matrix() - truth.r.matrix()).cwiseAbs().maxCoeff(), 1e-9);
    ASSERT_LE((y.p - truth.p).norm(), 1e-9);
  }
}

TEST(Property, ErrorStateIsZeroOnlyAtTruth) {
  std::mt19937_64 rng(111);
  for (int i = 0; i < 5000; ++i) {
    const Pose y = random_pose(rng);
    EXPECT_LE(error_state(y, y).e.cwiseAbs().maxCoeff(), 1e-12);
    const Pose other = random_pose(rng);
    const ErrorBundle err = error_state(other, y);
    ASSERT_GE(err.e[0], 0.0);
    ASSERT_LE(err.e[0], 1.0);
    ASSERT_GT(err.e.cwiseAbs().maxCoeff(), 0.0);
  }
}

#include "ppfpose/recon.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "ppfpose/errors.hpp"

namespace ppfpose {

namespace {

constexpr double kCollinearTolerance = 1e-6;
constexpr double kDegenerateSingularValue = 1e-9;

Vec3 unit(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ZeroVector("cannot normalize a zero vector");
  return v / n;
}

Vec3 sample(double stddev, std::mt19937_64& rng) {
  if (stddev == 0.0) return Vec3::Zero();
  std::normal_distribution<double> dist(0.0, stddev);
  Vec3 w;
  for (int k = 0; k < 3; ++k) w[k] = dist(rng);
  return w;
}

template <typename T>
T at_or(const std::vector<T>& v, std::size_t j, const T& fallback) {
  return j < v.size() ? v[j] : fallback;
}

}  // namespace

double ReferenceSet::vector_weight(std::size_t j) const {
  return vector_weights.empty() ? 1.0 : vector_weights.at(j);
}

double ReferenceSet::landmark_weight(std::size_t j) const {
  return landmark_weights.empty() ? 1.0 : landmark_weights.at(j);
}

void ReferenceSet::validate() const {
  if (landmarks.empty()) throw InvalidInput("reference set needs at least one landmark");
  if (inertial_vectors.size() < 2) {
    throw InvalidInput("reference set needs at least two direction vectors");
  }
  if (!vector_weights.empty() && vector_weights.size() != inertial_vectors.size()) {
    throw InvalidInput("vector weight count does not match vector count");
  }
  if (!landmark_weights.empty() && landmark_weights.size() != landmarks.size()) {
    throw InvalidInput("landmark weight count does not match landmark count");
  }
  for (double w : vector_weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidInput("vector weights must be positive");
  }
  for (double w : landmark_weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidInput("landmark weights must be positive");
  }
  std::vector<Vec3> dirs;
  for (const auto& v : inertial_vectors) dirs.push_back(unit(v));
  if (dirs.size() == 2) dirs.push_back(dirs[0].cross(dirs[1]));
  // Three directions spanning R^3 are needed; pairwise non-collinearity of
  // the (possibly augmented) set is the observable check.
  for (std::size_t a = 0; a < dirs.size(); ++a) {
    for (std::size_t b = a + 1; b < dirs.size(); ++b) {
      if (dirs[a].cross(dirs[b]).norm() <= kCollinearTolerance) {
        throw CollinearInputs("reference vectors " + std::to_string(a + 1) + " and " +
                              std::to_string(b + 1) + " are collinear");
      }
    }
  }
}

BodyMeasurements synthesize_measurements(const Pose& truth, const ReferenceSet& refs,
                                         const MeasurementBias& bias,
                                         const MeasurementNoise& noise,
                                         std::mt19937_64& rng) {
  if (!bias.vectors.empty() && bias.vectors.size() != refs.inertial_vectors.size()) {
    throw InvalidInput("vector bias count does not match vector count");
  }
  if (!bias.landmarks.empty() && bias.landmarks.size() != refs.landmarks.size()) {
    throw InvalidInput("landmark bias count does not match landmark count");
  }
  if (!noise.vectors.empty() && noise.vectors.size() != refs.inertial_vectors.size()) {
    throw InvalidInput("vector noise count does not match vector count");
  }
  if (!noise.landmarks.empty() && noise.landmarks.size() != refs.landmarks.size()) {
    throw InvalidInput("landmark noise count does not match landmark count");
  }
  for (double s : noise.vectors) {
    if (!(s >= 0.0)) throw InvalidInput("noise STD must be non-negative");
  }
  for (double s : noise.landmarks) {
    if (!(s >= 0.0)) throw InvalidInput("noise STD must be non-negative");
  }

  const Vec3 zero = Vec3::Zero();
  const RotationMatrix rt = truth.r.transpose();
  BodyMeasurements out;
  for (std::size_t j = 0; j < refs.inertial_vectors.size(); ++j) {
    const Vec3 b = at_or(bias.vectors, j, zero);
    const Vec3 w = sample(at_or(noise.vectors, j, 0.0), rng);
    out.body_vectors.push_back(rt * refs.inertial_vectors[j] + b + w);
    out.vector_bias.push_back(b);
    out.vector_noise.push_back(w);
  }
  for (std::size_t j = 0; j < refs.landmarks.size(); ++j) {
    const Vec3 b = at_or(bias.landmarks, j, zero);
    const Vec3 w = sample(at_or(noise.landmarks, j, 0.0), rng);
    out.body_landmarks.push_back(rt * (refs.landmarks[j] - truth.p) + b + w);
    out.landmark_bias.push_back(b);
    out.landmark_noise.push_back(w);
  }
  return out;
}

VectorPairs make_pairs(const ReferenceSet& refs, const BodyMeasurements& meas) {
  if (meas.body_vectors.size() != refs.inertial_vectors.size()) {
    throw InvalidInput("body vector count does not match reference vector count");
  }
  VectorPairs pairs;
  pairs.inertial = refs.inertial_vectors;
  pairs.body = meas.body_vectors;
  for (std::size_t j = 0; j < refs.inertial_vectors.size(); ++j) {
    pairs.weights.push_back(refs.vector_weight(j));
  }
  return pairs;
}

VectorPairs augment_third_vector(VectorPairs pairs) {
  if (pairs.inertial.size() != 2 || pairs.body.size() != 2) {
    throw InvalidInput("cross-product augmentation needs exactly two vector pairs");
  }
  if (pairs.weights.empty()) pairs.weights = {1.0, 1.0};
  const Vec3 ci = unit(pairs.inertial[0]).cross(unit(pairs.inertial[1]));
  const Vec3 cb = unit(pairs.body[0]).cross(unit(pairs.body[1]));
  if (ci.norm() < kCollinearTolerance || cb.norm() < kCollinearTolerance) {
    throw CollinearInputs("the two direction vectors are collinear");
  }
  pairs.inertial.push_back(pairs.inertial[0].cross(pairs.inertial[1]));
  pairs.body.push_back(pairs.body[0].cross(pairs.body[1]));
  pairs.weights.push_back(std::min(pairs.weights[0], pairs.weights[1]));
  return pairs;
}

VectorPairs normalize_pairs(VectorPairs pairs) {
  for (auto& v : pairs.inertial) v = unit(v);
  for (auto& v : pairs.body) v = unit(v);
  return pairs;
}

RotationMatrix wahba_svd(const VectorPairs& pairs) {
  if (pairs.inertial.empty() || pairs.inertial.size() != pairs.body.size()) {
    throw InvalidInput("attitude solver needs matched, non-empty vector pairs");
  }
  Mat3 h = Mat3::Zero();
  for (std::size_t j = 0; j < pairs.inertial.size(); ++j) {
    const double w = pairs.weights.empty() ? 1.0 : pairs.weights.at(j);
    h += w * pairs.inertial[j] * pairs.body[j].transpose();
  }
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()[1] < kDegenerateSingularValue) {
    throw DegenerateGeometry("vector observations do not determine the attitude");
  }
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  d(2, 2) = u.determinant() * v.determinant();
  return RotationMatrix::renormalized(u * d * v.transpose());
}

Vec3 position_from_landmarks(const RotationMatrix& r_y, const ReferenceSet& refs,
                             const BodyMeasurements& meas) {
  if (refs.landmarks.empty()) throw InvalidInput("position needs at least one landmark");
  if (meas.body_landmarks.size() != refs.landmarks.size()) {
    throw InvalidInput("body landmark count does not match reference landmark count");
  }
  Vec3 acc = Vec3::Zero();
  double wsum = 0.0;
  for (std::size_t j = 0; j < refs.landmarks.size(); ++j) {
    const double k = refs.landmark_weight(j);
    acc += k * (refs.landmarks[j] - r_y * meas.body_landmarks[j]);
    wsum += k;
  }
  return acc / wsum;
}

Pose reconstruct_pose(const ReferenceSet& refs, const BodyMeasurements& meas) {
  if (refs.landmarks.empty()) throw InvalidInput("pose reconstruction needs a landmark");
  VectorPairs pairs = make_pairs(refs, meas);
  if (pairs.inertial.size() < 2) {
    throw InvalidInput("pose reconstruction needs at least two direction vectors");
  }
  if (pairs.inertial.size() == 2) pairs = augment_third_vector(std::move(pairs));
  pairs = normalize_pairs(std::move(pairs));
  Pose out;
  out.r = wahba_svd(pairs);
  out.p = position_from_landmarks(out.r, refs, meas);
  return out;
}

}  // namespace ppfpose

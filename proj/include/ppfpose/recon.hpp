#pragma once

#include <random>
#include <vector>

#include "ppfpose/liegroup.hpp"

namespace ppfpose {

/// Known inertial-frame references: direction vectors for attitude and
/// landmark positions for translation.
struct ReferenceSet {
  std::vector<Vec3> inertial_vectors;
  std::vector<Vec3> landmarks;
  std::vector<double> vector_weights;    ///< empty means all 1
  std::vector<double> landmark_weights;  ///< empty means all 1

  /// Checks list lengths, positive weights, at least one landmark and (after
  /// cross-product augmentation when there are two vectors) three pairwise
  /// non-collinear directions. Throws InvalidInput / CollinearInputs.
  void validate() const;

  double vector_weight(std::size_t j) const;
  double landmark_weight(std::size_t j) const;
};

/// Constant body-frame biases added to each measurement.
struct MeasurementBias {
  std::vector<Vec3> vectors;
  std::vector<Vec3> landmarks;
};

/// Per-measurement isotropic Gaussian noise standard deviations.
struct MeasurementNoise {
  std::vector<double> vectors;
  std::vector<double> landmarks;
};

struct BodyMeasurements {
  std::vector<Vec3> body_vectors;
  std::vector<Vec3> body_landmarks;
  // Diagnostics: the bias and noise realizations that went into each entry.
  std::vector<Vec3> vector_bias;
  std::vector<Vec3> vector_noise;
  std::vector<Vec3> landmark_bias;
  std::vector<Vec3> landmark_noise;
};

/// Matched inertial/body direction pairs fed to the attitude solver.
struct VectorPairs {
  std::vector<Vec3> inertial;
  std::vector<Vec3> body;
  std::vector<double> weights;
};

/// Body-frame measurements of the references seen from `truth`:
///   v_B = R^T v_I + b + w,   l_B = R^T (l_I - p) + b + w.
/// Noise is drawn per component (vectors first, then landmarks, in index
/// order); entries with zero STD consume no random numbers. Empty bias /
/// noise lists mean zero.
BodyMeasurements synthesize_measurements(const Pose& truth, const ReferenceSet& refs,
                                         const MeasurementBias& bias,
                                         const MeasurementNoise& noise,
                                         std::mt19937_64& rng);

/// Pairs the inertial references with their body measurements.
VectorPairs make_pairs(const ReferenceSet& refs, const BodyMeasurements& meas);

/// Appends v1 x v2 on both sides. Requires exactly two pairs; throws
/// CollinearInputs when the normalized cross product is shorter than 1e-6.
/// The appended weight is the smaller of the two input weights.
VectorPairs augment_third_vector(VectorPairs pairs);

/// Unit-normalizes every vector. Throws ZeroVector.
VectorPairs normalize_pairs(VectorPairs pairs);

/// Weighted attitude from unit direction pairs. With
/// H = sum_j w_j vI_j vB_j^T = U S V^T, returns U diag(1, 1, det U det V) V^T,
/// which minimizes sum_j w_j |vB_j - R^T vI_j|^2. Throws DegenerateGeometry
/// when the second singular value of H is below 1e-9.
RotationMatrix wahba_svd(const VectorPairs& pairs);

/// Weighted mean of l_I - R_y l_B over all landmarks.
Vec3 position_from_landmarks(const RotationMatrix& r_y, const ReferenceSet& refs,
                             const BodyMeasurements& meas);

/// Full reconstruction: augment (when two vectors), normalize, solve
/// attitude, then position.
Pose reconstruct_pose(const ReferenceSet& refs, const BodyMeasurements& meas);

}  // namespace ppfpose

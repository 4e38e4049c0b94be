#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppfpose/filter.hpp"
#include "ppfpose/recon.hpp"

namespace ppfpose {

/// Everything needed to reproduce one simulated run.
struct ScenarioConfig {
  std::string name = "paper";
  double duration = 15.0;
  double dt = 1e-3;
  std::uint64_t seed = 1;

  FilterGains gains;
  PpfConfig ppf{};
  EnvelopePolicy envelope = EnvelopePolicy::kClamp;
  SingularPolicy singular = SingularPolicy::kPerturb;
  IntegratorOptions integrator;

  ReferenceSet refs;
  MeasurementBias measurement_bias;
  MeasurementNoise measurement_noise;

  Vec6 velocity_bias = Vec6::Zero();  ///< [b_omega; b_v]
  double sigma_omega = 0.0;            ///< rad/s, per sample
  double sigma_v = 0.0;                ///< m/s, per sample

  Pose t0;
  Pose t_hat0;
  Vec6 b_hat0 = Vec6::Zero();

  /// Drop every noise source and the vector/landmark biases; velocity
  /// biases stay.
  bool noise_free = false;

  /// Throws ConfigError, including when an initial error channel is not
  /// strictly inside its initial envelope |e_i(0)| < xi_i(0).
  void validate() const;

  std::size_t step_count() const;  ///< floor(duration / dt)
  FilterOptions filter_options() const;
};

/// Field-by-field, bitwise on doubles.
bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

/// The built-in scenario: T(0) = I, the given T^(0) (re-orthonormalized),
/// k_w = 6, gamma = 1, delta = xi0 = [1.3 5 6 4], xi_inf = [0.07 .3 .3 .3],
/// ell = 4, two direction vectors plus one landmark, and the default biases
/// and noise levels.
ScenarioConfig paper_scenario();

/// Looks up a named scenario; throws ConfigError for unknown names.
ScenarioConfig named_scenario(const std::string& name);

struct RunRow {
  double t = 0.0;
  Vec3 euler_true = Vec3::Zero();
  Vec3 euler_hat = Vec3::Zero();
  Vec3 p_true = Vec3::Zero();
  Vec3 p_hat = Vec3::Zero();
  Vec4 e = Vec4::Zero();
  Vec4 xi = Vec4::Zero();
  double e_r = 0.0;
  Vec3 e_p = Vec3::Zero();
  Vec6 b_hat = Vec6::Zero();
  double lyapunov = 0.0;
  std::array<bool, 4> envelope{};  ///< envelope_holds per channel on the raw error
  std::array<bool, 4> clamped{};   ///< clamp engaged at the row's evaluation
};

enum class AbortKind { kNone, kEnvelopeViolation, kNearSingular, kDiverged };

struct RunRecord {
  std::vector<RunRow> rows;
  Vec4 sign0 = Vec4::Zero();
  std::size_t envelope_violations = 0;  ///< rows with any raw envelope flag false
  std::size_t clamp_events = 0;         ///< rows with any clamp engaged
  std::size_t post_clamp_violations = 0;
  std::size_t substeps = 0;
  std::size_t singular_escapes = 0;
  AbortKind abort = AbortKind::kNone;
  std::optional<std::size_t> abort_row;
  std::string abort_reason;
};

/// Body velocities of the reference trajectory.
Twist true_velocity(double t);

/// R+ = R exp(omega dt), p+ = p + R v dt.
Pose integrate_pose(const Pose& state, const Twist& y, double dt);

/// integrate_pose driven by true_velocity(t).
Pose integrate_truth(const Pose& state, double t, double dt);

/// Runs the full loop: truth, measurements, reconstruction, filter.
/// Deterministic for a given config. Strict-mode envelope violations and
/// unstable-set hits (with SingularPolicy::kThrow) end the run early; the
/// record keeps the rows produced so far and the abort reason.
RunRecord run_scenario(const ScenarioConfig& cfg);

enum class Execution { kSerial, kParallel };

/// Runs independent scenarios, one generator each. kParallel spreads them
/// over OpenMP threads; results are identical to kSerial.
std::vector<RunRecord> run_scenarios(std::span<const ScenarioConfig> cfgs,
                                     Execution exec = Execution::kParallel);

/// Mean of e over rows with t >= t_from.
Vec4 mean_error_since(const RunRecord& rec, double t_from);

}  // namespace ppfpose

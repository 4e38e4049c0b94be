#pragma once

#include <array>

#include "ppfpose/liegroup.hpp"
#include "ppfpose/ppf.hpp"

namespace ppfpose {

struct FilterGains {
  double k_w = 6.0;
  double gamma = 1.0;

  void validate() const;
};

struct FilterState {
  Pose t_hat;
  Vec6 b_hat = Vec6::Zero();  ///< [b_omega; b_v]
  double clock = 0.0;
};

/// Pose error of the estimate against a (reconstructed) pose:
/// R~ = R^ R_y^T, P~ = P^ - R~ P_y, e = [||R~||_I, P~].
struct ErrorBundle {
  RotationMatrix r_tilde;
  Vec3 p_tilde = Vec3::Zero();
  Vec4 e = Vec4::Zero();
  Vec3 vexpa = Vec3::Zero();  ///< vex(Pa(R~))
};

/// e_1 at or above 1 - kSingularGuard is treated as the unstable set.
inline constexpr double kSingularGuard = 1e-9;

/// Starting angle of the escape rotation applied to R^ on the unstable set.
inline constexpr double kSingularKick = 1e-6;

enum class SingularPolicy {
  kThrow,    ///< raise NearSingular
  kPerturb,  ///< rotate R^ off the unstable set and continue
};

/// Sub-stepping of one measurement interval. The measurement and velocity
/// inputs are held over the interval; each substep is an explicit
/// first-order geometric step evaluated at the substep's start. The substep
/// length is bounded so that the estimate rotates by at most `max_rotation`
/// rad and translates by at most `max_translation_fraction` times the
/// smallest position envelope. `max_substeps == 1` gives a single step of
/// length dt.
struct IntegratorOptions {
  int max_substeps = 10000;
  double max_rotation = 0.05;
  double max_translation_fraction = 0.05;
};

struct FilterOptions {
  FilterGains gains;
  PpfConfig ppf{};
  EnvelopePolicy envelope = EnvelopePolicy::kClamp;
  SingularPolicy singular = SingularPolicy::kPerturb;
  IntegratorOptions integrator;
};

/// What happened inside one filter_step.
struct StepReport {
  int substeps = 0;
  int clamped_evaluations = 0;
  int singular_escapes = 0;
};

ErrorBundle error_state(const Pose& t_hat, const Pose& t_y);

/// Correction W = [W_omega; W_v]:
///   W_omega = 2 (k_w mu1 E_R - x/4) / (1 - ||R~||_I) vex(Pa(R~))
///   W_v     = R^^T (k_w M E_P + [P~ - P^]x W_omega - X P~)
/// with x = xi1_dot/xi1 and X = diag(xi_dot/xi) of the position channels.
/// Throws NearSingular when ||R~||_I >= 1 - kSingularGuard.
Twist correction(const ErrorBundle& err, const TransformedError& te,
                 const std::array<PpfState, 4>& states, const FilterGains& gains,
                 const Pose& t_hat);

/// Bias estimator rate:
///   d/dt b^_omega = gamma (1/2 mu1 E_R R^^T vexpa + R^^T [P~ - P^]x M E_P)
///   d/dt b^_v     = gamma R^^T M E_P
Vec6 bias_dot(const ErrorBundle& err, const TransformedError& te, const FilterGains& gains,
              const RotationMatrix& r_hat, const Vec3& p_hat);

/// Estimated body velocity driving T^:
///   omega^ = omega_m - b^_omega - R^^T W_omega,   v^ = v_m - b^_v - W_v.
Twist estimated_velocity(const FilterState& state, const Twist& w, const Vec3& omega_m,
                         const Vec3& v_m);

/// Advances the filter over one measurement interval of length dt.
FilterState filter_step(const FilterState& state, const Pose& t_y, const Vec3& omega_m,
                        const Vec3& v_m, const FilterOptions& opts, double dt,
                        StepReport* report = nullptr);

/// V = 1/2 |E|^2 + 1/(2 gamma) |b~|^2.
double lyapunov(const TransformedError& te, const Vec6& b_tilde, const FilterGains& gains);

}  // namespace ppfpose

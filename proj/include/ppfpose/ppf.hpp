#pragma once

#include <array>
#include <cstddef>

#include "ppfpose/liegroup.hpp"

namespace ppfpose {

/// Envelope parameters of one error channel.
///
/// The envelope is xi(t) = (xi0 - xi_inf) exp(-ell t) + xi_inf and the
/// normalized error e / xi is confined to (-delta_under, delta_bar).
struct PpfChannelConfig {
  double xi0 = 1.0;
  double xi_inf = 0.1;
  double ell = 1.0;
  double delta_bar = 1.0;
  double delta_under = 1.0;

  /// Throws ConfigError when the invariants do not hold.
  void validate() const;
};

using PpfConfig = std::array<PpfChannelConfig, 4>;

struct PpfState {
  double xi = 0.0;
  double xi_dot = 0.0;
  double ratio = 0.0;  ///< xi_dot / xi
};

/// How an error sitting on or beyond the envelope boundary is handled.
enum class EnvelopePolicy {
  kClamp,   ///< pull e/xi back inside by a relative margin of 1e-6
  kStrict,  ///< throw EnvelopeViolation
};

/// Relative clamp margin, as a fraction of delta_bar.
inline constexpr double kClampMargin = 1e-6;

/// Beyond this magnitude smooth_z returns its asymptote.
inline constexpr double kSmoothZSaturation = 30.0;

PpfState ppf_eval(const PpfChannelConfig& cfg, double t);

/// e / xi after applying `policy`. `clamped`, if given, reports whether the
/// clamp moved the value. `channel` is only used in error messages.
double normalized_error(double e, const PpfState& st, const PpfChannelConfig& cfg,
                        EnvelopePolicy policy, bool* clamped = nullptr,
                        std::size_t channel = 0);

/// Constrained-to-unconstrained map: 1/2 ln((du + e/xi) / (db - e/xi)).
double transform_error(double e, const PpfState& st, const PpfChannelConfig& cfg,
                       EnvelopePolicy policy = EnvelopePolicy::kStrict,
                       std::size_t channel = 0);

/// Inverse map: Z(E) = (db e^E - du e^-E) / (e^E + e^-E), bounded in (-du, db).
double smooth_z(double big_e, const PpfChannelConfig& cfg);

/// dE/de: 1/(2 xi) (1/(du + e/xi) + 1/(db - e/xi)).
double mu(double e, const PpfState& st, const PpfChannelConfig& cfg,
          EnvelopePolicy policy = EnvelopePolicy::kStrict, std::size_t channel = 0);

/// Sign-dependent envelope test with delta = delta_under / delta_bar:
///   sign0 >= 0:  -delta xi < e < xi
///   sign0 <  0:  -xi < e < delta xi
bool envelope_holds(double e, const PpfState& st, const PpfChannelConfig& cfg,
                    double sign0);

/// Transformed error of the full 4-channel error vector.
struct TransformedError {
  double e_r = 0.0;
  Vec3 e_p = Vec3::Zero();
  double mu1 = 0.0;
  Vec3 m_diag = Vec3::Zero();
  std::array<bool, 4> clamped{};

  Vec4 stacked() const { return Vec4(e_r, e_p.x(), e_p.y(), e_p.z()); }
};

std::array<PpfState, 4> ppf_eval_all(const PpfConfig& cfg, double t);

TransformedError transform_all(const Vec4& e, const std::array<PpfState, 4>& states,
                               const PpfConfig& cfg, EnvelopePolicy policy);

}  // namespace ppfpose

#include "ppfpose/ppf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ppfpose/errors.hpp"

namespace ppfpose {

void PpfChannelConfig::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(xi0) || !finite(xi_inf) || !finite(ell) || !finite(delta_bar) ||
      !finite(delta_under)) {
    throw ConfigError("ppf: non-finite channel parameter");
  }
  if (!(xi_inf > 0.0) || !(xi0 > xi_inf)) throw ConfigError("ppf: need xi0 > xi_inf > 0");
  if (!(ell > 0.0)) throw ConfigError("ppf: need ell > 0");
  if (!(delta_under > 0.0) || !(delta_bar > 0.0)) {
    throw ConfigError("ppf: delta bounds must be positive");
  }
  if (delta_under > delta_bar) throw ConfigError("ppf: need delta_under <= delta_bar");
}

PpfState ppf_eval(const PpfChannelConfig& cfg, double t) {
  const double decay = std::exp(-cfg.ell * t);
  PpfState st;
  st.xi = (cfg.xi0 - cfg.xi_inf) * decay + cfg.xi_inf;
  st.xi_dot = -cfg.ell * (cfg.xi0 - cfg.xi_inf) * decay;
  st.ratio = st.xi_dot / st.xi;
  return st;
}

double normalized_error(double e, const PpfState& st, const PpfChannelConfig& cfg,
                        EnvelopePolicy policy, bool* clamped, std::size_t channel) {
  const double r = e / st.xi;
  if (clamped != nullptr) *clamped = false;
  const double eps = kClampMargin * cfg.delta_bar;
  if (policy == EnvelopePolicy::kStrict) {
    if (!(r > -cfg.delta_under && r < cfg.delta_bar)) {
      throw EnvelopeViolation("error channel " + std::to_string(channel + 1) +
                                  " left its envelope (e/xi = " + std::to_string(r) + ")",
                              channel);
    }
    return r;
  }
  const double lo = -cfg.delta_under + eps;
  const double hi = cfg.delta_bar - eps;
  if (std::isnan(r)) {
    throw EnvelopeViolation("error channel " + std::to_string(channel + 1) + " is NaN",
                            channel);
  }
  if (r < lo || r > hi) {
    if (clamped != nullptr) *clamped = true;
    return r < lo ? lo : hi;
  }
  return r;
}

double transform_error(double e, const PpfState& st, const PpfChannelConfig& cfg,
                       EnvelopePolicy policy, std::size_t channel) {
  const double r = normalized_error(e, st, cfg, policy, nullptr, channel);
  return 0.5 * std::log((cfg.delta_under + r) / (cfg.delta_bar - r));
}

double smooth_z(double big_e, const PpfChannelConfig& cfg) {
  if (big_e > kSmoothZSaturation) return cfg.delta_bar;
  if (big_e < -kSmoothZSaturation) return -cfg.delta_under;
  // Same map written as a shifted tanh, which stays monotone and inside the
  // bounds after rounding.
  const double mid = 0.5 * (cfg.delta_bar - cfg.delta_under);
  const double half = 0.5 * (cfg.delta_bar + cfg.delta_under);
  return std::clamp(mid + half * std::tanh(big_e), -cfg.delta_under, cfg.delta_bar);
}

double mu(double e, const PpfState& st, const PpfChannelConfig& cfg, EnvelopePolicy policy,
          std::size_t channel) {
  const double r = normalized_error(e, st, cfg, policy, nullptr, channel);
  return (1.0 / (2.0 * st.xi)) * (1.0 / (cfg.delta_under + r) + 1.0 / (cfg.delta_bar - r));
}

bool envelope_holds(double e, const PpfState& st, const PpfChannelConfig& cfg,
                    double sign0) {
  const double delta = cfg.delta_under / cfg.delta_bar;
  if (sign0 >= 0.0) return -delta * st.xi < e && e < st.xi;
  return -st.xi < e && e < delta * st.xi;
}

std::array<PpfState, 4> ppf_eval_all(const PpfConfig& cfg, double t) {
  std::array<PpfState, 4> out;
  for (std::size_t i = 0; i < 4; ++i) out[i] = ppf_eval(cfg[i], t);
  return out;
}

TransformedError transform_all(const Vec4& e, const std::array<PpfState, 4>& states,
                               const PpfConfig& cfg, EnvelopePolicy policy) {
  TransformedError te;
  Vec4 big_e;
  Vec4 gain;
  for (std::size_t i = 0; i < 4; ++i) {
    bool clamped = false;
    const double r = normalized_error(e[i], states[i], cfg[i], policy, &clamped, i);
    const auto& c = cfg[i];
    big_e[i] = 0.5 * std::log((c.delta_under + r) / (c.delta_bar - r));
    gain[i] = (1.0 / (2.0 * states[i].xi)) * (1.0 / (c.delta_under + r) + 1.0 / (c.delta_bar - r));
    te.clamped[i] = clamped;
  }
  te.e_r = big_e[0];
  te.e_p = big_e.tail<3>();
  te.mu1 = gain[0];
  te.m_diag = gain.tail<3>();
  return te;
}

}  // namespace ppfpose

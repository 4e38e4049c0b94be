#include "ppfpose/filter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ppfpose/errors.hpp"

namespace ppfpose {

void FilterGains::validate() const {
  if (!(k_w > 0.0) || !std::isfinite(k_w)) throw ConfigError("filter gain k_w must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("filter gain gamma must be positive");
  }
}

ErrorBundle error_state(const Pose& t_hat, const Pose& t_y) {
  ErrorBundle err;
  err.r_tilde = t_hat.r * t_y.r.transpose();
  err.p_tilde = t_hat.p - err.r_tilde * t_y.p;
  err.e << dist_so3(err.r_tilde), err.p_tilde;
  err.vexpa = vex(pa(err.r_tilde.matrix()));
  return err;
}

Twist correction(const ErrorBundle& err, const TransformedError& te,
                 const std::array<PpfState, 4>& states, const FilterGains& gains,
                 const Pose& t_hat) {
  const double e1 = err.e[0];
  if (e1 >= 1.0 - kSingularGuard) {
    throw NearSingular("attitude error is on the unstable set (||R~||_I = " +
                       std::to_string(e1) + ")");
  }
  const double x = states[0].ratio;
  const Vec3 big_x(states[1].ratio, states[2].ratio, states[3].ratio);
  const Vec3 m_ep = te.m_diag.cwiseProduct(te.e_p);

  Twist w;
  w.omega = 2.0 * (gains.k_w * te.mu1 * te.e_r - x / 4.0) / (1.0 - e1) * err.vexpa;
  const Vec3 lever = err.p_tilde - t_hat.p;
  w.v = t_hat.r.transpose() *
        (gains.k_w * m_ep + lever.cross(w.omega) - big_x.cwiseProduct(err.p_tilde));
  return w;
}

Vec6 bias_dot(const ErrorBundle& err, const TransformedError& te, const FilterGains& gains,
              const RotationMatrix& r_hat, const Vec3& p_hat) {
  const RotationMatrix rt = r_hat.transpose();
  const Vec3 m_ep = te.m_diag.cwiseProduct(te.e_p);
  const Vec3 lever = err.p_tilde - p_hat;
  Vec6 out;
  out.head<3>() =
      gains.gamma * (0.5 * te.mu1 * te.e_r * (rt * err.vexpa) + rt * lever.cross(m_ep));
  out.tail<3>() = gains.gamma * (rt * m_ep);
  return out;
}

Twist estimated_velocity(const FilterState& state, const Twist& w, const Vec3& omega_m,
                         const Vec3& v_m) {
  Twist out;
  out.omega = omega_m - state.b_hat.head<3>() - state.t_hat.r.transpose() * w.omega;
  out.v = v_m - state.b_hat.tail<3>() - w.v;
  return out;
}

namespace {

// Rotates R^ about the inertial axis of vex(Pa(R~)) (x axis when that is zero)
// with a doubling angle until ||R~||_I clears the guard.
int escape_unstable_set(FilterState& s, const Pose& t_y, ErrorBundle& err) {
  Vec3 axis = err.vexpa.norm() > 0.0 ? Vec3(err.vexpa.normalized()) : Vec3::UnitX();
  double angle = kSingularKick;
  int kicks = 0;
  while (err.e[0] >= 1.0 - kSingularGuard) {
    s.t_hat.r = so3_exp(angle * axis) * s.t_hat.r;
    err = error_state(s.t_hat, t_y);
    ++kicks;
    angle *= 2.0;
    if (kicks > 64) throw NearSingular("could not leave the unstable attitude set");
  }
  return kicks;
}

}  // namespace

FilterState filter_step(const FilterState& state, const Pose& t_y, const Vec3& omega_m,
                        const Vec3& v_m, const FilterOptions& opts, double dt,
                        StepReport* report) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("filter_step: dt must be positive");
  const int max_substeps = std::max(1, opts.integrator.max_substeps);

  FilterState s = state;
  StepReport rep;
  double tau = 0.0;
  bool done = false;
  while (!done) {
    ErrorBundle err = error_state(s.t_hat, t_y);
    if (err.e[0] >= 1.0 - kSingularGuard) {
      if (opts.singular == SingularPolicy::kThrow) {
        throw NearSingular("attitude error is on the unstable set at t = " +
                           std::to_string(state.clock + tau));
      }
      rep.singular_escapes += escape_unstable_set(s, t_y, err);
    }
    const auto states = ppf_eval_all(opts.ppf, state.clock + tau);
    const TransformedError te = transform_all(err.e, states, opts.ppf, opts.envelope);
    for (bool c : te.clamped) rep.clamped_evaluations += c ? 1 : 0;

    const Twist w = correction(err, te, states, opts.gains, s.t_hat);
    const Vec6 bd = bias_dot(err, te, opts.gains, s.t_hat.r, s.t_hat.p);
    const Twist vel = estimated_velocity(s, w, omega_m, v_m);

    double h = dt - tau;
    if (rep.substeps + 1 < max_substeps) {
      const double rot = vel.omega.norm();
      if (rot * h > opts.integrator.max_rotation) h = opts.integrator.max_rotation / rot;
      const double xi_p = std::min({states[1].xi, states[2].xi, states[3].xi});
      const double lin = vel.v.norm();
      const double lin_cap = opts.integrator.max_translation_fraction * xi_p;
      if (lin * h > lin_cap) h = lin_cap / lin;
    }
    if (tau + h >= dt * (1.0 - 1e-12)) {
      h = dt - tau;
      done = true;
    }

    s.t_hat.p = s.t_hat.p + s.t_hat.r * vel.v * h;
    s.t_hat.r = s.t_hat.r * so3_exp(vel.omega * h);
    s.b_hat = s.b_hat + bd * h;
    tau += h;
    ++rep.substeps;
    if (!s.t_hat.p.allFinite() || !s.b_hat.allFinite()) {
      throw Diverged("filter state became non-finite");
    }
  }
  s.clock = state.clock + dt;
  if (report != nullptr) *report = rep;
  return s;
}

double lyapunov(const TransformedError& te, const Vec6& b_tilde, const FilterGains& gains) {
  return 0.5 * te.stacked().squaredNorm() + b_tilde.squaredNorm() / (2.0 * gains.gamma);
}

}  // namespace ppfpose

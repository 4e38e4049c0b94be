#include "ppfpose/sim.hpp"

#include <cmath>
#include <exception>
#include <numbers>
#include <random>

#include "ppfpose/errors.hpp"

namespace ppfpose {

namespace {

bool non_negative(double x) { return x >= 0.0 && std::isfinite(x); }

Vec3 draw(double stddev, std::mt19937_64& rng) {
  if (stddev == 0.0) return Vec3::Zero();
  std::normal_distribution<double> dist(0.0, stddev);
  Vec3 w;
  for (int k = 0; k < 3; ++k) w[k] = dist(rng);
  return w;
}

}  // namespace

std::size_t ScenarioConfig::step_count() const {
  // The small slack keeps e.g. 15 / 0.001 from rounding down to 14999.
  return static_cast<std::size_t>(std::floor(duration / dt * (1.0 + 1e-12)));
}

FilterOptions ScenarioConfig::filter_options() const {
  FilterOptions o;
  o.gains = gains;
  o.ppf = ppf;
  o.envelope = envelope;
  o.singular = singular;
  o.integrator = integrator;
  return o;
}

void ScenarioConfig::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("duration must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (dt > duration) throw ConfigError("dt must not exceed the duration");
  gains.validate();
  for (const auto& c : ppf) c.validate();
  if (integrator.max_substeps < 1) throw ConfigError("integrator.max_substeps must be >= 1");
  if (!(integrator.max_rotation > 0.0) || !(integrator.max_translation_fraction > 0.0)) {
    throw ConfigError("integrator step bounds must be positive");
  }
  try {
    refs.validate();
  } catch (const Error& ex) {
    throw ConfigError(std::string("reference set: ") + ex.what());
  }
  const std::size_t nv = refs.inertial_vectors.size();
  const std::size_t nl = refs.landmarks.size();
  if (!measurement_bias.vectors.empty() && measurement_bias.vectors.size() != nv) {
    throw ConfigError("bias.vectors count does not match refs.vectors");
  }
  if (!measurement_bias.landmarks.empty() && measurement_bias.landmarks.size() != nl) {
    throw ConfigError("bias.landmarks count does not match refs.landmarks");
  }
  if (!measurement_noise.vectors.empty() && measurement_noise.vectors.size() != nv) {
    throw ConfigError("noise.vectors count does not match refs.vectors");
  }
  if (!measurement_noise.landmarks.empty() && measurement_noise.landmarks.size() != nl) {
    throw ConfigError("noise.landmarks count does not match refs.landmarks");
  }
  for (double s : measurement_noise.vectors) {
    if (!non_negative(s)) throw ConfigError("noise STDs must be non-negative");
  }
  for (double s : measurement_noise.landmarks) {
    if (!non_negative(s)) throw ConfigError("noise STDs must be non-negative");
  }
  if (!non_negative(sigma_omega) || !non_negative(sigma_v)) {
    throw ConfigError("velocity noise STDs must be non-negative");
  }
  if (!velocity_bias.allFinite() || !b_hat0.allFinite()) throw ConfigError("non-finite bias");

  const ErrorBundle err = error_state(t_hat0, t0);
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(std::abs(err.e[i]) < ppf[i].xi0)) {
      throw ConfigError("initial error channel " + std::to_string(i + 1) + " (" +
                        std::to_string(err.e[i]) + ") is not inside its initial envelope " +
                        std::to_string(ppf[i].xi0));
    }
  }
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  auto same_ppf = [](const PpfChannelConfig& x, const PpfChannelConfig& y) {
    return x.xi0 == y.xi0 && x.xi_inf == y.xi_inf && x.ell == y.ell &&
           x.delta_bar == y.delta_bar && x.delta_under == y.delta_under;
  };
  for (std::size_t i = 0; i < 4; ++i) {
    if (!same_ppf(a.ppf[i], b.ppf[i])) return false;
  }
  return a.name == b.name && a.duration == b.duration && a.dt == b.dt && a.seed == b.seed &&
         a.gains.k_w == b.gains.k_w && a.gains.gamma == b.gains.gamma &&
         a.envelope == b.envelope && a.singular == b.singular &&
         a.integrator.max_substeps == b.integrator.max_substeps &&
         a.integrator.max_rotation == b.integrator.max_rotation &&
         a.integrator.max_translation_fraction == b.integrator.max_translation_fraction &&
         a.refs.inertial_vectors == b.refs.inertial_vectors &&
         a.refs.landmarks == b.refs.landmarks && a.refs.vector_weights == b.refs.vector_weights &&
         a.refs.landmark_weights == b.refs.landmark_weights &&
         a.measurement_bias.vectors == b.measurement_bias.vectors &&
         a.measurement_bias.landmarks == b.measurement_bias.landmarks &&
         a.measurement_noise.vectors == b.measurement_noise.vectors &&
         a.measurement_noise.landmarks == b.measurement_noise.landmarks &&
         a.velocity_bias == b.velocity_bias && a.sigma_omega == b.sigma_omega &&
         a.sigma_v == b.sigma_v && a.t0 == b.t0 && a.t_hat0 == b.t_hat0 &&
         a.b_hat0 == b.b_hat0 && a.noise_free == b.noise_free;
}

ScenarioConfig paper_scenario() {
  ScenarioConfig c;
  c.name = "paper";
  c.duration = 15.0;
  c.dt = 1e-3;
  c.seed = 1;
  c.gains = FilterGains{6.0, 1.0};
  const std::array<double, 4> xi0{1.3, 5.0, 6.0, 4.0};
  const std::array<double, 4> xi_inf{0.07, 0.3, 0.3, 0.3};
  for (std::size_t i = 0; i < 4; ++i) {
    c.ppf[i] = PpfChannelConfig{xi0[i], xi_inf[i], 4.0, xi0[i], xi0[i]};
  }

  c.refs.inertial_vectors = {Vec3(1.0, -1.0, 1.0) / std::sqrt(3.0), Vec3(0.0, 0.0, 1.0)};
  c.refs.landmarks = {Vec3(0.5, std::sqrt(2.0), 1.0)};
  c.measurement_bias.vectors = {0.1 * Vec3(-1.0, 1.0, 0.5), 0.1 * Vec3(0.0, 0.0, 1.0)};
  c.measurement_bias.landmarks = {0.1 * Vec3(0.3, 0.2, -0.2)};
  c.measurement_noise.vectors = {0.1, 0.1};
  c.measurement_noise.landmarks = {0.3};

  c.velocity_bias << 0.1, -0.1, 0.1, 0.2, 0.5, 0.1;
  c.sigma_omega = 0.16;
  c.sigma_v = 0.25;

  c.t0 = Pose::identity();
  Mat3 r_hat0;
  r_hat0 << -0.8816, 0.2386, 0.4074,
             0.4498, 0.1625, 0.8782,
             0.1433, 0.9574, -0.2505;
  c.t_hat0.r = RotationMatrix::renormalized(r_hat0);
  c.t_hat0.p = Vec3(-4.0, 5.0, 3.0);
  c.b_hat0 = Vec6::Zero();
  return c;
}

ScenarioConfig named_scenario(const std::string& name) {
  if (name == "paper") return paper_scenario();
  throw ConfigError("unknown scenario '" + name + "'");
}

Twist true_velocity(double t) {
  constexpr double pi = std::numbers::pi;
  Twist y;
  y.omega = 0.8 * Vec3(0.6 * std::sin(0.4 * t), std::cos(0.6 * t),
                       0.7 * std::sin(0.3 * t + pi / 5.0));
  y.v = 0.3 * Vec3(0.4 * std::cos(0.5 * t), std::sin(0.2 * t),
                   0.2 * std::sin(0.4 * t + pi / 3.0));
  return y;
}

Pose integrate_truth(const Pose& state, double t, double dt) {
  return integrate_pose(state, true_velocity(t), dt);
}

Pose integrate_pose(const Pose& state, const Twist& y, double dt) {
  Pose next;
  next.p = state.p + state.r * y.v * dt;
  next.r = state.r * so3_exp(y.omega * dt);
  return next;
}

RunRecord run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();

  MeasurementBias bias = cfg.measurement_bias;
  MeasurementNoise noise = cfg.measurement_noise;
  double sigma_omega = cfg.sigma_omega;
  double sigma_v = cfg.sigma_v;
  if (cfg.noise_free) {
    bias = MeasurementBias{};
    noise = MeasurementNoise{};
    sigma_omega = 0.0;
    sigma_v = 0.0;
  }

  const FilterOptions opts = cfg.filter_options();
  std::mt19937_64 rng(cfg.seed);
  FilterState st{cfg.t_hat0, cfg.b_hat0, 0.0};
  Pose truth = cfg.t0;
  const std::size_t n = cfg.step_count();

  RunRecord rec;
  rec.rows.reserve(n + 1);
  auto abort_with = [&](AbortKind kind, std::size_t row, const char* what) {
    rec.abort = kind;
    rec.abort_row = row;
    rec.abort_reason = what;
  };

  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    const BodyMeasurements meas = synthesize_measurements(truth, cfg.refs, bias, noise, rng);
    const Pose t_y = reconstruct_pose(cfg.refs, meas);
    const ErrorBundle err = error_state(st.t_hat, t_y);
    const auto env = ppf_eval_all(cfg.ppf, st.clock);
    if (k == 0) {
      for (std::size_t i = 0; i < 4; ++i) rec.sign0[i] = err.e[i] >= 0.0 ? 1.0 : -1.0;
    }

    RunRow row;
    row.t = t;
    row.euler_true = euler_zyx(truth.r);
    row.euler_hat = euler_zyx(st.t_hat.r);
    row.p_true = truth.p;
    row.p_hat = st.t_hat.p;
    row.e = err.e;
    row.b_hat = st.b_hat;
    bool any_violation = false;
    bool any_post = false;
    for (std::size_t i = 0; i < 4; ++i) {
      row.xi[i] = env[i].xi;
      row.envelope[i] = envelope_holds(err.e[i], env[i], cfg.ppf[i], rec.sign0[i]);
      any_violation = any_violation || !row.envelope[i];
      bool inside = false;
      try {
        const double r = normalized_error(err.e[i], env[i], cfg.ppf[i], EnvelopePolicy::kClamp);
        inside = r > -cfg.ppf[i].delta_under && r < cfg.ppf[i].delta_bar;
      } catch (const EnvelopeViolation&) {
        inside = false;
      }
      any_post = any_post || !inside;
    }

    TransformedError te;
    try {
      te = transform_all(err.e, env, cfg.ppf, cfg.envelope);
    } catch (const EnvelopeViolation& ex) {
      rec.rows.push_back(row);
      if (any_violation) ++rec.envelope_violations;
      abort_with(AbortKind::kEnvelopeViolation, k, ex.what());
      return rec;
    }
    row.e_r = te.e_r;
    row.e_p = te.e_p;
    row.clamped = te.clamped;
    row.lyapunov = lyapunov(te, cfg.velocity_bias - st.b_hat, cfg.gains);
    if (any_violation) ++rec.envelope_violations;
    if (any_post) ++rec.post_clamp_violations;
    for (bool c : te.clamped) {
      if (c) {
        ++rec.clamp_events;
        break;
      }
    }
    rec.rows.push_back(row);
    if (k == n) break;

    const Twist y = true_velocity(t);
    const Vec3 omega_m = y.omega + cfg.velocity_bias.head<3>() + draw(sigma_omega, rng);
    const Vec3 v_m = y.v + cfg.velocity_bias.tail<3>() + draw(sigma_v, rng);
    StepReport rep;
    try {
      st = filter_step(st, t_y, omega_m, v_m, opts, cfg.dt, &rep);
    } catch (const EnvelopeViolation& ex) {
      abort_with(AbortKind::kEnvelopeViolation, k, ex.what());
      return rec;
    } catch (const NearSingular& ex) {
      abort_with(AbortKind::kNearSingular, k, ex.what());
      return rec;
    } catch (const Diverged& ex) {
      abort_with(AbortKind::kDiverged, k, ex.what());
      return rec;
    }
    rec.substeps += static_cast<std::size_t>(rep.substeps);
    rec.singular_escapes += static_cast<std::size_t>(rep.singular_escapes);
    truth = integrate_truth(truth, t, cfg.dt);
  }
  return rec;
}

std::vector<RunRecord> run_scenarios(std::span<const ScenarioConfig> cfgs, Execution exec) {
  std::vector<RunRecord> out(cfgs.size());
  if (exec == Execution::kSerial) {
    for (std::size_t i = 0; i < cfgs.size(); ++i) out[i] = run_scenario(cfgs[i]);
    return out;
  }
  std::vector<std::exception_ptr> errors(cfgs.size());
  const auto count = static_cast<std::ptrdiff_t>(cfgs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      out[i] = run_scenario(cfgs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

Vec4 mean_error_since(const RunRecord& rec, double t_from) {
  Vec4 acc = Vec4::Zero();
  std::size_t count = 0;
  for (const auto& row : rec.rows) {
    if (row.t >= t_from - 1e-9) {
      acc += row.e;
      ++count;
    }
  }
  return count == 0 ? acc : Vec4(acc / static_cast<double>(count));
}

}  // namespace ppfpose

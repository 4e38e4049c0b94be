#include "ppfpose/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Geometry>

#include "ppfpose/errors.hpp"

namespace ppfpose {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::size_t trial, std::uint64_t salt) {
  return std::mt19937_64(mix(mix(mix(seed) ^ trial) ^ salt));
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec3 gaussian3(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  const double x = n(rng);
  const double y = n(rng);
  const double z = n(rng);
  return Vec3(x, y, z);
}

using Residual = double (*)(std::uint64_t, std::size_t);

Residual residual_for(const std::string& suite) {
  if (suite == "lemma1") return &lemma1_residual;
  if (suite == "trace") return &trace_residual;
  if (suite == "transform") return &transform_residual;
  if (suite == "wahba") return &wahba_residual;
  if (suite == "lyapunov") return &lyapunov_residual;
  throw InvalidInput("unknown suite '" + suite + "'");
}

double sanitize(double r) { return std::isnan(r) ? kInf : r; }

}  // namespace

RotationMatrix random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q;
  do {
    q.coeffs() << n(rng), n(rng), n(rng), n(rng);
  } while (q.norm() < 1e-6);
  q.normalize();
  return RotationMatrix::renormalized(q.toRotationMatrix());
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"lemma1", "trace", "transform", "wahba",
                                                 "lyapunov"};
  return names;
}

std::size_t default_trials(const std::string& suite) {
  if (suite == "lemma1") return 100000;
  if (suite == "trace") return 10000;
  if (suite == "transform") return 10000;
  if (suite == "wahba") return 100;
  if (suite == "lyapunov") return 4;
  throw InvalidInput("unknown suite '" + suite + "'");
}

double lemma1_residual(std::uint64_t seed, std::size_t trial) {
  auto rng = trial_rng(seed, trial, 1);
  const RotationMatrix r = random_rotation(rng);
  const double d = dist_so3(r);
  const double lhs = vex(pa(r.matrix())).squaredNorm();
  return std::abs(lhs - 4.0 * (1.0 - d) * d) / 1e-10;
}

double trace_residual(std::uint64_t seed, std::size_t trial) {
  auto rng = trial_rng(seed, trial, 2);
  const double sa = std::pow(10.0, uniform(rng, -2.0, 2.0));
  const double sb = std::pow(10.0, uniform(rng, -2.0, 2.0));
  Mat3 a;
  for (int c = 0; c < 3; ++c) a.col(c) = gaussian3(rng, sa);
  const Vec3 beta = gaussian3(rng, sb);
  const double lhs = (a * skew(beta)).trace();
  const double rhs = -2.0 * vex(pa(a)).dot(beta);
  return std::abs(lhs - rhs) / (1e-10 * (1.0 + a.norm() * beta.norm()));
}

double transform_residual(std::uint64_t seed, std::size_t trial) {
  auto rng = trial_rng(seed, trial, 3);
  PpfChannelConfig cfg;
  cfg.xi0 = uniform(rng, 0.05, 10.0);
  cfg.xi_inf = 0.5 * cfg.xi0;
  cfg.ell = 1.0;
  cfg.delta_bar = cfg.delta_under = uniform(rng, 0.2, 6.0);
  const PpfState st = ppf_eval(cfg, 0.0);
  const double e = uniform(rng, -0.95, 0.95) * cfg.delta_bar * st.xi;

  const double big_e = transform_error(e, st, cfg);
  const double back = st.xi * smooth_z(big_e, cfg);
  const double round_trip = std::abs(back - e) / 1e-10;

  const double h = 1e-6 * st.xi * cfg.delta_bar;
  const double fd = (transform_error(e + h, st, cfg) - transform_error(e - h, st, cfg)) / (2 * h);
  const double m = mu(e, st, cfg);
  const double slope = std::abs(fd - m) / std::abs(m) / 1e-5;
  return std::max(round_trip, slope);
}

double wahba_residual(std::uint64_t seed, std::size_t trial) {
  auto rng = trial_rng(seed, trial, 4);
  const ScenarioConfig paper = paper_scenario();
  Pose truth;
  truth.r = random_rotation(rng);
  truth.p = gaussian3(rng, 5.0);
  std::mt19937_64 unused(0);
  try {
    const BodyMeasurements meas =
        synthesize_measurements(truth, paper.refs, {}, {}, unused);
    const Pose y = reconstruct_pose(paper.refs, meas);
    const double rot = (y.r.matrix() - truth.r.matrix()).norm() / 1e-9;
    const double pose = (y.matrix() - truth.matrix()).norm() / 1e-9;
    return std::max(rot, pose);
  } catch (const Error&) {
    return kInf;
  }
}

double lyapunov_residual(std::uint64_t seed, std::size_t trial) {
  ScenarioConfig cfg = paper_scenario();
  cfg.noise_free = true;
  if (trial > 0) {
    auto rng = trial_rng(seed, trial, 5);
    do {
      cfg.t_hat0.r = random_rotation(rng);
    } while (dist_so3(cfg.t_hat0.r) > 0.95);
    for (int i = 0; i < 3; ++i) {
      const double bound = 0.8 * cfg.ppf[static_cast<std::size_t>(i) + 1].xi0;
      cfg.t_hat0.p[i] = uniform(rng, -bound, bound);
    }
  }
  try {
    const RunRecord rec = run_scenario(cfg);
    if (rec.abort != AbortKind::kNone) return kInf;
    double worst = 0.0;
    for (std::size_t k = 1; k < rec.rows.size(); ++k) {
      worst = std::max(worst, rec.rows[k].lyapunov - rec.rows[k - 1].lyapunov);
    }
    return sanitize(worst / 1e-6);
  } catch (const Error&) {
    return kInf;
  }
}

SuiteResult run_suite(const std::string& suite, std::size_t trials, std::uint64_t seed,
                      Execution exec) {
  const Residual fn = residual_for(suite);
  const auto start = std::chrono::steady_clock::now();
  std::size_t failures = 0;
  double worst = 0.0;
  const auto n = static_cast<std::ptrdiff_t>(trials);
  if (exec == Execution::kSerial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const double r = sanitize(fn(seed, static_cast<std::size_t>(i)));
      if (!(r <= 1.0)) ++failures;
      worst = std::max(worst, r);
    }
  } else {
    const int chunk = trials >= 1000 ? 64 : 1;
#pragma omp parallel for schedule(dynamic, chunk) reduction(+ : failures) reduction(max : worst)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const double r = sanitize(fn(seed, static_cast<std::size_t>(i)));
      if (!(r <= 1.0)) ++failures;
      worst = std::max(worst, r);
    }
  }
  SuiteResult out;
  out.name = suite;
  out.trials = trials;
  out.failures = failures;
  out.worst = worst;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace ppfpose

#include "ppfpose/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "ppfpose/errors.hpp"

namespace ppfpose {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, const std::string& key) {
  double x = 0.0;
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x)) {
    throw ConfigError(key + ": '" + tok + "' is not a finite number");
  }
  return x;
}

std::vector<double> parse_list(const std::string& value, const std::string& key) {
  std::vector<double> out;
  for (const auto& tok : split_ws(value)) out.push_back(parse_double(tok, key));
  return out;
}

std::vector<double> parse_fixed(const std::string& value, const std::string& key,
                                std::size_t n) {
  auto xs = parse_list(value, key);
  if (xs.size() != n) {
    throw ConfigError(key + ": expected " + std::to_string(n) + " numbers, got " +
                      std::to_string(xs.size()));
  }
  return xs;
}

double parse_scalar(const std::string& value, const std::string& key) {
  return parse_fixed(value, key, 1)[0];
}

Vec3 parse_vec3(const std::string& value, const std::string& key) {
  const auto xs = parse_fixed(value, key, 3);
  return Vec3(xs[0], xs[1], xs[2]);
}

std::vector<Vec3> parse_vec3_list(const std::string& value, const std::string& key) {
  std::vector<Vec3> out;
  if (trim(value).empty()) return out;
  std::istringstream in(value);
  for (std::string group; std::getline(in, group, ';');) out.push_back(parse_vec3(group, key));
  return out;
}

RotationMatrix parse_rotation(const std::string& value, const std::string& key) {
  const auto xs = parse_fixed(value, key, 9);
  Mat3 m;
  m << xs[0], xs[1], xs[2], xs[3], xs[4], xs[5], xs[6], xs[7], xs[8];
  if (!(m.determinant() > 0.0)) throw ConfigError(key + ": matrix is not a proper rotation");
  return RotationMatrix::renormalized(m);
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError(key + ": expected true or false");
}

std::string fmt_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ' ';
    out += format_number(xs[i]);
  }
  return out;
}

template <typename Derived>
std::string fmt_vec(const Eigen::MatrixBase<Derived>& v) {
  std::vector<double> xs(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) xs[i] = v(i);
  return fmt_list(xs);
}

std::string fmt_vec3_list(const std::vector<Vec3>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i > 0) out += "; ";
    out += fmt_vec(vs[i]);
  }
  return out;
}

std::string fmt_rotation(const RotationMatrix& r) {
  const Mat3& m = r.matrix();
  return fmt_list({m(0, 0), m(0, 1), m(0, 2), m(1, 0), m(1, 1), m(1, 2), m(2, 0), m(2, 1),
                   m(2, 2)});
}

using Getter = std::function<std::string(const ScenarioConfig&)>;
using Setter = std::function<void(ScenarioConfig&, const std::string&, const std::string&)>;

struct Field {
  std::string key;
  Getter get;
  Setter set;
};

Field ppf_field(const std::string& name, double PpfChannelConfig::*member) {
  return {"ppf." + name,
          [member](const ScenarioConfig& c) {
            return fmt_list({c.ppf[0].*member, c.ppf[1].*member, c.ppf[2].*member,
                             c.ppf[3].*member});
          },
          [member](ScenarioConfig& c, const std::string& v, const std::string& k) {
            const auto xs = parse_fixed(v, k, 4);
            for (std::size_t i = 0; i < 4; ++i) c.ppf[i].*member = xs[i];
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"scenario.name", [](const ScenarioConfig& c) { return c.name; },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         if (v.empty() || v.find_first_of(" \t#") != std::string::npos) {
           throw ConfigError(k + ": expected a single word");
         }
         c.name = v;
       }},
      {"scenario.duration", [](const ScenarioConfig& c) { return format_number(c.duration); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.duration = parse_scalar(v, k);
       }},
      {"scenario.dt", [](const ScenarioConfig& c) { return format_number(c.dt); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.dt = parse_scalar(v, k);
       }},
      {"scenario.seed", [](const ScenarioConfig& c) { return std::to_string(c.seed); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         std::uint64_t s = 0;
         const auto* end = v.data() + v.size();
         const auto [ptr, ec] = std::from_chars(v.data(), end, s);
         if (ec != std::errc() || ptr != end) throw ConfigError(k + ": expected an unsigned integer");
         c.seed = s;
       }},
      {"scenario.noise_free",
       [](const ScenarioConfig& c) { return std::string(c.noise_free ? "true" : "false"); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.noise_free = parse_bool(v, k);
       }},

      {"filter.k_w", [](const ScenarioConfig& c) { return format_number(c.gains.k_w); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.gains.k_w = parse_scalar(v, k);
       }},
      {"filter.gamma", [](const ScenarioConfig& c) { return format_number(c.gains.gamma); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.gains.gamma = parse_scalar(v, k);
       }},
      {"filter.envelope",
       [](const ScenarioConfig& c) {
         return std::string(c.envelope == EnvelopePolicy::kStrict ? "strict" : "clamp");
       },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         if (v == "strict") {
           c.envelope = EnvelopePolicy::kStrict;
         } else if (v == "clamp") {
           c.envelope = EnvelopePolicy::kClamp;
         } else {
           throw ConfigError(k + ": expected clamp or strict");
         }
       }},
      {"filter.singular",
       [](const ScenarioConfig& c) {
         return std::string(c.singular == SingularPolicy::kThrow ? "throw" : "perturb");
       },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         if (v == "throw") {
           c.singular = SingularPolicy::kThrow;
         } else if (v == "perturb") {
           c.singular = SingularPolicy::kPerturb;
         } else {
           throw ConfigError(k + ": expected perturb or throw");
         }
       }},

      {"integrator.max_substeps",
       [](const ScenarioConfig& c) { return std::to_string(c.integrator.max_substeps); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         int n = 0;
         const auto* end = v.data() + v.size();
         const auto [ptr, ec] = std::from_chars(v.data(), end, n);
         if (ec != std::errc() || ptr != end) throw ConfigError(k + ": expected an integer");
         c.integrator.max_substeps = n;
       }},
      {"integrator.max_rotation",
       [](const ScenarioConfig& c) { return format_number(c.integrator.max_rotation); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.integrator.max_rotation = parse_scalar(v, k);
       }},
      {"integrator.max_translation_fraction",
       [](const ScenarioConfig& c) {
         return format_number(c.integrator.max_translation_fraction);
       },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.integrator.max_translation_fraction = parse_scalar(v, k);
       }},

      ppf_field("xi0", &PpfChannelConfig::xi0),
      ppf_field("xi_inf", &PpfChannelConfig::xi_inf),
      ppf_field("ell", &PpfChannelConfig::ell),
      ppf_field("delta_bar", &PpfChannelConfig::delta_bar),
      ppf_field("delta_under", &PpfChannelConfig::delta_under),

      {"refs.vectors", [](const ScenarioConfig& c) { return fmt_vec3_list(c.refs.inertial_vectors); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.refs.inertial_vectors = parse_vec3_list(v, k);
       }},
      {"refs.vector_weights", [](const ScenarioConfig& c) { return fmt_list(c.refs.vector_weights); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.refs.vector_weights = parse_list(v, k);
       }},
      {"refs.landmarks", [](const ScenarioConfig& c) { return fmt_vec3_list(c.refs.landmarks); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.refs.landmarks = parse_vec3_list(v, k);
       }},
      {"refs.landmark_weights",
       [](const ScenarioConfig& c) { return fmt_list(c.refs.landmark_weights); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.refs.landmark_weights = parse_list(v, k);
       }},

      {"bias.vectors",
       [](const ScenarioConfig& c) { return fmt_vec3_list(c.measurement_bias.vectors); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.measurement_bias.vectors = parse_vec3_list(v, k);
       }},
      {"bias.landmarks",
       [](const ScenarioConfig& c) { return fmt_vec3_list(c.measurement_bias.landmarks); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.measurement_bias.landmarks = parse_vec3_list(v, k);
       }},
      {"bias.omega", [](const ScenarioConfig& c) { return fmt_vec(c.velocity_bias.head<3>()); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.velocity_bias.head<3>() = parse_vec3(v, k);
       }},
      {"bias.v", [](const ScenarioConfig& c) { return fmt_vec(c.velocity_bias.tail<3>()); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.velocity_bias.tail<3>() = parse_vec3(v, k);
       }},

      {"noise.vectors", [](const ScenarioConfig& c) { return fmt_list(c.measurement_noise.vectors); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.measurement_noise.vectors = parse_list(v, k);
       }},
      {"noise.landmarks",
       [](const ScenarioConfig& c) { return fmt_list(c.measurement_noise.landmarks); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.measurement_noise.landmarks = parse_list(v, k);
       }},
      {"noise.omega", [](const ScenarioConfig& c) { return format_number(c.sigma_omega); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.sigma_omega = parse_scalar(v, k);
       }},
      {"noise.v", [](const ScenarioConfig& c) { return format_number(c.sigma_v); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.sigma_v = parse_scalar(v, k);
       }},

      {"truth.r", [](const ScenarioConfig& c) { return fmt_rotation(c.t0.r); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.t0.r = parse_rotation(v, k);
       }},
      {"truth.p", [](const ScenarioConfig& c) { return fmt_vec(c.t0.p); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.t0.p = parse_vec3(v, k);
       }},
      {"estimate.r", [](const ScenarioConfig& c) { return fmt_rotation(c.t_hat0.r); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.t_hat0.r = parse_rotation(v, k);
       }},
      {"estimate.p", [](const ScenarioConfig& c) { return fmt_vec(c.t_hat0.p); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         c.t_hat0.p = parse_vec3(v, k);
       }},
      {"estimate.bias", [](const ScenarioConfig& c) { return fmt_vec(c.b_hat0); },
       [](ScenarioConfig& c, const std::string& v, const std::string& k) {
         const auto xs = parse_fixed(v, k, 6);
         for (int i = 0; i < 6; ++i) c.b_hat0[i] = xs[static_cast<std::size_t>(i)];
       }},
  };
  return table;
}

}  // namespace

std::string serialize_config(const ScenarioConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    const std::string head = f.key.substr(0, f.key.find('.'));
    if (head != section) {
      if (!section.empty()) out += '\n';
      section = head;
    }
    const std::string value = f.get(cfg);
    out += f.key;
    out += value.empty() ? " =" : " = ";
    out += value;
    out += '\n';
  }
  return out;
}

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
  std::map<std::string, const Field*> by_key;
  for (const auto& f : fields()) by_key.emplace(f.key, &f);

  ScenarioConfig cfg = paper_scenario();
  std::map<std::string, int> seen;
  std::istringstream in(text);
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = by_key.find(key);
    if (it == by_key.end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (const auto prev = seen.find(key); prev != seen.end()) {
      throw ConfigError(where + "duplicate key '" + key + "' (first on line " +
                        std::to_string(prev->second) + ")");
    }
    seen.emplace(key, lineno);
    try {
      it->second->set(cfg, value, key);
    } catch (const ConfigError& ex) {
      throw ConfigError(where + ex.what());
    }
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "t",
      "roll", "pitch", "yaw",
      "roll_hat", "pitch_hat", "yaw_hat",
      "px", "py", "pz",
      "px_hat", "py_hat", "pz_hat",
      "e1", "e2", "e3", "e4",
      "xi1", "xi2", "xi3", "xi4",
      "E_R", "E_P1", "E_P2", "E_P3",
      "bw_hat_x", "bw_hat_y", "bw_hat_z",
      "bv_hat_x", "bv_hat_y", "bv_hat_z",
      "lyapunov",
      "env1", "env2", "env3", "env4",
      "clamp1", "clamp2", "clamp3", "clamp4",
  };
  return cols;
}

std::string csv_header() {
  std::string out;
  for (const auto& c : csv_columns()) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

void write_csv(std::ostream& out, const RunRecord& rec) {
  out << csv_header() << '\n';
  std::string line;
  auto num = [&line](double x) {
    line += format_number(x);
    line += ',';
  };
  auto vec = [&num](const auto& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) num(v(i));
  };
  for (const auto& row : rec.rows) {
    line.clear();
    num(row.t);
    vec(row.euler_true);
    vec(row.euler_hat);
    vec(row.p_true);
    vec(row.p_hat);
    vec(row.e);
    vec(row.xi);
    num(row.e_r);
    vec(row.e_p);
    vec(row.b_hat);
    num(row.lyapunov);
    for (bool f : row.envelope) line += f ? "1," : "0,";
    for (bool f : row.clamped) line += f ? "1," : "0,";
    line.back() = '\n';
    out << line;
  }
}

Vec4 max_envelope_usage(const RunRecord& rec) {
  Vec4 worst = Vec4::Zero();
  for (const auto& row : rec.rows) {
    for (int i = 0; i < 4; ++i) worst[i] = std::max(worst[i], std::abs(row.e[i]) / row.xi[i]);
  }
  return worst;
}

void write_summary(std::ostream& out, const ScenarioConfig& cfg, const RunRecord& rec,
                   double wall_seconds) {
  const char* abort_name = "none";
  switch (rec.abort) {
    case AbortKind::kNone: break;
    case AbortKind::kEnvelopeViolation: abort_name = "envelope_violation"; break;
    case AbortKind::kNearSingular: abort_name = "near_singular"; break;
    case AbortKind::kDiverged: abort_name = "diverged"; break;
  }
  const Vec4 usage = max_envelope_usage(rec);
  out << "scenario: " << cfg.name << '\n';
  out << "seed: " << cfg.seed << '\n';
  out << "noise_free: " << (cfg.noise_free ? "true" : "false") << '\n';
  out << "envelope_policy: " << (cfg.envelope == EnvelopePolicy::kStrict ? "strict" : "clamp")
      << '\n';
  out << "dt: " << format_number(cfg.dt) << '\n';
  out << "duration: " << format_number(cfg.duration) << '\n';
  out << "csv_schema: " << kCsvSchemaVersion << '\n';
  out << "rows: " << rec.rows.size() << '\n';
  if (!rec.rows.empty()) {
    const auto& last = rec.rows.back();
    out << "final_t: " << format_number(last.t) << '\n';
    out << "final_e: " << fmt_vec(last.e) << '\n';
    out << "final_xi: " << fmt_vec(last.xi) << '\n';
    out << "final_b_hat: " << fmt_vec(last.b_hat) << '\n';
  }
  out << "max_envelope_usage: " << fmt_vec(usage) << '\n';
  out << "max_envelope_margin: " << format_number(1.0 - usage.maxCoeff()) << '\n';
  out << "envelope_violations: " << rec.envelope_violations << '\n';
  out << "clamped_rows: " << rec.clamp_events << '\n';
  out << "post_clamp_violations: " << rec.post_clamp_violations << '\n';
  out << "substeps: " << rec.substeps << '\n';
  out << "singular_escapes: " << rec.singular_escapes << '\n';
  out << "abort: " << abort_name << '\n';
  if (rec.abort_row) {
    out << "abort_row: " << *rec.abort_row << '\n';
    out << "abort_reason: " << rec.abort_reason << '\n';
  }
  out << "wall_seconds: " << format_number(wall_seconds) << '\n';
}

void write_plot_script(std::ostream& out, const std::string& csv_name) {
  out << "# gnuplot -c plot.gp   (csv schema " << kCsvSchemaVersion << ")\n"
      << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set terminal pngcairo size 1200,900\n"
      << "file = '" << csv_name << "'\n"
      << "set xlabel 't [s]'\n"
      << "set grid\n\n";

  out << "set output 'euler.png'\n"
      << "set multiplot layout 3,1 title 'Euler angles: true vs estimate'\n";
  for (const char* a : {"roll", "pitch", "yaw"}) {
    out << "set ylabel '" << a << " [rad]'\n"
        << "plot file using 't':'" << a << "' with lines lw 2, \\\n"
        << "     file using 't':'" << a << "_hat' with lines dt 2\n";
  }
  out << "unset multiplot\n\n";

  out << "set output 'position.png'\n"
      << "set multiplot layout 3,1 title 'Position: true vs estimate'\n";
  for (const char* a : {"px", "py", "pz"}) {
    out << "set ylabel '" << a << " [m]'\n"
        << "plot file using 't':'" << a << "' with lines lw 2, \\\n"
        << "     file using 't':'" << a << "_hat' with lines dt 2\n";
  }
  out << "unset multiplot\n\n";

  out << "set output 'envelope.png'\n"
      << "set multiplot layout 2,2 title 'Errors inside the performance envelopes'\n";
  for (int i = 1; i <= 4; ++i) {
    out << "set ylabel 'e" << i << "'\n"
        << "plot file using 't':'e" << i << "' with lines lw 2, \\\n"
        << "     file using 't':'xi" << i << "' with lines lc rgb 'red' title '+xi" << i
        << "', \\\n"
        << "     file using 't':(-column('xi" << i
        << "')) with lines lc rgb 'red' title '-xi" << i << "'\n";
  }
  out << "unset multiplot\n";
}

}  // namespace ppfpose

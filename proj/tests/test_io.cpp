#include <gtest/gtest.h>

#include <cstdlib>
#include <regex>
#include <set>
#include <sstream>

#include "ppfpose/errors.hpp"
#include "ppfpose/io.hpp"
#include "testing.hpp"

using namespace ppfpose;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string tok; std::getline(in, tok, sep);) out.push_back(tok);
  return out;
}

}  // namespace

TEST(Csv, GoldenHeader) {
  EXPECT_EQ(kCsvSchemaVersion, 1);
  EXPECT_EQ(csv_header(),
            "t,roll,pitch,yaw,roll_hat,pitch_hat,yaw_hat,px,py,pz,px_hat,py_hat,pz_hat,"
            "e1,e2,e3,e4,xi1,xi2,xi3,xi4,E_R,E_P1,E_P2,E_P3,"
            "bw_hat_x,bw_hat_y,bw_hat_z,bv_hat_x,bv_hat_y,bv_hat_z,lyapunov,"
            "env1,env2,env3,env4,clamp1,clamp2,clamp3,clamp4");
}

TEST(Csv, RowsRoundTripBitExact) {
  ScenarioConfig c = paper_scenario();
  c.duration = 0.05;
  const RunRecord rec = run_scenario(c);
  std::ostringstream out;
  write_csv(out, rec);
  const auto lines = split(out.str(), '\n');
  ASSERT_EQ(lines.size(), rec.rows.size() + 1);
  EXPECT_EQ(lines[0], csv_header());
  for (std::size_t k = 0; k < rec.rows.size(); ++k) {
    const auto f = split(lines[k + 1], ',');
    ASSERT_EQ(f.size(), csv_columns().size());
    const RunRow& row = rec.rows[k];
    EXPECT_EQ(std::strtod(f[0].c_str(), nullptr), row.t);
    EXPECT_EQ(std::strtod(f[8].c_str(), nullptr), row.p_true[1]);
    EXPECT_EQ(std::strtod(f[13].c_str(), nullptr), row.e[0]);
    EXPECT_EQ(std::strtod(f[20].c_str(), nullptr), row.xi[3]);
    EXPECT_EQ(std::strtod(f[31].c_str(), nullptr), row.lyapunov);
    EXPECT_EQ(f[32], row.envelope[0] ? "1" : "0");
    EXPECT_EQ(f[39], row.clamped[3] ? "1" : "0");
  }
}

TEST(FormatNumber, SeventeenDigits) {
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(-2.5e-300), "-2.5e-300");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.33333333333333331");
  std::mt19937_64 rng(61);
  for (int i = 0; i < 1000; ++i) {
    const double x = testutil::uniform(rng, -1.0, 1.0) * std::pow(10.0, testutil::uniform(rng, -20, 20));
    EXPECT_EQ(std::strtod(format_number(x).c_str(), nullptr), x);
  }
}

TEST(Config, PaperRoundTrip) {
  const ScenarioConfig paper = paper_scenario();
  const std::string text = serialize_config(paper);
  const ScenarioConfig back = parse_config(text);
  EXPECT_TRUE(back == paper);
  EXPECT_EQ(serialize_config(back), text);
}

TEST(Config, ModifiedRoundTrip) {
  ScenarioConfig c = paper_scenario();
  c.name = "variant";
  c.seed = 18446744073709551615ULL;
  c.noise_free = true;
  c.envelope = EnvelopePolicy::kStrict;
  c.singular = SingularPolicy::kThrow;
  c.integrator.max_substeps = 1;
  c.refs.vector_weights = {0.25, 3.0};
  c.refs.landmarks.push_back(Vec3(1.0 / 3.0, -7.0, 1e-12));
  c.refs.landmark_weights = {1.0, 2.0};
  c.measurement_bias.landmarks.push_back(Vec3(0.0, -0.25, 1e-3));
  c.measurement_noise.landmarks = {0.3, 0.1};
  c.t0.r = so3_exp(Vec3(0.1, 0.2, 0.3));
  c.t0.p = Vec3(0.1, 0.2, 0.3);
  c.t_hat0.r = so3_exp(Vec3(0.5, 0.1, -0.3));
  c.t_hat0.p = Vec3(0.1, 0.2, 0.3);
  c.b_hat0 << 1e-3, 2, 3, 4, 5, 6;
  const ScenarioConfig back = parse_config(serialize_config(c));
  EXPECT_TRUE(back == c);
  EXPECT_FALSE(back == paper_scenario());
}

TEST(Config, PartialFileKeepsDefaults) {
  const ScenarioConfig c = parse_config(
      "# tweaks\n"
      "\n"
      "scenario.seed = 7   # trailing comment\n"
      "filter.k_w = 3\n"
      "ppf.ell = 1 2 3 4\n"
      "noise.v = 0\n");
  ScenarioConfig expected = paper_scenario();
  expected.seed = 7;
  expected.gains.k_w = 3.0;
  for (std::size_t i = 0; i < 4; ++i) expected.ppf[i].ell = static_cast<double>(i + 1);
  expected.sigma_v = 0.0;
  EXPECT_TRUE(c == expected);
}

TEST(Config, EmptyListValue) {
  const ScenarioConfig c = parse_config("bias.vectors =\nnoise.vectors =\n");
  EXPECT_TRUE(c.measurement_bias.vectors.empty());
  EXPECT_TRUE(c.measurement_noise.vectors.empty());
}

TEST(Config, PrintedEstimateIsProjected) {
  const ScenarioConfig c = parse_config(
      "estimate.r = -0.8816 0.2386 0.4074 0.4498 0.1625 0.8782 0.1433 0.9574 -0.2505\n");
  EXPECT_EQ(c.t_hat0.r, paper_scenario().t_hat0.r);
}

TEST(Config, Rejections) {
  auto rejects = [](const std::string& text, const std::string& fragment) {
    try {
      parse_config(text, "cfg.txt");
    } catch (const ConfigError& ex) {
      EXPECT_NE(std::string(ex.what()).find(fragment), std::string::npos) << ex.what();
      return;
    }
    ADD_FAILURE() << "accepted: " << text;
  };
  rejects("filter.kw = 6\n", "unknown key 'filter.kw'");
  rejects("filter.k_w = 6\nfilter.k_w = 7\n", "duplicate key");
  rejects("filter.k_w = six\n", "not a finite number");
  rejects("filter.k_w = 1 2\n", "expected 1 numbers");
  rejects("filter.k_w = nan\n", "not a finite number");
  rejects("ppf.xi0 = 1 2 3\n", "expected 4 numbers");
  rejects("refs.vectors = 1 0 0; 0 1\n", "expected 3 numbers");
  rejects("filter.envelope = loose\n", "clamp or strict");
  rejects("scenario.noise_free = yes\n", "true or false");
  rejects("scenario.seed = -1\n", "unsigned integer");
  rejects("estimate.r = -1 0 0 0 -1 0 0 0 -1\n", "proper rotation");
  rejects("just some words\n", "cfg.txt:1");
}

TEST(Config, MissingFileNamesPath) {
  try {
    load_config("/nonexistent/dir/cfg.txt");
    FAIL();
  } catch (const ConfigError& ex) {
    EXPECT_NE(std::string(ex.what()).find("/nonexistent/dir/cfg.txt"), std::string::npos);
  }
}

TEST(Summary, ReportsKeyFigures) {
  ScenarioConfig c = paper_scenario();
  c.duration = 0.2;
  c.noise_free = true;
  const RunRecord rec = run_scenario(c);
  std::ostringstream out;
  write_summary(out, c, rec, 0.5);
  const std::string s = out.str();
  for (const char* key : {"final_e: ", "max_envelope_margin: ", "envelope_violations: 0",
                          "wall_seconds: 0.5", "rows: 201", "abort: none"}) {
    EXPECT_NE(s.find(key), std::string::npos) << key;
  }
  const Vec4 usage = max_envelope_usage(rec);
  EXPECT_GT(usage.minCoeff(), 0.0);
  EXPECT_LT(usage.maxCoeff(), 1.0);
}

TEST(PlotScript, ReferencesKnownColumns) {
  std::ostringstream out;
  write_plot_script(out, "run.csv");
  const std::string s = out.str();
  const std::set<std::string> known(csv_columns().begin(), csv_columns().end());
  const std::regex col("'([A-Za-z_0-9]+)'");
  int references = 0;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), col); it != std::sregex_iterator();
       ++it) {
    const std::string name = (*it)[1];
    if (name.find(".png") != std::string::npos || name == "run") continue;
    if (known.count(name) != 0) ++references;
  }
  EXPECT_GE(references, 20);
  for (const char* png : {"euler.png", "position.png", "envelope.png"}) {
    EXPECT_NE(s.find(png), std::string::npos);
  }
  EXPECT_NE(s.find("file = 'run.csv'"), std::string::npos);
}

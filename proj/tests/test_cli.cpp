#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scdp/cli/commands.hpp"
#include "scdp/cli/config.hpp"
#include "scdp/cli/ini.hpp"
#include "scdp/errors.hpp"
#include "scdp/rate_optimizer.hpp"
#include "scdp/secrecy.hpp"

using namespace scdp;
using namespace scdp::cli;

namespace {

struct Table {
  std::vector<std::string> meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    FAIL("missing column " << name);
    return 0;
  }
  double num(std::size_t row, const std::string& name) const {
    return std::stod(rows[row][col(name)]);
  }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string run_text(const std::string& command, const std::string& cfg_text,
                     OutputFormat format = OutputFormat::Csv, int* code = nullptr) {
  const ExperimentConfig cfg = parse_config(cfg_text, "test.ini");
  std::ostringstream out;
  const int c = run_command(command, cfg, format, out);
  if (code) *code = c;
  return out.str();
}

Table run(const std::string& command, const std::string& cfg_text) {
  std::istringstream in(run_text(command, cfg_text));
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) {
      t.meta.push_back(line);
    } else if (t.header.empty()) {
      t.header = split(line, ',');
    } else {
      t.rows.push_back(split(line, ','));
    }
  }
  return t;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "cfg.ini");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("ini parsing") {
  const auto doc = IniDocument::parse("# c\n[a]\nx = 1 ; trailing\n\n[b]\ny=two words\n", "f");
  REQUIRE(doc.find("a", "x"));
  CHECK(doc.find("a", "x")->text == "1");
  CHECK(doc.find("a", "x")->line == 3);
  CHECK(doc.find("b", "y")->text == "two words");
  CHECK(doc.find("b", "z") == nullptr);
  CHECK_THROWS_WITH_AS(IniDocument::parse("[a]\nx = 1\nx = 2\n", "f"), doctest::Contains("f:3:"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(IniDocument::parse("[a]\njunk\n", "f"), doctest::Contains("f:2:"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(IniDocument::parse("x = 1\n", "f"), doctest::Contains("f:1:"), ConfigError);
}

TEST_CASE("configuration errors are anchored to lines") {
  CHECK(config_error("[network]\nK = 3\nbogus = 1\n").find("cfg.ini:3:") == 0);
  CHECK(config_error("[network]\nK = 3\n[nope]\n").find("cfg.ini:3:") == 0);
  CHECK(config_error("[network]\nalpha = four\n").find("cfg.ini:2:") == 0);
  CHECK(config_error("[network]\nalpha = 1.5\n").find("cfg.ini:2:") == 0);
  CHECK(config_error("[network]\nK = 5\n[content]\nN = 100\nL = 20\n").find("cfg.ini:4:") == 0);
  CHECK(config_error("[content]\nphi = 2\n").find("cfg.ini:") == 0);
  CHECK(config_error("[sweep]\nvariable = nope\nstart = 0\nstop = 1\npoints = 2\n").find("cfg.ini:2:") == 0);
  CHECK(config_error("[sweep]\nvariable = K\nstart = 1\nstop = 9\npoints = 3\n").find("cfg.ini:2:") == 0);
  CHECK(config_error("[simulation]\nwindow_radius = 3\n").find("cfg.ini:2:") == 0);
  CHECK(config_error("[rates]\nR_e_ot = 1, 2\n").find("cfg.ini:2:") == 0);
  CHECK(config_error("[analysis]\nM = 20\n").find("cfg.ini:2:") == 0);
  CHECK(config_error("") == "");
}

TEST_CASE("configuration defaults and hashing") {
  const ExperimentConfig a = parse_config("", "x");
  const NetworkConfig n = a.network();
  REQUIRE(n.num_sbs() == 3);
  CHECK(n.sbs[1].r == doctest::Approx(0.5));  // user above the middle SBS
  CHECK(n.rho == doctest::Approx(10.0));
  const ExperimentConfig b = parse_config("[network]\nlambda_e = 0.03\n", "x");
  const ExperimentConfig c = parse_config("[network]\nlambda_e = 0.03 # same\n", "y");
  CHECK(a.hash != b.hash);
  CHECK(b.hash == c.hash);

  const ExperimentConfig e =
      parse_config("[network]\nsbs = 1@0, 2@90\n[rates]\nR_e_ot = 0.5, 1.5\n", "x");
  REQUIRE(e.network().num_sbs() == 2);
  CHECK(e.network().sbs[1].theta == doctest::Approx(std::acos(0.0)));
  CHECK(e.fixed_ot_policy().r_e_vector(2)[1] == 1.5);

  ExperimentConfig s = a;
  CHECK_THROWS_AS(apply_sweep_value(s, "bogus", 1.0), ConfigError);
  CHECK_THROWS_AS(apply_sweep_value(s, "K", 2.5), ConfigError);
  apply_sweep_value(s, "R_e_ot2", 3.0);
  CHECK(s.r_e_ot == std::vector<double>{1.0, 3.0, 1.0});
  CHECK_THROWS_AS(apply_sweep_value(s, "R_e_ot4", 1.0), ConfigError);
}

TEST_CASE("analyze output") {
  const Table t = run("analyze", "[network]\nlambda_e = 0\n");
  REQUIRE(t.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(t.num(i, "p_s") == 1.0);
  CHECK(t.meta.size() >= 5);
  CHECK(t.meta[0].rfind("# scdp ", 0) == 0);
  CHECK(t.header == std::vector<std::string>{"sweep_var", "scheme", "eve_model", "p_c", "p_s",
                                             "scdp"});

  const Table r = run("analyze",
                      "[network]\nlambda_e = 0.03\n[sweep]\nvariable = R_e\nstart = 0\nstop = 4\n"
                      "points = 9\n");
  REQUIRE(r.rows.size() == 27);
  for (const char* scheme : {"JT", "OT", "CM"}) {
    double prev = -1.0;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      if (r.rows[i][r.col("scheme")] != scheme) continue;
      const double ps = r.num(i, "p_s");
      CHECK(ps >= prev - 1e-12);
      prev = ps;
    }
  }
}

TEST_CASE("two-variable grid reproduces the AO optimum") {
  const std::string text =
      "[network]\nK = 2\nx_u = 0.3\nlambda_e = 0.03\n[analysis]\nn_r = 128\nn_theta = 64\n"
      "[sweep]\nvariable = R_e_ot1\nstart = 0\nstop = 3\npoints = 61\n"
      "variable2 = R_e_ot2\nstart2 = 0\nstop2 = 3\npoints2 = 61\n";
  const Table t = run("analyze", text);
  double best = -1.0, r1 = 0.0, r2 = 0.0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i][t.col("scheme")] != "OT") continue;
    const double v = t.num(i, "scdp");
    if (v > best) {
      best = v;
      r1 = t.num(i, "sweep_var");
      r2 = t.num(i, "sweep_var2");
    }
  }
  const ExperimentConfig cfg = parse_config(text, "x");
  const auto ao =
      ao_solve_ot_rates(OtRateProblem::from_network(cfg.network(), rate_to_beta(cfg.r_s),
                                                    cfg.quadrature()));
  const double step = 3.0 / 60;
  CHECK(std::abs(beta_to_rate(ao.beta_e[0]) - r1) <= step);
  CHECK(std::abs(beta_to_rate(ao.beta_e[1]) - r2) <= step);
  CHECK(ao.scdp >= best - 1e-12);
}

TEST_CASE("simulate output") {
  const std::string text = "[network]\nlambda_e = 0.01\n[simulation]\nn_trials = 2000\nseed = 9\n";
  const std::string a = run_text("simulate", text);
  CHECK(a == run_text("simulate", text));
  const Table t = run("simulate", text);
  CHECK(t.rows.size() == 10);
  CHECK(t.rows.back()[t.col("scheme")] == "ALL");

  const Table one = run("simulate", "[simulation]\nn_trials = 1\n");
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    const double p = one.num(i, "estimate");
    CHECK(one.num(i, "stderr") == doctest::Approx(std::sqrt(p * (1 - p))));
  }

  const std::string js = run_text("simulate", text, OutputFormat::JsonLines);
  std::istringstream in(js);
  std::string line;
  std::getline(in, line);
  const auto meta = nlohmann::json::parse(line);
  CHECK(meta.contains("meta"));
  CHECK(meta["meta"]["seed"] == 9);
  int rows = 0;
  while (std::getline(in, line)) {
    const auto row = nlohmann::json::parse(line);
    CHECK(row.contains("abs_delta"));
    ++rows;
  }
  CHECK(rows == 10);
}

TEST_CASE("optimization commands") {
  int code = -1;
  const std::string rates = run_text("optimize-rates", "[network]\nlambda_e = 0.03\n",
                                     OutputFormat::JsonLines, &code);
  CHECK(code == kExitOk);
  std::istringstream in(rates);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  const auto row = nlohmann::json::parse(line);
  CHECK(row["beta_e_ot"].size() == 3);
  CHECK(row["ot_converged"] == true);
  CHECK(row["scdp_jt"].get<double>() > row["scdp_cm"].get<double>());

  const Table g = run("optimize-phi",
                      "[sweep]\nvariable = gamma\nstart = 0.6\nstop = 2.0\npoints = 8\n");
  double prev = -1.0;
  for (std::size_t i = 0; i < g.rows.size(); ++i) {
    const double phi = g.num(i, "phi_star");
    CHECK(phi >= prev - 1e-12);
    prev = phi;
    CHECK(g.num(i, "grid_gap") < 5e-4);
    CHECK(g.rows[i][g.col("jt_beats_cm")] == "1");
    CHECK(g.num(i, "overall_best_exact") >= g.num(i, "overall_mpf_only") - 1e-12);
    CHECK(g.num(i, "overall_best_exact") >= g.num(i, "overall_dsf_only") - 1e-12);
  }

  // K = 5 needs K L < N, so the cache holds 19 files here.
  const Table k = run("optimize-phi",
                      "[content]\nL = 19\n[sweep]\nvariable = K\nstart = 2\nstop = 5\npoints = 4\n");
  prev = -1.0;
  for (std::size_t i = 0; i < k.rows.size(); ++i) {
    if (k.rows[i][k.col("sweep_var")] == "4") continue;
    const double phi = k.num(i, "phi_star");
    CHECK(phi >= prev - 1e-12);
    prev = phi;
  }

  const Table s = run("sweep", "[sweep]\nvariable = R_s\nstart = 0.5\nstop = 2\npoints = 4\n");
  CHECK(s.rows.size() == 4);
}

TEST_CASE("grid mode is analyze-only") {
  const std::string text =
      "[sweep]\nvariable = R_s\nstart = 0.5\nstop = 1\npoints = 2\n"
      "variable2 = gamma\nstart2 = 1\nstop2 = 2\npoints2 = 2\n";
  CHECK_THROWS_AS(run_text("optimize-phi", text), ConfigError);
  CHECK_NOTHROW(run_text("analyze", text));
}

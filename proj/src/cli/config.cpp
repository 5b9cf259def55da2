#include "scdp/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "scdp/cli/ini.hpp"
#include "scdp/errors.hpp"

namespace scdp::cli {
namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"network", {"K", "D", "x_u", "sbs", "alpha", "rho_db", "lambda_e"}},
      {"content", {"N", "L", "gamma", "delta", "phi"}},
      {"rates", {"R_s", "redundant", "R_e", "R_e_ot"}},
      {"analysis",
       {"eve_model", "M", "r_max", "n_r", "n_theta", "tail_tol", "R_trunc", "J_max", "ao_epsilon",
        "ao_max_outer"}},
      {"simulation", {"seed", "n_trials", "window_radius", "workers", "ce_ot_geometry"}},
      {"sweep", {"variable", "start", "stop", "points", "variable2", "start2", "stop2", "points2"}},
  };
  return s;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

class Reader {
 public:
  explicit Reader(const IniDocument& doc) : doc_(doc) {}

  double real(const std::string& sec, const std::string& key, double fallback) const {
    const auto* v = doc_.find(sec, key);
    return v ? parse_real(*v, key) : fallback;
  }

  std::optional<double> optional_real(const std::string& sec, const std::string& key) const {
    const auto* v = doc_.find(sec, key);
    if (!v) return std::nullopt;
    return parse_real(*v, key);
  }

  long long integer(const std::string& sec, const std::string& key, long long fallback) const {
    const auto* v = doc_.find(sec, key);
    return v ? parse_int(*v, key) : fallback;
  }

  std::optional<std::string> text(const std::string& sec, const std::string& key) const {
    const auto* v = doc_.find(sec, key);
    if (!v) return std::nullopt;
    return v->text;
  }

  int line(const std::string& sec, const std::string& key) const {
    const auto* v = doc_.find(sec, key);
    return v ? v->line : doc_.section_line(sec);
  }

  std::vector<double> real_list(const IniValue& v, const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(v.text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      out.push_back(parse_real({std::string(trim(item)), v.line}, key));
    }
    return out;
  }

  std::vector<PolarPoint> sbs_list(const IniValue& v) const {
    std::vector<PolarPoint> out;
    std::stringstream ss(v.text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto at = item.find('@');
      if (at == std::string::npos) doc_.fail(v.line, fmt::format("sbs entry '{}' is not r@deg", trim(item)));
      const double r = parse_real({std::string(trim(item.substr(0, at))), v.line}, "sbs");
      const double deg = parse_real({std::string(trim(item.substr(at + 1))), v.line}, "sbs");
      out.push_back({r, deg * std::numbers::pi / 180.0});
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& sec, const std::string& key,
                         const std::string& msg) const {
    doc_.fail(line(sec, key), msg);
  }

 private:
  double parse_real(const IniValue& v, const std::string& key) const {
    double out = 0.0;
    const char* b = v.text.data();
    const char* e = b + v.text.size();
    const auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc() || res.ptr != e || !std::isfinite(out)) {
      doc_.fail(v.line, fmt::format("'{}' expects a number, got '{}'", key, v.text));
    }
    return out;
  }

  long long parse_int(const IniValue& v, const std::string& key) const {
    long long out = 0;
    const char* b = v.text.data();
    const char* e = b + v.text.size();
    const auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc() || res.ptr != e) {
      doc_.fail(v.line, fmt::format("'{}' expects an integer, got '{}'", key, v.text));
    }
    return out;
  }

  const IniDocument& doc_;
};

// "R_e_ot<k>": redundant rate of the k-th SBS (1-based) under OT.
std::optional<std::size_t> per_sbs_rate_index(const std::string& name) {
  constexpr std::string_view prefix = "R_e_ot";
  if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0) {
    return std::nullopt;
  }
  std::size_t k = 0;
  const char* b = name.data() + prefix.size();
  const char* e = name.data() + name.size();
  const auto res = std::from_chars(b, e, k);
  if (res.ec != std::errc() || res.ptr != e || k == 0) return std::nullopt;
  return k - 1;
}

bool is_sweep_variable(const std::string& name) {
  const auto& names = sweep_variables();
  return std::find(names.begin(), names.end(), name) != names.end() ||
         per_sbs_rate_index(name).has_value();
}

std::optional<SweepAxis> read_axis(const IniDocument& doc, const Reader& rd,
                                   const std::string& suffix) {
  const auto var = rd.text("sweep", "variable" + suffix);
  if (!var) {
    for (const auto& k : {"start", "stop", "points"}) {
      if (doc.find("sweep", k + suffix)) {
        rd.fail("sweep", k + suffix, fmt::format("'{}' given without 'variable{}'", k + suffix, suffix));
      }
    }
    return std::nullopt;
  }
  SweepAxis axis;
  axis.variable = *var;
  axis.line = rd.line("sweep", "variable" + suffix);
  if (!is_sweep_variable(axis.variable)) {
    doc.fail(axis.line, fmt::format("unknown sweep variable '{}'", axis.variable));
  }
  for (const auto& k : {"start", "stop", "points"}) {
    if (!doc.find("sweep", k + suffix)) {
      doc.fail(axis.line, fmt::format("sweep needs '{}{}'", k, suffix));
    }
  }
  axis.start = rd.real("sweep", "start" + suffix, 0.0);
  axis.stop = rd.real("sweep", "stop" + suffix, 0.0);
  const long long points = rd.integer("sweep", "points" + suffix, 1);
  if (points < 1 || points > 1000000) rd.fail("sweep", "points" + suffix, "points must lie in [1, 1e6]");
  axis.points = static_cast<int>(points);
  return axis;
}

// Runs the library validators and rethrows with the line of the offending key.
void check_invariants(const ExperimentConfig& cfg, const Reader& rd) {
  auto anchored = [&](const std::string& sec, const std::string& key, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      rd.fail(sec, key, e.what());
    } catch (const DomainError& e) {
      rd.fail(sec, key, e.what());
    }
  };
  anchored("network", "K", [&] {
    auto w = validate(cfg.network());
    (void)w;
  });
  anchored("content", "N", [&] { validate(cfg.content, cfg.network().num_sbs()); });
  anchored("analysis", "M", [&] { cfg.approx.validate(); });
  anchored("analysis", "n_r", [&] { cfg.quadrature().validate(); });
  anchored("simulation", "window_radius", [&] { validate(cfg.batch, cfg.network()); });
  anchored("rates", "R_e_ot", [&] {
    if (!cfg.r_e_ot.empty()) (void)cfg.fixed_ot_policy().r_e_vector(cfg.network().num_sbs());
  });
}

}  // namespace

std::vector<double> SweepAxis::values() const {
  std::vector<double> out;
  if (points == 1) return {start};
  for (int i = 0; i < points; ++i) out.push_back(start + (stop - start) * i / (points - 1));
  return out;
}

const std::vector<std::string>& sweep_variables() {
  static const std::vector<std::string> v = {"lambda_e", "rho_db", "alpha", "D",     "x_u",
                                             "K",        "R_s",    "R_e",   "gamma", "phi",
                                             "delta",    "N",      "L",     "M"};
  return v;
}

NetworkConfig ExperimentConfig::network() const {
  NetworkConfig net;
  if (!explicit_sbs.empty()) {
    net.sbs = explicit_sbs;
  } else {
    const double ux = user_x.value_or(0.5 * (num_sbs - 1) * spacing);
    net.sbs = layout_linear(static_cast<std::size_t>(std::max(num_sbs, 0)), spacing, ux);
  }
  net.alpha = alpha;
  net.rho = db_to_linear(rho_db);
  net.lambda_e = lambda_e;
  return net;
}

PolarIntegrationSpec ExperimentConfig::quadrature() const {
  auto spec = PolarIntegrationSpec::defaults_for(network());
  if (r_max) spec.r_max = *r_max;
  if (n_r) spec.n_r = *n_r;
  if (n_theta) spec.n_theta = *n_theta;
  if (tail_tol) spec.tail_tol = *tail_tol;
  return spec;
}

AnalyticsOptions ExperimentConfig::analytics() const {
  AnalyticsOptions o;
  o.approx = approx;
  o.quadrature = quadrature();
  o.delta = content.delta;
  return o;
}

SimulationOptions ExperimentConfig::simulation() const {
  return {content.delta, ce_ot_geometry};
}

RatePolicy ExperimentConfig::fixed_jt_policy() const { return RatePolicy::uniform(r_s, r_e); }

RatePolicy ExperimentConfig::fixed_ot_policy() const {
  if (r_e_ot.empty()) return RatePolicy::uniform(r_s, r_e);
  return RatePolicy::per_sbs(r_s, r_e_ot);
}

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
  const IniDocument doc = IniDocument::parse(text, source);
  const Reader rd(doc);
  for (const auto& sec : doc.section_names()) {
    const auto it = schema().find(sec);
    if (it == schema().end()) doc.fail(doc.section_line(sec), fmt::format("unknown section [{}]", sec));
    for (const auto& key : doc.keys(sec)) {
      if (!it->second.count(key)) {
        rd.fail(sec, key, fmt::format("unknown key '{}' in [{}]", key, sec));
      }
    }
  }

  ExperimentConfig cfg;
  const long long k = rd.integer("network", "K", 3);
  if (k < 1 || k > 64) rd.fail("network", "K", "K must lie in [1, 64]");
  cfg.num_sbs = static_cast<int>(k);
  cfg.spacing = rd.real("network", "D", 1.0);
  if (!(cfg.spacing > 0.0)) rd.fail("network", "D", "D must be positive");
  cfg.user_x = rd.optional_real("network", "x_u");
  if (const auto* v = doc.find("network", "sbs")) {
    cfg.explicit_sbs = rd.sbs_list(*v);
    if (doc.find("network", "K") && static_cast<long long>(cfg.explicit_sbs.size()) != k) {
      doc.fail(v->line, fmt::format("sbs lists {} stations but K = {}", cfg.explicit_sbs.size(), k));
    }
    cfg.num_sbs = static_cast<int>(cfg.explicit_sbs.size());
  }
  cfg.alpha = rd.real("network", "alpha", 4.0);
  cfg.rho_db = rd.real("network", "rho_db", 10.0);
  cfg.lambda_e = rd.real("network", "lambda_e", 0.01);
  if (!(cfg.alpha > 2.0)) rd.fail("network", "alpha", "alpha must exceed 2");
  if (cfg.lambda_e < 0.0) rd.fail("network", "lambda_e", "lambda_e must be >= 0");

  cfg.content.n_files = static_cast<int>(rd.integer("content", "N", 100));
  cfg.content.cache_size = static_cast<int>(rd.integer("content", "L", 20));
  cfg.content.gamma = rd.real("content", "gamma", 1.2);
  cfg.content.delta = rd.real("content", "delta", 2.0);
  if (const auto phi = rd.text("content", "phi")) {
    if (*phi == "optimize") {
      cfg.optimize_phi = true;
    } else {
      cfg.content.phi = rd.real("content", "phi", 0.5);
    }
  }

  cfg.r_s = rd.real("rates", "R_s", 1.0);
  if (const auto mode = rd.text("rates", "redundant")) {
    if (*mode == "optimize") {
      cfg.optimize_rates = true;
    } else if (*mode != "fixed") {
      rd.fail("rates", "redundant", "redundant must be 'optimize' or 'fixed'");
    }
  }
  cfg.r_e = rd.real("rates", "R_e", 1.0);
  if (const auto* v = doc.find("rates", "R_e_ot")) cfg.r_e_ot = rd.real_list(*v, "R_e_ot");
  if (cfg.r_s < 0.0) rd.fail("rates", "R_s", "R_s must be >= 0");
  if (cfg.r_e < 0.0) rd.fail("rates", "R_e", "R_e must be >= 0");
  for (double r : cfg.r_e_ot) {
    if (r < 0.0) rd.fail("rates", "R_e_ot", "R_e_ot entries must be >= 0");
  }

  if (const auto eve = rd.text("analysis", "eve_model")) {
    if (*eve == "nce") {
      cfg.eve_model = EveModel::NCE;
    } else if (*eve == "ce") {
      cfg.eve_model = EveModel::CE;
    } else {
      rd.fail("analysis", "eve_model", "eve_model must be 'nce' or 'ce'");
    }
  }
  cfg.approx.m_terms = static_cast<int>(rd.integer("analysis", "M", 5));
  cfg.r_max = rd.optional_real("analysis", "r_max");
  if (doc.find("analysis", "n_r")) cfg.n_r = static_cast<int>(rd.integer("analysis", "n_r", 512));
  if (doc.find("analysis", "n_theta")) {
    cfg.n_theta = static_cast<int>(rd.integer("analysis", "n_theta", 256));
  }
  cfg.tail_tol = rd.optional_real("analysis", "tail_tol");
  cfg.truncation.radius = rd.real("analysis", "R_trunc", 20.0);
  cfg.truncation.j_max = static_cast<int>(rd.integer("analysis", "J_max", 0));
  if (!(cfg.truncation.radius > 0.0)) rd.fail("analysis", "R_trunc", "R_trunc must be positive");
  if (cfg.truncation.j_max < 0) rd.fail("analysis", "J_max", "J_max must be >= 0");
  cfg.ao.epsilon = rd.real("analysis", "ao_epsilon", 1e-10);
  if (!(cfg.ao.epsilon > 0.0)) rd.fail("analysis", "ao_epsilon", "ao_epsilon must be positive");
  const long long outer = rd.integer("analysis", "ao_max_outer", 200);
  if (outer < 1 || outer > 100000) rd.fail("analysis", "ao_max_outer", "ao_max_outer must lie in [1, 1e5]");
  cfg.ao.max_outer = static_cast<int>(outer);

  const long long seed = rd.integer("simulation", "seed", 1);
  if (seed < 0) rd.fail("simulation", "seed", "seed must be >= 0");
  cfg.batch.seed = static_cast<std::uint64_t>(seed);
  const long long trials = rd.integer("simulation", "n_trials", 100000);
  if (trials < 1) rd.fail("simulation", "n_trials", "n_trials must be >= 1");
  cfg.batch.n_trials = static_cast<std::size_t>(trials);
  cfg.batch.window_radius = rd.real("simulation", "window_radius", 0.0);
  const long long workers = rd.integer("simulation", "workers", 0);
  if (workers < 0 || workers > 1024) rd.fail("simulation", "workers", "workers must lie in [0, 1024]");
  cfg.batch.workers = static_cast<unsigned>(workers);
  if (const auto g = rd.text("simulation", "ce_ot_geometry")) {
    if (*g == "correlated") {
      cfg.ce_ot_geometry = CeOtGeometry::Correlated;
    } else if (*g == "independent") {
      cfg.ce_ot_geometry = CeOtGeometry::Independent;
    } else {
      rd.fail("simulation", "ce_ot_geometry", "ce_ot_geometry must be 'correlated' or 'independent'");
    }
  }

  cfg.sweep = read_axis(doc, rd, "");
  cfg.sweep2 = read_axis(doc, rd, "2");
  if (cfg.sweep2 && !cfg.sweep) rd.fail("sweep", "variable2", "variable2 requires variable");
  if (cfg.sweep && cfg.sweep2 && cfg.sweep->variable == cfg.sweep2->variable) {
    doc.fail(cfg.sweep2->line, "variable2 must differ from variable");
  }

  check_invariants(cfg, rd);
  cfg.warnings = validate(cfg.network());
  for (const auto* axis : {&cfg.sweep, &cfg.sweep2}) {
    if (!*axis) continue;
    for (double v : (*axis)->values()) {
      ExperimentConfig probe = cfg;
      try {
        apply_sweep_value(probe, (*axis)->variable, v);
      } catch (const ConfigError& e) {
        doc.fail((*axis)->line, e.what());
      } catch (const DomainError& e) {
        doc.fail((*axis)->line, e.what());
      }
    }
  }
  cfg.hash = fnv1a(doc.canonical());
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("{}:0: cannot open config file", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

void apply_sweep_value(ExperimentConfig& cfg, const std::string& variable, double value) {
  auto as_int = [&](const char* name) {
    if (value != std::floor(value)) {
      throw ConfigError(fmt::format("sweep value {} for {} is not an integer", value, name));
    }
    return static_cast<int>(value);
  };
  if (variable == "lambda_e") {
    cfg.lambda_e = value;
  } else if (variable == "rho_db") {
    cfg.rho_db = value;
  } else if (variable == "alpha") {
    cfg.alpha = value;
  } else if (variable == "D") {
    if (!cfg.explicit_sbs.empty()) throw ConfigError("sweeping D needs the linear layout");
    cfg.spacing = value;
  } else if (variable == "x_u") {
    if (!cfg.explicit_sbs.empty()) throw ConfigError("sweeping x_u needs the linear layout");
    cfg.user_x = value;
  } else if (variable == "K") {
    if (!cfg.explicit_sbs.empty()) throw ConfigError("sweeping K needs the linear layout");
    cfg.num_sbs = as_int("K");
    cfg.r_e_ot.clear();
  } else if (variable == "R_s") {
    cfg.r_s = value;
  } else if (variable == "R_e") {
    cfg.r_e = value;
    cfg.r_e_ot.clear();
  } else if (variable == "gamma") {
    cfg.content.gamma = value;
  } else if (variable == "phi") {
    cfg.content.phi = value;
    cfg.optimize_phi = false;
  } else if (variable == "delta") {
    cfg.content.delta = value;
  } else if (variable == "N") {
    cfg.content.n_files = as_int("N");
  } else if (variable == "L") {
    cfg.content.cache_size = as_int("L");
  } else if (variable == "M") {
    cfg.approx.m_terms = as_int("M");
  } else if (const auto k = per_sbs_rate_index(variable)) {
    const auto num_sbs = static_cast<std::size_t>(std::max(cfg.num_sbs, 0));
    const std::size_t count = cfg.explicit_sbs.empty() ? num_sbs : cfg.explicit_sbs.size();
    if (*k >= count) {
      throw ConfigError(fmt::format("sweep variable {} names SBS {} of {}", variable, *k + 1, count));
    }
    if (cfg.r_e_ot.empty()) cfg.r_e_ot.assign(count, cfg.r_e);
    cfg.r_e_ot[*k] = value;
  } else {
    throw ConfigError(fmt::format("unknown sweep variable '{}'", variable));
  }
  if (cfg.r_s < 0.0 || cfg.r_e < 0.0) throw ConfigError("rates must be >= 0");
  for (double r : cfg.r_e_ot) {
    if (r < 0.0) throw ConfigError("rates must be >= 0");
  }
  validate(cfg.network());
  validate(cfg.content, cfg.network().num_sbs());
  cfg.approx.validate();
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace scdp::cli

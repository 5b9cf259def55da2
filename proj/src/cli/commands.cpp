#include "scdp/cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <variant>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "scdp/cache_optimizer.hpp"
#include "scdp/errors.hpp"
#include "scdp/monte_carlo.hpp"
#include "scdp/rate_optimizer.hpp"
#include "scdp/secrecy.hpp"
#include "scdp/version.hpp"

namespace scdp::cli {
namespace {

using Cell = std::variant<std::string, double, long long, bool, std::vector<double>>;

const std::map<std::string, std::vector<std::string>>& columns() {
  static const std::map<std::string, std::vector<std::string>> c = {
      {"analyze", {"sweep_var", "scheme", "eve_model", "p_c", "p_s", "scdp"}},
      {"analyze-grid", {"sweep_var", "sweep_var2", "scheme", "eve_model", "p_c", "p_s", "scdp"}},
      {"simulate",
       {"sweep_var", "scheme", "eve_model", "quantity", "estimate", "stderr", "analytic",
        "abs_delta"}},
      {"optimize-rates",
       {"sweep_var", "r_s", "beta_e_jt", "r_e_jt", "scdp_jt", "beta_e_cm", "r_e_cm", "scdp_cm",
        "beta_e_ot", "r_e_ot", "scdp_ot", "ot_iterations", "ot_converged", "kkt_complementarity",
        "kkt_min_gradient", "beta_e_ot_uniform", "scdp_ot_uniform"}},
      {"optimize-phi",
       {"sweep_var", "scdp_jt", "scdp_ot", "scdp_cm", "phi_star", "phi_grid", "grid_gap",
        "overall_at_phi_star", "overall_at_phi_star_approx", "overall_mpf_only",
        "overall_dsf_only", "overall_no_cache", "phi_best_exact", "overall_best_exact",
        "jt_beats_cm"}},
      {"sweep",
       {"sweep_var", "beta_e_jt", "beta_e_cm", "beta_e_ot", "scdp_jt", "scdp_ot", "scdp_cm",
        "phi_star", "overall_hybrid", "overall_mpf_only", "overall_dsf_only", "overall_no_cache",
        "phi_grid_exact"}},
  };
  return c;
}

class TableWriter {
 public:
  TableWriter(std::ostream& out, OutputFormat format, const std::string& command,
              const std::vector<std::string>& cols, const ExperimentConfig& cfg)
      : out_(out), format_(format), cols_(cols) {
    const std::string hash = fmt::format("{:016x}", cfg.hash);
    if (format_ == OutputFormat::Csv) {
      out_ << fmt::format("# scdp {}\n# command: {}\n# config_hash: {}\n# seed: {}\n", kVersion,
                          command, hash, cfg.batch.seed);
      for (const auto& w : cfg.warnings) out_ << "# warning: " << w << '\n';
      out_ << "# columns:";
      for (std::size_t i = 0; i < cols_.size(); ++i) out_ << fmt::format(" {}={}", i + 1, cols_[i]);
      out_ << '\n';
      for (std::size_t i = 0; i < cols_.size(); ++i) out_ << (i ? "," : "") << cols_[i];
      out_ << '\n';
    } else {
      nlohmann::json meta = {{"version", kVersion},   {"command", command},
                             {"config_hash", hash},   {"seed", cfg.batch.seed},
                             {"columns", cols_},      {"warnings", cfg.warnings}};
      out_ << nlohmann::json{{"meta", meta}}.dump() << '\n';
    }
  }

  void row(const std::vector<Cell>& cells) {
    if (cells.size() != cols_.size()) throw std::logic_error("table row width mismatch");
    if (format_ == OutputFormat::Csv) {
      for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << csv(cells[i]);
      out_ << '\n';
    } else {
      nlohmann::json obj = nlohmann::json::object();
      for (std::size_t i = 0; i < cells.size(); ++i) obj[cols_[i]] = json(cells[i]);
      out_ << obj.dump() << '\n';
    }
  }

 private:
  static std::string number(double v) { return fmt::format("{:.12g}", v); }

  static std::string csv(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::string>) {
            return v;
          } else if constexpr (std::is_same_v<T, double>) {
            return number(v);
          } else if constexpr (std::is_same_v<T, bool>) {
            return v ? "1" : "0";
          } else if constexpr (std::is_same_v<T, long long>) {
            return std::to_string(v);
          } else {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + number(v[i]);
            return s;
          }
        },
        c);
  }

  static nlohmann::json json(const Cell& c) {
    return std::visit([](const auto& v) { return nlohmann::json(v); }, c);
  }

  std::ostream& out_;
  OutputFormat format_;
  std::vector<std::string> cols_;
};

struct Point {
  std::string label;
  ExperimentConfig cfg;
};

std::string label_of(double v) { return fmt::format("{:.12g}", v); }

std::vector<Point> sweep_points(const ExperimentConfig& cfg) {
  if (!cfg.sweep) return {{"NA", cfg}};
  std::vector<Point> out;
  for (double v : cfg.sweep->values()) {
    Point p{label_of(v), cfg};
    apply_sweep_value(p.cfg, cfg.sweep->variable, v);
    out.push_back(std::move(p));
  }
  return out;
}

void require_single_axis(const ExperimentConfig& cfg, const std::string& command) {
  if (cfg.sweep2) {
    throw ConfigError(fmt::format("{}:{}: two-variable grid mode is only supported by analyze",
                                  command, cfg.sweep2->line));
  }
}

std::uint64_t row_seed(std::uint64_t base, std::uint64_t row) {
  TrialRng rng(base, 0x5eed0000ULL + row);
  return rng();
}

struct Policies {
  RatePolicy jt;
  RatePolicy ot;
  RatePolicy cm;
};

Policies resolve_policies(const ExperimentConfig& cfg, const NetworkConfig& net) {
  if (!cfg.optimize_rates) return {cfg.fixed_jt_policy(), cfg.fixed_ot_policy(), cfg.fixed_jt_policy()};
  const auto spec = cfg.quadrature();
  const double beta_s = rate_to_beta(cfg.r_s);
  const auto jt_problem = JtRateProblem::from_network(net, beta_s, spec);
  const auto jt = solve_jt_rate(jt_problem);
  const auto cm = solve_cm_rate(jt_problem, cfg.content.delta);
  const auto ot = ao_solve_ot_rates(OtRateProblem::from_network(net, beta_s, spec), cfg.ao);
  std::vector<double> r_ot;
  for (double b : ot.beta_e) r_ot.push_back(beta_to_rate(b));
  return {RatePolicy::uniform(cfg.r_s, beta_to_rate(jt.beta_e_star)),
          RatePolicy::per_sbs(cfg.r_s, r_ot),
          RatePolicy::uniform(cfg.r_s, beta_to_rate(cm.beta_e_star))};
}

const RatePolicy& policy_for(const Policies& p, Scheme s) {
  return s == Scheme::JT ? p.jt : (s == Scheme::OT ? p.ot : p.cm);
}

constexpr Scheme kSchemes[] = {Scheme::JT, Scheme::OT, Scheme::CM};

std::string scheme_name(Scheme s) { return std::string(to_string(s)); }

void analyze_point(const ExperimentConfig& cfg, std::vector<Cell> prefix, TableWriter& table) {
  const NetworkConfig net = cfg.network();
  const Policies policies = resolve_policies(cfg, net);
  for (Scheme s : kSchemes) {
    const auto m = scheme_metrics(net, policy_for(policies, s), s, cfg.eve_model, cfg.analytics());
    std::vector<Cell> row = prefix;
    row.insert(row.end(), {scheme_name(s), std::string(to_string(cfg.eve_model)), m.p_c, m.p_s,
                           m.scdp});
    table.row(row);
  }
  if (cfg.eve_model != EveModel::CE) return;

  // The disc-conditioned OT value has two readings; both are listed when
  // they disagree.
  const auto& ot = policies.ot;
  const auto beta_e = ot.beta_e_vector(net.num_sbs());
  const double p_c = p_c_ot(net, ot.beta_t_vector(net.num_sbs()));
  const double literal = p_s_ce_ot_exact(net, beta_e, cfg.truncation);
  const double set_level =
      estimate_ps_ce_ot_gamma_set(net, beta_e, cfg.truncation, cfg.batch).value;
  if (std::abs(literal - set_level) <= 0.01) return;
  for (const auto& [name, p_s] : {std::pair{"OT-disc-literal", literal},
                                  std::pair{"OT-disc-set", set_level}}) {
    std::vector<Cell> row = prefix;
    row.insert(row.end(), {std::string(name), std::string("CE"), p_c, p_s, p_c * p_s});
    table.row(row);
  }
}

int cmd_analyze(const ExperimentConfig& cfg, TableWriter& table) {
  for (const auto& p : sweep_points(cfg)) {
    if (!cfg.sweep2) {
      analyze_point(p.cfg, {p.label}, table);
      continue;
    }
    for (double v2 : cfg.sweep2->values()) {
      ExperimentConfig c = p.cfg;
      apply_sweep_value(c, cfg.sweep2->variable, v2);
      analyze_point(c, {p.label, label_of(v2)}, table);
    }
  }
  return kExitOk;
}

int cmd_simulate(const ExperimentConfig& cfg, TableWriter& table) {
  std::uint64_t row = 0;
  for (const auto& p : sweep_points(cfg)) {
    const NetworkConfig net = p.cfg.network();
    const Policies policies = resolve_policies(p.cfg, net);
    const auto options = p.cfg.simulation();
    const std::string eve(to_string(p.cfg.eve_model));
    auto batch_for = [&](std::uint64_t r) {
      TrialBatch b = p.cfg.batch;
      b.seed = row_seed(cfg.batch.seed, r);
      return b;
    };
    auto emit = [&](const std::string& scheme, const char* quantity, const Estimate& e,
                    double analytic) {
      table.row({p.label, scheme, eve, std::string(quantity), e.value, e.std_error, analytic,
                 std::abs(e.value - analytic)});
    };

    ScdpTriple triple;
    for (Scheme s : kSchemes) {
      const auto& policy = policy_for(policies, s);
      const auto m = scheme_metrics(net, policy, s, p.cfg.eve_model, p.cfg.analytics());
      (s == Scheme::JT ? triple.jt : s == Scheme::OT ? triple.ot : triple.cm) = m.scdp;
      emit(scheme_name(s), "p_c", estimate_pc(net, policy, s, batch_for(row++), options), m.p_c);
      emit(scheme_name(s), "p_s",
           estimate_ps(net, policy, s, p.cfg.eve_model, batch_for(row++), options), m.p_s);
      emit(scheme_name(s), "scdp",
           estimate_scdp(net, policy, s, p.cfg.eve_model, batch_for(row++), options), m.scdp);
    }
    ContentConfig content = p.cfg.content;
    if (p.cfg.optimize_phi) content.phi = optimal_phi(triple, content, net.num_sbs());
    const double analytic = scdp_overall(triple, content, net.num_sbs(), ZipfMode::Exact);
    const auto e = estimate_scdp_overall(net, content, {policies.jt, policies.ot, policies.cm},
                                         p.cfg.eve_model, batch_for(row++), options);
    emit("ALL", "scdp", e, analytic);
  }
  return kExitOk;
}

int cmd_optimize_rates(const ExperimentConfig& cfg, TableWriter& table) {
  require_single_axis(cfg, "optimize-rates");
  int code = kExitOk;
  for (const auto& p : sweep_points(cfg)) {
    const NetworkConfig net = p.cfg.network();
    const auto spec = p.cfg.quadrature();
    const double beta_s = rate_to_beta(p.cfg.r_s);
    const auto jt_problem = JtRateProblem::from_network(net, beta_s, spec);
    const auto jt = solve_jt_rate(jt_problem);
    const auto cm = solve_cm_rate(jt_problem, p.cfg.content.delta);
    const auto ot_problem = OtRateProblem::from_network(net, beta_s, spec);
    const auto ot = ao_solve_ot_rates(ot_problem, p.cfg.ao);
    const auto uni = solve_ot_uniform_rate(ot_problem);
    const auto kkt = kkt_residual(ot_problem, ot.beta_e);
    std::vector<double> r_ot;
    for (double b : ot.beta_e) r_ot.push_back(beta_to_rate(b));
    if (!ot.converged) code = kExitNumeric;
    table.row({p.label, p.cfg.r_s, jt.beta_e_star, beta_to_rate(jt.beta_e_star), jt.scdp_star,
               cm.beta_e_star, beta_to_rate(cm.beta_e_star), cm.scdp_star, ot.beta_e, r_ot,
               ot.scdp, static_cast<long long>(ot.iterations), ot.converged,
               kkt.max_complementarity, kkt.min_gradient, uni.beta_e_star, uni.scdp_star});
  }
  return code;
}

DesignReport design(const ExperimentConfig& cfg) {
  DesignOptions opts;
  opts.quadrature = cfg.quadrature();
  opts.ao = cfg.ao;
  return end_to_end_design(cfg.network(), cfg.content, cfg.r_s, opts);
}

int cmd_optimize_phi(const ExperimentConfig& cfg, TableWriter& table) {
  require_single_axis(cfg, "optimize-phi");
  int code = kExitOk;
  for (const auto& p : sweep_points(cfg)) {
    const auto r = design(p.cfg);
    if (!r.ot.converged) code = kExitNumeric;
    table.row({p.label, r.triple.jt, r.triple.ot, r.triple.cm, r.phi_star, r.phi_grid_continuous,
               std::abs(r.phi_star - r.phi_grid_continuous), r.overall_at_phi_star,
               r.overall_at_phi_star_approx, r.overall_mpf_only, r.overall_dsf_only,
               r.overall_no_cache, r.phi_best_exact, r.overall_best_exact, r.jt_beats_cm});
  }
  return code;
}

int cmd_sweep(const ExperimentConfig& cfg, TableWriter& table) {
  require_single_axis(cfg, "sweep");
  int code = kExitOk;
  for (const auto& p : sweep_points(cfg)) {
    const auto r = design(p.cfg);
    if (!r.ot.converged) code = kExitNumeric;
    table.row({p.label, r.jt.beta_e_star, r.cm.beta_e_star, r.ot.beta_e, r.triple.jt, r.triple.ot,
               r.triple.cm, r.phi_star, r.overall_at_phi_star, r.overall_mpf_only,
               r.overall_dsf_only, r.overall_no_cache, r.phi_best_exact});
  }
  return code;
}

}  // namespace

int run_command(const std::string& command, const ExperimentConfig& cfg, OutputFormat format,
                std::ostream& out) {
  std::string key = command;
  if (command == "analyze" && cfg.sweep2) key = "analyze-grid";
  const auto it = columns().find(key);
  if (it == columns().end()) throw ConfigError(fmt::format("unknown command '{}'", command));
  TableWriter table(out, format, command, it->second, cfg);
  if (command == "analyze") return cmd_analyze(cfg, table);
  if (command == "simulate") {
    require_single_axis(cfg, "simulate");
    return cmd_simulate(cfg, table);
  }
  if (command == "optimize-rates") return cmd_optimize_rates(cfg, table);
  if (command == "optimize-phi") return cmd_optimize_phi(cfg, table);
  return cmd_sweep(cfg, table);
}

std::string schema_help() {
  std::string s = "Output columns (CSV header order; json-lines objects use the same keys):\n";
  for (const auto& [cmd, cols] : columns()) {
    s += fmt::format("  {}: {}\n", cmd, fmt::join(cols, ","));
  }
  s += "Exit codes: 0 success, 2 configuration error, 3 numeric non-convergence.\n";
  return s;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Secure content delivery probability of cache-enabled cooperative small cells"};
  app.footer(schema_help());
  app.require_subcommand(1, 1);

  std::string config_path, out_path, format_name = "csv";
  std::optional<std::uint64_t> seed;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"analyze", "analytic p_c, p_s and SCDP per scheme over the sweep"},
      {"simulate", "Monte Carlo estimates next to the analytic values"},
      {"optimize-rates", "optimal redundant rates per scheme"},
      {"optimize-phi", "optimal caching split and overall SCDP"},
      {"sweep", "full design pipeline at every sweep point"},
  };
  for (const auto& [name, desc] : commands) {
    auto* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "experiment configuration file")->required();
    sub->add_option("--out", out_path, "output file (default stdout)");
    sub->add_option("--seed", seed, "master seed, overrides [simulation] seed");
    sub->add_option("--format", format_name, "csv or json-lines")
        ->check(CLI::IsMember({"csv", "json-lines"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    ExperimentConfig cfg = load_config(config_path);
    if (seed) cfg.batch.seed = *seed;
    const OutputFormat format = format_name == "csv" ? OutputFormat::Csv : OutputFormat::JsonLines;
    if (out_path.empty()) return run_command(command, cfg, format, std::cout);
    std::ofstream out(out_path);
    if (!out) throw ConfigError(fmt::format("cannot open output file {}", out_path));
    return run_command(command, cfg, format, out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace scdp::cli

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scdp/content.hpp"
#include "scdp/monte_carlo.hpp"
#include "scdp/network.hpp"
#include "scdp/quadrature.hpp"
#include "scdp/rate_optimizer.hpp"
#include "scdp/secrecy.hpp"

namespace scdp::cli {

struct SweepAxis {
  std::string variable;
  double start = 0.0;
  double stop = 0.0;
  int points = 1;
  int line = 0;

  std::vector<double> values() const;
};

// Names accepted by [sweep] variable, besides R_e_ot1, R_e_ot2, ... for the
// per-SBS OT redundant rates.
const std::vector<std::string>& sweep_variables();

struct ExperimentConfig {
  // [network]
  int num_sbs = 3;
  double spacing = 1.0;
  std::optional<double> user_x;        // default: middle of the SBS row
  std::vector<PolarPoint> explicit_sbs;  // overrides the linear layout
  double alpha = 4.0;
  double rho_db = 10.0;
  double lambda_e = 0.01;

  // [content]
  ContentConfig content{};
  bool optimize_phi = false;

  // [rates]
  double r_s = 1.0;
  bool optimize_rates = false;
  double r_e = 1.0;
  std::vector<double> r_e_ot;  // empty: r_e for every SBS

  // [analysis]
  EveModel eve_model = EveModel::NCE;
  ApproximationConfig approx{};
  std::optional<double> r_max;
  std::optional<int> n_r;
  std::optional<int> n_theta;
  std::optional<double> tail_tol;
  DiscTruncation truncation{};
  AoSettings ao{};

  // [simulation]
  TrialBatch batch{};
  CeOtGeometry ce_ot_geometry = CeOtGeometry::Correlated;

  // [sweep]
  std::optional<SweepAxis> sweep;
  std::optional<SweepAxis> sweep2;

  std::uint64_t hash = 0;
  std::vector<std::string> warnings;

  NetworkConfig network() const;
  PolarIntegrationSpec quadrature() const;
  AnalyticsOptions analytics() const;
  SimulationOptions simulation() const;
  RatePolicy fixed_jt_policy() const;
  RatePolicy fixed_ot_policy() const;
};

// Parses and validates; ConfigError messages are anchored "source:line: ...".
ExperimentConfig parse_config(std::string_view text, const std::string& source);
ExperimentConfig load_config(const std::string& path);

// Sets one sweep variable. Throws ConfigError for unknown names or values
// that break an invariant.
void apply_sweep_value(ExperimentConfig& cfg, const std::string& variable, double value);

std::uint64_t fnv1a(std::string_view text);

}  // namespace scdp::cli

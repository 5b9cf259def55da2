#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "scdp/network.hpp"
#include "scdp/quadrature.hpp"

namespace scdp {

// Scalar redundant-rate problem of joint transmission under non-colluding
// eavesdroppers. Maximizing SCDP = exp(-A beta_s - Q(beta_e)) is minimizing
//
//   Q(beta_e) = A (1 + beta_s) beta_e + lambda_e \int e^{-B(r,theta) beta_e},
//
// with A = 1 / (rho sum_k r_{b,k}^-alpha) and B = 1 / (rho sum_k r_k^-alpha).
// B is tabulated once on the quadrature nodes (sorted ascending so terms that
// underflow can be skipped); copies share the table.
class JtRateProblem {
 public:
  static JtRateProblem from_network(const NetworkConfig& net, double beta_s,
                                    const PolarIntegrationSpec& spec);
  static JtRateProblem from_network(const NetworkConfig& net, double beta_s);

  double a() const noexcept { return a_; }
  double beta_s() const noexcept { return beta_s_; }
  double lambda_e() const noexcept { return lambda_e_; }
  JtRateProblem with_beta_s(double beta_s) const;
  JtRateProblem with_lambda_e(double lambda_e) const;

  double q(double beta_e) const;
  double dq(double beta_e) const;
  double d2q(double beta_e) const;
  // exp(-A beta_t - lambda_e \int e^{-B beta_e}) = p_c p_s
  double scdp(double beta_e) const;

 private:
  struct Table;
  JtRateProblem(double a, double beta_s, double lambda_e, std::shared_ptr<const Table> table);

  double integral(double beta_e) const;         // \int e^{-B beta}
  double moment(double beta_e, int power) const;  // \int B^p e^{-B beta}

  double a_;
  double beta_s_;
  double lambda_e_;
  std::shared_ptr<const Table> table_;
};

struct JtRateSolution {
  double beta_e_star = 0.0;
  double q_star = 0.0;
  double scdp_star = 0.0;
  int iterations = 0;
};

// Unique zero of dQ/dbeta_e by bisection; the upper bracket starts at 1 and
// doubles until the derivative turns positive. lambda_e = 0 gives beta_e = 0.
JtRateSolution solve_jt_rate(const JtRateProblem& problem, const BisectionSpec& bisection = {});

// Cache-miss variant: beta_s replaced by 2^(delta R_s) - 1 = (1 + beta_s)^delta - 1.
JtRateSolution solve_cm_rate(const JtRateProblem& problem, double delta,
                             const BisectionSpec& bisection = {});

// Vector redundant-rate problem of orthogonal transmission:
//
//   Omega(beta) = (1 + beta_s)/(K rho) r_b^T beta
//               + lambda_e \int exp(-r_e(r,theta)^T beta / (K rho)),
//
// with r_b = [r_{b,k}^alpha] and r_e = [r_k^alpha].
class OtRateProblem {
 public:
  static OtRateProblem from_network(const NetworkConfig& net, double beta_s,
                                    const PolarIntegrationSpec& spec);
  static OtRateProblem from_network(const NetworkConfig& net, double beta_s);

  std::size_t num_sbs() const noexcept { return linear_.size(); }
  double beta_s() const noexcept { return beta_s_; }
  double lambda_e() const noexcept { return lambda_e_; }

  // (1 + beta_s) r_{b,k}^alpha / (K rho)
  std::span<const double> linear_coefficients() const noexcept { return linear_; }
  // beta_s ||r_b||_1 / (K rho), the beta-independent part of -ln SCDP.
  double constant_term() const noexcept { return constant_; }

  double omega(std::span<const double> beta) const;
  double domega(std::span<const double> beta, std::size_t k) const;
  std::vector<double> gradient(std::span<const double> beta) const;
  double scdp(std::span<const double> beta) const;

  // Derivative of Omega along the all-ones direction at beta * 1.
  double domega_uniform(double beta) const;

  // Quadrature view used by the solvers: weights w_i and exponents
  // a_{k,i} = r_{k,i}^alpha / (K rho), node-major per SBS.
  std::span<const double> weights() const noexcept;
  std::span<const double> exponents(std::size_t k) const noexcept;

 private:
  struct Table;
  OtRateProblem() = default;

  std::vector<double> linear_;
  double constant_ = 0.0;
  double beta_s_ = 0.0;
  double lambda_e_ = 0.0;
  std::shared_ptr<const Table> table_;
};

enum class SweepOrder { Ascending, Shuffled };

struct AoSettings {
  double epsilon = 1e-10;   // relative change of Omega over one sweep
  double step_tol = 1e-8;   // and largest coordinate move in that sweep
  int max_outer = 200;
  std::vector<double> beta_init{};  // empty: all 1e-3
  SweepOrder order = SweepOrder::Ascending;
  std::uint64_t shuffle_seed = 7;
  BisectionSpec bisection{};
};

struct AoResult {
  std::vector<double> beta_e;
  double omega = 0.0;
  double scdp = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> omega_history;  // Omega(beta^(0)), Omega(beta^(1)), ...
};

// Alternating optimization over the per-SBS redundant rates. Each coordinate
// is either clamped to zero (non-negative derivative at zero) or set to the
// bisection root of its partial derivative.
AoResult ao_solve_ot_rates(const OtRateProblem& problem, const AoSettings& settings = {});

struct UniformRateSolution {
  double beta_e_star = 0.0;
  double omega_star = 0.0;
  double scdp_star = 0.0;
};

// Best common redundant rate for all SBSs.
UniformRateSolution solve_ot_uniform_rate(const OtRateProblem& problem,
                                          const BisectionSpec& bisection = {});

struct KktReport {
  double max_complementarity = 0.0;  // max_k |beta_k dOmega/dbeta_k|
  double min_gradient = 0.0;         // min_k dOmega/dbeta_k
  double min_beta = 0.0;
};

KktReport kkt_residual(const OtRateProblem& problem, std::span<const double> beta);

}  // namespace scdp

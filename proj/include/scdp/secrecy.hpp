#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "scdp/network.hpp"
#include "scdp/quadrature.hpp"

namespace scdp {

enum class Scheme { JT, OT, CM };
enum class EveModel { NCE, CE };

std::string_view to_string(Scheme s);
std::string_view to_string(EveModel m);

// 2^R - 1 and its inverse.
double rate_to_beta(double rate);
double beta_to_rate(double beta);

// Wiretap code rates: secrecy rate R_s plus one redundant rate (JT, CM, or a
// uniform OT design) or one redundant rate per SBS (OT).
class RatePolicy {
 public:
  struct Uniform {
    double r_e = 0.0;
  };
  struct PerSbs {
    std::vector<double> r_e;
  };

  RatePolicy(double r_s, Uniform redundant);
  RatePolicy(double r_s, PerSbs redundant);

  static RatePolicy uniform(double r_s, double r_e) { return {r_s, Uniform{r_e}}; }
  static RatePolicy per_sbs(double r_s, std::vector<double> r_e) {
    return {r_s, PerSbs{std::move(r_e)}};
  }

  double r_s() const noexcept { return r_s_; }
  bool is_uniform() const noexcept { return std::holds_alternative<Uniform>(redundant_); }

  // Uniform policies only; throws ConfigError for per-SBS policies.
  double r_e() const;
  // Expands a uniform policy to K entries; a per-SBS policy must have K.
  std::vector<double> r_e_vector(std::size_t num_sbs) const;

  double beta_s() const { return rate_to_beta(r_s_); }
  double beta_e() const { return rate_to_beta(r_e()); }
  // beta_t = beta_s + (1 + beta_s) beta_e, from R_t = R_s + R_e.
  double beta_t() const;
  std::vector<double> beta_e_vector(std::size_t num_sbs) const;
  std::vector<double> beta_t_vector(std::size_t num_sbs) const;

  // Same redundant rates with a different secrecy rate (cache-miss scheme).
  RatePolicy with_secrecy_rate(double r_s) const;

 private:
  double r_s_;
  std::variant<Uniform, PerSbs> redundant_;
};

// Number of terms M of the gamma-dummy / Alzer approximation, 1 <= M <= 12.
struct ApproximationConfig {
  int m_terms = 5;

  static constexpr int kMaxTerms = 12;
  double xi() const;  // M (M!)^(-1/M)
  void validate() const;
};

struct SchemeMetrics {
  double p_c = 0.0;
  double p_s = 0.0;
  double scdp = 0.0;
  Scheme scheme = Scheme::JT;
  EveModel eve_model = EveModel::NCE;
};

// --- connection probabilities --------------------------------------------

double p_c_jt(const NetworkConfig& net, double beta_t);
double p_c_ot(const NetworkConfig& net, std::span<const double> beta_t_k);

// --- non-colluding eavesdroppers -------------------------------------------

double p_s_nce_jt(const NetworkConfig& net, double beta_e, const PolarIntegrationSpec& spec);
double p_s_nce_jt(const NetworkConfig& net, double beta_e);

double p_s_nce_ot(const NetworkConfig& net, std::span<const double> beta_e_k,
                  const PolarIntegrationSpec& spec);
double p_s_nce_ot(const NetworkConfig& net, std::span<const double> beta_e_k);

// alpha = 2 reduction of the OT integral: the radial integral is done in
// closed form, leaving a single angular integral of z e^{z^2} (1 + erf z).
double p_s_nce_ot_alpha2(const NetworkConfig& net, std::span<const double> beta_e_k,
                         int n_theta = 2048);

// --- colluding eavesdroppers ------------------------------------------------

// E[exp(-s I_e)] for the MRC-combined eavesdropper SNR of the JT signal.
double laplace_ie(const NetworkConfig& net, double s, const PolarIntegrationSpec& spec);
double laplace_ie(const NetworkConfig& net, double s);

// Alternating binomial approximation of P{I_e <= beta_e}.
double p_s_ce_jt(const NetworkConfig& net, double beta_e, const ApproximationConfig& approx,
                 const PolarIntegrationSpec& spec);
double p_s_ce_jt(const NetworkConfig& net, double beta_e, const ApproximationConfig& approx);

struct GammaParams {
  double shape = 0.0;  // upsilon
  double scale = 0.0;  // tau
};

// Moment-matched gamma parameters of sum_j |h_j|^2 r_j^(-alpha) for fixed
// eavesdropper distances r_j to one SBS.
GammaParams gamma_moment_params(std::span<const double> distances, double alpha);

struct DiscTruncation {
  double radius = 20.0;
  int j_max = 0;  // 0: smallest J with Poisson tail P{n > J} < 1e-6
};

int poisson_truncation(double mean, double tail = 1e-6);

// Disc-conditioned OT secrecy under colluding eavesdroppers, evaluated with
// per-location gamma parameters (a single eavesdropper gives shape 1 and
// scale r^-alpha) so the J-fold BPP expectation factorizes into the J-th
// power of one disc integral. See estimate_ps_ce_ot_gamma_set() for the
// set-level evaluation.
double p_s_ce_ot_exact(const NetworkConfig& net, std::span<const double> beta_e_k,
                       const DiscTruncation& trunc);

// kappa = pi Gamma(1 + 2/alpha) Gamma(1 - 2/alpha)
double kappa(double alpha);

// Laplace transform of K rho sum_j |h_j|^2 r_j^-alpha over a homogeneous PPP
// centred on an SBS.
double laplace_ik(const NetworkConfig& net, double s);

// OT secrecy treating the eavesdropper fields seen by each SBS as independent.
double p_s_ce_ot_indep(const NetworkConfig& net, std::span<const double> beta_e_k,
                       const ApproximationConfig& approx);

// Exact alpha = 4 value under the same independence premise.
double p_s_ce_ot_alpha4(const NetworkConfig& net, std::span<const double> beta_e_k);

// --- composition ---------------------------------------------------------------

struct AnalyticsOptions {
  ApproximationConfig approx{};
  std::optional<PolarIntegrationSpec> quadrature{};  // defaults_for(net) when empty
  double delta = 2.0;                                // cache-miss rate penalty
};

// p_c, p_s and their product for one scheme. CM reuses the JT formulas with
// the secrecy rate raised to delta * R_s. Under CE the OT secrecy uses the
// independent-field approximation.
SchemeMetrics scheme_metrics(const NetworkConfig& net, const RatePolicy& policy, Scheme scheme,
                             EveModel eve_model, const AnalyticsOptions& options = {});

}  // namespace scdp

#include "scdp/secrecy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "scdp/errors.hpp"
#include "scdp/kernels.hpp"
#include "scdp/special.hpp"

namespace scdp {
namespace {

struct SbsArrays {
  std::vector<double> x, y;
  explicit SbsArrays(const NetworkConfig& net) {
    for (const auto& c : net.sbs_cartesian()) {
      x.push_back(c.x);
      y.push_back(c.y);
    }
  }
  kernels::Sources sources() const { return {x, y}; }
};

// Neumaier summation; the alternating binomial series cancels heavily.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      c_ += (sum_ - t) + v;
    } else {
      c_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

void check_lengths(const NetworkConfig& net, std::span<const double> v, const char* what) {
  if (v.size() != net.num_sbs()) {
    throw ConfigError(fmt::format("{}: expected {} per-SBS values, got {}", what, net.num_sbs(),
                                  v.size()));
  }
}

void check_nonnegative(double beta, const char* what) {
  if (!(beta >= 0.0)) throw DomainError(fmt::format("{}: beta must be >= 0, got {}", what, beta));
}

double path_gain_at_user(const NetworkConfig& net) {
  double g = 0.0;
  for (const auto& b : net.sbs) g += std::pow(b.r, -net.alpha);
  return g;
}

double kr(const NetworkConfig& net) { return static_cast<double>(net.num_sbs()) * net.rho; }

}  // namespace

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::JT: return "JT";
    case Scheme::OT: return "OT";
    case Scheme::CM: return "CM";
  }
  return "?";
}

std::string_view to_string(EveModel m) { return m == EveModel::NCE ? "NCE" : "CE"; }

double rate_to_beta(double rate) {
  if (!(rate >= 0.0)) throw DomainError(fmt::format("rate must be >= 0, got {}", rate));
  return std::expm1(rate * std::numbers::ln2);
}

double beta_to_rate(double beta) {
  check_nonnegative(beta, "beta_to_rate");
  return std::log1p(beta) / std::numbers::ln2;
}

RatePolicy::RatePolicy(double r_s, Uniform redundant) : r_s_(r_s), redundant_(redundant) {
  if (!(r_s >= 0.0)) throw ConfigError("rates: R_s must be >= 0");
  if (!(redundant.r_e >= 0.0)) throw ConfigError("rates: R_e must be >= 0");
}

RatePolicy::RatePolicy(double r_s, PerSbs redundant) : r_s_(r_s), redundant_(std::move(redundant)) {
  if (!(r_s >= 0.0)) throw ConfigError("rates: R_s must be >= 0");
  for (double r : std::get<PerSbs>(redundant_).r_e) {
    if (!(r >= 0.0)) throw ConfigError("rates: per-SBS R_e must be >= 0");
  }
}

double RatePolicy::r_e() const {
  if (const auto* u = std::get_if<Uniform>(&redundant_)) return u->r_e;
  throw ConfigError("rates: policy has per-SBS redundant rates");
}

std::vector<double> RatePolicy::r_e_vector(std::size_t num_sbs) const {
  if (const auto* u = std::get_if<Uniform>(&redundant_)) {
    return std::vector<double>(num_sbs, u->r_e);
  }
  const auto& v = std::get<PerSbs>(redundant_).r_e;
  if (v.size() != num_sbs) {
    throw ConfigError(
        fmt::format("rates: {} per-SBS redundant rates for {} SBSs", v.size(), num_sbs));
  }
  return v;
}

double RatePolicy::beta_t() const {
  const double bs = beta_s();
  return bs + (1.0 + bs) * beta_e();
}

std::vector<double> RatePolicy::beta_e_vector(std::size_t num_sbs) const {
  auto v = r_e_vector(num_sbs);
  for (auto& r : v) r = rate_to_beta(r);
  return v;
}

std::vector<double> RatePolicy::beta_t_vector(std::size_t num_sbs) const {
  const double bs = beta_s();
  auto v = beta_e_vector(num_sbs);
  for (auto& b : v) b = bs + (1.0 + bs) * b;
  return v;
}

RatePolicy RatePolicy::with_secrecy_rate(double r_s) const {
  RatePolicy copy = *this;
  if (!(r_s >= 0.0)) throw ConfigError("rates: R_s must be >= 0");
  copy.r_s_ = r_s;
  return copy;
}

double ApproximationConfig::xi() const {
  validate();
  return m_terms * std::exp(-ln_gamma(m_terms + 1.0) / m_terms);
}

void ApproximationConfig::validate() const {
  if (m_terms < 1 || m_terms > kMaxTerms) {
    throw ConfigError(fmt::format("approximation: M must lie in [1, {}], got {}", kMaxTerms,
                                  m_terms));
  }
}

double p_c_jt(const NetworkConfig& net, double beta_t) {
  validate_geometry(net);
  check_nonnegative(beta_t, "p_c_jt");
  return std::exp(-beta_t / (net.rho * path_gain_at_user(net)));
}

double p_c_ot(const NetworkConfig& net, std::span<const double> beta_t_k) {
  validate_geometry(net);
  check_lengths(net, beta_t_k, "p_c_ot");
  double e = 0.0;
  for (std::size_t k = 0; k < net.num_sbs(); ++k) {
    check_nonnegative(beta_t_k[k], "p_c_ot");
    e += std::pow(net.sbs[k].r, net.alpha) * beta_t_k[k];
  }
  return std::exp(-e / kr(net));
}

double p_s_nce_jt(const NetworkConfig& net, double beta_e, const PolarIntegrationSpec& spec) {
  validate_geometry(net);
  check_nonnegative(beta_e, "p_s_nce_jt");
  if (net.lambda_e == 0.0) return 1.0;
  if (beta_e == 0.0) return 0.0;
  const SbsArrays sbs(net);
  const double c = beta_e / net.rho;
  PolarField f = [&](std::span<const double> x, std::span<const double> y, std::span<double> out) {
    kernels::path_gain_sum(x, y, sbs.sources(), net.alpha, out);
    for (auto& v : out) v = c / v;
    kernels::neg_exp_inplace(out);
  };
  return std::exp(-net.lambda_e * integrate_polar(f, spec));
}

double p_s_nce_jt(const NetworkConfig& net, double beta_e) {
  return p_s_nce_jt(net, beta_e, PolarIntegrationSpec::defaults_for(net));
}

double p_s_nce_ot(const NetworkConfig& net, std::span<const double> beta_e_k,
                  const PolarIntegrationSpec& spec) {
  validate_geometry(net);
  check_lengths(net, beta_e_k, "p_s_nce_ot");
  for (double b : beta_e_k) check_nonnegative(b, "p_s_nce_ot");
  if (net.lambda_e == 0.0) return 1.0;
  if (std::all_of(beta_e_k.begin(), beta_e_k.end(), [](double b) { return b == 0.0; })) {
    return 0.0;
  }
  const SbsArrays sbs(net);
  std::vector<double> coeff(beta_e_k.begin(), beta_e_k.end());
  for (auto& c : coeff) c /= kr(net);
  PolarField f = [&](std::span<const double> x, std::span<const double> y, std::span<double> out) {
    kernels::weighted_path_loss_sum(x, y, sbs.sources(), coeff, net.alpha, out);
    kernels::neg_exp_inplace(out);
  };
  return std::exp(-net.lambda_e * integrate_polar(f, spec));
}

double p_s_nce_ot(const NetworkConfig& net, std::span<const double> beta_e_k) {
  return p_s_nce_ot(net, beta_e_k, PolarIntegrationSpec::defaults_for(net));
}

double p_s_nce_ot_alpha2(const NetworkConfig& net, std::span<const double> beta_e_k,
                         int n_theta) {
  if (net.alpha != 2.0) throw DomainError("p_s_nce_ot_alpha2: requires alpha = 2");
  validate_geometry(net);
  check_lengths(net, beta_e_k, "p_s_nce_ot_alpha2");
  if (n_theta < 16 || n_theta % 2 != 0) {
    throw ConfigError("p_s_nce_ot_alpha2: n_theta must be even and >= 16");
  }
  if (net.lambda_e == 0.0) return 1.0;
  const double k_rho = kr(net);
  double a = 0.0, c = 0.0;
  for (std::size_t k = 0; k < net.num_sbs(); ++k) {
    check_nonnegative(beta_e_k[k], "p_s_nce_ot_alpha2");
    a += beta_e_k[k] / k_rho;
    c += beta_e_k[k] * net.sbs[k].r * net.sbs[k].r / k_rho;
  }
  if (a == 0.0) return 0.0;

  // Radial part: \int_0^inf exp(-a r^2 + 2 sqrt(a) z r) r dr
  //   = (1 + sqrt(pi) z e^{z^2} (1 + erf z)) / (2a).
  // Pairing theta with theta + pi cancels the odd part, leaving
  //   (e^{-c} / a) [pi + sqrt(pi) \int_0^pi z erf(z) e^{z^2} dtheta].
  const double sqrt_a = std::sqrt(a);
  auto z_of = [&](double theta) {
    double z = 0.0;
    for (std::size_t k = 0; k < net.num_sbs(); ++k) {
      z += beta_e_k[k] * net.sbs[k].r * std::cos(net.sbs[k].theta - theta);
    }
    return z / (k_rho * sqrt_a);
  };
  const double h = std::numbers::pi / n_theta;
  double angular = 0.0;
  for (int j = 0; j <= n_theta; ++j) {
    const double z = z_of(j * h);
    const double w = (j == 0 || j == n_theta) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    angular += w * z * std::erf(z) * std::exp(z * z - c);
  }
  angular *= h / 3.0;
  const double integral = (std::numbers::pi * std::exp(-c) + std::sqrt(std::numbers::pi) * angular) / a;
  return std::exp(-net.lambda_e * integral);
}

double laplace_ie(const NetworkConfig& net, double s, const PolarIntegrationSpec& spec) {
  validate(net);
  check_nonnegative(s, "laplace_ie");
  if (s == 0.0 || net.lambda_e == 0.0) return 1.0;
  const SbsArrays sbs(net);
  const double inv = 1.0 / (s * net.rho);
  // s rho G / (1 + s rho G) written so that G = inf stays finite.
  PolarField f = [&](std::span<const double> x, std::span<const double> y, std::span<double> out) {
    kernels::path_gain_sum(x, y, sbs.sources(), net.alpha, out);
    for (auto& v : out) v = 1.0 / (1.0 + inv / v);
  };
  return std::exp(-net.lambda_e * integrate_polar(f, spec));
}

double laplace_ie(const NetworkConfig& net, double s) {
  return laplace_ie(net, s, PolarIntegrationSpec::defaults_for(net));
}

double p_s_ce_jt(const NetworkConfig& net, double beta_e, const ApproximationConfig& approx,
                 const PolarIntegrationSpec& spec) {
  validate(net);
  approx.validate();
  check_nonnegative(beta_e, "p_s_ce_jt");
  if (net.lambda_e == 0.0) return 1.0;
  if (beta_e == 0.0) return 0.0;
  const int m_terms = approx.m_terms;
  const double xi = approx.xi();
  CompensatedSum sum;
  for (int m = 1; m <= m_terms; ++m) {
    const double binom = std::round(std::exp(ln_binomial(m_terms, m)));
    const double sign = (m % 2 == 1) ? 1.0 : -1.0;
    sum.add(sign * binom * laplace_ie(net, m * xi / beta_e, spec));
  }
  return std::clamp(sum.value(), 0.0, 1.0);
}

double p_s_ce_jt(const NetworkConfig& net, double beta_e, const ApproximationConfig& approx) {
  return p_s_ce_jt(net, beta_e, approx, PolarIntegrationSpec::defaults_for(net));
}

GammaParams gamma_moment_params(std::span<const double> distances, double alpha) {
  if (distances.empty()) throw DomainError("gamma_moment_params: empty distance set");
  double mu = 0.0, var = 0.0;
  for (double r : distances) {
    if (!(r > 0.0)) throw DomainError("gamma_moment_params: distances must be positive");
    const double g = std::pow(r, -alpha);
    mu += g;
    var += g * g;
  }
  return {mu * mu / var, var / mu};
}

int poisson_truncation(double mean, double tail) {
  if (!(mean >= 0.0)) throw DomainError("poisson_truncation: mean must be >= 0");
  if (mean == 0.0) return 0;
  for (int j = 0; j < 100000; ++j) {
    if (gamma_p(j + 1.0, mean) < tail) return j;
  }
  throw NumericError("poisson_truncation: tail did not fall below tolerance");
}

double p_s_ce_ot_exact(const NetworkConfig& net, std::span<const double> beta_e_k,
                       const DiscTruncation& trunc) {
  validate(net);
  check_lengths(net, beta_e_k, "p_s_ce_ot_exact");
  for (double b : beta_e_k) check_nonnegative(b, "p_s_ce_ot_exact");
  if (!(trunc.radius > 0.0)) throw ConfigError("disc truncation: radius must be positive");
  if (trunc.j_max < 0) throw ConfigError("disc truncation: J_max must be >= 0");
  if (net.lambda_e == 0.0) return 1.0;

  const double area = std::numbers::pi * trunc.radius * trunc.radius;
  const double mean = net.lambda_e * area;
  const int j_max = trunc.j_max > 0 ? trunc.j_max : poisson_truncation(mean);

  // A lone eavesdropper at distance r_k has shape 1 and scale r_k^-alpha, so
  // P{X_k > beta_k / (K rho)} = Q(1, beta_k r_k^alpha / (K rho)).
  PolarIntegrationSpec spec;
  spec.r_max = trunc.radius;
  spec.adaptive = false;
  const double k_rho = kr(net);
  auto all_leak = [&](double r, double theta) {
    double p = 1.0;
    for (std::size_t k = 0; k < net.num_sbs(); ++k) {
      const double rk = sbs_to_point_distance(net, k, {r, theta});
      p *= gamma_q(1.0, beta_e_k[k] * std::pow(rk, net.alpha) / k_rho);
    }
    return p;
  };
  const double disc = integrate_polar(std::function<double(double, double)>(all_leak), spec);

  CompensatedSum leak;
  const double log_li = std::log(net.lambda_e * disc);
  for (int j = 1; j <= j_max; ++j) {
    leak.add(std::exp(j * log_li - mean - ln_gamma(j + 1.0)));
  }
  return std::clamp(1.0 - leak.value(), 0.0, 1.0);
}

double kappa(double alpha) {
  if (!(alpha > 2.0)) throw DomainError("kappa: alpha must exceed 2");
  return std::numbers::pi * std::tgamma(1.0 + 2.0 / alpha) * std::tgamma(1.0 - 2.0 / alpha);
}

double laplace_ik(const NetworkConfig& net, double s) {
  validate(net);
  check_nonnegative(s, "laplace_ik");
  return std::exp(-kappa(net.alpha) * net.lambda_e * std::pow(kr(net) * s, 2.0 / net.alpha));
}

double p_s_ce_ot_indep(const NetworkConfig& net, std::span<const double> beta_e_k,
                       const ApproximationConfig& approx) {
  validate(net);
  approx.validate();
  check_lengths(net, beta_e_k, "p_s_ce_ot_indep");
  if (net.lambda_e == 0.0) return 1.0;
  const int m_terms = approx.m_terms;
  const double xi = approx.xi();
  double all_leak = 1.0;
  for (double beta : beta_e_k) {
    check_nonnegative(beta, "p_s_ce_ot_indep");
    if (beta == 0.0) continue;  // every term but m = 0 vanishes
    CompensatedSum sum;
    for (int m = 0; m <= m_terms; ++m) {
      const double binom = std::round(std::exp(ln_binomial(m_terms, m)));
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      sum.add(sign * binom * laplace_ik(net, m * xi / beta));
    }
    all_leak *= std::clamp(sum.value(), 0.0, 1.0);
  }
  return std::clamp(1.0 - all_leak, 0.0, 1.0);
}

double p_s_ce_ot_alpha4(const NetworkConfig& net, std::span<const double> beta_e_k) {
  validate(net);
  if (net.alpha != 4.0) throw DomainError("p_s_ce_ot_alpha4: requires alpha = 4");
  check_lengths(net, beta_e_k, "p_s_ce_ot_alpha4");
  if (net.lambda_e == 0.0) return 1.0;
  const double c = 0.5 * kappa(4.0) * net.lambda_e;
  double all_leak = 1.0;
  for (double beta : beta_e_k) {
    check_nonnegative(beta, "p_s_ce_ot_alpha4");
    if (beta == 0.0) continue;
    all_leak *= std::erf(c * std::sqrt(kr(net) / beta));
  }
  return std::clamp(1.0 - all_leak, 0.0, 1.0);
}

SchemeMetrics scheme_metrics(const NetworkConfig& net, const RatePolicy& policy, Scheme scheme,
                             EveModel eve_model, const AnalyticsOptions& options) {
  const auto spec = options.quadrature.value_or(PolarIntegrationSpec::defaults_for(net));
  SchemeMetrics out;
  out.scheme = scheme;
  out.eve_model = eve_model;
  if (scheme == Scheme::OT) {
    const auto bt = policy.beta_t_vector(net.num_sbs());
    const auto be = policy.beta_e_vector(net.num_sbs());
    out.p_c = p_c_ot(net, bt);
    out.p_s = eve_model == EveModel::NCE ? p_s_nce_ot(net, be, spec)
                                         : p_s_ce_ot_indep(net, be, options.approx);
  } else {
    if (!(options.delta > 1.0)) throw ConfigError("delta must exceed 1");
    const RatePolicy p =
        scheme == Scheme::CM ? policy.with_secrecy_rate(options.delta * policy.r_s()) : policy;
    out.p_c = p_c_jt(net, p.beta_t());
    out.p_s = eve_model == EveModel::NCE ? p_s_nce_jt(net, p.beta_e(), spec)
                                         : p_s_ce_jt(net, p.beta_e(), options.approx, spec);
  }
  out.scdp = out.p_c * out.p_s;
  return out;
}

}  // namespace scdp

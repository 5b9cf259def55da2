#include "scdp/rate_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "scdp/errors.hpp"
#include "scdp/kernels.hpp"

namespace scdp {
namespace {

// exp(-x) underflows past this point.
constexpr double kExpCutoff = 745.2;
constexpr double kDefaultBetaInit = 1e-3;

void check_beta_s(double beta_s) {
  if (!(beta_s >= 0.0)) throw DomainError("rate problem: beta_s must be >= 0");
}

struct SbsXY {
  std::vector<double> x, y;
  explicit SbsXY(const NetworkConfig& net) {
    for (const auto& c : net.sbs_cartesian()) {
      x.push_back(c.x);
      y.push_back(c.y);
    }
  }
};

}  // namespace

struct JtRateProblem::Table {
  std::vector<double> b;   // ascending
  std::vector<double> w;
  std::vector<double> wb;  // w * b, for the second moment
  double total_weight = 0.0;
};

JtRateProblem::JtRateProblem(double a, double beta_s, double lambda_e,
                             std::shared_ptr<const Table> table)
    : a_(a), beta_s_(beta_s), lambda_e_(lambda_e), table_(std::move(table)) {}

JtRateProblem JtRateProblem::from_network(const NetworkConfig& net, double beta_s,
                                          const PolarIntegrationSpec& spec) {
  validate(net);
  check_beta_s(beta_s);
  const PolarRule rule = make_polar_rule(spec, 1);
  const SbsXY sbs(net);
  std::vector<double> gain(rule.size());
  kernels::path_gain_sum(rule.x, rule.y, {sbs.x, sbs.y}, net.alpha, gain);

  std::vector<std::size_t> order(rule.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> b(rule.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = 1.0 / (net.rho * gain[i]);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return b[i] < b[j]; });

  auto table = std::make_shared<Table>();
  table->b.reserve(b.size());
  for (std::size_t i : order) {
    table->b.push_back(b[i]);
    table->w.push_back(rule.weight[i]);
    table->wb.push_back(rule.weight[i] * b[i]);
    table->total_weight += rule.weight[i];
  }

  double g_user = 0.0;
  for (const auto& s : net.sbs) g_user += std::pow(s.r, -net.alpha);
  return JtRateProblem(1.0 / (net.rho * g_user), beta_s, net.lambda_e, std::move(table));
}

JtRateProblem JtRateProblem::from_network(const NetworkConfig& net, double beta_s) {
  return from_network(net, beta_s, PolarIntegrationSpec::defaults_for(net));
}

JtRateProblem JtRateProblem::with_beta_s(double beta_s) const {
  check_beta_s(beta_s);
  return JtRateProblem(a_, beta_s, lambda_e_, table_);
}

JtRateProblem JtRateProblem::with_lambda_e(double lambda_e) const {
  if (!(lambda_e >= 0.0)) throw DomainError("rate problem: lambda_e must be >= 0");
  return JtRateProblem(a_, beta_s_, lambda_e, table_);
}

double JtRateProblem::integral(double beta_e) const {
  const auto& t = *table_;
  if (beta_e <= 0.0) return t.total_weight;
  const auto end = std::upper_bound(t.b.begin(), t.b.end(), kExpCutoff / beta_e) - t.b.begin();
  return kernels::exp_weighted_sum(std::span(t.w).first(end), std::span(t.b).first(end), beta_e);
}

double JtRateProblem::moment(double beta_e, int power) const {
  const auto& t = *table_;
  const std::size_t end =
      beta_e <= 0.0 ? t.b.size()
                    : std::upper_bound(t.b.begin(), t.b.end(), kExpCutoff / beta_e) - t.b.begin();
  const auto& w = power == 1 ? t.w : t.wb;
  return kernels::exp_weighted_moment(std::span(w).first(end), std::span(t.b).first(end),
                                      std::max(beta_e, 0.0));
}

double JtRateProblem::q(double beta_e) const {
  return a_ * (1.0 + beta_s_) * beta_e + lambda_e_ * integral(beta_e);
}

double JtRateProblem::dq(double beta_e) const {
  return a_ * (1.0 + beta_s_) - lambda_e_ * moment(beta_e, 1);
}

double JtRateProblem::d2q(double beta_e) const { return lambda_e_ * moment(beta_e, 2); }

double JtRateProblem::scdp(double beta_e) const { return std::exp(-a_ * beta_s_ - q(beta_e)); }

JtRateSolution solve_jt_rate(const JtRateProblem& problem, const BisectionSpec& bisection) {
  JtRateSolution out;
  if (problem.lambda_e() == 0.0 || problem.dq(0.0) >= 0.0) {
    out.scdp_star = problem.scdp(0.0);
    out.q_star = problem.q(0.0);
    return out;
  }
  auto g = [&](double b) { return problem.dq(b); };
  BisectionSpec spec = bisection;
  spec.lo = 0.0;
  spec.hi = expand_upper_bracket(g, std::max(bisection.hi, 1e-6));
  const RootResult root = bisect_root(g, spec);
  out.beta_e_star = root.x;
  out.q_star = problem.q(root.x);
  out.scdp_star = problem.scdp(root.x);
  out.iterations = root.iterations;
  return out;
}

JtRateSolution solve_cm_rate(const JtRateProblem& problem, double delta,
                             const BisectionSpec& bisection) {
  if (!(delta > 1.0)) throw ConfigError("delta must exceed 1");
  const double beta_s = std::pow(1.0 + problem.beta_s(), delta) - 1.0;
  return solve_jt_rate(problem.with_beta_s(beta_s), bisection);
}

struct OtRateProblem::Table {
  std::size_t n = 0;
  std::vector<double> w;
  std::vector<double> a;  // K blocks of n
};

OtRateProblem OtRateProblem::from_network(const NetworkConfig& net, double beta_s,
                                          const PolarIntegrationSpec& spec) {
  validate(net);
  check_beta_s(beta_s);
  const PolarRule rule = make_polar_rule(spec, 1);
  const std::size_t k_count = net.num_sbs();
  const double k_rho = static_cast<double>(k_count) * net.rho;
  const SbsXY sbs(net);

  auto table = std::make_shared<Table>();
  table->n = rule.size();
  table->w = rule.weight;
  table->a.resize(k_count * rule.size());
  for (std::size_t k = 0; k < k_count; ++k) {
    const double coeff = 1.0 / k_rho;
    kernels::weighted_path_loss_sum(rule.x, rule.y, {std::span(sbs.x).subspan(k, 1),
                                                     std::span(sbs.y).subspan(k, 1)},
                                    std::span(&coeff, 1), net.alpha,
                                    std::span(table->a).subspan(k * rule.size(), rule.size()));
  }

  OtRateProblem p;
  p.beta_s_ = beta_s;
  p.lambda_e_ = net.lambda_e;
  double rb_sum = 0.0;
  for (const auto& s : net.sbs) {
    const double rb = std::pow(s.r, net.alpha);
    p.linear_.push_back((1.0 + beta_s) * rb / k_rho);
    rb_sum += rb;
  }
  p.constant_ = beta_s * rb_sum / k_rho;
  p.table_ = std::move(table);
  return p;
}

OtRateProblem OtRateProblem::from_network(const NetworkConfig& net, double beta_s) {
  return from_network(net, beta_s, PolarIntegrationSpec::defaults_for(net));
}

std::span<const double> OtRateProblem::weights() const noexcept { return table_->w; }

std::span<const double> OtRateProblem::exponents(std::size_t k) const noexcept {
  return std::span(table_->a).subspan(k * table_->n, table_->n);
}

namespace {

void check_beta(const OtRateProblem& p, std::span<const double> beta) {
  if (beta.size() != p.num_sbs()) {
    throw ConfigError(fmt::format("OT rates: expected {} values, got {}", p.num_sbs(),
                                  beta.size()));
  }
  for (double b : beta) {
    if (!(b >= 0.0)) throw DomainError("OT rates: beta must be >= 0");
  }
}

// exp(-sum_{j != skip} a_j beta_j) per node; skip = K means none.
std::vector<double> partial_factor(const OtRateProblem& p, std::span<const double> beta,
                                   std::size_t skip) {
  const std::size_t n = p.weights().size();
  std::vector<double> e(n, 0.0);
  for (std::size_t k = 0; k < p.num_sbs(); ++k) {
    if (k == skip || beta[k] == 0.0) continue;
    const auto a = p.exponents(k);
    for (std::size_t i = 0; i < n; ++i) e[i] += a[i] * beta[k];
  }
  kernels::neg_exp_inplace(e);
  return e;
}

// Single-coordinate view: w'_i = w_i exp(-E^{-k}_i) and a_{k,i}, with zero
// weights dropped.
struct Coordinate {
  std::vector<double> w, a;
  double linear = 0.0;
  double lambda = 0.0;

  double value(double beta) const {
    return linear * beta + lambda * kernels::exp_weighted_sum(w, a, beta);
  }
  double slope(double beta) const {
    return linear - lambda * kernels::exp_weighted_moment(w, a, beta);
  }
};

Coordinate coordinate(const OtRateProblem& p, std::span<const double> beta, std::size_t k) {
  const auto factor = partial_factor(p, beta, k);
  const auto w = p.weights();
  const auto a = p.exponents(k);
  Coordinate c;
  c.linear = p.linear_coefficients()[k];
  c.lambda = p.lambda_e();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double wi = w[i] * factor[i];
    if (wi > 0.0) {
      c.w.push_back(wi);
      c.a.push_back(a[i]);
    }
  }
  return c;
}

double minimize_coordinate(const Coordinate& c, double start, const BisectionSpec& bisection) {
  auto g = [&](double b) { return c.slope(b); };
  if (c.lambda == 0.0 || g(0.0) >= 0.0) return 0.0;
  BisectionSpec spec = bisection;
  spec.lo = 0.0;
  spec.hi = expand_upper_bracket(g, std::max({start, bisection.hi, 1e-6}));
  return bisect_root(g, spec).x;
}

}  // namespace

double OtRateProblem::omega(std::span<const double> beta) const {
  check_beta(*this, beta);
  double lin = 0.0;
  for (std::size_t k = 0; k < num_sbs(); ++k) lin += linear_[k] * beta[k];
  const auto e = partial_factor(*this, beta, num_sbs());
  double integral = 0.0;
  const auto w = weights();
  for (std::size_t i = 0; i < e.size(); ++i) integral += w[i] * e[i];
  return lin + lambda_e_ * integral;
}

double OtRateProblem::domega(std::span<const double> beta, std::size_t k) const {
  check_beta(*this, beta);
  if (k >= num_sbs()) throw ConfigError("OT rates: coordinate out of range");
  const auto e = partial_factor(*this, beta, num_sbs());
  const auto w = weights();
  const auto a = exponents(k);
  double m = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) m += w[i] * a[i] * e[i];
  return linear_[k] - lambda_e_ * m;
}

std::vector<double> OtRateProblem::gradient(std::span<const double> beta) const {
  check_beta(*this, beta);
  const auto e = partial_factor(*this, beta, num_sbs());
  const auto w = weights();
  std::vector<double> g(num_sbs());
  for (std::size_t k = 0; k < num_sbs(); ++k) {
    const auto a = exponents(k);
    double m = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) m += w[i] * a[i] * e[i];
    g[k] = linear_[k] - lambda_e_ * m;
  }
  return g;
}

double OtRateProblem::scdp(std::span<const double> beta) const {
  return std::exp(-constant_ - omega(beta));
}

double OtRateProblem::domega_uniform(double beta) const {
  const std::vector<double> v(num_sbs(), beta);
  const auto g = gradient(v);
  return std::accumulate(g.begin(), g.end(), 0.0);
}

AoResult ao_solve_ot_rates(const OtRateProblem& problem, const AoSettings& settings) {
  const std::size_t k_count = problem.num_sbs();
  if (!(settings.epsilon > 0.0)) throw ConfigError("AO: epsilon must be positive");
  if (settings.max_outer < 1) throw ConfigError("AO: max_outer must be >= 1");

  AoResult out;
  out.beta_e = settings.beta_init.empty() ? std::vector<double>(k_count, kDefaultBetaInit)
                                          : settings.beta_init;
  check_beta(problem, out.beta_e);
  double omega = problem.omega(out.beta_e);
  out.omega_history.push_back(omega);

  std::vector<std::size_t> order(k_count);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffler(settings.shuffle_seed);

  for (int it = 1; it <= settings.max_outer; ++it) {
    if (settings.order == SweepOrder::Shuffled) std::shuffle(order.begin(), order.end(), shuffler);
    double max_step = 0.0;
    for (std::size_t k : order) {
      const Coordinate c = coordinate(problem, out.beta_e, k);
      const double current = out.beta_e[k];
      const double candidate = minimize_coordinate(c, current, settings.bisection);
      if (c.value(candidate) <= c.value(current)) {
        max_step = std::max(max_step, std::abs(candidate - current));
        out.beta_e[k] = candidate;
      }
    }
    const double next = problem.omega(out.beta_e);
    out.omega_history.push_back(next);
    out.iterations = it;
    const double change = std::abs(next - omega) / std::max(std::abs(omega), 1e-300);
    omega = next;
    if (change < settings.epsilon && max_step <= settings.step_tol) {
      out.converged = true;
      break;
    }
  }
  out.omega = omega;
  out.scdp = std::exp(-problem.constant_term() - omega);
  return out;
}

UniformRateSolution solve_ot_uniform_rate(const OtRateProblem& problem,
                                          const BisectionSpec& bisection) {
  const std::size_t k_count = problem.num_sbs();
  const std::size_t n = problem.weights().size();
  std::vector<double> b(n, 0.0);
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto a = problem.exponents(k);
    for (std::size_t i = 0; i < n; ++i) b[i] += a[i];
  }
  Coordinate c;
  c.w.assign(problem.weights().begin(), problem.weights().end());
  c.a = std::move(b);
  const auto lin = problem.linear_coefficients();
  c.linear = std::accumulate(lin.begin(), lin.end(), 0.0);
  c.lambda = problem.lambda_e();

  UniformRateSolution out;
  out.beta_e_star = minimize_coordinate(c, 1.0, bisection);
  out.omega_star = problem.omega(std::vector<double>(k_count, out.beta_e_star));
  out.scdp_star = std::exp(-problem.constant_term() - out.omega_star);
  return out;
}

KktReport kkt_residual(const OtRateProblem& problem, std::span<const double> beta) {
  const auto g = problem.gradient(beta);
  KktReport r;
  r.min_gradient = *std::min_element(g.begin(), g.end());
  r.min_beta = *std::min_element(beta.begin(), beta.end());
  for (std::size_t k = 0; k < g.size(); ++k) {
    r.max_complementarity = std::max(r.max_complementarity, std::abs(beta[k] * g[k]));
  }
  return r;
}

}  // namespace scdp

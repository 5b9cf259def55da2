// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scdp/cache_optimizer.hpp"
#include "scdp/content.hpp"
#include "scdp/kernels.hpp"
#include "scdp/monte_carlo.hpp"
#include "scdp/network.hpp"
#include "scdp/quadrature.hpp"
#include "scdp/rate_optimizer.hpp"
#include "scdp/secrecy.hpp"

using namespace scdp;

namespace {

constexpr double kLambda0 = 0.01;

struct Outcome {
  bool pass = true;
  std::string detail;
};

NetworkConfig linear(std::size_t k, double spacing, double user_x, double lambda) {
  NetworkConfig n;
  n.sbs = layout_linear(k, spacing, user_x);
  n.lambda_e = lambda;
  return n;
}

NetworkConfig random_geometry(std::mt19937_64& gen, std::size_t k, double lambda) {
  std::uniform_real_distribution<double> ur(0.3, 5.0), ut(0.0, 2 * std::numbers::pi);
  NetworkConfig n;
  for (std::size_t i = 0; i < k; ++i) n.sbs.push_back({ur(gen), ut(gen)});
  n.lambda_e = lambda;
  return n;
}

TrialBatch batch(std::size_t n, std::uint64_t seed) {
  TrialBatch b;
  b.n_trials = n;
  b.seed = seed;
  return b;
}

// 1. Analytic vs simulated NCE probabilities on the default layout.
Outcome criterion1() {
  Outcome o;
  double worst = 0.0;  // largest |delta| / (3 se + 0.005)
  int cells = 0, failed = 0;
  std::uint64_t seed = 1000;
  for (double lambda : {kLambda0, 3 * kLambda0}) {
    const NetworkConfig n = linear(3, 1.0, 1.0, lambda);
    for (int i = 0; i <= 8; ++i) {
      const RatePolicy p = RatePolicy::uniform(1.0, 0.5 * i);
      const auto bt = p.beta_t_vector(3);
      const auto be = p.beta_e_vector(3);
      const std::pair<Estimate, double> rows[] = {
          {estimate_pc(n, p, Scheme::JT, batch(100000, ++seed)), p_c_jt(n, p.beta_t())},
          {estimate_pc(n, p, Scheme::OT, batch(100000, ++seed)), p_c_ot(n, bt)},
          {estimate_ps(n, p, Scheme::JT, EveModel::NCE, batch(100000, ++seed)),
           p_s_nce_jt(n, p.beta_e())},
          {estimate_ps(n, p, Scheme::OT, EveModel::NCE, batch(100000, ++seed)), p_s_nce_ot(n, be)},
      };
      for (const auto& [mc, analytic] : rows) {
        const double ratio = std::abs(mc.value - analytic) / (3 * mc.std_error + 0.005);
        worst = std::max(worst, ratio);
        ++cells;
        if (ratio >= 1.0) ++failed;
      }
    }
  }
  o.pass = failed == 0;
  o.detail = fmt::format("{} cells, {} outside 3se+0.005, worst ratio {:.3f}", cells, failed, worst);
  return o;
}

// 2. Colluding approximations against simulation, K = 3, D = 6, 3 lambda0.
Outcome criterion2() {
  Outcome o;
  const NetworkConfig n = linear(3, 6.0, 6.0, 3 * kLambda0);
  const ApproximationConfig m5{};
  SimulationOptions indep;
  indep.ce_ot_geometry = CeOtGeometry::Independent;
  double g_jt = 0, g_ot = 0, g4i = 0, g4c = 0;
  std::uint64_t seed = 2000;
  for (double re : {0.5, 1.0, 2.0, 3.0}) {
    const RatePolicy p = RatePolicy::uniform(1.0, re);
    const auto be = p.beta_e_vector(3);
    const double jt = estimate_ps(n, p, Scheme::JT, EveModel::CE, batch(100000, ++seed)).value;
    const double ot = estimate_ps(n, p, Scheme::OT, EveModel::CE, batch(100000, ++seed)).value;
    const double oti =
        estimate_ps(n, p, Scheme::OT, EveModel::CE, batch(100000, ++seed), indep).value;
    const double a4 = p_s_ce_ot_alpha4(n, be);
    g_jt = std::max(g_jt, std::abs(p_s_ce_jt(n, p.beta_e(), m5) - jt));
    g_ot = std::max(g_ot, std::abs(p_s_ce_ot_indep(n, be, m5) - ot));
    g4i = std::max(g4i, std::abs(a4 - oti));
    g4c = std::max(g4c, std::abs(a4 - ot));
  }
  o.pass = g_jt < 0.03 && g_ot < 0.03 && g4i < 0.01 && g4c < 0.02;
  o.detail = fmt::format(
      "max gaps: JT M=5 {:.4f} (<0.03), OT M=5 {:.4f} (<0.03), alpha4 vs indep {:.4f} (<0.01), "
      "alpha4 vs correlated {:.4f} (<0.02)",
      g_jt, g_ot, g4i, g4c);
  return o;
}

// 3. Equal-rate dominance on random geometries.
Outcome criterion3() {
  Outcome o;
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> ul(0.002, 0.1), ub(0.05, 8.0);
  double worst_c = 0.0, worst_s = 0.0;
  int violations = 0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t k = 1 + i % 5;
    const NetworkConfig n = random_geometry(gen, k, ul(gen));
    const double bt = ub(gen), be = ub(gen);
    const std::vector<double> vt(k, bt), ve(k, be);
    const double dc = p_c_ot(n, vt) - p_c_jt(n, bt);
    const double ds = p_s_nce_jt(n, be) - p_s_nce_ot(n, ve);
    worst_c = std::max(worst_c, dc);
    worst_s = std::max(worst_s, ds);
    if (dc > 1e-12 || ds > 1e-12) ++violations;
  }
  o.pass = violations == 0;
  o.detail = fmt::format("500 geometries, {} violations; max(pc_ot - pc_jt) {:.3g}, "
                         "max(ps_jt - ps_ot) {:.3g}",
                         violations, worst_c, worst_s);
  return o;
}

// Independent tabulation of the JT SCDP on a fixed polar rule.
struct JtTable {
  std::vector<double> w, b;
  double a = 0.0, beta_s = 0.0, lambda = 0.0;

  JtTable(const NetworkConfig& n, double bs) : beta_s(bs), lambda(n.lambda_e) {
    const PolarRule rule = make_polar_rule(PolarIntegrationSpec::defaults_for(n), 4);
    std::vector<double> sx, sy;
    for (const auto& c : n.sbs_cartesian()) {
      sx.push_back(c.x);
      sy.push_back(c.y);
    }
    std::vector<double> g(rule.size());
    kernels::path_gain_sum(rule.x, rule.y, {sx, sy}, n.alpha, g);
    std::vector<std::pair<double, double>> nodes(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) nodes[i] = {1.0 / (n.rho * g[i]), rule.weight[i]};
    std::sort(nodes.begin(), nodes.end());
    for (const auto& [bi, wi] : nodes) {
      b.push_back(bi);
      w.push_back(wi);
    }
    double gb = 0.0;
    for (const auto& p : n.sbs) gb += std::pow(p.r, -n.alpha);
    a = 1.0 / (n.rho * gb);
  }

  double scdp(double be) const {
    const double bt = beta_s + (1 + beta_s) * be;
    // exp(-x) is exactly zero in double precision beyond x = 746.
    const std::size_t used =
        be > 0.0 ? std::upper_bound(b.begin(), b.end(), 746.0 / be) - b.begin() : b.size();
    const std::span<const double> ws(w.data(), used), bs(b.data(), used);
    return std::exp(-a * bt - lambda * kernels::exp_weighted_sum(ws, bs, be));
  }
};

// 4. Zero crossing of the JT rate derivative against a grid argmax.
Outcome criterion4() {
  Outcome o;
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> ul(0.005, 0.1), urs(0.25, 3.0), uf(1.5, 3.0);
  int misses = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const NetworkConfig n = random_geometry(gen, 1 + i % 5, ul(gen));
    const double bs = rate_to_beta(urs(gen));
    const JtTable t(n, bs);
    // Log-concave objective: once it drops between hi and 2 hi the peak is below 2 hi.
    double hi = 1.0;
    while (t.scdp(2 * hi) >= t.scdp(hi)) hi *= 2;
    const double top = 2 * hi, step = top / 9999;
    double arg = 0.0, best = -1.0;
    for (int j = 0; j < 10000; ++j) {
      const double v = t.scdp(j * step);
      if (v > best) {
        best = v;
        arg = j * step;
      }
    }
    const double bstar = solve_jt_rate(JtRateProblem::from_network(n, bs)).beta_e_star;
    worst = std::max(worst, std::abs(bstar - arg) / step);
    if (std::abs(bstar - arg) > step) ++misses;
  }
  int order_fail = 0;
  for (int i = 0; i < 20; ++i) {
    NetworkConfig n = random_geometry(gen, 1 + i % 5, ul(gen));
    const double rs = urs(gen);
    const double b0 = solve_jt_rate(JtRateProblem::from_network(n, rate_to_beta(rs))).beta_e_star;
    const double b_rs =
        solve_jt_rate(JtRateProblem::from_network(n, rate_to_beta(rs * uf(gen)))).beta_e_star;
    n.lambda_e *= uf(gen);
    const double b_l = solve_jt_rate(JtRateProblem::from_network(n, rate_to_beta(rs))).beta_e_star;
    if (!(b_l > b0) || !(b_rs < b0)) ++order_fail;
  }
  o.pass = misses == 0 && order_fail == 0;
  o.detail = fmt::format("50 configs, {} beyond one step (worst {:.2f} steps); "
                         "20 paired direction checks, {} failed",
                         misses, worst, order_fail);
  return o;
}

// Omega on a 2-D grid for K = 2, using separable exponentials.
std::pair<double, double> ot_grid_argmin(const NetworkConfig& n, double bs,
                                         const PolarIntegrationSpec& spec, double top, int pts) {
  const PolarRule rule = make_polar_rule(spec, 1);
  const auto sbs = n.sbs_cartesian();
  const double kr = 2 * n.rho;
  const std::size_t m = rule.size();
  std::vector<double> e1(pts * m), e2(pts * m);
  const double step = top / (pts - 1);
  for (std::size_t i = 0; i < m; ++i) {
    const double a1 = std::pow(std::hypot(rule.x[i] - sbs[0].x, rule.y[i] - sbs[0].y), n.alpha) / kr;
    const double a2 = std::pow(std::hypot(rule.x[i] - sbs[1].x, rule.y[i] - sbs[1].y), n.alpha) / kr;
    for (int g = 0; g < pts; ++g) {
      e1[g * m + i] = rule.weight[i] * std::exp(-a1 * g * step);
      e2[g * m + i] = std::exp(-a2 * g * step);
    }
  }
  const double c1 = (1 + bs) * std::pow(n.sbs[0].r, n.alpha) / kr;
  const double c2 = (1 + bs) * std::pow(n.sbs[1].r, n.alpha) / kr;
  double best = INFINITY;
  std::pair<double, double> arg{0, 0};
  for (int g1 = 0; g1 < pts; ++g1) {
    for (int g2 = 0; g2 < pts; ++g2) {
      double s = 0.0;
      const double* p1 = &e1[g1 * m];
      const double* p2 = &e2[g2 * m];
      for (std::size_t i = 0; i < m; ++i) s += p1[i] * p2[i];
      const double v = c1 * g1 * step + c2 * g2 * step + n.lambda_e * s;
      if (v < best) {
        best = v;
        arg = {g1 * step, g2 * step};
      }
    }
  }
  return arg;
}

// 5. Alternating optimization over the OT redundant rates.
Outcome criterion5() {
  Outcome o;
  std::vector<NetworkConfig> configs{linear(3, 1.0, 0.7, 3 * kLambda0), linear(3, 1.0, 1.0, kLambda0),
                                     linear(4, 2.0, 0.5, 3 * kLambda0)};
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> ul(0.005, 0.1);
  for (int i = 0; i < 12; ++i) configs.push_back(random_geometry(gen, 2 + i % 4, ul(gen)));

  int mono = 0, kkt = 0, iters = 0, nonconv = 0;
  double worst_kkt = 0.0;
  int max_iters = 0;
  for (const auto& n : configs) {
    const OtRateProblem p = OtRateProblem::from_network(n, 1.0);
    const AoResult r = ao_solve_ot_rates(p);
    for (std::size_t i = 1; i < r.omega_history.size(); ++i) {
      if (r.omega_history[i] > r.omega_history[i - 1] + 1e-12) ++mono;
    }
    const KktReport k = kkt_residual(p, r.beta_e);
    const double res = std::max(k.max_complementarity, std::max(0.0, -k.min_gradient));
    worst_kkt = std::max(worst_kkt, res);
    if (res >= 1e-6 || k.min_beta < 0.0) ++kkt;
    max_iters = std::max(max_iters, r.iterations);
    if (r.iterations > 200) ++iters;
    if (!r.converged) ++nonconv;
  }

  PolarIntegrationSpec coarse;
  coarse.n_r = 128;
  coarse.n_theta = 64;
  coarse.adaptive = false;
  int grid_miss = 0;
  double grid_worst = 0.0;
  for (const auto& n : {linear(2, 1.0, 0.2, 3 * kLambda0), linear(2, 3.0, 0.7, kLambda0),
                        linear(2, 2.0, -0.5, 3 * kLambda0)}) {
    const AoResult r = ao_solve_ot_rates(OtRateProblem::from_network(n, 1.0, coarse));
    const double top = 2.0 * std::max(r.beta_e[0], r.beta_e[1]) + 0.5;
    const double step = top / 299;
    const auto [g1, g2] = ot_grid_argmin(n, 1.0, coarse, top, 300);
    const double d = std::max(std::abs(g1 - r.beta_e[0]), std::abs(g2 - r.beta_e[1]));
    grid_worst = std::max(grid_worst, d / step);
    if (d > step) ++grid_miss;
  }

  double sym = 0.0;
  for (const auto& [n, pairs] :
       std::vector<std::pair<NetworkConfig, std::vector<std::pair<int, int>>>>{
           {linear(2, 1.0, 0.5, 3 * kLambda0), {{0, 1}}},
           {linear(3, 1.0, 1.0, 3 * kLambda0), {{0, 2}}},
           {linear(4, 1.5, 2.25, kLambda0), {{0, 3}, {1, 2}}}}) {
    const AoResult r = ao_solve_ot_rates(OtRateProblem::from_network(n, 1.0));
    for (auto [i, j] : pairs) sym = std::max(sym, std::abs(r.beta_e[i] - r.beta_e[j]));
  }

  o.pass = mono == 0 && kkt == 0 && iters == 0 && nonconv == 0 && grid_miss == 0 && sym < 1e-6;
  o.detail = fmt::format(
      "{} configs: {} increases, {} KKT failures (worst {:.2g}), max {} iterations, {} not "
      "converged; K=2 grid: {} beyond one step (worst {:.2f}); symmetric spread {:.2g}",
      configs.size(), mono, kkt, worst_kkt, max_iters, nonconv, grid_miss, grid_worst, sym);
  return o;
}

ContentConfig content(double gamma, double delta, int cache = 20) {
  ContentConfig c;
  c.gamma = gamma;
  c.delta = delta;
  c.cache_size = cache;
  return c;
}

// 6. Closed-form caching split.
Outcome criterion6() {
  Outcome o;
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(0.0, 1.0), ug(0.2, 3.0);
  int misses = 0, checked = 0;
  double worst = 0.0;
  std::vector<std::pair<ScdpTriple, std::size_t>> triples;
  while (checked < 200) {
    const ScdpTriple t{u(gen), u(gen), u(gen)};
    if (!(t.jt > t.cm)) continue;
    const std::size_t k = 2 + gen() % 3;
    ContentConfig c = content(ug(gen), 2.0, 1 + static_cast<int>(gen() % 20));
    if (static_cast<int>(k) * c.cache_size >= c.n_files) continue;
    ++checked;
    triples.push_back({t, k});
    double arg = 0.0, best = -INFINITY;
    for (int i = 0; i <= 2000; ++i) {
      const double phi = i / 2000.0;
      const double v = scdp_continuous(t, c, k, phi);
      if (v > best) {
        best = v;
        arg = phi;
      }
    }
    const double d = std::abs(optimal_phi(t, c, k) - arg);
    worst = std::max(worst, d);
    if (d >= 5e-4) ++misses;
  }

  const ContentConfig c12 = content(1.2, 2.0);
  const bool boundaries = optimal_phi({0.2, 0.3, 0.1}, c12, 3) == 0.0 &&
                          optimal_phi({0.9, 0.3, 0.25}, c12, 3) == 1.0 &&
                          optimal_phi({0.9, 0.3, 0.5}, c12, 3) == 1.0 &&
                          optimal_phi({0.5, 0.4, 0.1}, c12, 1) == 1.0;

  int gamma_fail = 0;
  for (const auto& [t, k] : triples) {
    double prev = -1.0;
    for (double g : {0.6, 0.9, 1.2, 2.0}) {
      const double phi = optimal_phi(t, content(g, 2.0), k);
      if (phi < prev) ++gamma_fail;
      prev = phi;
    }
  }

  int order_fail = 0, runs = 0;
  for (std::size_t k : {2, 3, 4}) {
    for (double lambda : {kLambda0, 3 * kLambda0}) {
      const NetworkConfig n = linear(k, 1.0, 0.5 * (k - 1.0), lambda);
      for (double rs : {0.5, 1.0, 2.0}) {
        for (double delta : {2.0, 3.0}) {
          const DesignReport r = end_to_end_design(n, content(1.2, delta), rs);
          ++runs;
          if (!r.jt_beats_cm || !(r.triple.jt > r.triple.cm)) ++order_fail;
        }
      }
    }
  }

  o.pass = misses == 0 && boundaries && gamma_fail == 0 && order_fail == 0;
  o.detail = fmt::format(
      "200 triples, {} beyond 5e-4 (worst {:.2g}); boundaries {}; {} gamma-order failures; "
      "p_jt > p_cm failed in {} of {} pipeline runs",
      misses, worst, boundaries ? "exact" : "WRONG", gamma_fail, order_fail, runs);
  return o;
}

// 7. Hybrid caching at the optimal split against the single-strategy baselines.
Outcome criterion7() {
  Outcome o;
  double margin = INFINITY;
  std::string where;
  for (double lambda : {kLambda0, 3 * kLambda0}) {
    const NetworkConfig n = linear(3, 1.0, 1.0, lambda);
    for (double rs : {0.5, 1.0, 2.0}) {
      const DesignReport r = end_to_end_design(n, content(1.2, 3.0), rs);
      const double m = r.overall_at_phi_star -
                       std::max({r.overall_mpf_only, r.overall_dsf_only, r.overall_no_cache});
      if (m < margin) {
        margin = m;
        where = fmt::format("lambda_e={}, R_s={}, phi*={:.4f}", lambda, rs, r.phi_star);
      }
    }
  }
  o.pass = margin >= -1e-9;
  o.detail = fmt::format("smallest margin {:.3g} at {}", margin, where);
  return o;
}

// 8. Numerical hygiene.
Outcome criterion8() {
  Outcome o;
  const NetworkConfig n = linear(3, 1.0, 1.0, 3 * kLambda0);
  const std::vector<double> b(3, 1.0);
  PolarIntegrationSpec base = PolarIntegrationSpec::defaults_for(n), fine = base;
  fine.n_r *= 2;
  fine.n_theta *= 2;
  double quad = 0.0;
  const std::function<double(const PolarIntegrationSpec&)> integrals[] = {
      [&](const PolarIntegrationSpec& s) { return p_s_nce_jt(n, 1.0, s); },
      [&](const PolarIntegrationSpec& s) { return p_s_nce_ot(n, b, s); },
      [&](const PolarIntegrationSpec& s) { return laplace_ie(n, 0.5, s); },
  };
  for (const auto& f : integrals) {
    const double x = f(base), y = f(fine);
    quad = std::max(quad, std::abs(x - y) / std::abs(y));
  }

  const RatePolicy p = RatePolicy::uniform(1.0, 1.0);
  TrialBatch narrow = batch(100000, 81), wide = batch(100000, 81);
  narrow.window_radius = 20.0;
  wide.window_radius = 40.0;
  double window = 0.0;
  for (Scheme s : {Scheme::JT, Scheme::OT}) {
    for (EveModel e : {EveModel::NCE, EveModel::CE}) {
      window = std::max(window, std::abs(estimate_ps(n, p, s, e, narrow).value -
                                         estimate_ps(n, p, s, e, wide).value));
    }
  }

  bool identical = true;
  TrialBatch w1 = batch(50000, 82), w8 = batch(50000, 82);
  w1.workers = 1;
  w8.workers = 8;
  for (Scheme s : {Scheme::JT, Scheme::OT, Scheme::CM}) {
    for (EveModel e : {EveModel::NCE, EveModel::CE}) {
      const Estimate x = estimate_scdp(n, p, s, e, w1), y = estimate_scdp(n, p, s, e, w8);
      identical = identical && x.value == y.value && x.std_error == y.std_error;
    }
  }

  double zipf = 0.0;
  for (double g : {0.0, 0.6, 1.0, 1.2, 2.0, 3.0}) {
    for (int nf : {2, 100, 1000}) {
      ContentConfig c;
      c.gamma = g;
      c.n_files = nf;
      double s = 0.0;
      for (int m = 1; m <= nf; ++m) s += zipf_pmf(c, m);
      zipf = std::max(zipf, std::abs(s - 1.0));
    }
  }

  // X = sum_j |h_j|^2 r_j^-alpha for fixed eavesdropper distances.
  int moment_fail = 0;
  TrialRng rng(83, 0);
  for (const std::vector<double>& d : {std::vector<double>{1.0, 1.6, 2.5, 4.0},
                                       std::vector<double>{0.7, 0.9, 3.0},
                                       std::vector<double>{2.0}}) {
    const GammaParams g = gamma_moment_params(d, 4.0);
    const int m = 200000;
    std::vector<double> xs(m);
    for (auto& x : xs) {
      x = 0.0;
      for (double r : d) x += rng.exponential() * std::pow(r, -4.0);
    }
    double m1 = 0.0, m2 = 0.0, m4 = 0.0;
    for (double x : xs) m1 += x;
    m1 /= m;
    for (double x : xs) {
      const double c = (x - m1) * (x - m1);
      m2 += c;
      m4 += c * c;
    }
    m2 /= m;
    m4 /= m;
    if (std::abs(m1 - g.shape * g.scale) >= 3 * std::sqrt(m2 / m)) ++moment_fail;
    if (std::abs(m2 - g.shape * g.scale * g.scale) >= 3 * std::sqrt((m4 - m2 * m2) / m)) {
      ++moment_fail;
    }
  }

  o.pass = quad < 1e-6 && window < 0.002 && identical && zipf < 1e-12 && moment_fail == 0;
  o.detail = fmt::format(
      "quadrature drift {:.2g} (<1e-6), window drift {:.4f} (<0.002), workers 1 vs 8 {}, "
      "zipf normalization {:.2g}, {} moment checks outside 3 sigma",
      quad, window, identical ? "identical" : "DIFFER", zipf, moment_fail);
  return o;
}

}  // namespace

int main() {
  const std::function<Outcome()> criteria[] = {criterion1, criterion2, criterion3, criterion4,
                                               criterion5, criterion6, criterion7, criterion8};
  int failed = 0;
  for (std::size_t i = 0; i < std::size(criteria); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fmt::print("{} criterion {}: {} [{:.1f}s]\n", o.pass ? "PASS" : "FAIL", i + 1, o.detail, secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

#include "scdp/cache_optimizer.hpp"

#include <cmath>

#include "scdp/errors.hpp"
#include "scdp/secrecy.hpp"

namespace scdp {
namespace {

constexpr double kUnitGammaBand = 1e-6;

ContentConfig with_phi(ContentConfig c, double phi) {
  c.phi = phi;
  return c;
}

}  // namespace

double scdp_overall(const ScdpTriple& triple, const ContentConfig& content, std::size_t num_sbs,
                    ZipfMode mode) {
  const auto p = scheme_probabilities(content, num_sbs, mode);
  return p.jt * triple.jt + p.ot * triple.ot + p.cm * triple.cm;
}

double scdp_continuous(const ScdpTriple& triple, const ContentConfig& content,
                       std::size_t num_sbs, double phi) {
  if (!(phi >= 0.0 && phi <= 1.0)) throw DomainError("scdp_continuous: phi outside [0, 1]");
  const double k = static_cast<double>(num_sbs);
  const double g = content.gamma;
  const double l = content.cache_size;
  const double n = content.n_files;
  const double spread = phi + k - k * phi;
  if (std::abs(g - 1.0) < kUnitGammaBand) {
    const double head = triple.jo() == 0.0 ? 0.0 : triple.jo() * std::log(phi);
    return (head + triple.oc() * std::log(spread) + triple.jc() * std::log(l)) / std::log(n) +
           triple.cm;
  }
  const double e = 1.0 - g;
  const double head = triple.jo() == 0.0 ? 0.0 : triple.jo() * std::pow(phi, e);
  const double num = head + triple.oc() * std::pow(spread, e) - triple.jc() * std::pow(l, -e);
  return num / (std::pow(l, -e) * (std::pow(n, e) - 1.0)) + triple.cm;
}

double optimal_phi(const ScdpTriple& triple, const ContentConfig& content, std::size_t num_sbs) {
  const double jo = triple.jo();
  const double oc = triple.oc();
  const double k = static_cast<double>(num_sbs);
  if (num_sbs == 1) return jo >= 0.0 ? 1.0 : 0.0;
  if (content.gamma <= 0.0) {
    // Affine in phi with slope proportional to P_jo - (K - 1) P_oc.
    return jo - (k - 1.0) * oc >= 0.0 ? 1.0 : 0.0;
  }
  if (jo <= 0.0) return 0.0;
  if (jo >= (k - 1.0) * oc) return 1.0;
  const double t = std::pow((k - 1.0) * oc / jo, 1.0 / content.gamma);
  return 1.0 / (1.0 + (t - 1.0) / k);
}

DesignReport end_to_end_design(const NetworkConfig& net, const ContentConfig& content, double r_s,
                               const DesignOptions& options) {
  validate(net);
  validate(content, net.num_sbs());
  const auto spec = options.quadrature.value_or(PolarIntegrationSpec::defaults_for(net));
  const double beta_s = rate_to_beta(r_s);
  const std::size_t k = net.num_sbs();

  DesignReport rep;
  rep.r_s = r_s;
  const auto jt_problem = JtRateProblem::from_network(net, beta_s, spec);
  rep.jt = solve_jt_rate(jt_problem);
  rep.cm = solve_cm_rate(jt_problem, content.delta);
  rep.ot = ao_solve_ot_rates(OtRateProblem::from_network(net, beta_s, spec), options.ao);
  rep.triple = {rep.jt.scdp_star, rep.ot.scdp, rep.cm.scdp_star};
  rep.jt_beats_cm = rep.triple.jt > rep.triple.cm;

  rep.phi_star = optimal_phi(rep.triple, content, k);
  const auto at_star = with_phi(content, rep.phi_star);
  rep.overall_at_phi_star = scdp_overall(rep.triple, at_star, k, ZipfMode::Exact);
  rep.overall_at_phi_star_approx = scdp_overall(rep.triple, at_star, k, ZipfMode::Approx);
  rep.overall_mpf_only = scdp_overall(rep.triple, with_phi(content, 1.0), k, ZipfMode::Exact);
  rep.overall_dsf_only = scdp_overall(rep.triple, with_phi(content, 0.0), k, ZipfMode::Exact);
  rep.overall_no_cache = rep.triple.cm;

  constexpr int kGrid = 2001;
  double best = -INFINITY;
  for (int i = 0; i < kGrid; ++i) {
    const double phi = static_cast<double>(i) / (kGrid - 1);
    const double v = scdp_continuous(rep.triple, content, k, phi);
    if (v > best) {
      best = v;
      rep.phi_grid_continuous = phi;
    }
  }

  rep.overall_best_exact = -INFINITY;
  for (int m = 0; m <= content.cache_size; ++m) {
    const double phi = static_cast<double>(m) / content.cache_size;
    const double v = scdp_overall(rep.triple, with_phi(content, phi), k, ZipfMode::Exact);
    if (v > rep.overall_best_exact) {
      rep.overall_best_exact = v;
      rep.phi_best_exact = phi;
    }
  }
  return rep;
}

}  // namespace scdp

#pragma once

#include <cstddef>
#include <optional>

#include "scdp/content.hpp"
#include "scdp/network.hpp"
#include "scdp/rate_optimizer.hpp"

namespace scdp {

// Scheme-optimal SCDPs.
struct ScdpTriple {
  double jt = 0.0;
  double ot = 0.0;
  double cm = 0.0;

  double jo() const noexcept { return jt - ot; }
  double oc() const noexcept { return ot - cm; }
  double jc() const noexcept { return jt - cm; }
};

// sum_S p_tr^S(phi) P^S with phi taken from `content`.
double scdp_overall(const ScdpTriple& triple, const ContentConfig& content, std::size_t num_sbs,
                    ZipfMode mode);

// Continuous relaxation in phi with the power-law head sums left unclamped:
//   [P_jo phi^(1-g) + P_oc (K - K phi + phi)^(1-g) - P_jc L^(g-1)]
//     / [L^(g-1) (N^(1-g) - 1)] + P_cm
// (logarithmic form at gamma = 1). Diverges at phi = 0 for gamma > 1.
double scdp_continuous(const ScdpTriple& triple, const ContentConfig& content,
                       std::size_t num_sbs, double phi);

// Maximizer of scdp_continuous over [0, 1].
double optimal_phi(const ScdpTriple& triple, const ContentConfig& content, std::size_t num_sbs);

struct DesignOptions {
  std::optional<PolarIntegrationSpec> quadrature{};
  AoSettings ao{};
};

struct DesignReport {
  double r_s = 0.0;
  JtRateSolution jt;
  JtRateSolution cm;
  AoResult ot;
  ScdpTriple triple;

  double phi_star = 0.0;
  double overall_at_phi_star = 0.0;         // exact (floored) objective
  double overall_at_phi_star_approx = 0.0;  // continuous scheme probabilities
  double overall_mpf_only = 0.0;            // phi = 1
  double overall_dsf_only = 0.0;            // phi = 0
  double overall_no_cache = 0.0;            // every request is a cache miss

  // 2001-point grid maximization of the continuous objective.
  double phi_grid_continuous = 0.0;
  // Exhaustive search over floor(phi L) in {0..L} on the exact objective.
  double phi_best_exact = 0.0;
  double overall_best_exact = 0.0;

  bool jt_beats_cm = true;
};

// Two-step design: per-scheme optimal redundant rates under non-colluding
// eavesdroppers, then the optimal caching split.
DesignReport end_to_end_design(const NetworkConfig& net, const ContentConfig& content, double r_s,
                               const DesignOptions& options = {});

}  // namespace scdp

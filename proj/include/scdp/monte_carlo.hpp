#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "scdp/content.hpp"
#include "scdp/network.hpp"
#include "scdp/secrecy.hpp"

namespace scdp {

// SplitMix64 stream keyed by (master seed, trial index). Each trial owns an
// independent stream, so results do not depend on how trials are scheduled.
class TrialRng {
 public:
  using result_type = std::uint64_t;

  TrialRng(std::uint64_t seed, std::uint64_t trial);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  double uniform();           // (0, 1]
  double exponential();       // Exp(1)
  double normal();            // N(0, 1), Box-Muller
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t state_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

struct TrialBatch {
  std::uint64_t seed = 1;
  std::size_t n_trials = 100000;
  double window_radius = 0.0;  // 0: default_window_radius(net)
  unsigned workers = 0;        // 0: hardware concurrency
};

// max(20, 2 max r_b + 10) d0.
double default_window_radius(const NetworkConfig& net);
double resolved_window_radius(const TrialBatch& batch, const NetworkConfig& net);

// Throws ConfigError if n_trials == 0 or the window is narrower than
// 2 max r_b + 10.
void validate(const TrialBatch& batch, const NetworkConfig& net);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

// Mean of fn over batch.n_trials independent trials. Trials are reduced in
// fixed blocks in trial order, so the result is bit-identical for any worker
// count. Binomial mode reports sqrt(p (1 - p) / n) as the standard error;
// otherwise the sample standard deviation over sqrt(n).
Estimate mean_over_trials(const TrialBatch& batch,
                          const std::function<double(std::uint64_t trial, TrialRng& rng)>& fn,
                          bool binomial);

// Visits the points of a homogeneous PPP of the given density inside a disc,
// in order of increasing distance from `center`. Points of a smaller window
// are a prefix of those of a larger one under the same stream.
void for_each_ppp_point(TrialRng& rng, double density, double radius, CartesianPoint center,
                        const std::function<void(CartesianPoint)>& visit);

// One realization per trial inside the batch window centred on the user.
std::vector<std::vector<CartesianPoint>> sample_ppp(const TrialBatch& batch,
                                                    const NetworkConfig& net);

enum class CeOtGeometry {
  Correlated,  // one eavesdropper field seen by all SBSs
  Independent  // an independent field around each SBS
};

struct SimulationOptions {
  double delta = 2.0;
  CeOtGeometry ce_ot_geometry = CeOtGeometry::Correlated;
};

Estimate estimate_pc(const NetworkConfig& net, const RatePolicy& policy, Scheme scheme,
                     const TrialBatch& batch, const SimulationOptions& options = {});

Estimate estimate_ps(const NetworkConfig& net, const RatePolicy& policy, Scheme scheme,
                     EveModel eve_model, const TrialBatch& batch,
                     const SimulationOptions& options = {});

// Joint reliability-and-secrecy event of one scheme.
Estimate estimate_scdp(const NetworkConfig& net, const RatePolicy& policy, Scheme scheme,
                       EveModel eve_model, const TrialBatch& batch,
                       const SimulationOptions& options = {});

// Sample mean of exp(-s I_e) with I_e the MRC sum of JT eavesdropper SNRs.
Estimate estimate_laplace_ie(const NetworkConfig& net, double s, const TrialBatch& batch);

// Sample mean of exp(-s I_k) with I_k = K rho sum |h|^2 r^-alpha over a PPP
// centred on SBS k.
Estimate estimate_laplace_ik(const NetworkConfig& net, std::size_t k, double s,
                             const TrialBatch& batch);

struct SchemePolicies {
  RatePolicy jt;
  RatePolicy ot;
  RatePolicy cm;  // secrecy rate R_s; delta is applied internally
};

// Draws a Zipf rank per trial, maps it to its scheme through the floored
// cache boundaries and simulates that scheme's joint event.
Estimate estimate_scdp_overall(const NetworkConfig& net, const ContentConfig& content,
                               const SchemePolicies& policies, EveModel eve_model,
                               const TrialBatch& batch, const SimulationOptions& options = {});

// Set-level evaluation of the disc-conditioned gamma approximation for OT
// under colluding eavesdroppers: the eavesdropper set inside the disc is
// sampled, gamma parameters are matched over the whole set, and the fading
// is integrated analytically through the incomplete gamma function.
Estimate estimate_ps_ce_ot_gamma_set(const NetworkConfig& net, std::span<const double> beta_e_k,
                                     const DiscTruncation& trunc, const TrialBatch& batch);

}  // namespace scdp

#pragma once

#include <cstddef>

namespace scdp {

enum class ZipfMode { Exact, Approx };

// Library and cache parameters of the hybrid MPF/DSF placement.
struct ContentConfig {
  int n_files = 100;     // N
  int cache_size = 20;   // L, per SBS
  double gamma = 1.2;    // Zipf skewness
  double phi = 0.5;      // fraction of each cache holding most-popular files
  double delta = 2.0;    // backhaul penalty, secrecy rate becomes delta * R_s
};

// Throws ConfigError unless N >= 2, L >= 1, K*L < N, gamma >= 0,
// 0 <= phi <= 1 and delta > 1.
void validate(const ContentConfig& cfg, std::size_t num_sbs);

// Request probability of the rank-m file, 1 <= m <= N.
double zipf_pmf(const ContentConfig& cfg, int rank);

// Sum of the first `count` Zipf probabilities. Exact mode requires an integral
// count; approx mode uses the power-law closed form (log form near gamma = 1)
// and clamps to [0, 1].
double zipf_head_sum(const ContentConfig& cfg, double count, ZipfMode mode);

struct SchemeProbabilities {
  double jt = 0.0;
  double ot = 0.0;
  double cm = 0.0;
};

// Probability that a request is served by joint transmission (MPF group),
// orthogonal transmission (DSF group) or a backhaul fetch (cache miss).
// Exact mode floors phi*L; approx mode treats phi*L as continuous.
SchemeProbabilities scheme_probabilities(const ContentConfig& cfg, std::size_t num_sbs,
                                         ZipfMode mode);

// Rank boundaries of the cached groups in exact mode: ranks 1..mpf_end are
// MPFs, mpf_end+1..dsf_end are DSFs, the rest miss.
struct CacheBoundaries {
  int mpf_end = 0;
  int dsf_end = 0;
};
CacheBoundaries cache_boundaries(const ContentConfig& cfg, std::size_t num_sbs);

}  // namespace scdp

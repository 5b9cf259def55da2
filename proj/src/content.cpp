#include "scdp/content.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "scdp/errors.hpp"

namespace scdp {
namespace {

constexpr double kUnitGammaBand = 1e-6;

double zipf_normalizer(const ContentConfig& cfg) {
  double z = 0.0;
  for (int n = 1; n <= cfg.n_files; ++n) z += std::pow(static_cast<double>(n), -cfg.gamma);
  return z;
}

double exact_head(const ContentConfig& cfg, int count) {
  double head = 0.0;
  for (int n = 1; n <= count; ++n) head += std::pow(static_cast<double>(n), -cfg.gamma);
  return head / zipf_normalizer(cfg);
}

double approx_head(const ContentConfig& cfg, double count) {
  const double n = cfg.n_files;
  double value;
  if (std::abs(cfg.gamma - 1.0) < kUnitGammaBand) {
    value = count > 0.0 ? std::log(count) / std::log(n) : 0.0;
  } else {
    const double e = 1.0 - cfg.gamma;
    value = (std::pow(count, e) - 1.0) / (std::pow(n, e) - 1.0);
  }
  if (!std::isfinite(value)) value = 0.0;
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace

void validate(const ContentConfig& cfg, std::size_t num_sbs) {
  if (cfg.n_files < 2) throw ConfigError("content: N must be >= 2");
  if (cfg.cache_size < 1) throw ConfigError("content: L must be >= 1");
  if (static_cast<long long>(num_sbs) * cfg.cache_size >= cfg.n_files) {
    throw ConfigError(fmt::format("content: total capacity K*L = {} must be below N = {}",
                                  num_sbs * cfg.cache_size, cfg.n_files));
  }
  if (!(cfg.gamma >= 0.0)) throw ConfigError("content: gamma must be >= 0");
  if (!(cfg.phi >= 0.0 && cfg.phi <= 1.0)) throw ConfigError("content: phi must lie in [0, 1]");
  if (!(cfg.delta > 1.0)) throw ConfigError("content: delta must exceed 1");
}

double zipf_pmf(const ContentConfig& cfg, int rank) {
  if (rank < 1 || rank > cfg.n_files) {
    throw DomainError(fmt::format("zipf_pmf: rank {} outside [1, {}]", rank, cfg.n_files));
  }
  return std::pow(static_cast<double>(rank), -cfg.gamma) / zipf_normalizer(cfg);
}

double zipf_head_sum(const ContentConfig& cfg, double count, ZipfMode mode) {
  if (!(count >= 0.0 && count <= cfg.n_files)) {
    throw DomainError(fmt::format("zipf_head_sum: count {} outside [0, {}]", count, cfg.n_files));
  }
  if (mode == ZipfMode::Exact) {
    if (count != std::floor(count)) {
      throw DomainError("zipf_head_sum: exact mode needs an integral count");
    }
    return exact_head(cfg, static_cast<int>(count));
  }
  return approx_head(cfg, count);
}

CacheBoundaries cache_boundaries(const ContentConfig& cfg, std::size_t num_sbs) {
  const int mpf = static_cast<int>(std::floor(cfg.phi * cfg.cache_size + 1e-9));
  const long long dsf = mpf + static_cast<long long>(num_sbs) * (cfg.cache_size - mpf);
  return {mpf, static_cast<int>(std::min<long long>(dsf, cfg.n_files))};
}

SchemeProbabilities scheme_probabilities(const ContentConfig& cfg, std::size_t num_sbs,
                                         ZipfMode mode) {
  double jt_head, ot_head;
  if (mode == ZipfMode::Exact) {
    const auto b = cache_boundaries(cfg, num_sbs);
    // One pass over the pmf instead of two head sums.
    const double z = zipf_normalizer(cfg);
    double acc = 0.0;
    jt_head = 0.0;
    for (int n = 1; n <= b.dsf_end; ++n) {
      acc += std::pow(static_cast<double>(n), -cfg.gamma);
      if (n == b.mpf_end) jt_head = acc;
    }
    jt_head /= z;
    ot_head = acc / z;
  } else {
    const double mpf = cfg.phi * cfg.cache_size;
    const double dsf = std::min<double>(mpf + num_sbs * (cfg.cache_size - mpf), cfg.n_files);
    jt_head = approx_head(cfg, mpf);
    ot_head = approx_head(cfg, dsf);
  }
  ot_head = std::clamp(ot_head, jt_head, 1.0);
  return {jt_head, ot_head - jt_head, 1.0 - ot_head};
}

}  // namespace scdp

#include "scdp/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "scdp/errors.hpp"
#include "scdp/special.hpp"

namespace scdp {
namespace {

constexpr std::size_t kBlock = 4096;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct Complex {
  double re = 0.0, im = 0.0;
};

// CN(0, 1): independent real and imaginary parts with variance 1/2.
Complex circular_normal(TrialRng& rng) {
  const double s = std::numbers::sqrt2 / 2.0;
  const double re = rng.normal() * s;
  const double im = rng.normal() * s;
  return {re, im};
}

struct Geometry {
  std::size_t k = 0;
  std::vector<double> sx, sy;
  std::vector<double> rb;  // user-to-SBS distances
  double alpha = 4.0;
  double rho = 10.0;
  double lambda = 0.0;
  double window = 20.0;

  Geometry(const NetworkConfig& net, double window_radius)
      : k(net.num_sbs()), alpha(net.alpha), rho(net.rho), lambda(net.lambda_e),
        window(window_radius) {
    for (const auto& c : net.sbs_cartesian()) {
      sx.push_back(c.x);
      sy.push_back(c.y);
    }
    for (const auto& b : net.sbs) rb.push_back(b.r);
  }

  double amplitude(double d2) const { return std::pow(d2, -0.25 * alpha); }
  double gain(double d2) const { return std::pow(d2, -0.5 * alpha); }
};

// Thresholds of one scheme in SNR form.
struct Thresholds {
  Scheme scheme = Scheme::JT;
  double beta_t = 0.0;
  double beta_e = 0.0;
  std::vector<double> beta_t_k;
  std::vector<double> beta_e_k;
};

Thresholds thresholds_for(const NetworkConfig& net, const RatePolicy& policy, Scheme scheme,
                          double delta) {
  Thresholds t;
  t.scheme = scheme;
  if (scheme == Scheme::OT) {
    t.beta_t_k = policy.beta_t_vector(net.num_sbs());
    t.beta_e_k = policy.beta_e_vector(net.num_sbs());
  } else {
    if (!(delta > 1.0)) throw ConfigError("delta must exceed 1");
    const RatePolicy p =
        scheme == Scheme::CM ? policy.with_secrecy_rate(delta * policy.r_s()) : policy;
    t.beta_t = p.beta_t();
    t.beta_e = p.beta_e();
  }
  return t;
}

bool connected(const Geometry& g, const Thresholds& t, TrialRng& rng) {
  if (t.scheme == Scheme::OT) {
    bool ok = true;
    for (std::size_t k = 0; k < g.k; ++k) {
      const double snr = g.k * g.rho * rng.exponential() * std::pow(g.rb[k], -g.alpha);
      ok = ok && snr >= t.beta_t_k[k];
    }
    return ok;
  }
  Complex s;
  for (std::size_t k = 0; k < g.k; ++k) {
    const Complex h = circular_normal(rng);
    const double a = std::pow(g.rb[k], -0.5 * g.alpha);
    s.re += h.re * a;
    s.im += h.im * a;
  }
  return g.rho * (s.re * s.re + s.im * s.im) >= t.beta_t;
}

// MRC SNR of the joint signal at an eavesdropper in (x, y).
double jt_eve_snr(const Geometry& g, CartesianPoint p, TrialRng& rng) {
  Complex s;
  for (std::size_t k = 0; k < g.k; ++k) {
    const Complex h = circular_normal(rng);
    const double dx = p.x - g.sx[k], dy = p.y - g.sy[k];
    const double a = g.amplitude(dx * dx + dy * dy);
    s.re += h.re * a;
    s.im += h.im * a;
  }
  return g.rho * (s.re * s.re + s.im * s.im);
}

bool secure(const Geometry& g, const Thresholds& t, EveModel eve, CeOtGeometry ce_geometry,
            TrialRng& rng) {
  const CartesianPoint origin{0.0, 0.0};
  if (t.scheme != Scheme::OT) {
    if (eve == EveModel::NCE) {
      bool ok = true;
      for_each_ppp_point(rng, g.lambda, g.window, origin, [&](CartesianPoint p) {
        if (ok && jt_eve_snr(g, p, rng) > t.beta_e) ok = false;
      });
      return ok;
    }
    double total = 0.0;
    for_each_ppp_point(rng, g.lambda, g.window, origin,
                       [&](CartesianPoint p) { total += jt_eve_snr(g, p, rng); });
    return total <= t.beta_e;
  }

  const double k_rho = g.k * g.rho;
  if (eve == EveModel::NCE) {
    // A single eavesdropper must recover every subfile.
    bool ok = true;
    for_each_ppp_point(rng, g.lambda, g.window, origin, [&](CartesianPoint p) {
      if (!ok) return;
      bool all = true;
      for (std::size_t k = 0; k < g.k; ++k) {
        const double dx = p.x - g.sx[k], dy = p.y - g.sy[k];
        const double snr = k_rho * rng.exponential() * g.gain(dx * dx + dy * dy);
        all = all && snr > t.beta_e_k[k];
      }
      if (all) ok = false;
    });
    return ok;
  }

  std::vector<double> sums(g.k, 0.0);
  if (ce_geometry == CeOtGeometry::Correlated) {
    for_each_ppp_point(rng, g.lambda, g.window, origin, [&](CartesianPoint p) {
      for (std::size_t k = 0; k < g.k; ++k) {
        const double dx = p.x - g.sx[k], dy = p.y - g.sy[k];
        sums[k] += k_rho * rng.exponential() * g.gain(dx * dx + dy * dy);
      }
    });
  } else {
    for (std::size_t k = 0; k < g.k; ++k) {
      const CartesianPoint c{g.sx[k], g.sy[k]};
      for_each_ppp_point(rng, g.lambda, g.window, c, [&](CartesianPoint p) {
        const double dx = p.x - c.x, dy = p.y - c.y;
        sums[k] += k_rho * rng.exponential() * g.gain(dx * dx + dy * dy);
      });
    }
  }
  for (std::size_t k = 0; k < g.k; ++k) {
    if (sums[k] <= t.beta_e_k[k]) return true;
  }
  return false;
}

}  // namespace

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t trial)
    : state_(mix64(seed + 0x9E3779B97F4A7C15ULL) ^ mix64(trial * 0xD1B54A32D192ED03ULL + 1)) {}

TrialRng::result_type TrialRng::operator()() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return mix64(state_);
}

double TrialRng::uniform() { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

double TrialRng::exponential() { return -std::log(uniform()); }

double TrialRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double t = 2.0 * std::numbers::pi * uniform();
  spare_normal_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

std::uint64_t TrialRng::poisson(double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(*this);
}

double default_window_radius(const NetworkConfig& net) {
  return std::max(20.0, 2.0 * net.max_sbs_distance() + 10.0);
}

double resolved_window_radius(const TrialBatch& batch, const NetworkConfig& net) {
  return batch.window_radius > 0.0 ? batch.window_radius : default_window_radius(net);
}

void validate(const TrialBatch& batch, const NetworkConfig& net) {
  if (batch.n_trials == 0) throw ConfigError("simulation: n_trials must be positive");
  if (batch.window_radius < 0.0) throw ConfigError("simulation: window radius must be >= 0");
  const double minimum = 2.0 * net.max_sbs_distance() + 10.0;
  if (batch.window_radius > 0.0 && batch.window_radius < minimum) {
    throw ConfigError(fmt::format("simulation: window radius {} is below 2 max r_b + 10 = {}",
                                  batch.window_radius, minimum));
  }
}

Estimate mean_over_trials(const TrialBatch& batch,
                          const std::function<double(std::uint64_t trial, TrialRng& rng)>& fn,
                          bool binomial) {
  if (batch.n_trials == 0) throw ConfigError("simulation: n_trials must be positive");
  const std::size_t n = batch.n_trials;
  const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> block_sum(n_blocks, 0.0), block_sq(n_blocks, 0.0);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (std::size_t b = next++; b < n_blocks; b = next++) {
        double s = 0.0, q = 0.0;
        const std::size_t end = std::min(n, (b + 1) * kBlock);
        for (std::size_t t = b * kBlock; t < end; ++t) {
          TrialRng rng(batch.seed, t);
          const double v = fn(t, rng);
          s += v;
          q += v * v;
        }
        block_sum[b] = s;
        block_sq[b] = q;
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = n_blocks;
    }
  };

  unsigned workers = batch.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_blocks));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  double sum = 0.0, sq = 0.0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    sum += block_sum[b];
    sq += block_sq[b];
  }
  const double nd = static_cast<double>(n);
  const double mean = sum / nd;
  double se;
  if (binomial) {
    se = std::sqrt(std::max(mean * (1.0 - mean), 0.0) / nd);
  } else {
    const double var = n > 1 ? std::max(sq - nd * mean * mean, 0.0) / (nd - 1.0) : 0.0;
    se = std::sqrt(var / nd);
  }
  return {mean, se, n};
}

void for_each_ppp_point(TrialRng& rng, double density, double radius, CartesianPoint center,
                        const std::function<void(CartesianPoint)>& visit) {
  if (density <= 0.0 || radius <= 0.0) return;
  const double r2_max = radius * radius;
  double r2 = 0.0;
  for (;;) {
    r2 += rng.exponential() / (density * std::numbers::pi);
    if (r2 > r2_max) return;
    const double r = std::sqrt(r2);
    const double t = 2.0 * std::numbers::pi * rng.uniform();
    visit({center.x + r * std::cos(t), center.y + r * std::sin(t)});
  }
}

std::vector<std::vector<CartesianPoint>> sample_ppp(const TrialBatch& batch,
                                                    const NetworkConfig& net) {
  validate(batch, net);
  const double radius = resolved_window_radius(batch, net);
  std::vector<std::vector<CartesianPoint>> out(batch.n_trials);
  for (std::size_t t = 0; t < batch.n_trials; ++t) {
    TrialRng rng(batch.seed, t);
    for_each_ppp_point(rng, net.lambda_e, radius, {0.0, 0.0},
                       [&](CartesianPoint p) { out[t].push_back(p); });
  }
  return out;
}

Estimate estimate_pc(const NetworkConfig& net, const RatePolicy& policy, Scheme scheme,
                     const TrialBatch& batch, const SimulationOptions& options) {
  validate(net);
  validate(batch, net);
  const Geometry g(net, resolved_window_radius(batch, net));
  const Thresholds t = thresholds_for(net, policy, scheme, options.delta);
  return mean_over_trials(
      batch, [&](std::uint64_t, TrialRng& rng) { return connected(g, t, rng) ? 1.0 : 0.0; },
      true);
}

Estimate estimate_ps(const NetworkConfig& net, const RatePolicy& policy, Scheme scheme,
                     EveModel eve_model, const TrialBatch& batch,
                     const SimulationOptions& options) {
  validate(net);
  validate(batch, net);
  const Geometry g(net, resolved_window_radius(batch, net));
  const Thresholds t = thresholds_for(net, policy, scheme, options.delta);
  return mean_over_trials(
      batch,
      [&](std::uint64_t, TrialRng& rng) {
        return secure(g, t, eve_model, options.ce_ot_geometry, rng) ? 1.0 : 0.0;
      },
      true);
}

Estimate estimate_scdp(const NetworkConfig& net, const RatePolicy& policy, Scheme scheme,
                       EveModel eve_model, const TrialBatch& batch,
                       const SimulationOptions& options) {
  validate(net);
  validate(batch, net);
  const Geometry g(net, resolved_window_radius(batch, net));
  const Thresholds t = thresholds_for(net, policy, scheme, options.delta);
  return mean_over_trials(
      batch,
      [&](std::uint64_t, TrialRng& rng) {
        const bool c = connected(g, t, rng);
        const bool s = secure(g, t, eve_model, options.ce_ot_geometry, rng);
        return (c && s) ? 1.0 : 0.0;
      },
      true);
}

Estimate estimate_laplace_ie(const NetworkConfig& net, double s, const TrialBatch& batch) {
  validate(net);
  validate(batch, net);
  const Geometry g(net, resolved_window_radius(batch, net));
  return mean_over_trials(
      batch,
      [&](std::uint64_t, TrialRng& rng) {
        double total = 0.0;
        for_each_ppp_point(rng, g.lambda, g.window, {0.0, 0.0},
                           [&](CartesianPoint p) { total += jt_eve_snr(g, p, rng); });
        return std::exp(-s * total);
      },
      false);
}

Estimate estimate_laplace_ik(const NetworkConfig& net, std::size_t k, double s,
                             const TrialBatch& batch) {
  validate(net);
  validate(batch, net);
  if (k >= net.num_sbs()) throw ConfigError("estimate_laplace_ik: SBS index out of range");
  const Geometry g(net, resolved_window_radius(batch, net));
  const double k_rho = g.k * g.rho;
  return mean_over_trials(
      batch,
      [&](std::uint64_t, TrialRng& rng) {
        double total = 0.0;
        for_each_ppp_point(rng, g.lambda, g.window, {g.sx[k], g.sy[k]}, [&](CartesianPoint p) {
          const double dx = p.x - g.sx[k], dy = p.y - g.sy[k];
          total += k_rho * rng.exponential() * g.gain(dx * dx + dy * dy);
        });
        return std::exp(-s * total);
      },
      false);
}

Estimate estimate_scdp_overall(const NetworkConfig& net, const ContentConfig& content,
                               const SchemePolicies& policies, EveModel eve_model,
                               const TrialBatch& batch, const SimulationOptions& options) {
  validate(net);
  validate(content, net.num_sbs());
  validate(batch, net);
  const Geometry g(net, resolved_window_radius(batch, net));
  const Thresholds jt = thresholds_for(net, policies.jt, Scheme::JT, options.delta);
  const Thresholds ot = thresholds_for(net, policies.ot, Scheme::OT, options.delta);
  const Thresholds cm = thresholds_for(net, policies.cm, Scheme::CM, options.delta);
  const auto bounds = cache_boundaries(content, net.num_sbs());

  std::vector<double> cdf(content.n_files);
  double acc = 0.0;
  for (int n = 1; n <= content.n_files; ++n) {
    acc += std::pow(static_cast<double>(n), -content.gamma);
    cdf[n - 1] = acc;
  }
  for (auto& c : cdf) c /= acc;
  cdf.back() = 1.0;

  return mean_over_trials(
      batch,
      [&](std::uint64_t, TrialRng& rng) {
        const double u = rng.uniform();
        const int rank =
            static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin()) + 1;
        const Thresholds& t = rank <= bounds.mpf_end ? jt : (rank <= bounds.dsf_end ? ot : cm);
        const bool c = connected(g, t, rng);
        const bool s = secure(g, t, eve_model, options.ce_ot_geometry, rng);
        return (c && s) ? 1.0 : 0.0;
      },
      true);
}

Estimate estimate_ps_ce_ot_gamma_set(const NetworkConfig& net, std::span<const double> beta_e_k,
                                     const DiscTruncation& trunc, const TrialBatch& batch) {
  validate(net);
  if (beta_e_k.size() != net.num_sbs()) {
    throw ConfigError("estimate_ps_ce_ot_gamma_set: one redundant rate per SBS required");
  }
  if (!(trunc.radius > 0.0)) throw ConfigError("disc truncation: radius must be positive");
  const auto sbs = net.sbs_cartesian();
  const double k_rho = static_cast<double>(net.num_sbs()) * net.rho;
  const double mean = net.lambda_e * std::numbers::pi * trunc.radius * trunc.radius;
  return mean_over_trials(
      batch,
      [&](std::uint64_t, TrialRng& rng) {
        std::uint64_t j = rng.poisson(mean);
        if (trunc.j_max > 0) j = std::min<std::uint64_t>(j, trunc.j_max);
        if (j == 0) return 1.0;
        std::vector<CartesianPoint> eves(j);
        for (auto& e : eves) {
          const double r = trunc.radius * std::sqrt(rng.uniform());
          const double t = 2.0 * std::numbers::pi * rng.uniform();
          e = {r * std::cos(t), r * std::sin(t)};
        }
        double all_leak = 1.0;
        std::vector<double> d(j);
        for (std::size_t k = 0; k < sbs.size(); ++k) {
          for (std::size_t i = 0; i < j; ++i) {
            d[i] = std::hypot(eves[i].x - sbs[k].x, eves[i].y - sbs[k].y);
          }
          const GammaParams gp = gamma_moment_params(d, net.alpha);
          all_leak *= gamma_q(gp.shape, beta_e_k[k] / (k_rho * gp.scale));
        }
        return 1.0 - all_leak;
      },
      false);
}

}  // namespace scdp

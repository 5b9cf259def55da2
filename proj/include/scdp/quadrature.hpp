#pragma once

#include <functional>
#include <span>
#include <vector>

namespace scdp {

struct NetworkConfig;

enum class AngularDomain {
  Full,  // theta in [0, 2 pi)
  Half,  // theta in [0, pi]; callers apply the factor 2 themselves
};

// Composite Simpson rule over a disc of radius r_max, optionally extended by
// doubling annuli until the outermost annulus is negligible.
struct PolarIntegrationSpec {
  double r_max = 31.0;
  int n_r = 512;
  int n_theta = 256;
  bool adaptive = true;
  double tail_tol = 1e-6;
  AngularDomain domain = AngularDomain::Full;

  static constexpr int kMaxDoublings = 8;

  // r_max = 30 + max r_b with the remaining defaults.
  static PolarIntegrationSpec defaults_for(const NetworkConfig& net);

  // Throws ConfigError unless r_max > 0 and n_r, n_theta are even and >= 16.
  void validate() const;
};

// Quadrature nodes in Cartesian coordinates. `weight` already includes the
// Jacobian r and the angular step.
struct PolarRule {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> weight;

  std::size_t size() const noexcept { return weight.size(); }
};

// Inner disc nodes plus `annuli` doubling shells [R 2^i, R 2^(i+1)], each
// discretized in log-radius with n_r / 4 Simpson panels.
PolarRule make_polar_rule(const PolarIntegrationSpec& spec, int annuli);

// Fills out[i] with the integrand value at (x[i], y[i]). Called once per ring
// of nodes so vectorized kernels see contiguous batches.
using PolarField = std::function<void(std::span<const double> x, std::span<const double> y,
                                      std::span<double> out)>;

// Integral of f over the plane (including the r Jacobian). With adaptive specs
// the radius doubles until the last annulus contributes less than tail_tol of
// the running total; NumericError after kMaxDoublings.
double integrate_polar(const PolarField& f, const PolarIntegrationSpec& spec);
double integrate_polar(const std::function<double(double r, double theta)>& f,
                       const PolarIntegrationSpec& spec);

struct BisectionSpec {
  double lo = 0.0;
  double hi = 1.0;
  double x_tol = 1e-9;
  double f_tol = 1e-10;
  int max_iter = 200;
};

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

// Root of a function with g(lo) * g(hi) <= 0. Stops once |g(x)| <= f_tol or
// the bracket is narrower than x_tol. Throws BracketError otherwise.
RootResult bisect_root(const std::function<double(double)>& g, const BisectionSpec& spec);

// Doubles `hi` until g(hi) > 0, keeping lo fixed. Returns the new hi or throws
// BracketError after `max_doublings`.
double expand_upper_bracket(const std::function<double(double)>& g, double hi,
                            int max_doublings = 60);

}  // namespace scdp

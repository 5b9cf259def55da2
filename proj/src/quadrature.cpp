#include "scdp/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "scdp/errors.hpp"
#include "scdp/network.hpp"

namespace scdp {
namespace {

struct Axis {
  std::vector<double> node;
  std::vector<double> weight;
};

double simpson_factor(int i, int n) {
  if (i == 0 || i == n) return 1.0;
  return (i % 2 == 1) ? 4.0 : 2.0;
}

Axis angular_axis(const PolarIntegrationSpec& spec) {
  Axis a;
  const int n = spec.n_theta;
  if (spec.domain == AngularDomain::Full) {
    // Periodic Simpson: the endpoint weights fold together.
    const double h = 2.0 * std::numbers::pi / n;
    for (int j = 0; j < n; ++j) {
      a.node.push_back(j * h);
      a.weight.push_back((j % 2 == 0 ? 2.0 : 4.0) * h / 3.0);
    }
  } else {
    const double h = std::numbers::pi / n;
    for (int j = 0; j <= n; ++j) {
      a.node.push_back(j * h);
      a.weight.push_back(simpson_factor(j, n) * h / 3.0);
    }
  }
  return a;
}

// Radial nodes with the r Jacobian folded into the weights; the r = 0 node
// carries zero weight and is dropped.
Axis disc_axis(double r_max, int n) {
  Axis a;
  const double h = r_max / n;
  for (int i = 1; i <= n; ++i) {
    const double r = i * h;
    a.node.push_back(r);
    a.weight.push_back(simpson_factor(i, n) * h / 3.0 * r);
  }
  return a;
}

// [r0, r1] in u = ln r, so r dr = r^2 du.
Axis annulus_axis(double r0, double r1, int n) {
  Axis a;
  const double u0 = std::log(r0);
  const double h = (std::log(r1) - u0) / n;
  for (int i = 0; i <= n; ++i) {
    const double r = std::exp(u0 + i * h);
    a.node.push_back(r);
    a.weight.push_back(simpson_factor(i, n) * h / 3.0 * r * r);
  }
  return a;
}

void append(PolarRule& rule, const Axis& radial, const Axis& angular) {
  for (std::size_t i = 0; i < radial.node.size(); ++i) {
    for (std::size_t j = 0; j < angular.node.size(); ++j) {
      rule.x.push_back(radial.node[i] * std::cos(angular.node[j]));
      rule.y.push_back(radial.node[i] * std::sin(angular.node[j]));
      rule.weight.push_back(radial.weight[i] * angular.weight[j]);
    }
  }
}

class RingEvaluator {
 public:
  RingEvaluator(const PolarField& f, const Axis& angular) : f_(f), angular_(angular) {
    cos_.reserve(angular.node.size());
    sin_.reserve(angular.node.size());
    for (double t : angular.node) {
      cos_.push_back(std::cos(t));
      sin_.push_back(std::sin(t));
    }
    x_.resize(cos_.size());
    y_.resize(cos_.size());
    out_.resize(cos_.size());
  }

  double integrate(const Axis& radial) {
    double total = 0.0;
    for (std::size_t i = 0; i < radial.node.size(); ++i) {
      const double r = radial.node[i];
      for (std::size_t j = 0; j < cos_.size(); ++j) {
        x_[j] = r * cos_[j];
        y_[j] = r * sin_[j];
      }
      f_(x_, y_, out_);
      double ring = 0.0;
      for (std::size_t j = 0; j < out_.size(); ++j) ring += angular_.weight[j] * out_[j];
      total += radial.weight[i] * ring;
    }
    return total;
  }

 private:
  const PolarField& f_;
  const Axis& angular_;
  std::vector<double> cos_, sin_, x_, y_, out_;
};

}  // namespace

PolarIntegrationSpec PolarIntegrationSpec::defaults_for(const NetworkConfig& net) {
  PolarIntegrationSpec spec;
  spec.r_max = 30.0 + net.max_sbs_distance();
  return spec;
}

void PolarIntegrationSpec::validate() const {
  if (!(r_max > 0.0)) throw ConfigError("quadrature: r_max must be positive");
  if (n_r < 16 || n_r % 2 != 0) throw ConfigError("quadrature: n_r must be even and >= 16");
  if (n_theta < 16 || n_theta % 2 != 0) {
    throw ConfigError("quadrature: n_theta must be even and >= 16");
  }
  if (!(tail_tol > 0.0)) throw ConfigError("quadrature: tail_tol must be positive");
}

PolarRule make_polar_rule(const PolarIntegrationSpec& spec, int annuli) {
  spec.validate();
  const Axis angular = angular_axis(spec);
  PolarRule rule;
  append(rule, disc_axis(spec.r_max, spec.n_r), angular);
  double r0 = spec.r_max;
  for (int i = 0; i < annuli; ++i) {
    append(rule, annulus_axis(r0, 2.0 * r0, spec.n_r / 4), angular);
    r0 *= 2.0;
  }
  return rule;
}

double integrate_polar(const PolarField& f, const PolarIntegrationSpec& spec) {
  spec.validate();
  const Axis angular = angular_axis(spec);
  RingEvaluator eval(f, angular);
  double total = eval.integrate(disc_axis(spec.r_max, spec.n_r));
  if (!std::isfinite(total)) throw NumericError("integrate_polar: non-finite integrand");
  if (!spec.adaptive) return total;

  double previous = total;
  double r0 = spec.r_max;
  for (int i = 0; i < PolarIntegrationSpec::kMaxDoublings; ++i) {
    const double shell = eval.integrate(annulus_axis(r0, 2.0 * r0, spec.n_r / 4));
    previous = total;
    total += shell;
    if (!std::isfinite(total)) throw NumericError("integrate_polar: non-finite integrand");
    if (std::abs(shell) <= spec.tail_tol * std::abs(total)) return total;
    r0 *= 2.0;
  }
  throw NumericError(
      fmt::format("integrate_polar: tail still above tolerance at radius {}", r0),
      {previous, total});
}

double integrate_polar(const std::function<double(double r, double theta)>& f,
                       const PolarIntegrationSpec& spec) {
  PolarField field = [&f](std::span<const double> x, std::span<const double> y,
                          std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      double theta = std::atan2(y[i], x[i]);
      if (theta < 0.0) theta += 2.0 * std::numbers::pi;
      out[i] = f(std::hypot(x[i], y[i]), theta);
    }
  };
  return integrate_polar(field, spec);
}

RootResult bisect_root(const std::function<double(double)>& g, const BisectionSpec& spec) {
  double lo = spec.lo, hi = spec.hi;
  double glo = g(lo), ghi = g(hi);
  if (glo == 0.0) return {lo, glo, 0};
  if (ghi == 0.0) return {hi, ghi, 0};
  if (std::signbit(glo) == std::signbit(ghi)) {
    throw BracketError(fmt::format("bisect_root: no sign change on [{}, {}]", lo, hi), lo, hi);
  }
  RootResult best{lo, glo, 0};
  for (int it = 1; it <= spec.max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    best = {mid, gm, it};
    if (std::abs(gm) <= spec.f_tol || (hi - lo) < spec.x_tol) return best;
    if (std::signbit(gm) == std::signbit(glo)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return best;
}

double expand_upper_bracket(const std::function<double(double)>& g, double hi,
                            int max_doublings) {
  for (int i = 0; i < max_doublings; ++i) {
    if (g(hi) > 0.0) return hi;
    hi *= 2.0;
  }
  throw BracketError("expand_upper_bracket: derivative never turned positive", 0.0, hi);
}

}  // namespace scdp

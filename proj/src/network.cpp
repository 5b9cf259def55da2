#include "scdp/network.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "scdp/errors.hpp"

namespace scdp {

CartesianPoint to_cartesian(PolarPoint p) {
  return {p.r * std::cos(p.theta), p.r * std::sin(p.theta)};
}

PolarPoint to_polar(CartesianPoint c) {
  double theta = std::atan2(c.y, c.x);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  return {std::hypot(c.x, c.y), theta};
}

double NetworkConfig::max_sbs_distance() const noexcept {
  double m = 0.0;
  for (const auto& b : sbs) m = std::max(m, b.r);
  return m;
}

std::vector<CartesianPoint> NetworkConfig::sbs_cartesian() const {
  std::vector<CartesianPoint> out;
  out.reserve(sbs.size());
  for (const auto& b : sbs) out.push_back(to_cartesian(b));
  return out;
}

std::vector<std::string> validate(const NetworkConfig& cfg) {
  if (!(cfg.alpha > 2.0)) {
    throw ConfigError(fmt::format("network: path-loss exponent must exceed 2, got {}", cfg.alpha));
  }
  return validate_geometry(cfg);
}

std::vector<std::string> validate_geometry(const NetworkConfig& cfg) {
  if (cfg.sbs.empty()) throw ConfigError("network: at least one SBS is required");
  for (std::size_t k = 0; k < cfg.sbs.size(); ++k) {
    if (!(cfg.sbs[k].r > 0.0) || !std::isfinite(cfg.sbs[k].r)) {
      throw ConfigError(fmt::format("network: SBS {} has non-positive distance {}", k + 1,
                                    cfg.sbs[k].r));
    }
  }
  if (!(cfg.alpha > 0.0)) {
    throw ConfigError(fmt::format("network: path-loss exponent must be positive, got {}", cfg.alpha));
  }
  if (!(cfg.rho > 0.0)) throw ConfigError("network: normalized SNR must be positive");
  if (!(cfg.lambda_e >= 0.0)) throw ConfigError("network: eavesdropper density must be >= 0");

  std::vector<std::string> warnings;
  const auto pts = cfg.sbs_cartesian();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y) < 1e-9) {
        warnings.push_back(fmt::format("network: SBS {} and {} are co-located", i + 1, j + 1));
      }
    }
  }
  return warnings;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double sbs_to_point_distance(const NetworkConfig& cfg, std::size_t k, PolarPoint p) {
  const auto& b = cfg.sbs.at(k);
  // Law of cosines rearranged to avoid cancellation near coincident points.
  const double s = std::sin(0.5 * (b.theta - p.theta));
  const double dr = b.r - p.r;
  return std::sqrt(dr * dr + 4.0 * b.r * p.r * s * s);
}

std::vector<PolarPoint> layout_linear(std::size_t num_sbs, double spacing, double user_x) {
  if (num_sbs == 0) throw ConfigError("layout: K must be >= 1");
  if (!(spacing > 0.0)) throw ConfigError("layout: SBS spacing must be positive");
  std::vector<PolarPoint> out;
  out.reserve(num_sbs);
  for (std::size_t k = 0; k < num_sbs; ++k) {
    out.push_back(to_polar({static_cast<double>(k) * spacing - user_x, -0.5}));
  }
  return out;
}

}  // namespace scdp

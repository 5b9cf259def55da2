#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace scdp {

// Polar coordinate relative to the typical user at the origin. Distances are
// in units of d0 (100 m); angles in radians.
struct PolarPoint {
  double r = 0.0;
  double theta = 0.0;
};

struct CartesianPoint {
  double x = 0.0;
  double y = 0.0;
};

CartesianPoint to_cartesian(PolarPoint p);
PolarPoint to_polar(CartesianPoint c);

// Deterministic geometry and physical parameters of the cooperative cluster.
//
// `rho` is stored linear (P / (W N0)); configuration files carry it in dB and
// convert once through db_to_linear(). `lambda_e` is in nodes per d0^2, so the
// reference density 1e-6 nodes/m^2 is 0.01.
struct NetworkConfig {
  std::vector<PolarPoint> sbs;
  double alpha = 4.0;
  double rho = 10.0;
  double lambda_e = 0.01;

  std::size_t num_sbs() const noexcept { return sbs.size(); }
  double max_sbs_distance() const noexcept;
  std::vector<CartesianPoint> sbs_cartesian() const;
};

// Throws ConfigError on hard violations (K == 0, r_b <= 0, alpha <= 2,
// rho <= 0, lambda_e < 0). Returns human-readable warnings for permitted but
// suspicious inputs such as co-located SBSs.
std::vector<std::string> validate(const NetworkConfig& cfg);

// Same checks with alpha > 0 only. The non-colluding integrals and the
// connection probabilities stay finite for any positive exponent, which the
// alpha = 2 reduction relies on.
std::vector<std::string> validate_geometry(const NetworkConfig& cfg);

double db_to_linear(double db);

// Law-of-cosines distance between SBS k and point p.
double sbs_to_point_distance(const NetworkConfig& cfg, std::size_t k, PolarPoint p);

// Linear experiment layout: SBS k sits at ((k-1) D, 0) and the user at
// (x_u, 1/2); the frame is translated so the user is at the origin.
std::vector<PolarPoint> layout_linear(std::size_t num_sbs, double spacing, double user_x);

}  // namespace scdp

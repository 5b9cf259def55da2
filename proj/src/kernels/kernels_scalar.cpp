#include <cmath>

#include "scdp/kernels.hpp"

namespace scdp::kernels::scalar {

void path_gain_sum(const double* x, const double* y, std::size_t n, const double* sx,
                   const double* sy, std::size_t k, double alpha, double* out) {
  const double e = -0.5 * alpha;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double dx = x[i] - sx[j], dy = y[i] - sy[j];
      s += std::pow(dx * dx + dy * dy, e);
    }
    out[i] = s;
  }
}

void weighted_path_loss_sum(const double* x, const double* y, std::size_t n, const double* sx,
                            const double* sy, const double* coeff, std::size_t k, double alpha,
                            double* out) {
  const double e = 0.5 * alpha;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double dx = x[i] - sx[j], dy = y[i] - sy[j];
      s += coeff[j] * std::pow(dx * dx + dy * dy, e);
    }
    out[i] = s;
  }
}

void neg_exp_inplace(double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) v[i] = std::exp(-v[i]);
}

double exp_weighted_sum(const double* w, const double* b, std::size_t n, double beta) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * std::exp(-b[i] * beta);
  return s;
}

double exp_weighted_moment(const double* w, const double* b, std::size_t n, double beta) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * b[i] * std::exp(-b[i] * beta);
  return s;
}

}  // namespace scdp::kernels::scalar

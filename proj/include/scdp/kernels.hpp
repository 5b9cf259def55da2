#pragma once

// Data-parallel inner loops shared by the analytic integrands and the rate
// optimizers. Every kernel has a scalar reference implementation and, on x86,
// an AVX2/FMA variant selected at runtime. The variants agree to a few ulp per
// element (sums to ~1e-13 relative, see tests/test_kernels.cpp).

#include <span>
#include <string_view>

namespace scdp::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

// Whether the variant was compiled in and the CPU supports it.
bool isa_available(Isa isa);

// Currently selected variant. Defaults to the best available one unless the
// environment variable SCDP_ISA=scalar is set.
Isa active_isa();

// Overrides the selection (tests, benchmarking). Throws ConfigError if the
// variant is unavailable.
void set_active_isa(Isa isa);

// RAII override used by equivalence tests.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) : previous_(active_isa()) { set_active_isa(isa); }
  ~ScopedIsa() { set_active_isa(previous_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

struct Sources {
  std::span<const double> x;
  std::span<const double> y;
};

// out[i] = sum_k |p_i - s_k|^(-alpha)
void path_gain_sum(std::span<const double> x, std::span<const double> y, Sources sbs,
                   double alpha, std::span<double> out);

// out[i] = sum_k coeff[k] |p_i - s_k|^alpha
void weighted_path_loss_sum(std::span<const double> x, std::span<const double> y,
                            Sources sbs, std::span<const double> coeff, double alpha,
                            std::span<double> out);

// v[i] <- exp(-v[i])
void neg_exp_inplace(std::span<double> v);

// sum_i w[i] exp(-b[i] beta)
double exp_weighted_sum(std::span<const double> w, std::span<const double> b, double beta);

// sum_i w[i] b[i] exp(-b[i] beta)
double exp_weighted_moment(std::span<const double> w, std::span<const double> b, double beta);

// Direct entry points to each variant, bypassing dispatch.
namespace scalar {
void path_gain_sum(const double* x, const double* y, std::size_t n, const double* sx,
                   const double* sy, std::size_t k, double alpha, double* out);
void weighted_path_loss_sum(const double* x, const double* y, std::size_t n, const double* sx,
                            const double* sy, const double* coeff, std::size_t k, double alpha,
                            double* out);
void neg_exp_inplace(double* v, std::size_t n);
double exp_weighted_sum(const double* w, const double* b, std::size_t n, double beta);
double exp_weighted_moment(const double* w, const double* b, std::size_t n, double beta);
}  // namespace scalar

namespace avx2 {
void path_gain_sum(const double* x, const double* y, std::size_t n, const double* sx,
                   const double* sy, std::size_t k, double alpha, double* out);
void weighted_path_loss_sum(const double* x, const double* y, std::size_t n, const double* sx,
                            const double* sy, const double* coeff, std::size_t k, double alpha,
                            double* out);
void neg_exp_inplace(double* v, std::size_t n);
double exp_weighted_sum(const double* w, const double* b, std::size_t n, double beta);
double exp_weighted_moment(const double* w, const double* b, std::size_t n, double beta);
}  // namespace avx2

}  // namespace scdp::kernels

#include <atomic>
#include <cstdlib>
#include <string>

#include <fmt/format.h>

#include "scdp/errors.hpp"
#include "scdp/kernels.hpp"

namespace scdp::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(SCDP_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  if (const char* env = std::getenv("SCDP_ISA"); env != nullptr && std::string(env) == "scalar") {
    return Isa::Scalar;
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

void check_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ConfigError(fmt::format("{}: length mismatch ({} vs {})", what, a, b));
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) { return isa == Isa::Scalar || cpu_has_avx2(); }

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw ConfigError(fmt::format("kernel variant {} is not available", isa_name(isa)));
  }
  selected().store(isa, std::memory_order_relaxed);
}

#if defined(SCDP_HAVE_AVX2_KERNELS)
#define SCDP_DISPATCH(fn, ...) \
  (active_isa() == Isa::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define SCDP_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void path_gain_sum(std::span<const double> x, std::span<const double> y, Sources sbs,
                   double alpha, std::span<double> out) {
  check_sizes(x.size(), y.size(), "path_gain_sum");
  check_sizes(x.size(), out.size(), "path_gain_sum");
  check_sizes(sbs.x.size(), sbs.y.size(), "path_gain_sum");
  SCDP_DISPATCH(path_gain_sum, x.data(), y.data(), x.size(), sbs.x.data(), sbs.y.data(),
                sbs.x.size(), alpha, out.data());
}

void weighted_path_loss_sum(std::span<const double> x, std::span<const double> y,
                            Sources sbs, std::span<const double> coeff, double alpha,
                            std::span<double> out) {
  check_sizes(x.size(), y.size(), "weighted_path_loss_sum");
  check_sizes(x.size(), out.size(), "weighted_path_loss_sum");
  check_sizes(sbs.x.size(), sbs.y.size(), "weighted_path_loss_sum");
  check_sizes(sbs.x.size(), coeff.size(), "weighted_path_loss_sum");
  SCDP_DISPATCH(weighted_path_loss_sum, x.data(), y.data(), x.size(), sbs.x.data(), sbs.y.data(),
                coeff.data(), sbs.x.size(), alpha, out.data());
}

void neg_exp_inplace(std::span<double> v) { SCDP_DISPATCH(neg_exp_inplace, v.data(), v.size()); }

double exp_weighted_sum(std::span<const double> w, std::span<const double> b, double beta) {
  check_sizes(w.size(), b.size(), "exp_weighted_sum");
  return SCDP_DISPATCH(exp_weighted_sum, w.data(), b.data(), w.size(), beta);
}

double exp_weighted_moment(std::span<const double> w, std::span<const double> b, double beta) {
  check_sizes(w.size(), b.size(), "exp_weighted_moment");
  return SCDP_DISPATCH(exp_weighted_moment, w.data(), b.data(), w.size(), beta);
}

}  // namespace scdp::kernels

#if !defined(SCDP_HAVE_AVX2_KERNELS)
// Keep the avx2:: entry points linkable on builds without the variant.
namespace scdp::kernels::avx2 {
void path_gain_sum(const double* x, const double* y, std::size_t n, const double* sx,
                   const double* sy, std::size_t k, double alpha, double* out) {
  scalar::path_gain_sum(x, y, n, sx, sy, k, alpha, out);
}
void weighted_path_loss_sum(const double* x, const double* y, std::size_t n, const double* sx,
                            const double* sy, const double* coeff, std::size_t k, double alpha,
                            double* out) {
  scalar::weighted_path_loss_sum(x, y, n, sx, sy, coeff, k, alpha, out);
}
void neg_exp_inplace(double* v, std::size_t n) { scalar::neg_exp_inplace(v, n); }
double exp_weighted_sum(const double* w, const double* b, std::size_t n, double beta) {
  return scalar::exp_weighted_sum(w, b, n, beta);
}
double exp_weighted_moment(const double* w, const double* b, std::size_t n, double beta) {
  return scalar::exp_weighted_moment(w, b, n, beta);
}
}  // namespace scdp::kernels::avx2
#endif

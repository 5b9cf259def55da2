#include <immintrin.h>

#include <cmath>

#include "scdp/kernels.hpp"

namespace scdp::kernels::avx2 {
namespace {

// exp(x) for x <= 0 down to underflow. Range reduction x = n ln2 + r with a
// two-part ln2, degree-12 Taylor polynomial on |r| <= ln2/2, scaling by 2^n
// through the exponent bits.
inline __m256d exp_neg(__m256d x) {
  const __m256d lo_limit = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo_limit, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lo_limit);

  const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
  __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  static constexpr double c[] = {1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
                                 1.0 / 362880.0,    1.0 / 40320.0,    1.0 / 5040.0,
                                 1.0 / 720.0,       1.0 / 120.0,      1.0 / 24.0,
                                 1.0 / 6.0,         0.5,              1.0,
                                 1.0};
  __m256d p = _mm256_set1_pd(c[0]);
  for (int i = 1; i < 13; ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[i]));

  // n + 1.5 * 2^52 puts n in the low mantissa bits.
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  __m256i ni = _mm256_castpd_si256(_mm256_add_pd(n, magic));
  ni = _mm256_sub_epi64(ni, _mm256_castpd_si256(magic));
  const __m256i shifted = _mm256_slli_epi64(ni, 52);
  __m256d result = _mm256_castsi256_pd(_mm256_add_epi64(_mm256_castpd_si256(p), shifted));
  return _mm256_andnot_pd(underflow, result);
}

inline __m256d int_power(__m256d v, int m) {
  __m256d result = _mm256_set1_pd(1.0);
  __m256d base = v;
  while (m > 0) {
    if (m & 1) result = _mm256_mul_pd(result, base);
    base = _mm256_mul_pd(base, base);
    m >>= 1;
  }
  return result;
}

// Integer alpha/2 uses repeated multiplication, anything else falls back
// to std::pow per lane.
bool half_integer_exponent(double alpha, int& m) {
  const double h = 0.5 * alpha;
  if (h == std::floor(h) && h >= 1.0 && h <= 16.0) {
    m = static_cast<int>(h);
    return true;
  }
  return false;
}

inline __m256d dist2(__m256d x, __m256d y, double sx, double sy) {
  const __m256d dx = _mm256_sub_pd(x, _mm256_set1_pd(sx));
  const __m256d dy = _mm256_sub_pd(y, _mm256_set1_pd(sy));
  return _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
}

inline double hsum(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return (t[0] + t[1]) + (t[2] + t[3]);
}

}  // namespace

void path_gain_sum(const double* x, const double* y, std::size_t n, const double* sx,
                   const double* sy, std::size_t k, double alpha, double* out) {
  int m = 0;
  if (!half_integer_exponent(alpha, m)) {
    scalar::path_gain_sum(x, y, n, sx, sy, k, alpha, out);
    return;
  }
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d px = _mm256_loadu_pd(x + i), py = _mm256_loadu_pd(y + i);
    __m256d s = _mm256_setzero_pd();
    for (std::size_t j = 0; j < k; ++j) {
      s = _mm256_add_pd(s, _mm256_div_pd(one, int_power(dist2(px, py, sx[j], sy[j]), m)));
    }
    _mm256_storeu_pd(out + i, s);
  }
  if (i < n) scalar::path_gain_sum(x + i, y + i, n - i, sx, sy, k, alpha, out + i);
}

void weighted_path_loss_sum(const double* x, const double* y, std::size_t n, const double* sx,
                            const double* sy, const double* coeff, std::size_t k, double alpha,
                            double* out) {
  int m = 0;
  if (!half_integer_exponent(alpha, m)) {
    scalar::weighted_path_loss_sum(x, y, n, sx, sy, coeff, k, alpha, out);
    return;
  }
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d px = _mm256_loadu_pd(x + i), py = _mm256_loadu_pd(y + i);
    __m256d s = _mm256_setzero_pd();
    for (std::size_t j = 0; j < k; ++j) {
      s = _mm256_fmadd_pd(_mm256_set1_pd(coeff[j]), int_power(dist2(px, py, sx[j], sy[j]), m), s);
    }
    _mm256_storeu_pd(out + i, s);
  }
  if (i < n) scalar::weighted_path_loss_sum(x + i, y + i, n - i, sx, sy, coeff, k, alpha, out + i);
}

void neg_exp_inplace(double* v, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(v + i, exp_neg(_mm256_sub_pd(zero, _mm256_loadu_pd(v + i))));
  }
  if (i < n) scalar::neg_exp_inplace(v + i, n - i);
}

double exp_weighted_sum(const double* w, const double* b, std::size_t n, double beta) {
  const __m256d nb = _mm256_set1_pd(-beta);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d e = exp_neg(_mm256_mul_pd(_mm256_loadu_pd(b + i), nb));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), e, acc);
  }
  double s = hsum(acc);
  if (i < n) s += scalar::exp_weighted_sum(w + i, b + i, n - i, beta);
  return s;
}

double exp_weighted_moment(const double* w, const double* b, std::size_t n, double beta) {
  const __m256d nb = _mm256_set1_pd(-beta);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d bv = _mm256_loadu_pd(b + i);
    const __m256d e = exp_neg(_mm256_mul_pd(bv, nb));
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), bv), e, acc);
  }
  double s = hsum(acc);
  if (i < n) s += scalar::exp_weighted_moment(w + i, b + i, n - i, beta);
  return s;
}

}  // namespace scdp::kernels::avx2

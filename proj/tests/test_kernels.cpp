#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "scdp/kernels.hpp"

using namespace scdp;
using namespace scdp::kernels;

namespace {

struct Data {
  std::vector<double> x, y, sx, sy, coeff;
};

Data make_data(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-30.0, 30.0), c(0.01, 2.0);
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    d.x.push_back(u(gen));
    d.y.push_back(u(gen));
  }
  for (std::size_t j = 0; j < k; ++j) {
    d.sx.push_back(u(gen) / 10);
    d.sy.push_back(u(gen) / 10);
    d.coeff.push_back(c(gen));
  }
  return d;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("scalar variant is always available") {
  CHECK(isa_available(Isa::Scalar));
  ScopedIsa s(Isa::Scalar);
  CHECK(active_isa() == Isa::Scalar);
}

TEST_CASE("avx2 variant matches the scalar reference") {
  if (!isa_available(Isa::Avx2)) {
    MESSAGE("AVX2 not available on this host; equivalence test skipped");
    return;
  }
  for (double alpha : {4.0, 3.0, 2.5, 6.0, 3.7}) {
    for (std::size_t n : {1ul, 7ul, 64ul, 1001ul}) {
      const auto d = make_data(n, 3, 17 + n);
      std::vector<double> a(n), b(n);
      scalar::path_gain_sum(d.x.data(), d.y.data(), n, d.sx.data(), d.sy.data(), 3, alpha, a.data());
      avx2::path_gain_sum(d.x.data(), d.y.data(), n, d.sx.data(), d.sy.data(), 3, alpha, b.data());
      for (std::size_t i = 0; i < n; ++i) CHECK(rel(b[i], a[i]) < 1e-14);

      scalar::weighted_path_loss_sum(d.x.data(), d.y.data(), n, d.sx.data(), d.sy.data(),
                                     d.coeff.data(), 3, alpha, a.data());
      avx2::weighted_path_loss_sum(d.x.data(), d.y.data(), n, d.sx.data(), d.sy.data(),
                                   d.coeff.data(), 3, alpha, b.data());
      for (std::size_t i = 0; i < n; ++i) CHECK(rel(b[i], a[i]) < 1e-14);
    }
  }
}

TEST_CASE("avx2 exponential kernels match the scalar reference") {
  if (!isa_available(Isa::Avx2)) {
    MESSAGE("AVX2 not available on this host; equivalence test skipped");
    return;
  }
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> e(0.0, 800.0), w(0.0, 1.0), b(0.0, 50.0);
  const std::size_t n = 4099;
  std::vector<double> v(n);
  for (auto& x : v) x = e(gen);
  v[0] = 0.0;
  v[1] = 707.9;
  v[2] = 708.5;
  v[3] = 1e-300;
  auto s = v;
  auto a = v;
  scalar::neg_exp_inplace(a.data(), n);
  avx2::neg_exp_inplace(s.data(), n);
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] < 708.0) {
      CHECK(rel(s[i], a[i]) < 1e-14);
    } else {
      CHECK(s[i] <= 1e-307);
    }
  }

  std::vector<double> wv(n), bv(n);
  for (std::size_t i = 0; i < n; ++i) {
    wv[i] = w(gen);
    bv[i] = b(gen);
  }
  for (double beta : {0.0, 0.01, 0.7, 3.0, 14.0}) {
    CHECK(rel(avx2::exp_weighted_sum(wv.data(), bv.data(), n, beta),
              scalar::exp_weighted_sum(wv.data(), bv.data(), n, beta)) < 1e-13);
    CHECK(rel(avx2::exp_weighted_moment(wv.data(), bv.data(), n, beta),
              scalar::exp_weighted_moment(wv.data(), bv.data(), n, beta)) < 1e-13);
  }
}

TEST_CASE("dispatch honours the selected variant and checks sizes") {
  const auto d = make_data(33, 2, 5);
  std::vector<double> out(33), ref(33);
  scalar::path_gain_sum(d.x.data(), d.y.data(), 33, d.sx.data(), d.sy.data(), 2, 4.0, ref.data());
  {
    ScopedIsa s(Isa::Scalar);
    path_gain_sum(d.x, d.y, {d.sx, d.sy}, 4.0, out);
    CHECK(out == ref);
  }
  std::vector<double> short_out(10);
  CHECK_THROWS(path_gain_sum(d.x, d.y, {d.sx, d.sy}, 4.0, short_out));
  CHECK_THROWS(exp_weighted_sum(std::span(d.x).first(3), std::span(d.y).first(4), 1.0));
}

#pragma once

// Arithmetic shared between the scalar and SIMD kernels. Every acceptance
// probability and energy is produced by these exact expressions (fma chains,
// one std::exp), which is what makes the kernel variants bit-equivalent.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "qac/kernels.hpp"
#include "qac/rng.hpp"

namespace qac::kernels::detail {

inline double spin_of_bit(uint64_t b) { return b ? -1.0 : 1.0; }

inline double flip_delta(double hq, const double* w, const double* s_nb, int deg, double s_own) {
  double field = hq;
  for (int k = 0; k < deg; ++k) field = std::fma(w[k], s_nb[k], field);
  return (-2.0 * s_own) * field;
}

inline double accept_prob(double beta, double delta) {
  return std::min(1.0, std::exp(-beta * delta));
}

inline uint64_t read_stream_seed(uint64_t seed, uint64_t read) { return derive_seed(seed, read); }

inline double energy_one(const ProblemView& p, const int8_t* s) {
  double e = 0.0;
  for (int q = 0; q < p.n; ++q) e = std::fma(p.h[q], double(s[q]), e);
  for (int k = 0; k < p.n_couplings; ++k)
    e = std::fma(p.cpl_w[k], double(s[p.cpl_a[k]]) * double(s[p.cpl_b[k]]), e);
  return e;
}

}  // namespace qac::kernels::detail

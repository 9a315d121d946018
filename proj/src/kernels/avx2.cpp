// AVX2 kernel variants: four Metropolis reads per vector (one xoshiro256++
// stream per lane) and four-way batched energy evaluation. Bit-identical to
// the scalar kernels: acceptance probabilities come from the shared tables,
// the uniform-double conversion is exact, and fma order matches.

#include <immintrin.h>

#include <cstdint>
#include <vector>

#include "detail.hpp"
#include "qac/kernels.hpp"
#include "qac/rng.hpp"

namespace qac::kernels {

namespace {

inline __m256i rotl64(__m256i x, int k) {
  return _mm256_or_si256(_mm256_slli_epi64(x, k), _mm256_srli_epi64(x, 64 - k));
}

struct VecRng {
  __m256i s0, s1, s2, s3;

  static VecRng from_seeds(const uint64_t seeds[4]) {
    Xoshiro256pp g[4];
    for (int l = 0; l < 4; ++l) g[l] = Xoshiro256pp::seeded(seeds[l]);
    VecRng v;
    v.s0 = _mm256_set_epi64x(int64_t(g[3].s[0]), int64_t(g[2].s[0]), int64_t(g[1].s[0]),
                             int64_t(g[0].s[0]));
    v.s1 = _mm256_set_epi64x(int64_t(g[3].s[1]), int64_t(g[2].s[1]), int64_t(g[1].s[1]),
                             int64_t(g[0].s[1]));
    v.s2 = _mm256_set_epi64x(int64_t(g[3].s[2]), int64_t(g[2].s[2]), int64_t(g[1].s[2]),
                             int64_t(g[0].s[2]));
    v.s3 = _mm256_set_epi64x(int64_t(g[3].s[3]), int64_t(g[2].s[3]), int64_t(g[1].s[3]),
                             int64_t(g[0].s[3]));
    return v;
  }

  inline __m256i next() {
    __m256i result = _mm256_add_epi64(rotl64(_mm256_add_epi64(s0, s3), 23), s0);
    __m256i t = _mm256_slli_epi64(s1, 17);
    s2 = _mm256_xor_si256(s2, s0);
    s3 = _mm256_xor_si256(s3, s1);
    s1 = _mm256_xor_si256(s1, s2);
    s0 = _mm256_xor_si256(s0, s3);
    s2 = _mm256_xor_si256(s2, t);
    s3 = rotl64(s3, 45);
    return result;
  }

  // Uniform [0, 1) per lane, identical to Xoshiro256pp::next_unit: the 53-bit
  // value converts exactly to double via the 2^52 bias trick applied to its
  // 32-bit halves.
  inline __m256d next_unit() {
    __m256i x = _mm256_srli_epi64(next(), 11);
    const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
    const __m256d magicd = _mm256_set1_pd(0x1.0p52);
    __m256i lo = _mm256_and_si256(x, _mm256_set1_epi64x(0xFFFFFFFFLL));
    __m256i hi = _mm256_srli_epi64(x, 32);
    __m256d dlo = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(lo, magic)), magicd);
    __m256d dhi = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(hi, magic)), magicd);
    __m256d d = _mm256_fmadd_pd(dhi, _mm256_set1_pd(0x1.0p32), dlo);
    return _mm256_mul_pd(d, _mm256_set1_pd(0x1.0p-53));
  }
};

void metropolis_block_avx2(const MetropolisBlockArgs& args) {
  const ProblemView& p = args.problem;
  const AcceptTables& t = *args.tables;

  uint64_t seeds[4];
  for (int l = 0; l < kLanes; ++l)
    seeds[l] = detail::read_stream_seed(args.seed, args.first_read + l);
  VecRng rng = VecRng::from_seeds(seeds);

  // spin bits, lane-major: bits[q*4 + lane] in {0, 1}
  std::vector<uint64_t> bits(size_t(p.n) * kLanes);
  const __m256i one = _mm256_set1_epi64x(1);
  for (int q = 0; q < p.n; ++q) {
    __m256i b = _mm256_srli_epi64(rng.next(), 63);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(&bits[size_t(q) * kLanes]), b);
  }

  for (int sweep = 0; sweep < args.sweeps; ++sweep) {
    const double* tbl = t.slot(sweep);
    for (int q = 0; q < p.n; ++q) {
      __m256i idx = _mm256_setzero_si256();
      for (int32_t k = p.adj_off[q]; k < p.adj_off[q + 1]; ++k) {
        __m256i nb = _mm256_loadu_si256(
            reinterpret_cast<const __m256i*>(&bits[size_t(p.adj_idx[k]) * kLanes]));
        idx = _mm256_or_si256(_mm256_slli_epi64(idx, 1), nb);
      }
      __m256i own =
          _mm256_loadu_si256(reinterpret_cast<const __m256i*>(&bits[size_t(q) * kLanes]));
      idx = _mm256_or_si256(_mm256_slli_epi64(idx, 1), own);

      __m256d prob = _mm256_i64gather_pd(tbl + t.offset[q], idx, 8);
      __m256d u = rng.next_unit();
      __m256d acc = _mm256_cmp_pd(u, prob, _CMP_LT_OQ);
      __m256i flip = _mm256_and_si256(_mm256_castpd_si256(acc), one);
      _mm256_storeu_si256(reinterpret_cast<__m256i*>(&bits[size_t(q) * kLanes]),
                          _mm256_xor_si256(own, flip));
    }
  }

  for (int lane = 0; lane < args.lanes; ++lane) {
    int8_t* out = args.out + size_t(lane) * p.n;
    for (int q = 0; q < p.n; ++q)
      out[q] = bits[size_t(q) * kLanes + lane] ? int8_t{-1} : int8_t{1};
  }
}

void energy_batch_avx2(const ProblemView& p, const int8_t* spins, int count, double* out) {
  int c = 0;
  for (; c + 4 <= count; c += 4) {
    const int8_t* s0 = spins + size_t(c) * p.n;
    const int8_t* s1 = s0 + p.n;
    const int8_t* s2 = s1 + p.n;
    const int8_t* s3 = s2 + p.n;
    __m256d e = _mm256_setzero_pd();
    for (int q = 0; q < p.n; ++q) {
      __m256d sv = _mm256_set_pd(double(s3[q]), double(s2[q]), double(s1[q]), double(s0[q]));
      e = _mm256_fmadd_pd(_mm256_set1_pd(p.h[q]), sv, e);
    }
    for (int k = 0; k < p.n_couplings; ++k) {
      int a = p.cpl_a[k], b = p.cpl_b[k];
      __m256d sa = _mm256_set_pd(double(s3[a]), double(s2[a]), double(s1[a]), double(s0[a]));
      __m256d sb = _mm256_set_pd(double(s3[b]), double(s2[b]), double(s1[b]), double(s0[b]));
      e = _mm256_fmadd_pd(_mm256_set1_pd(p.cpl_w[k]), _mm256_mul_pd(sa, sb), e);
    }
    _mm256_storeu_pd(out + c, e);
  }
  for (; c < count; ++c) out[c] = detail::energy_one(p, spins + size_t(c) * p.n);
}

}  // namespace

extern const KernelTable kAvx2Kernels{"avx2", &metropolis_block_avx2, &energy_batch_avx2};

}  // namespace qac::kernels

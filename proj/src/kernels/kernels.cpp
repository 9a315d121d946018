#include "qac/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

#include "detail.hpp"
#include "qac/errors.hpp"
#include "qac/rng.hpp"

namespace qac::kernels {

ProblemView DenseProblem::view() const {
  ProblemView v;
  v.n = static_cast<int>(h.size());
  v.h = h.data();
  v.adj_off = adj_off.data();
  v.adj_idx = adj_idx.data();
  v.adj_w = adj_w.data();
  v.n_couplings = static_cast<int>(cpl_w.size());
  v.cpl_a = cpl_a.data();
  v.cpl_b = cpl_b.data();
  v.cpl_w = cpl_w.data();
  return v;
}

DenseProblem densify(const IsingProblem& p) {
  DenseProblem d;
  int n = p.size();
  d.h = p.fields();
  // Neighbor lists in coupling insertion order; this order defines the bit
  // layout of the acceptance-table indices, so it must be deterministic.
  std::vector<std::vector<std::pair<int32_t, double>>> nb(n);
  for (const auto& c : p.couplings()) {
    nb[c.a].push_back({static_cast<int32_t>(c.b), c.j});
    nb[c.b].push_back({static_cast<int32_t>(c.a), c.j});
    d.cpl_a.push_back(static_cast<int32_t>(c.a));
    d.cpl_b.push_back(static_cast<int32_t>(c.b));
    d.cpl_w.push_back(c.j);
  }
  d.adj_off.assign(n + 1, 0);
  for (int q = 0; q < n; ++q) d.adj_off[q + 1] = d.adj_off[q] + static_cast<int32_t>(nb[q].size());
  d.adj_idx.resize(d.adj_off[n]);
  d.adj_w.resize(d.adj_off[n]);
  for (int q = 0; q < n; ++q)
    for (size_t k = 0; k < nb[q].size(); ++k) {
      d.adj_idx[d.adj_off[q] + k] = nb[q][k].first;
      d.adj_w[d.adj_off[q] + k] = nb[q][k].second;
    }
  return d;
}

bool tables_supported(const ProblemView& p) {
  for (int q = 0; q < p.n; ++q)
    if (p.adj_off[q + 1] - p.adj_off[q] > kMaxTableDegree) return false;
  return true;
}

AcceptTables build_accept_tables(const ProblemView& p, const std::vector<double>& betas) {
  if (!tables_supported(p)) fail(ErrorKind::SizeLimit, "problem degree exceeds table bound");
  if (betas.empty()) fail(ErrorKind::InvalidInput, "empty schedule");
  AcceptTables t;
  t.n = p.n;
  t.sweeps = static_cast<int>(betas.size());
  t.offset.resize(p.n);
  t.degree.resize(p.n);
  int32_t off = 0;
  for (int q = 0; q < p.n; ++q) {
    int deg = p.adj_off[q + 1] - p.adj_off[q];
    t.degree[q] = deg;
    t.offset[q] = off;
    off += int32_t{1} << (deg + 1);
  }
  t.block_size = off;

  bool constant = std::all_of(betas.begin(), betas.end(), [&](double b) { return b == betas[0]; });
  int slots = constant ? 1 : t.sweeps;
  t.slot_of_sweep.resize(t.sweeps);
  for (int s = 0; s < t.sweeps; ++s) t.slot_of_sweep[s] = constant ? 0 : s;

  t.values.resize(size_t(slots) * t.block_size);
  double s_nb[kMaxTableDegree];
  for (int slot = 0; slot < slots; ++slot) {
    double beta = betas[constant ? 0 : slot];
    double* block = t.values.data() + size_t(slot) * t.block_size;
    for (int q = 0; q < p.n; ++q) {
      int deg = t.degree[q];
      const double* w = p.adj_w + p.adj_off[q];
      for (uint32_t idx = 0; idx < (uint32_t{1} << (deg + 1)); ++idx) {
        // neighbor bits in adjacency order, first neighbor highest; own bit lowest
        for (int k = 0; k < deg; ++k) s_nb[k] = detail::spin_of_bit((idx >> (deg - k)) & 1);
        double s_own = detail::spin_of_bit(idx & 1);
        double delta = detail::flip_delta(p.h[q], w, s_nb, deg, s_own);
        block[t.offset[q] + idx] = detail::accept_prob(beta, delta);
      }
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Scalar reference kernels; each lane is advanced with exactly the per-lane
// arithmetic of the SIMD variants.
// ---------------------------------------------------------------------------

namespace {

void metropolis_block_scalar(const MetropolisBlockArgs& args) {
  const ProblemView& p = args.problem;
  const AcceptTables& t = *args.tables;
  std::vector<uint64_t> bits(p.n);
  for (int lane = 0; lane < args.lanes; ++lane) {
    Xoshiro256pp rng =
        Xoshiro256pp::seeded(detail::read_stream_seed(args.seed, args.first_read + lane));
    for (int q = 0; q < p.n; ++q) bits[q] = rng.next() >> 63;
    for (int sweep = 0; sweep < args.sweeps; ++sweep) {
      const double* tbl = t.slot(sweep);
      for (int q = 0; q < p.n; ++q) {
        uint64_t idx = 0;
        for (int32_t k = p.adj_off[q]; k < p.adj_off[q + 1]; ++k)
          idx = (idx << 1) | bits[p.adj_idx[k]];
        idx = (idx << 1) | bits[q];
        double u = rng.next_unit();
        if (u < tbl[t.offset[q] + idx]) bits[q] ^= 1;
      }
    }
    int8_t* out = args.out + size_t(lane) * p.n;
    for (int q = 0; q < p.n; ++q) out[q] = bits[q] ? int8_t{-1} : int8_t{1};
  }
}

void energy_batch_scalar(const ProblemView& p, const int8_t* spins, int count, double* out) {
  for (int c = 0; c < count; ++c) out[c] = detail::energy_one(p, spins + size_t(c) * p.n);
}

}  // namespace

void metropolis_block_generic(const MetropolisBlockArgs& args) {
  const ProblemView& p = args.problem;
  std::vector<double> spins(p.n);
  std::vector<double> s_nb;
  for (int lane = 0; lane < args.lanes; ++lane) {
    Xoshiro256pp rng =
        Xoshiro256pp::seeded(detail::read_stream_seed(args.seed, args.first_read + lane));
    for (int q = 0; q < p.n; ++q) spins[q] = detail::spin_of_bit(rng.next() >> 63);
    for (int sweep = 0; sweep < args.sweeps; ++sweep) {
      double beta = args.betas[sweep];
      for (int q = 0; q < p.n; ++q) {
        int deg = p.adj_off[q + 1] - p.adj_off[q];
        s_nb.resize(deg);
        for (int k = 0; k < deg; ++k) s_nb[k] = spins[p.adj_idx[p.adj_off[q] + k]];
        double delta = detail::flip_delta(p.h[q], p.adj_w + p.adj_off[q], s_nb.data(), deg, spins[q]);
        double u = rng.next_unit();
        if (u < detail::accept_prob(beta, delta)) spins[q] = -spins[q];
      }
    }
    int8_t* out = args.out + size_t(lane) * p.n;
    for (int q = 0; q < p.n; ++q) out[q] = spins[q] < 0 ? int8_t{-1} : int8_t{1};
  }
}

extern const KernelTable kScalarKernels{"scalar", &metropolis_block_scalar, &energy_batch_scalar};

#if defined(QAC_HAVE_AVX2_BUILD)
extern const KernelTable kAvx2Kernels;  // kernels/avx2.cpp

static bool cpu_has_avx2() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable* kernel_by_name(std::string_view name) {
  if (name == "scalar") return &kScalarKernels;
#if defined(QAC_HAVE_AVX2_BUILD)
  if (name == "avx2" && cpu_has_avx2()) return &kAvx2Kernels;
#endif
  return nullptr;
}

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&kScalarKernels};
#if defined(QAC_HAVE_AVX2_BUILD)
  if (cpu_has_avx2()) out.push_back(&kAvx2Kernels);
#endif
  return out;
}

const KernelTable& active_kernels() {
  static const KernelTable* selected = [] {
    if (const char* env = std::getenv("QAC_KERNELS")) {
      if (const KernelTable* k = kernel_by_name(env)) return k;
      fail(ErrorKind::InvalidInput, std::string("QAC_KERNELS=") + env + " is not available");
    }
#if defined(QAC_HAVE_AVX2_BUILD)
    if (cpu_has_avx2()) return &kAvx2Kernels;
#endif
    return &kScalarKernels;
  }();
  return *selected;
}

}  // namespace qac::kernels

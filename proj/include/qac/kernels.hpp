#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qac/ising.hpp"

namespace qac::kernels {

// Number of Metropolis chains advanced per kernel invocation. Matches the
// AVX2 lane count for doubles; the scalar kernel processes the same block
// lane by lane with identical arithmetic, so all kernels are bit-equivalent.
inline constexpr int kLanes = 4;

// Dense read-only view of an IsingProblem for the inner loops.
struct ProblemView {
  int n = 0;
  const double* h = nullptr;        // [n]
  const int32_t* adj_off = nullptr;  // [n+1]
  const int32_t* adj_idx = nullptr;  // neighbor dense index
  const double* adj_w = nullptr;     // coupling on that neighbor edge
  int n_couplings = 0;
  const int32_t* cpl_a = nullptr;
  const int32_t* cpl_b = nullptr;
  const double* cpl_w = nullptr;
};

// Owning storage behind a ProblemView.
struct DenseProblem {
  std::vector<double> h;
  std::vector<int32_t> adj_off, adj_idx;
  std::vector<double> adj_w;
  std::vector<int32_t> cpl_a, cpl_b;
  std::vector<double> cpl_w;
  ProblemView view() const;
};

DenseProblem densify(const IsingProblem& p);

// Per-(beta, qubit) acceptance tables. Entry index packs the neighbor spins
// (adjacency order, first neighbor = highest bit) and the qubit's own spin in
// the lowest bit; the value is min(1, exp(-beta * delta_E)). A flip attempt
// then reduces to one table lookup and one compare, with no exp in the hot
// loop. Spin bit convention: 0 -> s=+1, 1 -> s=-1.
struct AcceptTables {
  int n = 0;
  int sweeps = 0;
  std::vector<int32_t> offset;        // per qubit, into one slot's block
  int32_t block_size = 0;             // sum over qubits of 2^(deg+1)
  std::vector<int32_t> slot_of_sweep; // sweep -> slot
  std::vector<double> values;         // [slots][block_size]
  std::vector<int> degree;

  const double* slot(int sweep) const { return values.data() + size_t(slot_of_sweep[sweep]) * block_size; }
};

// Degree above which the table construction is refused (2^(deg+1) entries per
// qubit). Chimera-compiled problems stay at degree <= 6.
inline constexpr int kMaxTableDegree = 12;

bool tables_supported(const ProblemView& p);
AcceptTables build_accept_tables(const ProblemView& p, const std::vector<double>& betas);

struct MetropolisBlockArgs {
  ProblemView problem;
  const AcceptTables* tables = nullptr;  // required by the table kernels
  const double* betas = nullptr;         // [sweeps], for the generic kernel
  int sweeps = 0;
  uint64_t seed = 0;        // sampler seed; lane l runs read first_read + l
  uint64_t first_read = 0;
  int lanes = kLanes;       // active lanes (tail block may have fewer)
  int8_t* out = nullptr;    // [lanes][n], ±1 spins
};

struct KernelTable {
  std::string_view name;
  // Runs `lanes` independent single-spin-flip Metropolis anneals. Each lane's
  // result is a pure function of (seed, first_read + lane): one uniform draw
  // is consumed per flip attempt regardless of acceptance, and the initial
  // state takes one draw per spin.
  void (*metropolis_block)(const MetropolisBlockArgs&);
  // Energies of `count` configurations laid out spins[c * n + q], each
  // accumulated in the canonical fma order.
  void (*energy_batch)(const ProblemView&, const int8_t* spins, int count, double* out);
};

// The kernel selected at runtime (AVX2 when the CPU supports it, otherwise
// scalar). The QAC_KERNELS environment variable (scalar|avx2) overrides.
const KernelTable& active_kernels();
const KernelTable* kernel_by_name(std::string_view name);  // nullptr if unknown/unavailable
std::vector<const KernelTable*> available_kernels();

// Generic scalar Metropolis path for problems whose degree exceeds the table
// bound; bit-compatible with the table kernels on problems where both apply.
void metropolis_block_generic(const MetropolisBlockArgs& args);

}  // namespace qac::kernels

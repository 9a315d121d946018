#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "qac/ising.hpp"
#include "qac/kernels.hpp"
#include "qac/rng.hpp"

using namespace qac;
using namespace qac::kernels;

namespace {

// A small irregular problem: mixed degrees, fields, couplings.
IsingProblem sample_problem() {
  IsingProblem p;
  p.add_coupling(0, 1, 1.0);
  p.add_coupling(1, 2, -0.5);
  p.add_coupling(2, 3, 0.75);
  p.add_coupling(3, 0, -0.25);
  p.add_coupling(0, 2, 0.125);
  p.set_field(0, -0.3);
  p.set_field(4, 0.8);
  p.add_coupling(4, 5, -1.0);
  p.set_field(6, -0.05);
  return p;
}

std::vector<int8_t> run_metropolis(const KernelTable& k, const IsingProblem& p, int sweeps,
                                   double b0, double b1, uint64_t seed, uint64_t first_read,
                                   int lanes) {
  auto dense = densify(p);
  auto view = dense.view();
  std::vector<double> betas(sweeps);
  for (int t = 0; t < sweeps; ++t)
    betas[t] = sweeps == 1 ? b1 : b0 + (b1 - b0) * t / double(sweeps - 1);
  auto tables = build_accept_tables(view, betas);
  std::vector<int8_t> out(size_t(lanes) * p.size());
  MetropolisBlockArgs args;
  args.problem = view;
  args.tables = &tables;
  args.betas = betas.data();
  args.sweeps = sweeps;
  args.seed = seed;
  args.first_read = first_read;
  args.lanes = lanes;
  args.out = out.data();
  k.metropolis_block(args);
  return out;
}

}  // namespace

TEST_CASE("uniform doubles stay in [0,1)") {
  auto rng = Xoshiro256pp::seeded(99);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("all kernel variants produce identical metropolis output") {
  auto kernels = available_kernels();
  REQUIRE(!kernels.empty());
  auto p = sample_problem();
  auto ref = run_metropolis(*kernels[0], p, 60, 0.2, 3.0, 1234, 0, 4);
  for (size_t i = 1; i < kernels.size(); ++i) {
    auto got = run_metropolis(*kernels[i], p, 60, 0.2, 3.0, 1234, 0, 4);
    CHECK_MESSAGE(ref == got, "variant ", kernels[i]->name, " differs from ", kernels[0]->name);
  }
}

TEST_CASE("tail blocks with fewer lanes match the full-width run lane-for-lane") {
  auto p = sample_problem();
  for (const auto* k : available_kernels()) {
    auto full = run_metropolis(*k, p, 40, 0.5, 2.0, 777, 8, 4);
    for (int lanes : {1, 2, 3}) {
      auto partial = run_metropolis(*k, p, 40, 0.5, 2.0, 777, 8, lanes);
      CHECK(std::equal(partial.begin(), partial.end(), full.begin()));
    }
  }
}

TEST_CASE("generic (table-free) path is bit-compatible with the table kernels") {
  auto p = sample_problem();
  auto dense = densify(p);
  auto view = dense.view();
  std::vector<double> betas(50);
  for (int t = 0; t < 50; ++t) betas[t] = 0.3 + 0.05 * t;

  auto tables = build_accept_tables(view, betas);
  std::vector<int8_t> a(4 * p.size()), b(4 * p.size());
  MetropolisBlockArgs args;
  args.problem = view;
  args.betas = betas.data();
  args.sweeps = 50;
  args.seed = 42;
  args.first_read = 12;
  args.lanes = 4;

  args.tables = &tables;
  args.out = a.data();
  kernel_by_name("scalar")->metropolis_block(args);
  args.out = b.data();
  metropolis_block_generic(args);
  CHECK(a == b);
}

TEST_CASE("energy batch kernels agree with ising_energy bit-for-bit") {
  auto p = sample_problem();
  auto dense = densify(p);
  auto view = dense.view();
  const int n = p.size();
  auto rng = Xoshiro256pp::seeded(5);
  const int count = 37;  // odd count exercises the SIMD tail
  std::vector<int8_t> spins(size_t(count) * n);
  for (auto& s : spins) s = rng.next_sign();

  std::vector<double> expected(count);
  for (int c = 0; c < count; ++c) {
    std::span<const int8_t> row(spins.data() + size_t(c) * n, size_t(n));
    expected[c] = ising_energy(p, row);
  }
  for (const auto* k : available_kernels()) {
    std::vector<double> got(count);
    k->energy_batch(view, spins.data(), count, got.data());
    for (int c = 0; c < count; ++c) {
      CHECK(std::memcmp(&got[c], &expected[c], sizeof(double)) == 0);
    }
  }
}

TEST_CASE("acceptance tables collapse to one slot at fixed beta") {
  auto p = sample_problem();
  auto dense = densify(p);
  std::vector<double> fixed(100, 2.5);
  auto t = build_accept_tables(dense.view(), fixed);
  CHECK(t.values.size() == size_t(t.block_size));
  CHECK(t.slot_of_sweep[99] == 0);

  std::vector<double> ramp{1.0, 2.0};
  auto t2 = build_accept_tables(dense.view(), ramp);
  CHECK(t2.values.size() == size_t(2) * t2.block_size);
}

TEST_CASE("table support bound") {
  IsingProblem star;
  for (int i = 1; i <= 14; ++i) star.add_coupling(0, i, 0.1);
  auto dense = densify(star);
  CHECK(!tables_supported(dense.view()));

  IsingProblem ok;
  for (int i = 1; i <= 12; ++i) ok.add_coupling(0, i, 0.1);
  auto dense2 = densify(ok);
  CHECK(tables_supported(dense2.view()));
}

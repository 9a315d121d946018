#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qac/decoding.hpp"
#include "qac/encoding.hpp"
#include "qac/sampling.hpp"

namespace qac {

// One row of the single-encoded-qubit state table: data-qubit bits (0 = spin
// up, the ground state being all zeros), the penalty bit for Pudenz313, the
// penalty energy 2v (v = violated penalty couplers), the magnetization
// m = -sum_i s_i over all four physical qubits, the multiplicity of the
// equivalence class, and the decodability ('y'/'n'/'t').
struct CodeStateRow {
  std::array<int8_t, 4> bits{};  // data bits; bits[3] is the penalty bit for Pudenz313
  int penalty_2v = 0;
  int magnetization = 0;
  int multiplicity = 0;
  char decodability = 'y';
};

// Exhaustive 16-state enumeration collapsed by the code's qubit-relabeling
// symmetry; rows ordered as (penalty bit, flip count, representative).
std::vector<CodeStateRow> enumerate_code_states(CodeKind code);

// Thermodynamic single-qubit error model: encoded field magnitude h >= 0
// (per-data-qubit field h/2 for Square414, h for Pudenz313; the penalty qubit
// carries no field), state weight e^{-beta(2 v gamma + h~ m_data)}. Tied
// Square414 states count half toward error and half toward success.
// Closed form, equal to the 16-state enumeration to machine precision.
double thermo_error_prob(CodeKind code, double beta, double h, double gamma);

// The same probability evaluated by direct 16-state Boltzmann enumeration
// (the independent route to the closed form).
double thermo_error_prob_enumerated(CodeKind code, double beta, double h, double gamma);

struct ThermoOpt {
  double gamma_opt = 0;
  double p_err = 0;
};

// 1-D minimization of thermo_error_prob over gamma in [0, gamma_max]:
// coarse grid then golden-section refinement to 1e-6 in gamma.
ThermoOpt optimize_thermo_gamma(CodeKind code, double beta, double h, double gamma_max = 4.0);
inline constexpr double kThermoGammaMax = 4.0;

// Excited-state classes of two antiferromagnetically coupled Square414
// qubits, from exhaustive enumeration of the 2^8 states: flip patterns on a
// single encoded group relative to a ground state, grouped by (flip count,
// flips on chain-coupled qubits). gap is exact in (alpha, gamma).
struct SpectrumLevel {
  std::string label;
  int flips = 0;
  int coupled_flips = 0;
  int multiplicity = 0;
  double gap = 0;
  bool decodable = false;  // under energy-minimization decoding
};

std::vector<SpectrumLevel> two_qubit_spectrum(double alpha, double gamma);

// Smallest gamma at which the lowest undecodable level reaches the lowest
// decodable level, solved exactly from the levels' affine dependence on
// gamma. Equals alpha for this system.
double decodability_crossing(double alpha);

// Joint histogram of sampled states over (energy gap above the physical
// ground state, Hamming distance to the nearer faithful encoded ground
// state), with the count of decodable states per bin.
struct HammingBin {
  int hamming = 0;
  double energy_gap = 0;
  int64_t count = 0;
  int64_t decodable = 0;

  double decodable_fraction() const { return count ? double(decodable) / double(count) : 0.0; }
};

std::vector<HammingBin> classify_hamming_energy(const SampleSet& samples,
                                                const EncodedChain& chain, DecodeScheme scheme);

// Tied groups per (read x encoded qubit). Pudenz313 input is a degenerate
// query: the rate is structurally zero and the flag is set.
struct TieRate {
  double rate = 0;
  bool degenerate = false;
};

TieRate count_ties(const SampleSet& samples, const EncodedChain& chain);

}  // namespace qac

#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace qac {

// Sparse Ising problem sum_i h_i s_i + sum_{(i,j)} J_ij s_i s_j over an
// arbitrary set of integer vertex ids (hardware qubits or encoded vertices).
// Internally vertices are kept sorted and densely indexed; spin
// configurations are vectors of ±1 parallel to ids().
class IsingProblem {
 public:
  struct Coupling {
    int a, b;  // dense indices into ids()
    double j;
  };

  void add_vertex(int id);
  void set_field(int id, double h);          // registers the vertex
  void add_coupling(int id_a, int id_b, double j);

  int size() const { return static_cast<int>(ids_.size()); }
  const std::vector<int>& ids() const { return ids_; }
  int index_of(int id) const;                // -1 if absent
  bool has_vertex(int id) const { return index_of(id) >= 0; }

  const std::vector<double>& fields() const { return h_; }
  const std::vector<Coupling>& couplings() const { return couplings_; }
  double field_of(int id) const;

  // Largest vertex degree in the coupling graph.
  int max_degree() const;

 private:
  std::vector<int> ids_;                     // sorted
  std::unordered_map<int, int> index_;       // id -> dense index
  std::vector<double> h_;                    // by dense index
  std::vector<Coupling> couplings_;          // insertion order (fixes energy summation order)
};

// Canonical energy evaluation: fields in id order, then couplings in
// insertion order, accumulated with fma. All energy values stored anywhere in
// the project come from this routine, so re-evaluation is bit-exact.
double ising_energy(const IsingProblem& p, std::span<const int8_t> spins);

// Flat-list problem format: entries are either [i, h] or [i, j, J].
IsingProblem problem_from_json(const nlohmann::json& j);
nlohmann::json problem_to_json(const IsingProblem& p);

// Uniform antiferromagnetic chain J=+1 along the given vertex path.
IsingProblem afm_chain_problem(std::span<const int> path);

}  // namespace qac

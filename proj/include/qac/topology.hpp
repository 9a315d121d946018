#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace qac {

// Chimera hardware graph: a rows x cols grid of K_{cell_size,cell_size}
// bipartite unit cells. Qubit ids are dense:
//
//   id = ((cell_row * cols + cell_col) * 2 + half) * cell_size + index
//
// Half 0 couples to the same-index qubit of the vertically adjacent cells,
// half 1 to the horizontally adjacent cells. Within a cell every half-0 qubit
// couples to every half-1 qubit. Faulty qubits lose all incident couplers.
struct HardwareGraph {
  int rows = 0;
  int cols = 0;
  int cell_size = 0;
  std::vector<bool> active;                   // by qubit id
  std::vector<std::pair<int, int>> couplers;  // a < b, both endpoints active
  std::vector<int> faults;                    // sorted fault ids (as configured)

  int total_qubits() const { return rows * cols * 2 * cell_size; }
  int active_qubits() const;

  int qubit_id(int cell_row, int cell_col, int half, int index) const {
    return ((cell_row * cols + cell_col) * 2 + half) * cell_size + index;
  }
  int cell_row_of(int q) const { return q / (2 * cell_size) / cols; }
  int cell_col_of(int q) const { return q / (2 * cell_size) % cols; }
  int half_of(int q) const { return q / cell_size % 2; }
  int index_of(int q) const { return q % cell_size; }

  bool is_active(int q) const { return q >= 0 && q < total_qubits() && active[q]; }

  // All qubits sharing an active coupler with q. Throws if q is inactive or
  // out of range.
  std::vector<int> active_neighbors(int q) const;

  std::span<const int> neighbors_of(int q) const {
    return {adj_.data() + adj_offsets_[q], adj_.data() + adj_offsets_[q + 1]};
  }

  bool has_coupler(int a, int b) const;

 private:
  friend HardwareGraph build_chimera(int, int, int, const std::vector<int>&);
  std::vector<int> adj_offsets_;
  std::vector<int> adj_;
};

HardwareGraph build_chimera(int rows, int cols, int cell_size, const std::vector<int>& faults = {});

nlohmann::json graph_to_json(const HardwareGraph& g);
HardwareGraph graph_from_json(const nlohmann::json& j);

}  // namespace qac

#include "qac/topology.hpp"

#include <algorithm>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "qac/errors.hpp"

namespace qac {

int HardwareGraph::active_qubits() const {
  return static_cast<int>(std::count(active.begin(), active.end(), true));
}

std::vector<int> HardwareGraph::active_neighbors(int q) const {
  if (q < 0 || q >= total_qubits())
    fail(ErrorKind::InvalidInput, "qubit id " + std::to_string(q) + " out of range");
  if (!active[q]) fail(ErrorKind::InvalidInput, "qubit " + std::to_string(q) + " is inactive");
  auto span = neighbors_of(q);
  return {span.begin(), span.end()};
}

bool HardwareGraph::has_coupler(int a, int b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(couplers.begin(), couplers.end(), std::make_pair(a, b));
}

HardwareGraph build_chimera(int rows, int cols, int cell_size, const std::vector<int>& faults) {
  if (rows < 1 || cols < 1 || cell_size < 1)
    fail(ErrorKind::InvalidInput, "chimera dimensions must be >= 1");

  HardwareGraph g;
  g.rows = rows;
  g.cols = cols;
  g.cell_size = cell_size;
  g.active.assign(g.total_qubits(), true);

  for (int f : faults) {
    if (f < 0 || f >= g.total_qubits())
      fail(ErrorKind::InvalidInput, "fault id " + std::to_string(f) + " out of range");
    g.active[f] = false;
  }
  g.faults.assign(faults.begin(), faults.end());
  std::sort(g.faults.begin(), g.faults.end());
  g.faults.erase(std::unique(g.faults.begin(), g.faults.end()), g.faults.end());

  auto add = [&](int a, int b) {
    if (!g.active[a] || !g.active[b]) return;
    if (a > b) std::swap(a, b);
    g.couplers.emplace_back(a, b);
  };

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      // intra-cell K_{k,k}
      for (int i = 0; i < cell_size; ++i)
        for (int j = 0; j < cell_size; ++j) add(g.qubit_id(r, c, 0, i), g.qubit_id(r, c, 1, j));
      // half 0 couples vertically, half 1 horizontally, same index
      if (r + 1 < rows)
        for (int i = 0; i < cell_size; ++i) add(g.qubit_id(r, c, 0, i), g.qubit_id(r + 1, c, 0, i));
      if (c + 1 < cols)
        for (int i = 0; i < cell_size; ++i) add(g.qubit_id(r, c, 1, i), g.qubit_id(r, c + 1, 1, i));
    }
  }
  std::sort(g.couplers.begin(), g.couplers.end());

  g.adj_offsets_.assign(g.total_qubits() + 1, 0);
  for (auto [a, b] : g.couplers) {
    ++g.adj_offsets_[a + 1];
    ++g.adj_offsets_[b + 1];
  }
  for (int q = 0; q < g.total_qubits(); ++q) g.adj_offsets_[q + 1] += g.adj_offsets_[q];
  g.adj_.resize(g.couplers.size() * 2);
  std::vector<int> cursor(g.adj_offsets_.begin(), g.adj_offsets_.end() - 1);
  for (auto [a, b] : g.couplers) {
    g.adj_[cursor[a]++] = b;
    g.adj_[cursor[b]++] = a;
  }
  for (int q = 0; q < g.total_qubits(); ++q)
    std::sort(g.adj_.begin() + g.adj_offsets_[q], g.adj_.begin() + g.adj_offsets_[q + 1]);

  return g;
}

nlohmann::json graph_to_json(const HardwareGraph& g) {
  return nlohmann::json{
      {"rows", g.rows}, {"cols", g.cols}, {"cell_size", g.cell_size}, {"faults", g.faults}};
}

HardwareGraph graph_from_json(const nlohmann::json& j) {
  for (const char* key : {"rows", "cols", "cell_size"})
    if (!j.contains(key) || !j[key].is_number_integer())
      fail(ErrorKind::Validation, std::string("topology.") + key + ": missing or not an integer");
  std::vector<int> faults;
  if (j.contains("faults")) {
    if (!j["faults"].is_array()) fail(ErrorKind::Validation, "topology.faults: not an array");
    faults = j["faults"].get<std::vector<int>>();
  }
  return build_chimera(j["rows"].get<int>(), j["cols"].get<int>(), j["cell_size"].get<int>(),
                       faults);
}

}  // namespace qac

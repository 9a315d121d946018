#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qac/ising.hpp"
#include "qac/topology.hpp"

namespace qac {

// The two repetition codes. Square414 packs two encoded qubits per unit cell
// (top/bottom halves, four data qubits each, no dedicated penalty qubit);
// Pudenz313 uses three data qubits from one side of the cell plus a penalty
// qubit from the opposite side.
enum class CodeKind { Square414, Pudenz313 };

constexpr int boost_factor(CodeKind c) { return c == CodeKind::Square414 ? 2 : 3; }
constexpr int data_count(CodeKind c) { return c == CodeKind::Square414 ? 4 : 3; }
constexpr int penalty_count(CodeKind c) { return c == CodeKind::Square414 ? 0 : 1; }
// Per-data-qubit weight of an encoded local field.
constexpr double data_field_weight(CodeKind c) { return c == CodeKind::Square414 ? 0.5 : 1.0; }
constexpr int penalty_couplers_per_vertex(CodeKind c) { return c == CodeKind::Square414 ? 4 : 3; }

const char* code_name(CodeKind c);
CodeKind code_from_name(const std::string& name);

enum class VertexStatus : uint8_t { FullyFunctional, MissingPenalty, Inactive };

// Encoded (logical) graph. Vertex id = cell * 2 + group.
struct EncodedGraph {
  CodeKind code = CodeKind::Square414;
  int n = 0;
  std::vector<VertexStatus> status;
  std::vector<std::pair<int, int>> edges;  // u < v, both fully functional

  bool functional(int v) const { return status[v] == VertexStatus::FullyFunctional; }
  std::vector<int> functional_vertices() const;
  int degree(int v) const;
  std::span<const int> neighbors_of(int v) const {
    return {adj_.data() + adj_offsets_[v], adj_.data() + adj_offsets_[v + 1]};
  }

  std::vector<int> adj_offsets_;
  std::vector<int> adj_;
};

// Logical -> physical expansion tables.
struct EncodingMap {
  CodeKind code = CodeKind::Square414;
  int n = 0;
  // Per vertex: data qubit ids in code order (entry 3 is -1 for Pudenz313),
  // penalty qubit id (-1 for Square414), penalty couplers, functional flag.
  std::vector<std::array<int, 4>> data;
  std::vector<int> penalty;
  std::vector<std::vector<std::pair<int, int>>> penalty_couplers;
  std::vector<uint8_t> functional;
  // Per logical edge: the physical couplers realizing it (2 or 3).
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edge_couplers;

  const std::vector<std::pair<int, int>>& couplers_of_edge(int u, int v) const;
  int group_qubit_count() const { return data_count(code) + penalty_count(code); }
};

std::pair<EncodedGraph, EncodingMap> build_encoded_graph(CodeKind code, const HardwareGraph& g);

// A logical problem compiled to physical qubits. `problem` is over hardware
// qubit ids; spin configurations are parallel to problem.ids().
struct PhysicalProblem {
  IsingProblem problem;
  std::vector<int> qubit_ids;  // == problem.ids()
};

// Compile: data qubits get alpha * h_i * data_field_weight(code), every
// physical coupler of a logical edge gets alpha * J_ij, penalty couplers get
// -gamma, penalty qubits get field 0. Rejects problems touching vertices that
// are not fully functional, and alpha/gamma outside [0, 1].
PhysicalProblem encode_problem(const IsingProblem& logical, CodeKind code, const EncodingMap& map,
                               double alpha, double gamma);

// Same compilation without the [0, 1] range check (used by analysis code that
// scans penalty strengths beyond the programmable range).
PhysicalProblem encode_problem_unchecked(const IsingProblem& logical, CodeKind code,
                                         const EncodingMap& map, double alpha, double gamma);

// Energy of the physical state in which every physical qubit copies its
// group's logical value: alpha * boost * E_logical(s) - gamma * (total
// penalty coupler count over the problem's vertices).
double faithful_embedding_energy(const IsingProblem& logical, std::span<const int8_t> s,
                                 CodeKind code, double alpha, double gamma);

// The physical configuration itself, parallel to `qubit_ids`.
std::vector<int8_t> faithful_embedding(const IsingProblem& logical, std::span<const int8_t> s,
                                       const EncodingMap& map, const std::vector<int>& qubit_ids);

// A compiled antiferromagnetic chain over encoded vertices, with the group
// structure resolved to dense indices of the physical problem. This is the
// unit the sampler, decoders and analyses operate on.
struct EncodedChain {
  CodeKind code = CodeKind::Square414;
  double alpha = 0, gamma = 0;
  std::vector<int> path;  // logical vertex ids in chain order
  IsingProblem logical;
  PhysicalProblem phys;
  std::vector<std::array<int, 4>> group_data;  // dense indices into phys.problem
  std::vector<int> group_penalty;              // dense index or -1
};

EncodedChain compile_chain(const EncodingMap& map, std::span<const int> path, double alpha,
                           double gamma);

nlohmann::json map_to_json(const EncodingMap& map);

}  // namespace qac

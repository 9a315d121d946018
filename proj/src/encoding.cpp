#include "qac/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "qac/errors.hpp"

namespace qac {

const char* code_name(CodeKind c) { return c == CodeKind::Square414 ? "square414" : "pudenz313"; }

CodeKind code_from_name(const std::string& name) {
  if (name == "square414") return CodeKind::Square414;
  if (name == "pudenz313") return CodeKind::Pudenz313;
  fail(ErrorKind::Validation, "unknown code '" + name + "' (square414|pudenz313)");
}

std::vector<int> EncodedGraph::functional_vertices() const {
  std::vector<int> out;
  for (int v = 0; v < n; ++v)
    if (functional(v)) out.push_back(v);
  return out;
}

int EncodedGraph::degree(int v) const { return adj_offsets_[v + 1] - adj_offsets_[v]; }

const std::vector<std::pair<int, int>>& EncodingMap::couplers_of_edge(int u, int v) const {
  if (u > v) std::swap(u, v);
  auto it = edge_couplers.find({u, v});
  if (it == edge_couplers.end())
    fail(ErrorKind::Encoding, "no logical edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                  ") in the encoded graph");
  return it->second;
}

namespace {

// Group membership templates. Qubits of cell (r, c): a_i = half 0 index i
// (couples vertically), b_i = half 1 index i (couples horizontally).
//
// Square414 group g of a cell holds data [a_{2g}, b_{2g}, b_{2g+1}, a_{2g+1}]
// (code positions 1..4); the four intra-cell couplers among them form the
// penalty cycle. Pudenz313 group 0 holds data a_0..a_2 with penalty b_3,
// group 1 holds b_0..b_2 with penalty a_3.
struct GroupQubits {
  std::array<int, 4> data{-1, -1, -1, -1};
  int penalty = -1;
};

GroupQubits group_qubits(CodeKind code, const HardwareGraph& g, int cell_row, int cell_col,
                         int grp) {
  GroupQubits q;
  if (code == CodeKind::Square414) {
    q.data = {g.qubit_id(cell_row, cell_col, 0, 2 * grp), g.qubit_id(cell_row, cell_col, 1, 2 * grp),
              g.qubit_id(cell_row, cell_col, 1, 2 * grp + 1),
              g.qubit_id(cell_row, cell_col, 0, 2 * grp + 1)};
  } else {
    int data_half = grp, penalty_half = 1 - grp;
    for (int k = 0; k < 3; ++k) q.data[k] = g.qubit_id(cell_row, cell_col, data_half, k);
    q.penalty = g.qubit_id(cell_row, cell_col, penalty_half, 3);
  }
  return q;
}

std::vector<std::pair<int, int>> group_penalty_couplers(CodeKind code, const GroupQubits& q) {
  if (code == CodeKind::Square414)
    return {{q.data[0], q.data[1]}, {q.data[0], q.data[2]}, {q.data[1], q.data[3]},
            {q.data[2], q.data[3]}};
  return {{q.data[0], q.penalty}, {q.data[1], q.penalty}, {q.data[2], q.penalty}};
}

}  // namespace

std::pair<EncodedGraph, EncodingMap> build_encoded_graph(CodeKind code, const HardwareGraph& g) {
  if (g.cell_size != 4)
    fail(ErrorKind::Unsupported,
         "encoding requires Chimera cells of size 4, got " + std::to_string(g.cell_size));

  EncodedGraph eg;
  EncodingMap map;
  eg.code = map.code = code;
  eg.n = map.n = g.rows * g.cols * 2;
  eg.status.resize(eg.n);
  map.data.resize(eg.n);
  map.penalty.assign(eg.n, -1);
  map.penalty_couplers.resize(eg.n);
  map.functional.assign(eg.n, 0);

  auto vertex_id = [&](int r, int c, int grp) { return (r * g.cols + c) * 2 + grp; };

  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      for (int grp = 0; grp < 2; ++grp) {
        int v = vertex_id(r, c, grp);
        GroupQubits q = group_qubits(code, g, r, c, grp);
        map.data[v] = q.data;
        map.penalty[v] = q.penalty;

        bool data_ok = true;
        for (int k = 0; k < data_count(code); ++k) data_ok &= g.active[q.data[k]];
        bool pen_ok = q.penalty < 0 || g.active[q.penalty];
        if (data_ok && pen_ok) {
          eg.status[v] = VertexStatus::FullyFunctional;
          map.functional[v] = 1;
        } else if (code == CodeKind::Pudenz313 && data_ok) {
          eg.status[v] = VertexStatus::MissingPenalty;
        } else {
          eg.status[v] = VertexStatus::Inactive;
        }
        map.penalty_couplers[v] = group_penalty_couplers(code, q);
      }
    }
  }

  // Logical edges and their physical couplers (only between fully functional
  // vertices; fault-free couplers then exist by construction, asserted here).
  auto add_edge = [&](int u, int v, std::vector<std::pair<int, int>> phys) {
    if (u > v) {
      std::swap(u, v);
    }
    if (!map.functional[u] || !map.functional[v]) return;
    for (auto [a, b] : phys)
      if (!g.has_coupler(a, b))
        fail(ErrorKind::Encoding, "internal: missing physical coupler for logical edge");
    eg.edges.emplace_back(u, v);
    map.edge_couplers[{u, v}] = std::move(phys);
  };

  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      if (code == CodeKind::Square414) {
        for (int grp = 0; grp < 2; ++grp) {
          int v = vertex_id(r, c, grp);
          // vertical neighbor, via the two a-qubits
          if (r + 1 < g.rows)
            add_edge(v, vertex_id(r + 1, c, grp),
                     {{g.qubit_id(r, c, 0, 2 * grp), g.qubit_id(r + 1, c, 0, 2 * grp)},
                      {g.qubit_id(r, c, 0, 2 * grp + 1), g.qubit_id(r + 1, c, 0, 2 * grp + 1)}});
          // horizontal neighbor, via the two b-qubits
          if (c + 1 < g.cols)
            add_edge(v, vertex_id(r, c + 1, grp),
                     {{g.qubit_id(r, c, 1, 2 * grp), g.qubit_id(r, c + 1, 1, 2 * grp)},
                      {g.qubit_id(r, c, 1, 2 * grp + 1), g.qubit_id(r, c + 1, 1, 2 * grp + 1)}});
        }
        // intra-cell edge between the two groups; the couplers land on
        // penalty-cycle-opposite qubits of each group (a-pair of group 0,
        // b-pair of group 1).
        add_edge(vertex_id(r, c, 0), vertex_id(r, c, 1),
                 {{g.qubit_id(r, c, 0, 0), g.qubit_id(r, c, 1, 2)},
                  {g.qubit_id(r, c, 0, 1), g.qubit_id(r, c, 1, 3)}});
      } else {
        // group 0 couples vertically, group 1 horizontally, data index-wise
        if (r + 1 < g.rows)
          add_edge(vertex_id(r, c, 0), vertex_id(r + 1, c, 0),
                   {{g.qubit_id(r, c, 0, 0), g.qubit_id(r + 1, c, 0, 0)},
                    {g.qubit_id(r, c, 0, 1), g.qubit_id(r + 1, c, 0, 1)},
                    {g.qubit_id(r, c, 0, 2), g.qubit_id(r + 1, c, 0, 2)}});
        if (c + 1 < g.cols)
          add_edge(vertex_id(r, c, 1), vertex_id(r, c + 1, 1),
                   {{g.qubit_id(r, c, 1, 0), g.qubit_id(r, c + 1, 1, 0)},
                    {g.qubit_id(r, c, 1, 1), g.qubit_id(r, c + 1, 1, 1)},
                    {g.qubit_id(r, c, 1, 2), g.qubit_id(r, c + 1, 1, 2)}});
        // intra-cell edge between the two groups
        add_edge(vertex_id(r, c, 0), vertex_id(r, c, 1),
                 {{g.qubit_id(r, c, 0, 0), g.qubit_id(r, c, 1, 0)},
                  {g.qubit_id(r, c, 0, 1), g.qubit_id(r, c, 1, 1)},
                  {g.qubit_id(r, c, 0, 2), g.qubit_id(r, c, 1, 2)}});
      }
    }
  }
  std::sort(eg.edges.begin(), eg.edges.end());

  eg.adj_offsets_.assign(eg.n + 1, 0);
  for (auto [u, v] : eg.edges) {
    ++eg.adj_offsets_[u + 1];
    ++eg.adj_offsets_[v + 1];
  }
  for (int v = 0; v < eg.n; ++v) eg.adj_offsets_[v + 1] += eg.adj_offsets_[v];
  eg.adj_.resize(eg.edges.size() * 2);
  std::vector<int> cursor(eg.adj_offsets_.begin(), eg.adj_offsets_.end() - 1);
  for (auto [u, v] : eg.edges) {
    eg.adj_[cursor[u]++] = v;
    eg.adj_[cursor[v]++] = u;
  }
  for (int v = 0; v < eg.n; ++v)
    std::sort(eg.adj_.begin() + eg.adj_offsets_[v], eg.adj_.begin() + eg.adj_offsets_[v + 1]);

  return {std::move(eg), std::move(map)};
}

namespace {

PhysicalProblem compile(const IsingProblem& logical, CodeKind code, const EncodingMap& map,
                        double alpha, double gamma) {
  PhysicalProblem out;
  const auto& ids = logical.ids();
  for (int i = 0; i < logical.size(); ++i) {
    int v = ids[i];
    if (v < 0 || v >= map.n)
      fail(ErrorKind::InvalidInput, "logical vertex " + std::to_string(v) + " out of range");
    if (!map.functional[v])
      fail(ErrorKind::Encoding,
           "logical vertex " + std::to_string(v) + " is not fully functional");
    double hv = logical.fields()[i];
    for (int k = 0; k < data_count(code); ++k)
      out.problem.set_field(map.data[v][k], alpha * hv * data_field_weight(code));
    if (map.penalty[v] >= 0) out.problem.set_field(map.penalty[v], 0.0);
    for (auto [a, b] : map.penalty_couplers[v]) out.problem.add_coupling(a, b, -gamma);
  }
  for (const auto& c : logical.couplings()) {
    for (auto [a, b] : map.couplers_of_edge(ids[c.a], ids[c.b]))
      out.problem.add_coupling(a, b, alpha * c.j);
  }
  out.qubit_ids = out.problem.ids();
  return out;
}

}  // namespace

PhysicalProblem encode_problem(const IsingProblem& logical, CodeKind code, const EncodingMap& map,
                               double alpha, double gamma) {
  if (!(alpha >= 0.0 && alpha <= 1.0) || !(gamma >= 0.0 && gamma <= 1.0))
    fail(ErrorKind::InvalidInput, "alpha and gamma must lie in [0, 1]");
  return compile(logical, code, map, alpha, gamma);
}

PhysicalProblem encode_problem_unchecked(const IsingProblem& logical, CodeKind code,
                                         const EncodingMap& map, double alpha, double gamma) {
  return compile(logical, code, map, alpha, gamma);
}

double faithful_embedding_energy(const IsingProblem& logical, std::span<const int8_t> s,
                                 CodeKind code, double alpha, double gamma) {
  double e_logical = ising_energy(logical, s);
  double n_pen = double(penalty_couplers_per_vertex(code)) * double(logical.size());
  return alpha * (boost_factor(code) * e_logical) - gamma * n_pen;
}

std::vector<int8_t> faithful_embedding(const IsingProblem& logical, std::span<const int8_t> s,
                                       const EncodingMap& map, const std::vector<int>& qubit_ids) {
  if (static_cast<int>(s.size()) != logical.size())
    fail(ErrorKind::InvalidInput, "configuration size mismatch");
  std::vector<int8_t> phys(qubit_ids.size(), 0);
  auto pos_of = [&](int q) {
    auto it = std::lower_bound(qubit_ids.begin(), qubit_ids.end(), q);
    if (it == qubit_ids.end() || *it != q)
      fail(ErrorKind::InvalidInput, "qubit " + std::to_string(q) + " not in configuration");
    return static_cast<int>(it - qubit_ids.begin());
  };
  const auto& ids = logical.ids();
  for (int i = 0; i < logical.size(); ++i) {
    int v = ids[i];
    for (int k = 0; k < data_count(map.code); ++k) phys[pos_of(map.data[v][k])] = s[i];
    if (map.penalty[v] >= 0) phys[pos_of(map.penalty[v])] = s[i];
  }
  for (int8_t sp : phys)
    if (sp == 0) fail(ErrorKind::InvalidInput, "configuration has qubits outside the embedding");
  return phys;
}

EncodedChain compile_chain(const EncodingMap& map, std::span<const int> path, double alpha,
                           double gamma) {
  EncodedChain chain;
  chain.code = map.code;
  chain.alpha = alpha;
  chain.gamma = gamma;
  chain.path.assign(path.begin(), path.end());
  chain.logical = afm_chain_problem(path);
  chain.phys = encode_problem_unchecked(chain.logical, map.code, map, alpha, gamma);
  chain.group_data.resize(path.size());
  chain.group_penalty.assign(path.size(), -1);
  for (size_t i = 0; i < path.size(); ++i) {
    int v = path[i];
    chain.group_data[i] = {-1, -1, -1, -1};
    for (int k = 0; k < data_count(map.code); ++k)
      chain.group_data[i][k] = chain.phys.problem.index_of(map.data[v][k]);
    if (map.penalty[v] >= 0) chain.group_penalty[i] = chain.phys.problem.index_of(map.penalty[v]);
  }
  return chain;
}

nlohmann::json map_to_json(const EncodingMap& map) {
  nlohmann::json j;
  j["code"] = code_name(map.code);
  auto vertices = nlohmann::json::array();
  for (int v = 0; v < map.n; ++v) {
    nlohmann::json jv;
    jv["id"] = v;
    jv["functional"] = bool(map.functional[v]);
    auto data = nlohmann::json::array();
    for (int k = 0; k < data_count(map.code); ++k) data.push_back(map.data[v][k]);
    jv["data"] = data;
    if (map.penalty[v] >= 0) jv["penalty"] = map.penalty[v];
    auto pc = nlohmann::json::array();
    for (auto [a, b] : map.penalty_couplers[v]) pc.push_back({a, b});
    jv["penalty_couplers"] = pc;
    vertices.push_back(jv);
  }
  j["vertices"] = vertices;
  auto edges = nlohmann::json::array();
  for (const auto& [e, couplers] : map.edge_couplers) {
    nlohmann::json je;
    je["u"] = e.first;
    je["v"] = e.second;
    auto c = nlohmann::json::array();
    for (auto [a, b] : couplers) c.push_back({a, b});
    je["couplers"] = c;
    edges.push_back(je);
  }
  j["edges"] = edges;
  return j;
}

}  // namespace qac

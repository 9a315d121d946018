#include "qac/ising.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "qac/errors.hpp"

namespace qac {

void IsingProblem::add_vertex(int id) {
  if (index_.count(id)) return;
  auto pos = std::lower_bound(ids_.begin(), ids_.end(), id) - ids_.begin();
  ids_.insert(ids_.begin() + pos, id);
  h_.insert(h_.begin() + pos, 0.0);
  // reindex everything at or after the insertion point
  for (auto& [vid, idx] : index_)
    if (idx >= pos) ++idx;
  index_[id] = static_cast<int>(pos);
  for (auto& c : couplings_) {
    if (c.a >= pos) ++c.a;
    if (c.b >= pos) ++c.b;
  }
}

void IsingProblem::set_field(int id, double h) {
  if (!std::isfinite(h)) fail(ErrorKind::InvalidInput, "non-finite field value");
  add_vertex(id);
  h_[index_.at(id)] = h;
}

void IsingProblem::add_coupling(int id_a, int id_b, double j) {
  if (!std::isfinite(j)) fail(ErrorKind::InvalidInput, "non-finite coupling value");
  if (id_a == id_b) fail(ErrorKind::InvalidInput, "self-coupling on vertex " + std::to_string(id_a));
  add_vertex(id_a);
  add_vertex(id_b);
  int a = index_.at(id_a), b = index_.at(id_b);
  for (const auto& c : couplings_)
    if ((c.a == a && c.b == b) || (c.a == b && c.b == a))
      fail(ErrorKind::InvalidInput, "duplicate coupling (" + std::to_string(id_a) + ", " +
                                        std::to_string(id_b) + ")");
  couplings_.push_back({a, b, j});
}

int IsingProblem::index_of(int id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

double IsingProblem::field_of(int id) const {
  int i = index_of(id);
  if (i < 0) fail(ErrorKind::InvalidInput, "vertex " + std::to_string(id) + " not in problem");
  return h_[i];
}

int IsingProblem::max_degree() const {
  std::vector<int> deg(ids_.size(), 0);
  for (const auto& c : couplings_) {
    ++deg[c.a];
    ++deg[c.b];
  }
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

double ising_energy(const IsingProblem& p, std::span<const int8_t> spins) {
  if (static_cast<int>(spins.size()) != p.size())
    fail(ErrorKind::InvalidInput, "configuration covers " + std::to_string(spins.size()) +
                                      " vertices, problem has " + std::to_string(p.size()));
  double e = 0.0;
  const auto& h = p.fields();
  for (int i = 0; i < p.size(); ++i) e = std::fma(h[i], double(spins[i]), e);
  for (const auto& c : p.couplings())
    e = std::fma(c.j, double(spins[c.a]) * double(spins[c.b]), e);
  return e;
}

IsingProblem problem_from_json(const nlohmann::json& j) {
  if (!j.is_array()) fail(ErrorKind::Validation, "problem: expected a JSON array of entries");
  IsingProblem p;
  for (size_t k = 0; k < j.size(); ++k) {
    const auto& e = j[k];
    if (!e.is_array() || (e.size() != 2 && e.size() != 3))
      fail(ErrorKind::Validation,
           "problem[" + std::to_string(k) + "]: expected [i, h] or [i, j, J]");
    if (e.size() == 2)
      p.set_field(e[0].get<int>(), e[1].get<double>());
    else
      p.add_coupling(e[0].get<int>(), e[1].get<int>(), e[2].get<double>());
  }
  return p;
}

nlohmann::json problem_to_json(const IsingProblem& p) {
  auto j = nlohmann::json::array();
  const auto& ids = p.ids();
  for (int i = 0; i < p.size(); ++i)
    if (p.fields()[i] != 0.0) j.push_back({ids[i], p.fields()[i]});
  for (const auto& c : p.couplings()) j.push_back({ids[c.a], ids[c.b], c.j});
  return j;
}

IsingProblem afm_chain_problem(std::span<const int> path) {
  if (path.size() < 2) fail(ErrorKind::InvalidInput, "chain needs at least 2 vertices");
  IsingProblem p;
  for (size_t i = 0; i + 1 < path.size(); ++i) p.add_coupling(path[i], path[i + 1], 1.0);
  return p;
}

}  // namespace qac

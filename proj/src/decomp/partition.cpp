#include <algorithm>
#include <string>

#include "arrowsdp/decomp.hpp"

namespace arrowsdp::decomp {

Partition Partition::from_sets(int n, std::vector<IndexSet> sets) {
  if (n < 0) throw DomainError("negative partition dimension");
  std::vector<char> covered(static_cast<std::size_t>(n), 0);
  for (auto& s : sets) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (s.empty()) throw DomainError("partition contains an empty set");
    if (s.front() < 0 || s.back() >= n) {
      throw DomainError("partition index out of range");
    }
    for (int i : s) covered[i] = 1;
  }
  if (std::find(covered.begin(), covered.end(), 0) != covered.end()) {
    throw DomainError("partition sets do not cover [0, n)");
  }
  Partition p;
  p.n = n;
  p.sets = std::move(sets);
  for (int k = 0; k < p.size(); ++k) {
    for (int l = k + 1; l < p.size(); ++l) {
      IndexSet both;
      std::set_intersection(p.sets[k].begin(), p.sets[k].end(),
                            p.sets[l].begin(), p.sets[l].end(),
                            std::back_inserter(both));
      if (!both.empty()) p.pairs.emplace(PairKey{k, l}, std::move(both));
    }
  }
  return p;
}

const IndexSet* Partition::intersection(int k, int l) const {
  if (k > l) std::swap(k, l);
  auto it = pairs.find({k, l});
  return it == pairs.end() ? nullptr : &it->second;
}

int Partition::neighbor_count(int k) const {
  int c = 0;
  for (const auto& [key, set] : pairs) {
    if (key.first == k || key.second == k) ++c;
  }
  return c;
}

std::vector<std::string> Partition::assumption_violations(int max_neighbors) const {
  std::vector<std::string> v;
  for (int k = 0; k < size(); ++k) {
    if (neighbor_count(k) == 0) {
      v.push_back("Assumption 1: set " + std::to_string(k) +
                  " intersects no other set");
    }
  }
  for (int k = 0; k < size(); ++k) {
    for (int l = 0; l < size(); ++l) {
      if (k == l) continue;
      if (std::includes(sets[k].begin(), sets[k].end(), sets[l].begin(),
                        sets[l].end())) {
        v.push_back("Assumption 2: set " + std::to_string(l) +
                    " is contained in set " + std::to_string(k));
      }
    }
  }
  for (int k = 0; k < size(); ++k) {
    if (neighbor_count(k) > max_neighbors) {
      v.push_back("Assumption 3: set " + std::to_string(k) + " meets " +
                  std::to_string(neighbor_count(k)) + " other sets (limit " +
                  std::to_string(max_neighbors) + ")");
    }
  }
  return v;
}

void Partition::require_assumptions(int max_neighbors) const {
  const auto v = assumption_violations(max_neighbors);
  if (v.empty()) return;
  const auto colon = v.front().find(':');
  throw PreconditionError(v.front().substr(0, colon),
                          v.front().substr(colon + 2));
}

SymMat EmbeddedSplit::s_at(int k, int l, int n) const {
  if (k > l) std::swap(k, l);
  auto it = s.find({k, l});
  return it == s.end() ? SymMat(n) : it->second;
}

}  // namespace arrowsdp::decomp

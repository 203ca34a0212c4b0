#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

#include "arrowsdp/sdpmodel.hpp"

namespace arrowsdp::sdp {

CountReport count_report(const SdoProblem& problem) {
  CountReport r;
  r.form = problem.form;
  r.p = problem.p;
  r.n_vars = problem.n_vars();
  for (const char* key : {"x", "gamma", "vector", "matrix", "other"}) r.breakdown[key] = 0;
  for (const auto& v : problem.vars) {
    switch (v.family) {
      case Family::x: ++r.breakdown["x"]; break;
      case Family::gamma:
      case Family::s: ++r.breakdown["gamma"]; break;
      case Family::g:
      case Family::sigma: ++r.breakdown["vector"]; break;
      case Family::S: ++r.breakdown["matrix"]; break;
      case Family::other: ++r.breakdown["other"]; break;
    }
  }
  for (const auto& b : problem.blocks) {
    if (!b.diagonal) r.block_sizes.push_back(b.dim);
  }
  r.n_blocks = static_cast<int>(r.block_sizes.size());
  r.max_block = r.block_sizes.empty()
                    ? 0
                    : *std::max_element(r.block_sizes.begin(), r.block_sizes.end());
  return r;
}

std::string count_csv_header() { return "form,p,n_vars,max_block,n_blocks"; }

std::string count_csv_row(const CountReport& r) {
  std::ostringstream s;
  s << r.form << ',' << r.p << ',' << r.n_vars << ',' << r.max_block << ',' << r.n_blocks;
  return s.str();
}

double sum_identity_defect(const SdoProblem& decomposed, const SdoProblem& original) {
  const auto& z = original.blocks.at(0);
  if (z.diagonal || z.embedding.empty()) {
    throw DomainError("original problem must start with the monolithic block");
  }
  const int n = z.dim;
  std::unordered_map<std::string, int> by_name;
  int gamma = -1;
  for (int j = 0; j < original.n_vars(); ++j) {
    by_name[original.vars[j].name] = j;
    if (original.vars[j].family == Family::gamma) gamma = j;
  }
  auto target_of = [&](int j) -> int {
    const auto& v = decomposed.vars[j];
    if (v.family == Family::x) return by_name.at(v.name);
    if (v.family == Family::gamma || v.family == Family::s) return gamma;
    return -1;
  };

  SymMat constant(n);
  std::map<int, SymMat> sums;
  for (const auto& b : decomposed.blocks) {
    if (b.diagonal) continue;
    if (b.embedding.empty()) throw DomainError("decomposed block without embedding");
    constant = constant + embed(b.constant, b.embedding, n);
    for (const auto& [j, a] : b.terms) {
      auto [it, fresh] = sums.try_emplace(j, SymMat(n));
      it->second = it->second + embed(a, b.embedding, n);
    }
  }
  std::map<int, const SymMat*> original_terms;
  for (const auto& [j, a] : z.terms) original_terms[j] = &a;

  double defect = (constant - z.constant).max_abs();
  std::vector<char> seen(static_cast<std::size_t>(original.n_vars()), 0);
  for (const auto& [j, s] : sums) {
    const int t = target_of(j);
    SymMat expected(n);
    if (t >= 0 && original_terms.count(t)) expected = *original_terms.at(t);
    if (t >= 0 && decomposed.vars[j].family == Family::x) seen[t] = 1;
    defect = std::max(defect, (s - expected).max_abs());
  }
  for (const auto& [j, a] : original_terms) {
    if (original.vars[j].family == Family::x && !seen[j]) {
      defect = std::max(defect, a->max_abs());
    }
  }
  return defect;
}

}  // namespace arrowsdp::sdp

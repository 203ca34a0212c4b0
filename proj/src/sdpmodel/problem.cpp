#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "arrowsdp/sdpmodel.hpp"

namespace arrowsdp::sdp {

std::string to_string(Family f) {
  switch (f) {
    case Family::x: return "x";
    case Family::gamma: return "gamma";
    case Family::s: return "s";
    case Family::g: return "g";
    case Family::sigma: return "sigma";
    case Family::S: return "S";
    case Family::other: return "other";
  }
  return "other";
}

Family parse_family(const std::string& text) {
  for (Family f : {Family::x, Family::gamma, Family::s, Family::g, Family::sigma,
                   Family::S, Family::other}) {
    if (to_string(f) == text) return f;
  }
  throw DomainError("unknown variable family '" + text + "'");
}

int SdoProblem::add_variable(std::string name, Family family, double lower,
                             double upper, double cost) {
  vars.push_back({std::move(name), family, lower, upper});
  objective.push_back(cost);
  return n_vars() - 1;
}

void SdoProblem::validate() const {
  const int nv = n_vars();
  if (static_cast<int>(objective.size()) != nv) {
    throw DomainError("objective length differs from the variable count");
  }
  std::vector<char> used(static_cast<std::size_t>(nv), 0);
  for (const auto& v : vars) {
    if (std::isnan(v.lower) || std::isnan(v.upper)) throw DomainError("NaN bound");
  }
  for (const auto& b : blocks) {
    if (b.dim < 1) throw DomainError("block '" + b.name + "' has no rows");
    if (b.constant.dim() != b.dim) {
      throw DomainError("constant of block '" + b.name + "' has the wrong size");
    }
    if (!b.embedding.empty() && static_cast<int>(b.embedding.size()) != b.dim) {
      throw DomainError("embedding of block '" + b.name + "' has the wrong size");
    }
    int prev = -1;
    for (const auto& [j, a] : b.terms) {
      if (j < 0 || j >= nv) throw DomainError("block term references unknown variable");
      if (j <= prev) throw DomainError("block terms must be sorted and unique");
      prev = j;
      if (a.dim() != b.dim) {
        throw DomainError("coefficient in block '" + b.name + "' has the wrong size");
      }
      if (b.diagonal) {
        for (const auto& e : a.entries()) {
          if (e.row != e.col) throw DomainError("diagonal block with off-diagonal entry");
        }
      }
      if (!a.empty()) used[j] = 1;
    }
  }
  for (const auto& c : linear) {
    for (const auto& [j, v] : c.terms) {
      if (j < 0 || j >= nv) throw DomainError("linear row references unknown variable");
      if (!std::isfinite(v)) throw DomainError("non-finite linear coefficient");
      if (v != 0.0) used[j] = 1;
    }
  }
  for (int j = 0; j < nv; ++j) {
    if (!used[j]) throw DomainError("variable '" + vars[j].name + "' is never used");
  }
}

SymMat SdoProblem::evaluate(int block, std::span<const double> y) const {
  const auto& b = blocks.at(block);
  if (static_cast<int>(y.size()) != n_vars()) throw DomainError("point has wrong length");
  std::vector<Entry> e(b.constant.entries().begin(), b.constant.entries().end());
  for (const auto& [j, a] : b.terms) {
    if (y[j] == 0.0) continue;
    for (const auto& en : a.entries()) e.push_back({en.row, en.col, y[j] * en.value});
  }
  return SymMat::from_entries(b.dim, e);
}

double SdoProblem::objective_value(std::span<const double> y) const {
  if (y.size() != objective.size()) throw DomainError("point has wrong length");
  double v = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) v += objective[j] * y[j];
  return v;
}

namespace {

/// Collects scalar rows r: constant_r + sum_j coef_rj y_j >= 0.
struct DiagBuilder {
  std::vector<Entry> constant;
  std::map<int, std::vector<Entry>> terms;
  int rows = 0;

  void add_row(double c0, const std::vector<std::pair<int, double>>& coefs) {
    if (c0 != 0.0) constant.push_back({rows, rows, c0});
    for (const auto& [j, v] : coefs) {
      if (v != 0.0) terms[j].push_back({rows, rows, v});
    }
    ++rows;
  }

  void emit(SdoProblem& out, const std::string& name) const {
    if (rows == 0) return;
    AffineBlock b;
    b.name = name;
    b.dim = rows;
    b.diagonal = true;
    b.constant = SymMat::from_entries(rows, constant);
    for (const auto& [j, e] : terms) b.terms.emplace_back(j, SymMat::from_entries(rows, e));
    out.blocks.push_back(std::move(b));
  }
};

}  // namespace

SdoProblem to_conic(const SdoProblem& problem) {
  SdoProblem out = problem;
  out.linear.clear();
  DiagBuilder lower, upper, lin;
  for (int j = 0; j < problem.n_vars(); ++j) {
    auto& v = out.vars[j];
    if (std::isfinite(v.lower)) lower.add_row(-v.lower, {{j, 1.0}});
    if (std::isfinite(v.upper)) upper.add_row(v.upper, {{j, -1.0}});
    v.lower = -kInf;
    v.upper = kInf;
  }
  for (const auto& c : problem.linear) {
    auto neg = c.terms;
    for (auto& t : neg) t.second = -t.second;
    if (c.relation != Relation::le) lin.add_row(-c.rhs, c.terms);
    if (c.relation != Relation::ge) lin.add_row(c.rhs, neg);
  }
  lower.emit(out, "lower");
  upper.emit(out, "upper");
  lin.emit(out, "linear");
  return out;
}

}  // namespace arrowsdp::sdp

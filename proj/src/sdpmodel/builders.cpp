#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>

#include "arrowsdp/sdpmodel.hpp"

namespace arrowsdp::sdp {

namespace {

using fem2d::FemModel;
using fem2d::SubdomainPlan;

std::string pair_name(const char* family, int k, int l, int dof) {
  return std::string(family) + "[" + std::to_string(k) + "," + std::to_string(l) +
         "][" + std::to_string(dof) + "]";
}

/// Accumulates entries per variable for one block, then emits sorted terms.
struct BlockBuilder {
  AffineBlock block;
  std::vector<Entry> constant;
  std::map<int, std::vector<Entry>> terms;

  BlockBuilder(std::string name, int dim) {
    block.name = std::move(name);
    block.dim = dim;
  }

  void add(int var, int r, int c, double v) {
    if (r > c) std::swap(r, c);
    terms[var].push_back({r, c, v});
  }

  AffineBlock finish() {
    block.constant = SymMat::from_entries(block.dim, constant);
    for (auto& [j, e] : terms) block.terms.emplace_back(j, SymMat::from_entries(block.dim, e));
    return std::move(block);
  }
};

/// Adds the x variables with their bounds and the volume row.
void add_design_variables(SdoProblem& prob, const FemModel& model) {
  LinearConstraint vol{"volume", {}, Relation::le, model.cfg.volume()};
  for (int i = 0; i < model.m; ++i) {
    const int j = prob.add_variable("x[" + std::to_string(i) + "]", Family::x,
                                    model.cfg.x_lower, model.cfg.x_upper);
    vol.terms.emplace_back(j, 1.0);
  }
  prob.linear.push_back(std::move(vol));
}

/// x_e K_e with local dof positions given by `local` (global free dof -> row).
template <typename Map>
void add_element(BlockBuilder& b, const FemModel& model, int e, const Map& local,
                 int offset) {
  const auto& dofs = model.element_dofs[e];
  for (const auto& en : model.k_elems[e].entries()) {
    const int r = dofs[en.row];
    const int c = dofs[en.col];
    if (r < 0 || c < 0) continue;
    b.add(e, local.at(r) + offset, local.at(c) + offset, en.value);
  }
}

std::unordered_map<int, int> local_index(const decomp::IndexSet& set) {
  std::unordered_map<int, int> loc;
  for (int t = 0; t < static_cast<int>(set.size()); ++t) loc[set[t]] = t;
  return loc;
}

void require_split(const SubdomainPlan& plan) {
  if (plan.size() < 2) throw DomainError("decomposed forms need at least two subdomains");
}

/// Shared skeleton of the chordal and arrow builders: block k is
/// [[K^(k)(x), f^(k)], [f^(k)^T, t_k]] on I_k plus the gamma row.
std::vector<BlockBuilder> subdomain_blocks(SdoProblem& prob, const FemModel& model,
                                           const SubdomainPlan& plan,
                                           Family epigraph, const char* epi_name) {
  const int p = plan.size();
  const auto loads = fem2d::subdomain_loads(model, plan);
  std::vector<BlockBuilder> blocks;
  for (int k = 0; k < p; ++k) {
    const auto& set = plan.partition.sets[k];
    const int d = static_cast<int>(set.size()) + 1;
    BlockBuilder b("Z" + std::to_string(k), d);
    b.block.embedding = set;
    b.block.embedding.push_back(model.n);
    const auto loc = local_index(set);
    for (int e : plan.element_sets[k]) add_element(b, model, e, loc, 0);
    for (int t = 0; t < d - 1; ++t) {
      const double fv = loads[k](set[t]);
      if (fv != 0.0) b.constant.push_back({t, d - 1, fv});
    }
    const int epi = prob.add_variable(std::string(epi_name) + "[" + std::to_string(k) + "]",
                                      epigraph, -kInf, kInf, 1.0);
    b.add(epi, d - 1, d - 1, 1.0);
    blocks.push_back(std::move(b));
  }
  return blocks;
}

}  // namespace

std::vector<decomp::PairKey> active_pairs(const SubdomainPlan& plan, BuildOptions opts) {
  std::vector<decomp::PairKey> out;
  for (const auto& [key, inter] : plan.partition.pairs) {
    const auto& a = plan.grid[key.first];
    const auto& b = plan.grid[key.second];
    const bool diagonal = a[0] != b[0] && a[1] != b[1];
    // Column-major numbering gives a[0] < b[0] on a diagonal; keep the pair
    // whose first member lies above the second.
    if (diagonal && opts.cross_points == CrossPoints::single_diagonal && a[1] < b[1]) {
      continue;
    }
    out.push_back(key);
  }
  return out;
}

SdoProblem build_original(const FemModel& model) {
  SdoProblem prob;
  prob.form = "original";
  prob.p = 1;
  add_design_variables(prob, model);
  const int gamma = prob.add_variable("gamma", Family::gamma, -kInf, kInf, 1.0);
  const int d = model.n + 1;
  BlockBuilder b("Z", d);
  b.block.embedding.resize(d);
  for (int i = 0; i < d; ++i) b.block.embedding[i] = i;
  struct Identity {
    int at(int i) const { return i; }
  };
  for (int e = 0; e < model.m; ++e) add_element(b, model, e, Identity{}, 0);
  for (int i = 0; i < model.n; ++i) {
    if (model.f(i) != 0.0) b.constant.push_back({i, model.n, model.f(i)});
  }
  b.add(gamma, model.n, model.n, 1.0);
  prob.blocks.push_back(b.finish());
  return prob;
}

SdoProblem build_chordal(const FemModel& model, const SubdomainPlan& plan,
                         BuildOptions opts) {
  require_split(plan);
  SdoProblem prob;
  prob.form = "chordal";
  prob.p = plan.size();
  add_design_variables(prob, model);
  auto blocks = subdomain_blocks(prob, model, plan, Family::s, "s");
  std::vector<std::unordered_map<int, int>> loc;
  for (const auto& set : plan.partition.sets) loc.push_back(local_index(set));
  for (const auto& [k, l] : active_pairs(plan, opts)) {
    const auto& inter = plan.partition.pairs.at({k, l});
    const int dk = blocks[k].block.dim - 1;
    const int dl = blocks[l].block.dim - 1;
    for (int dof : inter) {
      const int v = prob.add_variable(pair_name("sigma", k, l, dof), Family::sigma);
      blocks[k].add(v, loc[k].at(dof), dk, 1.0);
      blocks[l].add(v, loc[l].at(dof), dl, -1.0);
    }
    const auto& gk = plan.grid[k];
    const auto& gl = plan.grid[l];
    if (gk[0] != gl[0] && gk[1] != gl[1] && !opts.corner_matrices) continue;
    for (std::size_t a = 0; a < inter.size(); ++a) {
      for (std::size_t c = a; c < inter.size(); ++c) {
        const int v = prob.add_variable(
            "S[" + std::to_string(k) + "," + std::to_string(l) + "][" +
                std::to_string(inter[a]) + "," + std::to_string(inter[c]) + "]",
            Family::S);
        blocks[k].add(v, loc[k].at(inter[a]), loc[k].at(inter[c]), 1.0);
        blocks[l].add(v, loc[l].at(inter[a]), loc[l].at(inter[c]), -1.0);
      }
    }
  }
  for (auto& b : blocks) prob.blocks.push_back(b.finish());
  return prob;
}

SdoProblem build_arrow(const FemModel& model, const SubdomainPlan& plan,
                       BuildOptions opts) {
  require_split(plan);
  SdoProblem prob;
  prob.form = "arrow";
  prob.p = plan.size();
  add_design_variables(prob, model);
  auto blocks = subdomain_blocks(prob, model, plan, Family::gamma, "gamma");
  std::vector<std::unordered_map<int, int>> loc;
  for (const auto& set : plan.partition.sets) loc.push_back(local_index(set));
  for (const auto& [k, l] : active_pairs(plan, opts)) {
    const int dk = blocks[k].block.dim - 1;
    const int dl = blocks[l].block.dim - 1;
    for (int dof : plan.partition.pairs.at({k, l})) {
      const int v = prob.add_variable(pair_name("g", k, l, dof), Family::g);
      blocks[k].add(v, loc[k].at(dof), dk, 1.0);
      blocks[l].add(v, loc[l].at(dof), dl, -1.0);
    }
  }
  for (auto& b : blocks) prob.blocks.push_back(b.finish());
  return prob;
}

SdoProblem build_fictitious(const FemModel& model, const SubdomainPlan& plan) {
  if (plan.size() != 2) throw DomainError("the fictitious-load form needs exactly two subdomains");
  SdoProblem prob;
  prob.form = "fictitious";
  prob.p = 2;
  add_design_variables(prob, model);
  const auto loads = fem2d::subdomain_loads(model, plan);
  std::vector<BlockBuilder> blocks;
  std::vector<std::unordered_map<int, int>> loc;
  for (int k = 0; k < 2; ++k) {
    const auto& set = plan.partition.sets[k];
    BlockBuilder b("F" + std::to_string(k), static_cast<int>(set.size()) + 1);
    b.block.embedding.push_back(model.n);
    b.block.embedding.insert(b.block.embedding.end(), set.begin(), set.end());
    loc.push_back(local_index(set));
    for (int e : plan.element_sets[k]) add_element(b, model, e, loc[k], 1);
    for (int t = 0; t < static_cast<int>(set.size()); ++t) {
      const double fv = loads[k](set[t]);
      if (fv != 0.0) b.constant.push_back({0, t + 1, fv});
    }
    const int gamma = prob.add_variable("gamma[" + std::to_string(k) + "]", Family::gamma,
                                        -kInf, kInf, 1.0);
    b.add(gamma, 0, 0, 1.0);
    blocks.push_back(std::move(b));
  }
  const auto* gamma_set = plan.partition.intersection(0, 1);
  if (gamma_set) {
    for (int dof : *gamma_set) {
      const int v = prob.add_variable(pair_name("g", 0, 1, dof), Family::g);
      blocks[0].add(v, 0, loc[0].at(dof) + 1, 1.0);
      blocks[1].add(v, 0, loc[1].at(dof) + 1, -1.0);
    }
  }
  for (auto& b : blocks) prob.blocks.push_back(b.finish());
  return prob;
}

std::vector<double> arrow_completion(const FemModel& model, const SubdomainPlan& plan,
                                     const SdoProblem& arrow, std::span<const double> x,
                                     const Eigen::VectorXd& u) {
  if (static_cast<int>(x.size()) != model.m || u.size() != model.n) {
    throw DomainError("density or displacement vector has the wrong length");
  }
  std::unordered_map<std::string, int> index;
  for (int j = 0; j < arrow.n_vars(); ++j) index[arrow.vars[j].name] = j;
  std::vector<double> y(static_cast<std::size_t>(arrow.n_vars()), 0.0);
  for (int i = 0; i < model.m; ++i) y[index.at("x[" + std::to_string(i) + "]")] = x[i];

  const int p = plan.size();
  const auto loads = fem2d::subdomain_loads(model, plan);
  std::map<decomp::PairKey, std::map<int, double>> g;
  for (int k = 0; k < p; ++k) {
    const Eigen::VectorXd ku = fem2d::assemble_subset(model, x, plan.element_sets[k])
                                   .to_sparse() * u;
    y[index.at("gamma[" + std::to_string(k) + "]")] = u.dot(ku);
    for (int dof : plan.partition.sets[k]) {
      double r = ku(dof) - loads[k](dof);
      for (int l = 0; l < k; ++l) {
        auto it = g.find({l, k});
        if (it == g.end()) continue;
        auto jt = it->second.find(dof);
        if (jt != it->second.end()) r += jt->second;
      }
      if (r == 0.0) continue;
      for (int l = k + 1; l < p; ++l) {
        const std::string name = pair_name("g", k, l, dof);
        if (index.count(name)) {
          g[{k, l}][dof] = r;
          y[index.at(name)] = r;
          break;
        }
      }
    }
  }
  return y;
}

}  // namespace arrowsdp::sdp

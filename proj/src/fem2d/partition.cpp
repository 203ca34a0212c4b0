#include <algorithm>
#include <set>

#include "arrowsdp/fem2d.hpp"

namespace arrowsdp::fem2d {

SubdomainPlan partition(const FemModel& model, int nx_sub, int ny_sub) {
  const int nx = model.cfg.nx;
  const int ny = model.cfg.ny;
  if (nx_sub < 1 || ny_sub < 1 || nx % nx_sub != 0 || ny % ny_sub != 0) {
    throw DomainError("subdomain grid " + std::to_string(nx_sub) + "x" +
                      std::to_string(ny_sub) + " does not divide the " +
                      std::to_string(nx) + "x" + std::to_string(ny) + " mesh");
  }
  const int wx = nx / nx_sub;
  const int wy = ny / ny_sub;
  SubdomainPlan plan;
  plan.nx_sub = nx_sub;
  plan.ny_sub = ny_sub;
  std::vector<decomp::IndexSet> dof_sets;
  for (int sx = 0; sx < nx_sub; ++sx) {
    for (int sy = 0; sy < ny_sub; ++sy) {
      std::vector<int> elems;
      std::set<int> dofs;
      for (int ex = sx * wx; ex < (sx + 1) * wx; ++ex) {
        for (int ey = sy * wy; ey < (sy + 1) * wy; ++ey) {
          const int e = model.element(ex, ey);
          elems.push_back(e);
          for (int d : model.element_dofs[e]) {
            if (d >= 0) dofs.insert(d);
          }
        }
      }
      plan.element_sets.push_back(std::move(elems));
      plan.grid.push_back({sx, sy});
      dof_sets.emplace_back(dofs.begin(), dofs.end());
    }
  }
  plan.partition = decomp::Partition::from_sets(model.n, std::move(dof_sets));
  const int p = plan.size();
  plan.interior.resize(p);
  plan.interface.resize(p);
  for (int k = 0; k < p; ++k) {
    std::set<int> gamma;
    for (const auto& [key, inter] : plan.partition.pairs) {
      if (key.first == k || key.second == k) gamma.insert(inter.begin(), inter.end());
    }
    plan.interface[k].assign(gamma.begin(), gamma.end());
    for (int i : plan.partition.sets[k]) {
      if (!gamma.count(i)) plan.interior[k].push_back(i);
    }
  }
  return plan;
}

std::vector<Eigen::VectorXd> subdomain_loads(const FemModel& model,
                                             const SubdomainPlan& plan) {
  const int p = plan.size();
  std::vector<Eigen::VectorXd> out(p, Eigen::VectorXd::Zero(model.n));
  for (int i = 0; i < model.n; ++i) {
    if (model.f(i) == 0.0) continue;
    for (int k = 0; k < p; ++k) {
      const auto& s = plan.partition.sets[k];
      if (std::binary_search(s.begin(), s.end(), i)) {
        out[k](i) = model.f(i);
        break;
      }
    }
  }
  return out;
}

}  // namespace arrowsdp::fem2d

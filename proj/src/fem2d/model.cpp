#include <string>

#include "arrowsdp/fem2d.hpp"

namespace arrowsdp::fem2d {

namespace {

bool on_fixed_edge(const FemConfig& cfg, int ix, int iy) {
  switch (cfg.fixed_edge) {
    case FixedEdge::left: return ix == 0;
    case FixedEdge::right: return ix == cfg.nx;
    case FixedEdge::bottom: return iy == 0;
    case FixedEdge::top: return iy == cfg.ny;
  }
  return false;
}

}  // namespace

std::array<int, 4> FemModel::element_nodes(int e) const {
  const int ex = e / cfg.ny;
  const int ey = e % cfg.ny;
  return {cfg.node(ex, ey), cfg.node(ex + 1, ey), cfg.node(ex + 1, ey + 1),
          cfg.node(ex, ey + 1)};
}

FemModel build_model(const FemConfig& cfg) {
  cfg.validate();
  FemModel model;
  model.cfg = cfg;
  model.m = cfg.n_elements();
  model.node_dof.assign(2 * static_cast<std::size_t>(cfg.n_nodes()), -1);
  int next = 0;
  for (int ix = 0; ix <= cfg.nx; ++ix) {
    for (int iy = 0; iy <= cfg.ny; ++iy) {
      if (on_fixed_edge(cfg, ix, iy)) continue;
      const int node = cfg.node(ix, iy);
      model.node_dof[2 * node] = next++;
      model.node_dof[2 * node + 1] = next++;
    }
  }
  model.n = next;

  const SymMat ke = element_stiffness(cfg);
  model.element_dofs.resize(model.m);
  model.k_elems.assign(model.m, ke);
  for (int e = 0; e < model.m; ++e) {
    const auto nodes = model.element_nodes(e);
    for (int a = 0; a < 4; ++a) {
      model.element_dofs[e][2 * a] = model.node_dof[2 * nodes[a]];
      model.element_dofs[e][2 * a + 1] = model.node_dof[2 * nodes[a] + 1];
    }
  }

  model.f = Eigen::VectorXd::Zero(model.n);
  for (const auto& l : cfg.loads) {
    const int dof = model.node_dof[2 * l.node + l.direction];
    if (dof < 0) {
      throw DomainError("load on node " + std::to_string(l.node) +
                        " acts on an eliminated dof");
    }
    model.f(dof) += l.magnitude;
  }
  return model;
}

SymMat scatter_element(const FemModel& model, int e, const SymMat& local) {
  const auto& dofs = model.element_dofs.at(e);
  std::vector<Entry> out;
  out.reserve(local.nnz());
  for (const auto& en : local.entries()) {
    const int r = dofs[en.row];
    const int c = dofs[en.col];
    if (r >= 0 && c >= 0) out.push_back({r, c, en.value});
  }
  return SymMat::from_entries(model.n, out);
}

SymMat assemble_subset(const FemModel& model, std::span<const double> x,
                       std::span<const int> elements) {
  if (static_cast<int>(x.size()) != model.m) {
    throw DomainError("density vector length differs from the element count");
  }
  std::vector<Entry> out;
  for (int e : elements) {
    if (e < 0 || e >= model.m) throw DomainError("element index out of range");
    if (x[e] == 0.0) continue;
    const auto& dofs = model.element_dofs[e];
    for (const auto& en : model.k_elems[e].entries()) {
      const int r = dofs[en.row];
      const int c = dofs[en.col];
      if (r >= 0 && c >= 0) out.push_back({r, c, x[e] * en.value});
    }
  }
  return SymMat::from_entries(model.n, out);
}

SymMat assemble(const FemModel& model, std::span<const double> x) {
  std::vector<int> all(static_cast<std::size_t>(model.m));
  for (int e = 0; e < model.m; ++e) all[e] = e;
  return assemble_subset(model, x, all);
}

}  // namespace arrowsdp::fem2d

#pragma once

// Plane-stress finite-element models on regular rectangular meshes and their
// partition into rectangular subdomains.

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arrowsdp/decomp.hpp"
#include "arrowsdp/matcore.hpp"

namespace arrowsdp::fem2d {

enum class FixedEdge { left, right, bottom, top };

std::string to_string(FixedEdge edge);
FixedEdge parse_fixed_edge(const std::string& text);

struct PointLoad {
  int node = 0;
  int direction = 0;  ///< 0 = x, 1 = y
  double magnitude = 0.0;
};

/// Mesh of nx x ny unit-square elements. Nodes are numbered column-major,
/// node(ix, iy) = ix * (ny + 1) + iy.
struct FemConfig {
  int nx = 40;
  int ny = 20;
  double young_modulus = 1.0;
  double poisson_ratio = 0.3;
  FixedEdge fixed_edge = FixedEdge::left;
  std::vector<PointLoad> loads;
  double x_lower = 1e-6;
  double x_upper = 1.0;
  /// Defaults to 0.4 * nx * ny when unset.
  std::optional<double> volume_bound;

  int n_elements() const { return nx * ny; }
  int n_nodes() const { return (nx + 1) * (ny + 1); }
  int node(int ix, int iy) const { return ix * (ny + 1) + iy; }
  double volume() const;

  /// Throws DomainError on any invalid field.
  void validate() const;

  /// Left edge clamped, unit downward load at the middle of the right edge.
  static FemConfig cantilever(int nx, int ny);
};

/// Flat key=value text. Keys: nx, ny, young_modulus, poisson_ratio,
/// fixed_edge, x_lower, x_upper, volume_bound and repeatable
/// `load = <node> <x|y> <magnitude>`. Missing loads fall back to the
/// cantilever load. Throws IoError on syntax errors.
FemConfig read_config(std::istream& in);
FemConfig read_config_file(const std::string& path);
void write_config(std::ostream& out, const FemConfig& cfg);

/// 8 x 8 bilinear-quad plane-stress stiffness of a unit square, 2 x 2 Gauss
/// rule. Local node order (0,0), (1,0), (1,1), (0,1); dofs (ux, uy) per node.
SymMat element_stiffness(const FemConfig& cfg);

struct FemModel {
  FemConfig cfg;
  int m = 0;  ///< elements
  int n = 0;  ///< free dofs
  /// Free dof of (node, direction) at 2 * node + direction, -1 when fixed.
  std::vector<int> node_dof;
  /// Global free dof of each local dof, -1 when eliminated.
  std::vector<std::array<int, 8>> element_dofs;
  std::vector<SymMat> k_elems;  ///< local 8 x 8 matrices
  Eigen::VectorXd f;

  int element(int ex, int ey) const { return ex * cfg.ny + ey; }
  /// Global node ids in local order.
  std::array<int, 4> element_nodes(int e) const;
};

FemModel build_model(const FemConfig& cfg);

/// K(x) = sum_i x_i K_i on the free dofs.
SymMat assemble(const FemModel& model, std::span<const double> x);
/// sum_{i in elements} x_i K_i.
SymMat assemble_subset(const FemModel& model, std::span<const double> x,
                       std::span<const int> elements);
/// Scatters one local matrix of element e to the free dofs.
SymMat scatter_element(const FemModel& model, int e, const SymMat& local);

/// Nx x Ny grid of rectangular element blocks. Subdomain k = sx * Ny + sy.
struct SubdomainPlan {
  int nx_sub = 1;
  int ny_sub = 1;
  std::vector<std::vector<int>> element_sets;
  std::vector<std::array<int, 2>> grid;  ///< (sx, sy) of each subdomain
  decomp::Partition partition;           ///< free-dof sets I_k and I_{k,l}
  std::vector<decomp::IndexSet> interior;
  std::vector<decomp::IndexSet> interface;

  int size() const { return static_cast<int>(element_sets.size()); }
};

/// Throws DomainError unless Nx | nx and Ny | ny.
SubdomainPlan partition(const FemModel& model, int nx_sub, int ny_sub);

/// f^(k): each point load goes to the lowest-indexed subdomain holding its
/// dof, so the subdomain loads sum to f.
std::vector<Eigen::VectorXd> subdomain_loads(const FemModel& model,
                                             const SubdomainPlan& plan);

/// Writes <dir>/element_stiffness.mtx (the shared local matrix) and
/// <dir>/dofmap.txt (one line per element: id then 8 global dofs, -1 when
/// eliminated).
void write_model(const FemModel& model, const std::string& dir);

}  // namespace arrowsdp::fem2d

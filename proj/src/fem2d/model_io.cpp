#include <filesystem>
#include <fstream>

#include "arrowsdp/fem2d.hpp"

namespace arrowsdp::fem2d {

void write_model(const FemModel& model, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "'");
  write_matrix_market(dir + "/element_stiffness.mtx", model.k_elems.at(0));
  std::ofstream out(dir + "/dofmap.txt");
  if (!out) throw IoError("cannot write '" + dir + "/dofmap.txt'");
  out << "# element dof0 .. dof7 (free dof index, -1 = eliminated)\n";
  out << model.m << ' ' << model.n << '\n';
  for (int e = 0; e < model.m; ++e) {
    out << e;
    for (int d : model.element_dofs[e]) out << ' ' << d;
    out << '\n';
  }
  if (!out) throw IoError("failed writing dof map");
}

}  // namespace arrowsdp::fem2d

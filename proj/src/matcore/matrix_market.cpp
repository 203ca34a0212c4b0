#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "arrowsdp/matcore.hpp"

namespace arrowsdp {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    return true;
  }
  return false;
}

}  // namespace

void write_matrix_market(std::ostream& out, const SymMat& a) {
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << a.dim() << ' ' << a.dim() << ' ' << a.nnz() << '\n';
  // Lower triangle, 1-based.
  for (const auto& e : a.entries()) {
    out << e.col + 1 << ' ' << e.row + 1 << ' ' << format_double(e.value) << '\n';
  }
}

SymMat read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0) {
    throw IoError("missing Matrix Market banner");
  }
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (object != "matrix" || format != "coordinate" ||
      (field != "real" && field != "integer") || symmetry != "symmetric") {
    throw IoError("only 'matrix coordinate real symmetric' is supported");
  }
  if (!next_data_line(in, line)) throw IoError("missing size line");
  std::istringstream size(line);
  long rows = 0, cols = 0, nnz = 0;
  if (!(size >> rows >> cols >> nnz) || rows != cols || rows < 0 || nnz < 0) {
    throw IoError("malformed size line");
  }
  std::vector<Entry> e;
  e.reserve(static_cast<std::size_t>(nnz));
  for (long k = 0; k < nnz; ++k) {
    if (!next_data_line(in, line)) throw IoError("truncated entry list");
    std::istringstream row(line);
    long i = 0, j = 0;
    double v = 0;
    if (!(row >> i >> j >> v)) throw IoError("malformed entry: " + line);
    e.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), v});
  }
  return SymMat::from_entries(static_cast<int>(rows), e);
}

void write_matrix_market(const std::string& path, const SymMat& a) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_matrix_market(out, a);
  if (!out) throw IoError("write failed: " + path);
}

SymMat read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_matrix_market(in);
}

void write_edge_list(std::ostream& out, const SparsityGraph& g) {
  const auto edges = g.edges();
  out << g.n_nodes() << ' ' << edges.size() << '\n';
  for (auto [i, j] : edges) out << i << ' ' << j << '\n';
}

SparsityGraph read_edge_list(std::istream& in) {
  std::string line;
  while (std::getline(in, line) && (line.empty() || line[0] == '#')) {
  }
  std::istringstream header(line);
  long n = 0, m = 0;
  if (!(header >> n >> m) || n < 0 || m < 0) {
    throw IoError("malformed edge list header");
  }
  SparsityGraph g(static_cast<int>(n));
  for (long k = 0; k < m; ++k) {
    long i = 0, j = 0;
    if (!(in >> i >> j)) throw IoError("truncated edge list");
    g.add_edge(static_cast<int>(i), static_cast<int>(j));
  }
  return g;
}

}  // namespace arrowsdp

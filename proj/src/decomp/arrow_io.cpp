#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "arrowsdp/decomp.hpp"

namespace arrowsdp::decomp {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Reads whitespace-separated tokens, skipping '#' comments.
class Tokens {
 public:
  explicit Tokens(std::istream& in) : in_(in) {}

  std::string word() {
    while (true) {
      std::string t;
      if (line_ >> t) {
        if (t.front() == '#') {
          line_.setstate(std::ios::failbit);
          continue;
        }
        return t;
      }
      std::string raw;
      if (!std::getline(in_, raw)) throw IoError("unexpected end of arrow system file");
      line_.clear();
      line_.str(raw);
    }
  }

  void expect(const std::string& keyword) {
    const auto t = word();
    if (t != keyword) throw IoError("expected '" + keyword + "', found '" + t + "'");
  }

  int integer() {
    const auto t = word();
    try {
      std::size_t used = 0;
      const int v = std::stoi(t, &used);
      if (used == t.size()) return v;
    } catch (const std::exception&) {
    }
    throw IoError("expected an integer, found '" + t + "'");
  }

  double real() {
    const auto t = word();
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used == t.size()) return v;
    } catch (const std::exception&) {
    }
    throw IoError("expected a number, found '" + t + "'");
  }

 private:
  std::istream& in_;
  std::istringstream line_;
};

void write_sym(std::ostream& out, const char* tag, const SymMat& a) {
  out << tag << ' ' << a.nnz() << '\n';
  for (const auto& e : a.entries()) {
    out << e.row << ' ' << e.col << ' ' << fmt(e.value) << '\n';
  }
}

SymMat read_sym(Tokens& t, const char* tag, int n) {
  t.expect(tag);
  const int nnz = t.integer();
  if (nnz < 0) throw IoError("negative entry count");
  std::vector<Entry> e;
  e.reserve(nnz);
  for (int i = 0; i < nnz; ++i) {
    const int r = t.integer();
    const int c = t.integer();
    e.push_back({r, c, t.real()});
  }
  try {
    return SymMat::from_entries(n, e);
  } catch (const DomainError& ex) {
    throw IoError(std::string(tag) + " section: " + ex.what());
  }
}

}  // namespace

void write_arrow_system(std::ostream& out, const ArrowSystem& sys) {
  out << "arrow " << sys.n << ' ' << sys.m << ' ' << sys.parts.size() << '\n';
  for (std::size_t k = 0; k < sys.parts.size(); ++k) {
    const auto& set = sys.partition.sets.at(k);
    out << "part " << k << '\n' << "set " << set.size();
    for (int i : set) out << ' ' << i;
    out << '\n';
    write_sym(out, "A", sys.parts[k].a);
    const auto& b = sys.parts[k].b;
    int nnz = 0;
    for (int j = 0; j < b.cols(); ++j) {
      for (int i = 0; i < b.rows(); ++i) nnz += b(i, j) != 0.0;
    }
    out << "B " << nnz << '\n';
    for (int i = 0; i < b.rows(); ++i) {
      for (int j = 0; j < b.cols(); ++j) {
        if (b(i, j) != 0.0) out << i << ' ' << j << ' ' << fmt(b(i, j)) << '\n';
      }
    }
  }
  write_sym(out, "C", sys.c);
  if (!out) throw IoError("failed writing arrow system");
}

ArrowSystem read_arrow_system(std::istream& in) {
  Tokens t(in);
  t.expect("arrow");
  ArrowSystem sys;
  sys.n = t.integer();
  sys.m = t.integer();
  const int p = t.integer();
  if (sys.n < 1 || sys.m < 1 || p < 1) throw IoError("invalid arrow header");
  std::vector<IndexSet> sets;
  for (int k = 0; k < p; ++k) {
    t.expect("part");
    if (t.integer() != k) throw IoError("parts must appear in order");
    t.expect("set");
    const int size = t.integer();
    if (size < 1 || size > sys.n) throw IoError("invalid index set size");
    IndexSet set(size);
    for (auto& i : set) i = t.integer();
    sets.push_back(std::move(set));
    ArrowPart part;
    part.a = read_sym(t, "A", sys.n);
    t.expect("B");
    const int nnz = t.integer();
    if (nnz < 0) throw IoError("negative entry count");
    part.b = Eigen::MatrixXd::Zero(sys.n, sys.m);
    for (int e = 0; e < nnz; ++e) {
      const int i = t.integer();
      const int j = t.integer();
      const double v = t.real();
      if (i < 0 || i >= sys.n || j < 0 || j >= sys.m) {
        throw IoError("B entry out of range");
      }
      part.b(i, j) += v;
    }
    sys.parts.push_back(std::move(part));
  }
  sys.c = read_sym(t, "C", sys.m);
  try {
    sys.partition = Partition::from_sets(sys.n, std::move(sets));
  } catch (const DomainError& ex) {
    throw IoError(std::string("index sets: ") + ex.what());
  }
  return sys;
}

}  // namespace arrowsdp::decomp

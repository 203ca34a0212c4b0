#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "arrowsdp/sdpmodel.hpp"

namespace arrowsdp::sdp {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_entries(std::ostream& out, int matno, int blkno, const SymMat& a,
                   double sign) {
  for (const auto& e : a.entries()) {
    out << matno << ' ' << blkno << ' ' << e.row + 1 << ' ' << e.col + 1 << ' '
        << fmt(sign * e.value) << '\n';
  }
}

std::string strip_punctuation(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')') c = ' ';
  }
  return s;
}

}  // namespace

void export_sdpa(std::ostream& out, const SdoProblem& problem, SdpaOptions opts) {
  const SdoProblem conic = to_conic(problem);
  if (opts.metadata) {
    out << "*% form " << conic.form << ' ' << conic.p << '\n';
    for (int j = 0; j < conic.n_vars(); ++j) {
      out << "*% var " << j + 1 << ' ' << to_string(conic.vars[j].family) << ' '
          << conic.vars[j].name << '\n';
    }
    for (std::size_t b = 0; b < conic.blocks.size(); ++b) {
      const auto& blk = conic.blocks[b];
      out << "*% block " << b + 1 << ' ' << blk.name;
      if (!blk.embedding.empty()) {
        out << " embed";
        for (int i : blk.embedding) out << ' ' << i;
      }
      out << '\n';
    }
  }
  out << conic.n_vars() << '\n' << conic.blocks.size() << '\n';
  for (std::size_t b = 0; b < conic.blocks.size(); ++b) {
    const auto& blk = conic.blocks[b];
    out << (b ? " " : "") << (blk.diagonal ? -blk.dim : blk.dim);
  }
  out << '\n';
  for (int j = 0; j < conic.n_vars(); ++j) out << (j ? " " : "") << fmt(conic.objective[j]);
  out << '\n';
  for (std::size_t b = 0; b < conic.blocks.size(); ++b) {
    write_entries(out, 0, static_cast<int>(b) + 1, conic.blocks[b].constant, -1.0);
  }
  // Entries grouped by matrix number as in SDPA files.
  std::map<int, std::vector<std::pair<int, const SymMat*>>> by_var;
  for (std::size_t b = 0; b < conic.blocks.size(); ++b) {
    for (const auto& [j, a] : conic.blocks[b].terms) {
      by_var[j].emplace_back(static_cast<int>(b) + 1, &a);
    }
  }
  for (const auto& [j, list] : by_var) {
    for (const auto& [b, a] : list) write_entries(out, j + 1, b, *a, 1.0);
  }
  if (!out) throw IoError("failed writing SDPA data");
}

void export_sdpa(const std::string& path, const SdoProblem& problem, SdpaOptions opts) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  export_sdpa(out, problem, opts);
}

SdoProblem import_sdpa(std::istream& in) {
  SdoProblem prob;
  prob.form = "conic";
  std::map<int, std::pair<Family, std::string>> var_meta;
  std::map<int, std::pair<std::string, std::vector<int>>> block_meta;
  std::vector<std::string> data;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("*%", 0) == 0) {
      std::istringstream ls(line.substr(2));
      std::string kind;
      ls >> kind;
      if (kind == "form") {
        ls >> prob.form >> prob.p;
      } else if (kind == "var") {
        int j = 0;
        std::string fam, name;
        if (!(ls >> j >> fam >> name)) throw IoError("bad variable metadata line");
        try {
          var_meta[j] = {parse_family(fam), name};
        } catch (const DomainError& e) {
          throw IoError(e.what());
        }
      } else if (kind == "block") {
        int b = 0;
        std::string name, tag;
        if (!(ls >> b >> name)) throw IoError("bad block metadata line");
        std::vector<int> emb;
        if (ls >> tag && tag == "embed") {
          int i = 0;
          while (ls >> i) emb.push_back(i);
        }
        block_meta[b] = {name, std::move(emb)};
      }
      continue;
    }
    if (line.empty() || line[0] == '*' || line[0] == '"') continue;
    data.push_back(strip_punctuation(line));
  }
  std::istringstream ds;
  std::string joined;
  for (const auto& d : data) joined += d + '\n';
  ds.str(joined);

  int nv = 0;
  int nb = 0;
  if (!(ds >> nv >> nb) || nv < 0 || nb < 1) throw IoError("bad SDPA header");
  std::vector<int> sizes(nb);
  for (auto& s : sizes) {
    if (!(ds >> s) || s == 0) throw IoError("bad SDPA block size line");
  }
  std::vector<double> c(nv);
  for (auto& v : c) {
    if (!(ds >> v)) throw IoError("bad SDPA objective line");
  }
  for (int j = 0; j < nv; ++j) {
    auto it = var_meta.find(j + 1);
    if (it != var_meta.end()) {
      prob.add_variable(it->second.second, it->second.first, -kInf, kInf, c[j]);
    } else {
      prob.add_variable("y[" + std::to_string(j + 1) + "]", Family::other, -kInf, kInf,
                        c[j]);
    }
  }
  std::vector<std::vector<Entry>> constant(nb);
  std::vector<std::map<int, std::vector<Entry>>> terms(nb);
  int matno = 0, blkno = 0, i = 0, j = 0;
  double v = 0.0;
  while (ds >> matno >> blkno >> i >> j >> v) {
    if (matno < 0 || matno > nv || blkno < 1 || blkno > nb) {
      throw IoError("SDPA entry index out of range");
    }
    const int d = std::abs(sizes[blkno - 1]);
    if (i < 1 || j < 1 || i > d || j > d) throw IoError("SDPA entry position out of range");
    if (sizes[blkno - 1] < 0 && i != j) throw IoError("off-diagonal entry in diagonal block");
    if (matno == 0) {
      constant[blkno - 1].push_back({i - 1, j - 1, -v});
    } else {
      terms[blkno - 1][matno - 1].push_back({i - 1, j - 1, v});
    }
  }
  if (!ds.eof()) throw IoError("malformed SDPA entry line");
  for (int b = 0; b < nb; ++b) {
    AffineBlock blk;
    blk.dim = std::abs(sizes[b]);
    blk.diagonal = sizes[b] < 0;
    auto it = block_meta.find(b + 1);
    if (it != block_meta.end()) {
      blk.name = it->second.first;
      blk.embedding = it->second.second;
    } else {
      blk.name = "B" + std::to_string(b + 1);
    }
    try {
      blk.constant = SymMat::from_entries(blk.dim, constant[b]);
      for (const auto& [var, e] : terms[b]) {
        blk.terms.emplace_back(var, SymMat::from_entries(blk.dim, e));
      }
    } catch (const DomainError& e) {
      throw IoError(e.what());
    }
    prob.blocks.push_back(std::move(blk));
  }
  return prob;
}

SdoProblem import_sdpa(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return import_sdpa(in);
}

}  // namespace arrowsdp::sdp

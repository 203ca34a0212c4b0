#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "arrowsdp/cli.hpp"

namespace arrowsdp::cli {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

MatrixXd normal(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> nd;
  MatrixXd g(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) g(i, j) = nd(rng);
  }
  return g;
}

/// Consecutive intervals [start, end) of total length `len`; neighbours
/// overlap by ov[k] and every interval keeps priv[k] private elements.
std::vector<std::pair<int, int>> chain(const std::vector<int>& priv, const std::vector<int>& ov,
                                       int& len) {
  std::vector<std::pair<int, int>> iv;
  int pos = 0;
  for (std::size_t k = 0; k < priv.size(); ++k) {
    const int start = k == 0 ? 0 : pos - ov[k - 1];
    pos += priv[k];
    if (k < ov.size()) pos += ov[k];
    iv.emplace_back(start, pos);
  }
  len = pos;
  return iv;
}

std::vector<std::pair<int, int>> random_chain(std::mt19937_64& rng, int count, int min_ov,
                                              int max_ov, int& len) {
  std::vector<int> priv(count), ov(std::max(0, count - 1));
  for (auto& v : priv) v = uniform(rng, 1, 3);
  for (auto& v : ov) v = uniform(rng, min_ov, max_ov);
  return chain(priv, ov, len);
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

/// Eigenvalues of `a` on the rows it may occupy.
VectorXd eigenvalues_on(const SymMat& a, const std::vector<int>& rows) {
  const MatrixXd d = restrict(a, rows).to_dense();
  if (d.size() == 0) return VectorXd();
  return Eigen::SelfAdjointEigenSolver<MatrixXd>(d, Eigen::EigenvaluesOnly).eigenvalues();
}

using Check = std::function<std::string(std::mt19937_64&)>;

SuiteResult run_suite(const std::string& name, int trials, std::mt19937_64& rng,
                      const Check& check) {
  SuiteResult r;
  r.name = name;
  for (int t = 0; t < trials; ++t) {
    ++r.trials;
    std::string why;
    try {
      why = check(rng);
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    if (!why.empty()) {
      if (r.failures++ == 0) r.first_failure = "trial " + std::to_string(t) + ": " + why;
    }
  }
  return r;
}

std::string check_arrow(std::mt19937_64& rng, const std::string& corrupt) {
  const decomp::ArrowSystem sys = random_arrow_system(rng);
  const decomp::ArrowSplit split = decomp::arrow_decompose(sys);
  const SymMat m = sys.assemble();
  const int p = static_cast<int>(sys.parts.size());
  std::vector<SymMat> blocks = split.blocks;

  if (corrupt == "sum") {
    const double delta = 10.0 * decomp::VerifyTolerances{}.sum * std::max(1.0, m.norm_inf());
    const Entry e = blocks[0].entries()[0];
    const std::vector<Entry> bump{{e.row, e.col, delta}};
    blocks[0] = blocks[0] + SymMat::from_entries(m.dim(), bump);
  } else if (corrupt == "psd") {
    // Moves a multiple of v v^T from block 0 to the last block: the sum is
    // unchanged and block 0 turns indefinite. With one part the sum changes
    // as well.
    std::vector<int> rows = sys.partition.sets[0];
    for (int j = 0; j < sys.m; ++j) rows.push_back(sys.n + j);
    const MatrixXd d = restrict(blocks[0], rows).to_dense();
    const Eigen::SelfAdjointEigenSolver<MatrixXd> es(d);
    const VectorXd v = es.eigenvectors().col(0);
    const double shift = std::max(es.eigenvalues()(0), 0.0) + 1e-4 * m.norm_inf();
    const SymMat vv = embed(SymMat::from_dense(shift * v * v.transpose()), rows, m.dim());
    blocks[0] = blocks[0] - vv;
    if (p > 1) blocks[p - 1] = blocks[p - 1] + vv;
  }

  const decomp::SplitReport rep = decomp::verify_split(m, blocks);
  std::string broken;
  if (!rep.sum_ok) broken = "sum identity: residual " + fmt(rep.max_residual / rep.scale);
  if (!rep.psd_ok) {
    broken += (broken.empty() ? "" : "; ") +
              ("block PSD: min eigenvalue " + fmt(rep.min_eigenvalue / rep.scale));
  }
  if (!broken.empty()) return broken;

  MatrixXd c_sum = MatrixXd::Zero(sys.m, sys.m);
  for (const auto& ck : split.c_parts) c_sum += ck;
  if ((c_sum - sys.c.to_dense()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, m.norm_inf())) {
    return "C shares: sum differs from C";
  }
  for (const auto& [key, dkl] : split.d) {
    const auto* inter = sys.partition.intersection(key.first, key.second);
    for (int i = 0; i < sys.n; ++i) {
      const bool inside = inter && std::binary_search(inter->begin(), inter->end(), i);
      if (!inside && dkl.row(i).cwiseAbs().maxCoeff() != 0.0) return "D support: row outside I_kl";
    }
  }
  for (int k = 0; k + 1 < p; ++k) {
    std::vector<int> rows = sys.partition.sets[k];
    for (int j = 0; j < sys.m; ++j) rows.push_back(sys.n + j);
    const VectorXd ev = eigenvalues_on(split.blocks[k], rows);
    const double tol = 1e-8 * std::max(1e-300, split.blocks[k].norm_inf());
    const int zeros = static_cast<int>((ev.array().abs() <= tol).count());
    if (zeros < sys.m) {
      return "null eigenvalues: block " + std::to_string(k) + " has " + std::to_string(zeros) +
             " < m = " + std::to_string(sys.m);
    }
  }
  SymMat total(m.dim());
  for (const auto& b : split.blocks) total = total + b;
  if (!is_psd(total, 1e-8)) return "assembly: sum of PSD blocks is not PSD";

  if (p >= 2) {
    const auto s = decomp::arrow_to_embedded(sys, split);
    std::vector<SymMat> emb;
    for (int k = 0; k < p; ++k) {
      SymMat q = sys.part_matrix(k);
      if (k == p - 1) {
        std::vector<int> corner;
        for (int j = 0; j < sys.m; ++j) corner.push_back(sys.n + j);
        q = q + embed(sys.c, corner, sys.n + sys.m);
      }
      for (const auto& [key, skl] : s) {
        if (key.first == k) q = q + skl;
        if (key.second == k) q = q - skl;
      }
      emb.push_back(std::move(q));
    }
    const auto er = decomp::verify_split(m, emb);
    if (!er.passed) return "embedded agreement: blocks from D fail verify_split";
  }
  return {};
}

std::string check_chordal(std::mt19937_64& rng) {
  const auto [a, cliques] = random_chordal_instance(rng);
  const decomp::ChordalSplit split = decomp::chordal_decompose(a, cliques);
  if (split.summands.size() != cliques.cliques.size()) {
    return "summand count: " + std::to_string(split.summands.size()) + " summands for " +
           std::to_string(cliques.cliques.size()) + " cliques";
  }
  std::vector<SymMat> blocks;
  for (std::size_t k = 0; k < split.summands.size(); ++k) {
    const auto& [set, y] = split.summands[k];
    if (set != cliques.cliques[k]) return "clique support: summand set differs from clique";
    for (const auto& e : y.entries()) {
      if (!std::binary_search(set.begin(), set.end(), e.row) ||
          !std::binary_search(set.begin(), set.end(), e.col)) {
        return "clique support: entry outside its clique";
      }
    }
    blocks.push_back(y);
  }
  const auto rep = decomp::verify_split(a, blocks);
  std::string broken;
  if (!rep.sum_ok) broken = "sum identity: residual " + fmt(rep.max_residual / rep.scale);
  if (!rep.psd_ok) {
    broken += (broken.empty() ? "" : "; ") +
              ("block PSD: min eigenvalue " + fmt(rep.min_eigenvalue / rep.scale));
  }
  if (!broken.empty()) return broken;
  return {};
}

std::string check_embedded(std::mt19937_64& rng) {
  const auto [q, part] = random_embedded_instance(rng);
  const decomp::EmbeddedSplit split = decomp::embedded_decompose(q, part);
  SymMat total(part.n);
  for (const auto& qk : q) total = total + qk;
  for (const auto& [key, s] : split.s) {
    const auto* inter = part.intersection(key.first, key.second);
    for (const auto& e : s.entries()) {
      if (!inter || !std::binary_search(inter->begin(), inter->end(), e.row) ||
          !std::binary_search(inter->begin(), inter->end(), e.col)) {
        return "intersection support: S entry outside I_kl";
      }
    }
  }
  const auto rep = decomp::verify_split(total, split.blocks);
  std::string broken;
  if (!rep.sum_ok) broken = "sum identity: residual " + fmt(rep.max_residual / rep.scale);
  if (!rep.psd_ok) {
    broken += (broken.empty() ? "" : "; ") +
              ("block PSD: min eigenvalue " + fmt(rep.min_eigenvalue / rep.scale));
  }
  if (!broken.empty()) return broken;
  return {};
}

std::string check_sdpmodel(std::mt19937_64& rng) {
  static const int nxs[] = {2, 4, 6, 8};
  const int nx = nxs[uniform(rng, 0, 3)];
  const int ny = std::max(1, nx / 2 * uniform(rng, 1, 2) / 2);
  std::vector<std::pair<int, int>> plans;
  for (int sx = 1; sx <= nx; ++sx) {
    for (int sy = 1; sy <= ny; ++sy) {
      if (nx % sx == 0 && ny % sy == 0 && sx * sy >= 2) plans.emplace_back(sx, sy);
    }
  }
  const auto [sx, sy] = plans[uniform(rng, 0, static_cast<int>(plans.size()) - 1)];
  const auto model = fem2d::build_model(fem2d::FemConfig::cantilever(nx, ny));
  const auto plan = fem2d::partition(model, sx, sy);
  const auto original = sdp::build_original(model);
  const std::string tag = std::to_string(nx) + "x" + std::to_string(ny) + " plan " +
                          std::to_string(sx) + "x" + std::to_string(sy);

  for (const auto& prob : {sdp::build_arrow(model, plan), sdp::build_chordal(model, plan)}) {
    const double defect = sdp::sum_identity_defect(prob, original);
    if (defect > 1e-12) return "sum identity defect " + fmt(defect) + " (" + prob.form + ", " + tag + ")";
    const auto counts = sdp::count_report(prob);
    int total = 0;
    for (const auto& [name, n] : counts.breakdown) total += n;
    if (total != counts.n_vars) return "count breakdown does not add up (" + prob.form + ", " + tag + ")";
    if (counts.breakdown.at("x") != model.m) return "count breakdown: x count (" + tag + ")";

    std::stringstream sdpa;
    sdp::export_sdpa(sdpa, prob);
    const sdp::SdoProblem back = sdp::import_sdpa(sdpa);
    const sdp::SdoProblem conic = sdp::to_conic(prob);
    if (back.n_vars() != conic.n_vars() || back.blocks.size() != conic.blocks.size()) {
      return "SDPA round trip: shape changed (" + prob.form + ", " + tag + ")";
    }
    std::vector<double> y(conic.n_vars());
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    for (auto& v : y) v = ud(rng);
    for (int b = 0; b < static_cast<int>(conic.blocks.size()); ++b) {
      const SymMat diff = conic.evaluate(b, y) - back.evaluate(b, y);
      if (diff.max_abs() > 1e-12 * (1.0 + conic.evaluate(b, y).max_abs())) {
        return "SDPA round trip: block " + std::to_string(b) + " differs (" + prob.form + ", " + tag + ")";
      }
    }
    if (std::abs(conic.objective_value(y) - back.objective_value(y)) > 1e-12) {
      return "SDPA round trip: objective differs (" + prob.form + ", " + tag + ")";
    }
  }
  return {};
}

}  // namespace

decomp::ArrowSystem random_arrow_system(std::mt19937_64& rng, int max_n, int max_p, int max_m) {
  for (;;) {
    decomp::ArrowSystem sys;
    sys.m = uniform(rng, 1, max_m);
    const int p = uniform(rng, 1, max_p);
    std::vector<decomp::IndexSet> sets;
    if (p == 4 && uniform(rng, 0, 1) == 1) {
      // 2 x 2 grid of overlapping rectangles; corner pairs meet in a small block.
      sys.m = 1;
      int rows = 0, cols = 0;
      const auto ri = chain({uniform(rng, 1, 2), uniform(rng, 1, 2)}, {2}, rows);
      const auto ci = chain({uniform(rng, 1, 2), uniform(rng, 1, 2)}, {uniform(rng, 1, 2)}, cols);
      sys.n = rows * cols;
      for (const auto& [c0, c1] : ci) {
        for (const auto& [r0, r1] : ri) {
          decomp::IndexSet s;
          for (int c = c0; c < c1; ++c) {
            for (int r = r0; r < r1; ++r) s.push_back(c * rows + r);
          }
          sets.push_back(std::move(s));
        }
      }
    } else {
      const auto iv = random_chain(rng, p, sys.m + 1, sys.m + 3, sys.n);
      for (const auto& [a, b] : iv) {
        decomp::IndexSet s;
        for (int i = a; i < b; ++i) s.push_back(i);
        sets.push_back(std::move(s));
      }
    }
    if (sys.n > max_n) continue;
    sys.partition = decomp::Partition::from_sets(sys.n, std::move(sets));

    MatrixXd a_total = MatrixXd::Zero(sys.n, sys.n);
    MatrixXd b_total = MatrixXd::Zero(sys.n, sys.m);
    for (const auto& set : sys.partition.sets) {
      const int s = static_cast<int>(set.size());
      const MatrixXd g = normal(rng, uniform(rng, 1, s), s);
      const MatrixXd local = g.transpose() * g + 0.1 * MatrixXd::Identity(s, s);
      decomp::ArrowPart part;
      part.a = embed(SymMat::from_dense(local), set, sys.n);
      part.b = MatrixXd::Zero(sys.n, sys.m);
      const MatrixXd bl = normal(rng, s, sys.m);
      for (int i = 0; i < s; ++i) part.b.row(set[i]) = bl.row(i);
      a_total += part.a.to_dense();
      b_total += part.b;
      sys.parts.push_back(std::move(part));
    }
    const MatrixXd c = b_total.transpose() * a_total.llt().solve(b_total) +
                       MatrixXd::Identity(sys.m, sys.m);
    sys.c = SymMat::from_dense(0.5 * (c + c.transpose()));
    sys.validate();
    return sys;
  }
}

std::pair<SymMat, CliqueSet> random_chordal_instance(std::mt19937_64& rng, int max_n) {
  const int n = uniform(rng, 1, max_n);
  const double density = std::uniform_real_distribution<double>(0.05, 0.5)(rng);
  std::bernoulli_distribution edge(density);
  SparsityGraph g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (edge(rng)) g.add_edge(i, j);
    }
  }
  const SparsityGraph h = chordal_extension(g);
  const ChordalityResult ch = is_chordal(h);
  CliqueSet cliques = maximal_cliques(h, ch.elimination_order);
  const bool deficient = uniform(rng, 0, 2) == 0;
  MatrixXd a = MatrixXd::Zero(n, n);
  for (const auto& c : cliques.cliques) {
    const int s = static_cast<int>(c.size());
    const MatrixXd gc = normal(rng, deficient ? uniform(rng, 1, s) : s, s);
    const MatrixXd local = gc.transpose() * gc;
    for (int p = 0; p < s; ++p) {
      for (int q = 0; q < s; ++q) a(c[p], c[q]) += local(p, q);
    }
  }
  return {SymMat::from_dense(a), std::move(cliques)};
}

std::pair<std::vector<SymMat>, decomp::Partition> random_embedded_instance(std::mt19937_64& rng,
                                                                           int max_n, int max_p) {
  for (;;) {
    const int p = uniform(rng, 2, max_p);
    int n = 0;
    const auto iv = random_chain(rng, p, 1, 3, n);
    if (n > max_n) continue;
    std::vector<decomp::IndexSet> sets;
    for (const auto& [a, b] : iv) {
      decomp::IndexSet s;
      for (int i = a; i < b; ++i) s.push_back(i);
      sets.push_back(std::move(s));
    }
    decomp::Partition part = decomp::Partition::from_sets(n, sets);
    std::vector<SymMat> q;
    for (const auto& set : part.sets) {
      const int s = static_cast<int>(set.size());
      const MatrixXd g = normal(rng, uniform(rng, 1, s), s);
      q.push_back(embed(SymMat::from_dense(g.transpose() * g), set, n));
    }
    // Shift indefinite pieces between neighbours without changing the sum.
    for (const auto& [key, inter] : part.pairs) {
      const int s = static_cast<int>(inter.size());
      const MatrixXd r = normal(rng, s, s);
      const SymMat shift = embed(SymMat::from_dense(r + r.transpose()), inter, n);
      q[key.first] = q[key.first] + shift;
      q[key.second] = q[key.second] - shift;
    }
    return {std::move(q), std::move(part)};
  }
}

std::vector<SuiteResult> cmd_verify(const VerifyOptions& opts, std::ostream& out) {
  if (opts.trials < 1) throw UsageError("--trials must be at least 1");
  if (!opts.corrupt.empty() && opts.corrupt != "sum" && opts.corrupt != "psd") {
    throw UsageError("--corrupt must be 'sum' or 'psd'");
  }
  std::vector<SuiteResult> results;
  std::mt19937_64 rng(opts.seed);
  results.push_back(run_suite("arrow", opts.trials, rng, [&](std::mt19937_64& r) {
    return check_arrow(r, opts.corrupt);
  }));
  results.push_back(run_suite("chordal", opts.trials, rng, check_chordal));
  results.push_back(run_suite("embedded", opts.trials, rng, check_embedded));
  results.push_back(run_suite("sdpmodel", opts.trials, rng, check_sdpmodel));
  for (const auto& r : results) {
    out << (r.passed() ? "PASS " : "FAIL ") << r.name << "  " << r.trials - r.failures << "/"
        << r.trials;
    if (!r.passed()) out << "  " << r.first_failure;
    out << '\n';
  }
  return results;
}

}  // namespace arrowsdp::cli

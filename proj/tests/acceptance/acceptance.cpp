// Acceptance suite: one PASS/FAIL line per criterion, exit code 1 when any
// criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "arrowsdp/cli.hpp"

using namespace arrowsdp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fem2d::FemModel cantilever(int nx, int ny) {
  return fem2d::build_model(fem2d::FemConfig::cantilever(nx, ny));
}

Outcome exact_counts() {
  Outcome o;
  struct Row {
    int nx, ny, sx, sy, vars, block;
  };
  const std::vector<Row> original{{40, 20, 0, 0, 801, 1681}, {80, 40, 0, 0, 3201, 6561}};
  const std::vector<Row> arrow{{40, 20, 4, 2, 1032, 243},   {40, 20, 8, 4, 1492, 73},
                               {40, 20, 10, 5, 1764, 51},   {40, 20, 20, 10, 3544, 19},
                               {40, 20, 40, 20, 9204, 9}};
  int checked = 0;
  for (const auto& r : original) {
    const auto c = sdp::count_report(sdp::build_original(cantilever(r.nx, r.ny)));
    ++checked;
    if (c.n_vars != r.vars || c.max_block != r.block) {
      o.fail("original " + std::to_string(r.nx) + "x" + std::to_string(r.ny) + ": " +
             std::to_string(c.n_vars) + " vars, block " + std::to_string(c.max_block));
    }
  }
  const fem2d::FemModel model = cantilever(40, 20);
  for (const auto& r : arrow) {
    const auto c = sdp::count_report(sdp::build_arrow(model, fem2d::partition(model, r.sx, r.sy)));
    ++checked;
    if (c.n_vars != r.vars || c.max_block != r.block) {
      o.fail("arrow p=" + std::to_string(r.sx * r.sy) + ": " + std::to_string(c.n_vars) +
             " vars, block " + std::to_string(c.max_block));
    }
  }
  if (o.pass) o.detail = std::to_string(checked) + " count rows match exactly";
  return o;
}

Outcome chordal_counts() {
  Outcome o;
  const int grids[5][2] = {{4, 2}, {8, 4}, {10, 5}, {20, 10}, {40, 20}};
  const int published[5] = {3523, 5489, 6376, 11243, 24529};
  const fem2d::FemModel model = cantilever(40, 20);
  double worst = 0.0;
  std::string list;
  for (int i = 0; i < 5; ++i) {
    const auto plan = fem2d::partition(model, grids[i][0], grids[i][1]);
    const int n = sdp::count_report(sdp::build_chordal(model, plan)).n_vars;
    const double rel = std::abs(n - published[i]) / static_cast<double>(published[i]);
    worst = std::max(worst, rel);
    list += (i ? " " : "") + std::to_string(n);
    if (rel > 0.02) o.fail("p=" + std::to_string(plan.size()) + ": " + std::to_string(n));
  }
  if (o.pass) o.detail = "vars " + list + ", worst deviation " + fmt("%.3f%%", 100 * worst);
  return o;
}

Outcome arrow_suite(int trials) {
  Outcome o;
  std::mt19937_64 rng(20240601);
  for (int t = 0; t < trials && o.pass; ++t) {
    const decomp::ArrowSystem sys = cli::random_arrow_system(rng, 30, 4, 2);
    const decomp::ArrowSplit split = decomp::arrow_decompose(sys);
    const SymMat m = sys.assemble();
    const decomp::SplitReport rep = decomp::verify_split(m, split.blocks);
    if (!rep.passed) {
      o.fail("trial " + std::to_string(t) + ": sum " + fmt("%.2e", rep.max_residual / rep.scale) +
             ", min eigenvalue " + fmt("%.2e", rep.min_eigenvalue / rep.scale));
      break;
    }
    const int p = static_cast<int>(sys.parts.size());
    for (int k = 0; k + 1 < p; ++k) {
      std::vector<int> rows = sys.partition.sets[k];
      for (int j = 0; j < sys.m; ++j) rows.push_back(sys.n + j);
      const Eigen::MatrixXd d = restrict(split.blocks[k], rows).to_dense();
      const Eigen::VectorXd ev =
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(d, Eigen::EigenvaluesOnly).eigenvalues();
      const double tol = 1e-8 * split.blocks[k].norm_inf();
      const int zeros = static_cast<int>((ev.array().abs() <= tol).count());
      if (zeros < sys.m) {
        o.fail("trial " + std::to_string(t) + ": block " + std::to_string(k) + " has " +
               std::to_string(zeros) + " null eigenvalues, m = " + std::to_string(sys.m));
        break;
      }
    }
  }
  if (o.pass) o.detail = std::to_string(trials) + " random arrow systems";
  return o;
}

Outcome chordal_suite(int trials) {
  Outcome o;
  std::mt19937_64 rng(7);
  for (int t = 0; t < trials && o.pass; ++t) {
    const auto [a, cliques] = cli::random_chordal_instance(rng, 20);
    const decomp::ChordalSplit split = decomp::chordal_decompose(a, cliques);
    std::vector<SymMat> blocks;
    for (const auto& [set, s] : split.summands) {
      for (int i : s.support()) {
        if (!std::binary_search(set.begin(), set.end(), i)) {
          o.fail("chordal trial " + std::to_string(t) + ": summand leaves its clique");
        }
      }
      blocks.push_back(s);
    }
    const decomp::SplitReport rep = decomp::verify_split(a, blocks);
    if (!rep.passed) o.fail("chordal trial " + std::to_string(t));
  }
  for (int t = 0; t < trials && o.pass; ++t) {
    const auto [q, part] = cli::random_embedded_instance(rng, 20, 4);
    SymMat total(part.n);
    for (const auto& qk : q) total = total + qk;
    const decomp::EmbeddedSplit split = decomp::embedded_decompose(q, part);
    SymMat back(part.n);
    for (const auto& b : split.blocks) back = back + b;
    const double defect = (back - total).max_abs();
    const decomp::SplitReport rep = decomp::verify_split(total, split.blocks);
    if (!rep.passed || defect > 1e-12 * std::max(1.0, total.max_abs())) {
      o.fail("embedded trial " + std::to_string(t) + ": reassembly defect " + fmt("%.2e", defect));
    }
  }
  if (o.pass) {
    o.detail = std::to_string(trials) + " chordal and " + std::to_string(trials) +
               " embedded instances";
  }
  return o;
}

struct Solved {
  std::string label;
  sdp::SdoProblem problem;
  ipm::SolveReport report;
};

Outcome equivalence(std::vector<Solved>& solved) {
  Outcome o;
  struct Mesh {
    int nx, ny;
    std::vector<std::pair<int, int>> plans;
  };
  const std::vector<Mesh> meshes{{4, 2, {{2, 1}, {2, 2}}},
                                 {8, 4, {{2, 1}, {4, 2}}},
                                 {16, 8, {{2, 1}, {4, 2}}}};
  std::ostringstream summary;
  for (const auto& mesh : meshes) {
    const fem2d::FemModel model = cantilever(mesh.nx, mesh.ny);
    const std::string tag = std::to_string(mesh.nx) + "x" + std::to_string(mesh.ny);
    const std::size_t first = solved.size();
    auto run = [&](const std::string& label, sdp::SdoProblem p) {
      ipm::SolveReport r = ipm::solve(p);
      std::cout << "  " << tag << " " << label << ": " << ipm::to_string(r.status) << " "
                << fmt("%.10f", r.objective) << " (" << r.iterations << " iterations)\n";
      solved.push_back({tag + " " + label, std::move(p), std::move(r)});
    };
    run("original", sdp::build_original(model));
    for (const auto& [sx, sy] : mesh.plans) {
      const auto plan = fem2d::partition(model, sx, sy);
      const std::string pl = std::to_string(sx) + "x" + std::to_string(sy);
      run("chordal " + pl, sdp::build_chordal(model, plan));
      run("arrow " + pl, sdp::build_arrow(model, plan));
      if (plan.size() == 2) run("fictitious " + pl, sdp::build_fictitious(model, plan));
    }
    double lo = solved[first].report.objective, hi = lo;
    for (std::size_t i = first; i < solved.size(); ++i) {
      const auto& r = solved[i].report;
      if (r.status != ipm::Status::optimal && r.status != ipm::Status::near_optimal) {
        o.fail(solved[i].label + " ended with status " + ipm::to_string(r.status));
      }
      lo = std::min(lo, r.objective);
      hi = std::max(hi, r.objective);
    }
    const double spread = (hi - lo) / std::abs(lo);
    summary << (first ? ", " : "") << tag << " spread " << fmt("%.1e", spread);
    if (spread > 1e-5) o.fail(tag + ": objectives differ by " + fmt("%.2e", spread) + " relative");
  }
  if (o.pass) o.detail = summary.str();
  return o;
}

Outcome complexity() {
  Outcome o;
  cli::BenchOptions opts;
  opts.meshes = {{8, 4}, {12, 6}, {16, 8}, {20, 10}, {24, 12}};
  opts.forms = {"original", "arrow"};
  opts.sub_elems = 2;
  std::ostringstream log;
  const cli::BenchResult res = cli::cmd_bench(opts, log);
  std::istringstream lines(log.str());
  for (std::string line; std::getline(lines, line);) std::cout << "  " << line << '\n';
  if (!res.fits.count("original") || !res.fits.count("arrow")) {
    o.fail("too few completed rows for a fit");
    return o;
  }
  const double qo = res.fits.at("original").q, qa = res.fits.at("arrow").q;
  const cli::BenchRow* ro = nullptr;
  const cli::BenchRow* ra = nullptr;
  for (const auto& r : res.rows) {
    if (r.nx == 24 && r.ny == 12 && r.form == "original") ro = &r;
    if (r.nx == 24 && r.ny == 12 && r.form == "arrow") ra = &r;
  }
  if (!ro || !ra || ro->skipped || ra->skipped) {
    o.fail("largest mesh not solved in both forms");
    return o;
  }
  const double ratio = ra->per_iter_time / ro->per_iter_time;
  const std::string d = "q(original) " + fmt("%.3f", qo) + ", q(arrow) " + fmt("%.3f", qa) +
                        ", per-iteration ratio at 24x12 " + fmt("%.4f", ratio);
  if (qo - qa < 0.5) o.fail("exponent gap below 0.5: " + d);
  if (!(ratio < 1.0)) o.fail("per-iteration ratio not below 1: " + d);
  if (o.pass) o.detail = d;
  return o;
}

Outcome fictitious_oracle() {
  Outcome o;
  const fem2d::FemModel model = cantilever(4, 4);
  const fem2d::SubdomainPlan plan = fem2d::partition(model, 2, 1);
  const auto loads = fem2d::subdomain_loads(model, plan);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x(model.m);
    for (auto& xi : x) xi = u(rng);
    const Eigen::MatrixXd k = fem2d::assemble(model, x).to_dense();
    const Eigen::VectorXd us = k.ldlt().solve(model.f);
    const Eigen::MatrixXd k1 = fem2d::assemble_subset(model, x, plan.element_sets[0]).to_dense();
    const Eigen::MatrixXd k2 = fem2d::assemble_subset(model, x, plan.element_sets[1]).to_dense();
    const Eigen::VectorXd g = k1 * us - loads[0];
    const double scale = std::max(1.0, model.f.norm());
    // g lives on the interface; both subdomain equilibria hold with +/- g.
    const auto& gamma = plan.partition.pairs.at({0, 1});
    double off = 0.0;
    for (int i = 0; i < model.n; ++i) {
      if (!std::binary_search(gamma.begin(), gamma.end(), i)) off = std::max(off, std::abs(g(i)));
    }
    const double r1 = (k1 * us - (loads[0] + g)).norm() / scale;
    const double r2 = (k2 * us - (loads[1] - g)).norm() / scale;
    worst = std::max({worst, off / scale, r1, r2});
  }
  if (worst > 1e-10) o.fail("largest residual " + fmt("%.2e", worst));
  if (o.pass) o.detail = "20 random designs on 4x4, largest residual " + fmt("%.1e", worst);
  return o;
}

Outcome solver_sanity(const std::vector<Solved>& solved) {
  Outcome o;
  sdp::SdoProblem toy;
  toy.form = "toy";
  const int g = toy.add_variable("gamma", sdp::Family::gamma, -sdp::kInf, sdp::kInf, 1.0);
  sdp::AffineBlock b;
  b.name = "T";
  b.dim = 2;
  const std::vector<Entry> c{{0, 0, 1.0}, {0, 1, 1.0}};
  const std::vector<Entry> a{{1, 1, 1.0}};
  b.constant = SymMat::from_entries(2, c);
  b.terms.emplace_back(g, SymMat::from_entries(2, a));
  toy.blocks.push_back(b);
  const ipm::SolveOptions opts;
  const ipm::SolveReport r = ipm::solve(toy, opts);
  if (std::abs(r.objective - 1.0) > 1e-8) o.fail("toy gamma " + fmt("%.12f", r.objective));

  int audited = 0;
  double worst = 0.0;
  auto audit = [&](const std::string& label, const sdp::SdoProblem& p, const ipm::SolveReport& rep) {
    if (rep.status != ipm::Status::optimal) return;
    const ipm::KktResiduals k = ipm::kkt_residuals(p, rep);
    const double m = std::max({k.primal, k.dual, k.complementarity});
    worst = std::max(worst, m);
    ++audited;
    if (m > 10 * opts.feas_tol) o.fail(label + ": KKT residual " + fmt("%.2e", m));
  };
  audit("toy", toy, r);
  for (const auto& s : solved) audit(s.label, s.problem, s.report);
  if (o.pass) {
    o.detail = "toy gamma " + fmt("%.10f", r.objective) + ", " + std::to_string(audited) +
               " optimal solves audited, largest KKT residual " + fmt("%.1e", worst);
  }
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int n, const char* name, const Outcome& o) {
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << name << ": "
              << o.detail << std::endl;
    failed += o.pass ? 0 : 1;
  };
  auto guarded = [&](int n, const char* name, auto&& fn) {
    try {
      report(n, name, fn());
    } catch (const std::exception& e) {
      Outcome o;
      o.fail(std::string("exception: ") + e.what());
      report(n, name, o);
    }
  };
  std::vector<Solved> solved;
  guarded(1, "structure counts", exact_counts);
  guarded(2, "chordal counts", chordal_counts);
  guarded(3, "arrow decomposition", [] { return arrow_suite(200); });
  guarded(4, "chordal and embedded decomposition", [] { return chordal_suite(100); });
  guarded(5, "optimization equivalence", [&] { return equivalence(solved); });
  guarded(6, "complexity trend", complexity);
  guarded(7, "fictitious load", fictitious_oracle);
  guarded(8, "solver sanity", [&] { return solver_sanity(solved); });
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed")
            << std::endl;
  return failed ? 1 : 0;
}

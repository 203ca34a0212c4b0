#include <doctest.h>

#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "arrowsdp/sdpmodel.hpp"
#include "oracles.hpp"

using namespace arrowsdp;
using namespace arrowsdp::sdp;

namespace {

fem2d::FemModel cantilever(int nx, int ny) {
  return fem2d::build_model(fem2d::FemConfig::cantilever(nx, ny));
}

std::vector<double> random_point(const SdoProblem& prob, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::normal_distribution<double> z;
  std::vector<double> y(prob.n_vars());
  for (int j = 0; j < prob.n_vars(); ++j) y[j] = prob.vars[j].family == Family::x ? u(rng) : z(rng);
  return y;
}

/// Sum of the blocks of `prob` at y, scattered through their embeddings into
/// an (n+1) x (n+1) matrix.
Eigen::MatrixXd embedded_sum(const SdoProblem& prob, const std::vector<double>& y, int dim) {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(dim, dim);
  for (int b = 0; b < static_cast<int>(prob.blocks.size()); ++b) {
    const auto& emb = prob.blocks[b].embedding;
    const Eigen::MatrixXd local = prob.evaluate(b, y).to_dense();
    for (std::size_t r = 0; r < emb.size(); ++r) {
      for (std::size_t c = 0; c < emb.size(); ++c) z(emb[r], emb[c]) += local(r, c);
    }
  }
  return z;
}

int count_prefix(const SdoProblem& prob, const std::string& prefix) {
  int n = 0;
  for (const auto& v : prob.vars) n += v.name.rfind(prefix, 0) == 0 ? 1 : 0;
  return n;
}

void check_same_conic(const SdoProblem& a, const SdoProblem& b) {
  REQUIRE(a.n_vars() == b.n_vars());
  for (int j = 0; j < a.n_vars(); ++j) {
    CHECK(a.vars[j].name == b.vars[j].name);
    CHECK(a.vars[j].family == b.vars[j].family);
    CHECK(a.objective[j] == b.objective[j]);
  }
  REQUIRE(a.blocks.size() == b.blocks.size());
  for (std::size_t k = 0; k < a.blocks.size(); ++k) {
    CHECK(a.blocks[k].name == b.blocks[k].name);
    CHECK(a.blocks[k].dim == b.blocks[k].dim);
    CHECK(a.blocks[k].diagonal == b.blocks[k].diagonal);
    CHECK(a.blocks[k].embedding == b.blocks[k].embedding);
    CHECK(a.blocks[k].constant == b.blocks[k].constant);
    REQUIRE(a.blocks[k].terms.size() == b.blocks[k].terms.size());
    for (std::size_t t = 0; t < a.blocks[k].terms.size(); ++t) {
      CHECK(a.blocks[k].terms[t].first == b.blocks[k].terms[t].first);
      CHECK(a.blocks[k].terms[t].second == b.blocks[k].terms[t].second);
    }
  }
}

}  // namespace

TEST_SUITE("problem") {
  TEST_CASE("validate catches unused variables and bad coefficients") {
    SdoProblem p;
    const int x = p.add_variable("x", Family::other, -kInf, kInf, 1.0);
    p.add_variable("unused", Family::other);
    AffineBlock b;
    b.dim = 1;
    b.constant = SymMat(1);
    const std::vector<Entry> one{{0, 0, 1.0}};
    b.terms.emplace_back(x, SymMat::from_entries(1, one));
    p.blocks.push_back(b);
    CHECK_THROWS_AS(p.validate(), DomainError);
    p.vars.pop_back();
    p.objective.pop_back();
    CHECK_NOTHROW(p.validate());
    p.blocks[0].terms[0].second = SymMat::identity(2);
    CHECK_THROWS_AS(p.validate(), DomainError);
  }

  TEST_CASE("to_conic turns bounds and rows into diagonal blocks") {
    const SdoProblem orig = build_original(cantilever(2, 1));
    const SdoProblem conic = to_conic(orig);
    CHECK(conic.linear.empty());
    std::map<std::string, int> dims;
    for (const auto& b : conic.blocks) {
      if (b.diagonal) dims[b.name] = b.dim;
    }
    CHECK(dims.at("lower") == 2);
    CHECK(dims.at("upper") == 2);
    CHECK(dims.at("linear") == 1);
    for (const auto& v : conic.vars) {
      CHECK(v.lower == -kInf);
      CHECK(v.upper == kInf);
    }
    std::mt19937_64 rng(1);
    const auto y = random_point(orig, rng);
    CHECK(conic.objective_value(y) == orig.objective_value(y));
  }
}

TEST_SUITE("builders") {
  TEST_CASE("original form sizes") {
    const CountReport big = count_report(build_original(cantilever(40, 20)));
    CHECK(big.n_vars == 801);
    CHECK(big.max_block == 1681);
    const CountReport ex = count_report(build_original(cantilever(4, 4)));
    CHECK(ex.n_vars == 17);
    CHECK(ex.max_block == 41);
    CHECK(ex.n_blocks == 1);
  }

  TEST_CASE("original form at 80 x 40") {
    const CountReport r = count_report(build_original(cantilever(80, 40)));
    CHECK(r.n_vars == 3201);
    CHECK(r.max_block == 6561);
  }

  TEST_CASE("arrow form counts of the 40 x 20 example") {
    const auto model = cantilever(40, 20);
    const std::vector<std::tuple<int, int, int, int>> rows{
        {4, 2, 1032, 243}, {8, 4, 1492, 73}, {10, 5, 1764, 51}, {20, 10, 3544, 19}, {40, 20, 9204, 9}};
    for (const auto& [sx, sy, vars, block] : rows) {
      const auto plan = fem2d::partition(model, sx, sy);
      const SdoProblem prob = build_arrow(model, plan);
      const CountReport r = count_report(prob);
      CHECK(r.n_vars == vars);
      CHECK(r.max_block == block);
      CHECK(r.breakdown.at("matrix") == 0);
      int interface = 0;
      for (const auto& key : active_pairs(plan)) interface += static_cast<int>(plan.partition.pairs.at(key).size());
      CHECK(r.n_vars == model.m + plan.size() + interface);
      int sum = 0;
      for (const auto& [name, n] : r.breakdown) sum += n;
      CHECK(sum == r.n_vars);
    }
  }

  TEST_CASE("chordal form at 4 x 2 subdomains") {
    const auto model = cantilever(40, 20);
    const auto plan = fem2d::partition(model, 4, 2);
    const SdoProblem chordal = build_chordal(model, plan);
    const SdoProblem arrow = build_arrow(model, plan);
    const CountReport r = count_report(chordal);
    CHECK(r.max_block == 243);
    CHECK(r.breakdown.at("gamma") == 8);
    CHECK(count_report(arrow).block_sizes == r.block_sizes);
  }

  TEST_CASE("the 4 x 4 example with variables on both diagonals") {
    const auto model = cantilever(4, 4);
    const auto plan = fem2d::partition(model, 2, 2);
    BuildOptions opts;
    opts.cross_points = CrossPoints::both_diagonals;
    opts.corner_matrices = true;
    const SdoProblem chordal = build_chordal(model, plan, opts);
    const SdoProblem arrow = build_arrow(model, plan, opts);
    const std::map<std::string, int> dims{{"[0,1]", 4}, {"[0,2]", 6}, {"[0,3]", 2},
                                          {"[1,2]", 2}, {"[1,3]", 6}, {"[2,3]", 6}};
    for (const auto& [pair, d] : dims) {
      CHECK(count_prefix(chordal, "S" + pair) == d * (d + 1) / 2);
      CHECK(count_prefix(chordal, "sigma" + pair) == d);
      CHECK(count_prefix(arrow, "g" + pair) == d);
    }
    std::vector<int> sizes = count_report(chordal).block_sizes;
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<int>{13, 13, 19, 19});
    CHECK(count_report(arrow).block_sizes == count_report(chordal).block_sizes);
    // default convention drops the (bottom-left, top-right) diagonal
    const SdoProblem single = build_arrow(model, plan);
    CHECK(count_prefix(single, "g[0,3]") == 0);
    CHECK(count_prefix(single, "g[1,2]") == 2);
  }

  TEST_CASE("one subdomain is rejected") {
    const auto model = cantilever(4, 2);
    const auto plan = fem2d::partition(model, 1, 1);
    CHECK_THROWS_AS(build_arrow(model, plan), DomainError);
    CHECK_THROWS_AS(build_chordal(model, plan), DomainError);
    CHECK_THROWS_AS(build_fictitious(model, fem2d::partition(model, 2, 2)), DomainError);
  }

  TEST_CASE("blocks of decomposed forms sum to Z(x)") {
    std::mt19937_64 rng(19);
    for (auto [nx, ny, sx, sy] : {std::tuple{4, 2, 2, 1}, {4, 4, 2, 2}, {6, 4, 3, 2}, {4, 4, 4, 4}}) {
      const auto model = cantilever(nx, ny);
      const auto plan = fem2d::partition(model, sx, sy);
      const SdoProblem orig = build_original(model);
      for (const SdoProblem& dec : {build_arrow(model, plan), build_chordal(model, plan)}) {
        CHECK(sum_identity_defect(dec, orig) <= 1e-12);
        const auto y = random_point(dec, rng);
        std::vector<double> yo(orig.n_vars(), 0.0);
        for (int j = 0; j < dec.n_vars(); ++j) {
          const Family f = dec.vars[j].family;
          if (f == Family::x) yo[j] = y[j];
          if (f == Family::gamma || f == Family::s) yo[model.m] += y[j];
        }
        const Eigen::MatrixXd z = orig.evaluate(0, yo).to_dense();
        CHECK((embedded_sum(dec, y, model.n + 1) - z).cwiseAbs().maxCoeff() <= 1e-12 * z.cwiseAbs().maxCoeff());
      }
    }
  }

  TEST_CASE("fictitious form equals the arrow form for two subdomains") {
    const auto model = cantilever(4, 4);
    const auto plan = fem2d::partition(model, 2, 1);
    const SdoProblem fict = build_fictitious(model, plan);
    const SdoProblem arrow = build_arrow(model, plan);
    CHECK(count_prefix(fict, "g[") == 10);
    REQUIRE(fict.n_vars() == arrow.n_vars());
    for (int j = 0; j < fict.n_vars(); ++j) CHECK(fict.vars[j].name == arrow.vars[j].name);
    std::mt19937_64 rng(3);
    const auto y = random_point(arrow, rng);
    for (int k = 0; k < 2; ++k) {
      const Eigen::MatrixXd a = embedded_sum(SdoProblem{"", 1, arrow.vars, arrow.objective, {arrow.blocks[k]}, {}}, y, model.n + 1);
      const Eigen::MatrixXd f = embedded_sum(SdoProblem{"", 1, fict.vars, fict.objective, {fict.blocks[k]}, {}}, y, model.n + 1);
      CHECK((a - f).cwiseAbs().maxCoeff() <= 1e-15);
    }
  }

  TEST_CASE("fictitious load from the monolithic solution balances both parts") {
    const auto model = cantilever(4, 4);
    const auto plan = fem2d::partition(model, 2, 1);
    const SdoProblem fict = build_fictitious(model, plan);
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> x(model.m);
      for (auto& v : x) v = u(rng);
      const Eigen::MatrixXd k = oracle::dense_stiffness(4, 4, x);
      const Eigen::VectorXd ustar = k.llt().solve(model.f);
      const auto loads = fem2d::subdomain_loads(model, plan);
      const Eigen::MatrixXd k1 = fem2d::assemble_subset(model, x, plan.element_sets[0]).to_dense();
      const Eigen::VectorXd g = k1 * ustar - loads[0];
      std::vector<double> y(fict.n_vars(), 0.0);
      for (int j = 0; j < fict.n_vars(); ++j) {
        const auto& v = fict.vars[j];
        if (v.family == Family::x) y[j] = x[j];
        if (v.family == Family::g) {
          const int dof = std::stoi(v.name.substr(v.name.rfind('[') + 1));
          y[j] = g(dof);
        }
      }
      for (int b = 0; b < 2; ++b) {
        const Eigen::MatrixXd blk = fict.evaluate(b, y).to_dense();
        const auto& emb = fict.blocks[b].embedding;
        const int d = static_cast<int>(emb.size());
        Eigen::VectorXd uloc(d - 1);
        for (int t = 1; t < d; ++t) uloc(t - 1) = ustar(emb[t]);
        const Eigen::VectorXd res = blk.bottomRightCorner(d - 1, d - 1) * uloc - blk.col(0).tail(d - 1);
        CHECK(res.cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, ustar.cwiseAbs().maxCoeff()));
      }
    }
  }

  TEST_CASE("feasible completion of the arrow form") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (auto [nx, ny, sx, sy] : {std::tuple{4, 2, 2, 1}, {4, 4, 2, 2}, {8, 4, 4, 2}}) {
      const auto model = cantilever(nx, ny);
      const auto plan = fem2d::partition(model, sx, sy);
      const SdoProblem arrow = build_arrow(model, plan);
      std::vector<double> x(model.m);
      for (auto& v : x) v = u(rng);
      const Eigen::VectorXd sol = oracle::dense_stiffness(nx, ny, x).llt().solve(model.f);
      const auto y = arrow_completion(model, plan, arrow, x, sol);
      for (int b = 0; b < static_cast<int>(arrow.blocks.size()); ++b) {
        CHECK(is_psd(arrow.evaluate(b, y), 1e-9));
      }
      CHECK(arrow.objective_value(y) == doctest::Approx(model.f.dot(sol)).epsilon(1e-10));
    }
  }
}

TEST_SUITE("counts") {
  TEST_CASE("CSV row") {
    const CountReport r = count_report(build_original(cantilever(4, 4)));
    CHECK(count_csv_header() == "form,p,n_vars,max_block,n_blocks");
    CHECK(count_csv_row(r) == "original,1,17,41,1");
  }
}

TEST_SUITE("sdpa") {
  TEST_CASE("one-variable fixture") {
    SdoProblem p;
    p.form = "conic";
    const int x = p.add_variable("x", Family::other, -kInf, kInf, 1.0);
    AffineBlock b;
    b.dim = 1;
    const std::vector<Entry> minus_one{{0, 0, -1.0}}, one{{0, 0, 1.0}};
    b.constant = SymMat::from_entries(1, minus_one);
    b.terms.emplace_back(x, SymMat::from_entries(1, one));
    p.blocks.push_back(b);
    std::ostringstream out;
    export_sdpa(out, p, SdpaOptions{false});
    std::ifstream in(ARROWSDP_TEST_DATA "/min_x.dat-s");
    REQUIRE(in);
    std::stringstream expected;
    expected << in.rdbuf();
    CHECK(out.str() == expected.str());
    std::istringstream back(out.str());
    const SdoProblem q = import_sdpa(back);
    CHECK(q.blocks[0].constant == b.constant);
    CHECK(q.objective == std::vector<double>{1.0});
  }

  TEST_CASE("export and import round trip") {
    const SdoProblem orig = build_original(cantilever(4, 4));
    std::stringstream s;
    export_sdpa(s, orig);
    check_same_conic(import_sdpa(s), to_conic(orig));
  }

  TEST_CASE("round trip of a decomposed form with awkward values") {
    const auto model = cantilever(4, 4);
    fem2d::FemConfig cfg = model.cfg;
    cfg.poisson_ratio = 1.0 / 3.0;
    cfg.young_modulus = 3.14159;
    const auto m2 = fem2d::build_model(cfg);
    const SdoProblem arrow = build_arrow(m2, fem2d::partition(m2, 2, 2));
    std::stringstream s;
    export_sdpa(s, arrow);
    check_same_conic(import_sdpa(s), to_conic(arrow));
  }

  TEST_CASE("block-size line of the 20 x 10 arrow form") {
    const auto model = cantilever(40, 20);
    const SdoProblem arrow = build_arrow(model, fem2d::partition(model, 20, 10));
    std::stringstream s;
    export_sdpa(s, arrow, SdpaOptions{false});
    std::string line;
    for (int i = 0; i < 3; ++i) std::getline(s, line);
    std::istringstream sizes(line);
    // Subdomains at the clamped edge lose one node column.
    int n19 = 0, n13 = 0, negative = 0, other = 0;
    for (int v; sizes >> v;) {
      if (v == 19) ++n19;
      else if (v == 13) ++n13;
      else if (v < 0) ++negative;
      else ++other;
    }
    CHECK(n19 == 190);
    CHECK(n13 == 10);
    CHECK(negative == 3);
    CHECK(other == 0);
  }

  TEST_CASE("malformed input") {
    std::istringstream s("1\n1\n1\n1\n0 2 1 1 1\n");
    CHECK_THROWS_AS(import_sdpa(s), IoError);
    CHECK_THROWS_AS(import_sdpa(std::string("/nonexistent/file.dat-s")), IoError);
    CHECK_THROWS_AS(export_sdpa(std::string("/nonexistent/dir/out.dat-s"), build_original(cantilever(1, 1))),
                    IoError);
  }
}

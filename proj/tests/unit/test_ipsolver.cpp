#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "arrowsdp/ipsolver.hpp"
#include "oracles.hpp"

using namespace arrowsdp;
using namespace arrowsdp::ipm;

namespace {

/// min gamma s.t. [[1, 1], [1, gamma]] >= 0.
sdp::SdoProblem toy() {
  sdp::SdoProblem p;
  p.form = "toy";
  const int g = p.add_variable("gamma", sdp::Family::gamma, -sdp::kInf, sdp::kInf, 1.0);
  sdp::AffineBlock b;
  b.name = "T";
  b.dim = 2;
  const std::vector<Entry> c{{0, 0, 1.0}, {0, 1, 1.0}};
  const std::vector<Entry> a{{1, 1, 1.0}};
  b.constant = SymMat::from_entries(2, c);
  b.terms.emplace_back(g, SymMat::from_entries(2, a));
  p.blocks.push_back(b);
  return p;
}

fem2d::FemModel cantilever(int nx, int ny) {
  return fem2d::build_model(fem2d::FemConfig::cantilever(nx, ny));
}

std::vector<double> design(const sdp::SdoProblem& p, const SolveReport& r) {
  std::vector<double> x;
  for (int j = 0; j < p.n_vars(); ++j) {
    if (p.vars[j].family == sdp::Family::x) x.push_back(r.x[j]);
  }
  return x;
}

void check_optimal_report(const sdp::SdoProblem& p, const SolveReport& r, const SolveOptions& o) {
  REQUIRE(r.status == Status::optimal);
  CHECK(r.final_gap <= o.rel_gap_tol);
  CHECK(r.opt_status_metric >= 0.999);
  CHECK(r.opt_status_metric <= 1.0009);
  const KktResiduals k = kkt_residuals(p, r);
  CHECK(k.primal <= 10 * o.feas_tol);
  CHECK(k.dual <= 10 * o.feas_tol);
  CHECK(k.complementarity <= 10 * o.feas_tol);
}

}  // namespace

TEST_CASE("toy problem has gamma = 1") {
  const sdp::SdoProblem p = toy();
  const SolveOptions o;
  const SolveReport r = solve(p, o);
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(r.x[0] - 1.0) <= 1e-8);
  check_optimal_report(p, r, o);
  CHECK(r.iterations > 0);
  CHECK(r.history.size() == static_cast<std::size_t>(r.iterations) + 1);
}

TEST_CASE("kkt residuals of the analytic toy solution vanish") {
  const sdp::SdoProblem p = toy();
  const std::vector<double> y{1.0};
  Eigen::MatrixXd x(2, 2);
  x << 1, -1, -1, 1;
  const std::vector<Eigen::MatrixXd> dual{x};
  const KktResiduals k = kkt_residuals(p, y, dual);
  CHECK(k.primal <= 1e-12);
  CHECK(k.dual <= 1e-12);
  CHECK(k.complementarity <= 1e-12);

  SUBCASE("infeasible gamma") {
    const std::vector<double> y2{0.9};
    CHECK(kkt_residuals(p, y2, dual).primal > 1e-3);
  }
  SUBCASE("dual with the wrong trace") {
    const std::vector<Eigen::MatrixXd> d2{2.0 * x};
    CHECK(kkt_residuals(p, y, d2).dual > 1e-3);
  }
  SUBCASE("shape mismatch") {
    const std::vector<double> y3{1.0, 2.0};
    CHECK_THROWS_AS(kkt_residuals(p, y3, dual), DomainError);
    const std::vector<Eigen::MatrixXd> d3{Eigen::MatrixXd::Identity(3, 3)};
    CHECK_THROWS_AS(kkt_residuals(p, y, d3), DomainError);
    CHECK_THROWS_AS(kkt_residuals(p, y, std::vector<Eigen::MatrixXd>{}), DomainError);
  }
}

TEST_CASE("single element compliance") {
  const fem2d::FemModel model = cantilever(1, 1);
  const sdp::SdoProblem p = sdp::build_original(model);
  const SolveOptions o;
  const SolveReport r = solve(p, o);
  check_optimal_report(p, r, o);

  // All volume goes to the one element: x = V = 0.4.
  const std::vector<double> x{0.4};
  const Eigen::MatrixXd k = oracle::dense_stiffness(1, 1, x);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(k.rows());
  f(oracle::clamped_left_dof(1, 1, 0, 1)) = -1.0;
  const double compliance = f.dot(k.ldlt().solve(f));
  CHECK(r.objective == doctest::Approx(compliance).epsilon(1e-7));
  CHECK(design(p, r)[0] == doctest::Approx(0.4).epsilon(1e-7));

  SUBCASE("perturbed design violates the volume bound") {
    std::vector<double> y = r.x;
    for (int j = 0; j < p.n_vars(); ++j) {
      if (p.vars[j].family == sdp::Family::x) y[j] += 0.1;
    }
    CHECK(kkt_residuals(p, y, r.dual, r.face).primal > o.feas_tol);
  }
}

TEST_CASE("original and arrow forms agree on 4x2") {
  const fem2d::FemModel model = cantilever(4, 2);
  const fem2d::SubdomainPlan plan = fem2d::partition(model, 2, 1);
  const SolveOptions o;
  const sdp::SdoProblem orig = sdp::build_original(model);
  const sdp::SdoProblem arrow = sdp::build_arrow(model, plan);
  const SolveReport ro = solve(orig, o);
  const SolveReport ra = solve(arrow, o);
  check_optimal_report(orig, ro, o);
  check_optimal_report(arrow, ra, o);
  CHECK(std::abs(ro.objective - ra.objective) <= 1e-5 * std::abs(ro.objective));

  // The optimal design is a feasible design for the monolithic problem and
  // its compliance reproduces the objective.
  const std::vector<double> x = design(arrow, ra);
  const Eigen::MatrixXd k = oracle::dense_stiffness(4, 2, x);
  const double c = model.f.dot(k.ldlt().solve(model.f));
  CHECK(c == doctest::Approx(ra.objective).epsilon(1e-5));
}

TEST_CASE("complementarity gap does not grow over 5-iteration windows") {
  for (const auto& [nx, ny] : {std::pair{2, 2}, std::pair{4, 2}, std::pair{4, 4}}) {
    const fem2d::FemModel model = cantilever(nx, ny);
    for (const sdp::SdoProblem& p :
         {sdp::build_original(model), sdp::build_arrow(model, fem2d::partition(model, 2, 1))}) {
      const SolveReport r = solve(p);
      CAPTURE(p.form);
      for (std::size_t i = 0; i + 5 < r.history.size(); ++i) {
        CHECK(r.history[i + 5].mu <= r.history[i].mu);
      }
    }
  }
}

TEST_CASE("scaling the load scales the compliance quadratically") {
  fem2d::FemConfig cfg = fem2d::FemConfig::cantilever(4, 2);
  const double c = 3.0;
  const SolveReport r1 = solve(sdp::build_original(fem2d::build_model(cfg)));
  for (auto& load : cfg.loads) load.magnitude *= c;
  const sdp::SdoProblem scaled = sdp::build_original(fem2d::build_model(cfg));
  const SolveReport r2 = solve(scaled);
  REQUIRE(r1.status == Status::optimal);
  REQUIRE(r2.status == Status::optimal);
  CHECK(r2.objective == doctest::Approx(c * c * r1.objective).epsilon(1e-7));
  const std::vector<double> x1 = design(scaled, r1), x2 = design(scaled, r2);
  for (std::size_t i = 0; i < x1.size(); ++i) CHECK(std::abs(x1[i] - x2[i]) <= 1e-4);
}

TEST_CASE("options validation") {
  const sdp::SdoProblem p = toy();
  SolveOptions o;
  o.rel_gap_tol = 0.0;
  CHECK_THROWS_AS(solve(p, o), DomainError);
  o = {};
  o.feas_tol = -1.0;
  CHECK_THROWS_AS(o.validate(), DomainError);
  o = {};
  o.step_fraction = 1.0;
  CHECK_THROWS_AS(o.validate(), DomainError);
  o.step_fraction = 0.0;
  CHECK_THROWS_AS(o.validate(), DomainError);
  o = {};
  o.max_iters = 0;
  CHECK_THROWS_AS(o.validate(), DomainError);
  o = {};
  o.time_limit = -1.0;
  CHECK_THROWS_AS(o.validate(), DomainError);
  CHECK_NOTHROW(SolveOptions{}.validate());
  CHECK_THROWS_AS(solve(sdp::SdoProblem{}), DomainError);
}

TEST_CASE("structurally infeasible problems") {
  const fem2d::FemModel model = cantilever(2, 1);
  SUBCASE("empty bounds") {
    sdp::SdoProblem p = sdp::build_original(model);
    p.vars[0].lower = 2.0;
    p.vars[0].upper = 1.0;
    const SolveReport r = solve(p);
    CHECK(r.status == Status::infeasible);
    CHECK_FALSE(r.message.empty());
  }
  SUBCASE("volume below the lower bounds") {
    sdp::SdoProblem p = sdp::build_original(model);
    REQUIRE_FALSE(p.linear.empty());
    p.linear[0].rhs = -1.0;
    CHECK(solve(p).status == Status::infeasible);
  }
}

TEST_CASE("time limit stops the solve") {
  SolveOptions o;
  o.time_limit = 1e-9;
  const SolveReport r = solve(sdp::build_original(cantilever(4, 2)), o);
  CHECK(r.status == Status::max_iters);
  CHECK(r.message == "time limit reached");
}

TEST_CASE("iteration limit") {
  SolveOptions o;
  o.max_iters = 2;
  const SolveReport r = solve(sdp::build_original(cantilever(4, 2)), o);
  CHECK(r.status == Status::max_iters);
  CHECK(r.iterations == 2);
}

TEST_CASE("iteration log") {
  std::ostringstream log;
  SolveOptions o;
  o.log = &log;
  const SolveReport r = solve(toy(), o);
  int lines = 0;
  for (char ch : log.str()) lines += ch == '\n' ? 1 : 0;
  CHECK(lines == r.iterations);
}

TEST_CASE("report csv and log") {
  const SolveReport r = solve(toy());
  const std::string header = report_csv_header();
  const std::string row = report_csv_row(r);
  const auto commas = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  CHECK(header.rfind("status,objective,", 0) == 0);
  CHECK(commas(header) == commas(row));
  CHECK(row.rfind("optimal,", 0) == 0);

  std::ostringstream out;
  write_log(out, r);
  CHECK(out.str().find("status optimal") != std::string::npos);
}

TEST_CASE("dual layout follows the conic blocks") {
  const fem2d::FemModel model = cantilever(2, 2);
  const sdp::SdoProblem p = sdp::build_original(model);
  const sdp::SdoProblem conic = sdp::to_conic(p);
  const SolveReport r = solve(p);
  REQUIRE(r.dual.size() == conic.blocks.size());
  REQUIRE(r.face.size() == conic.blocks.size());
  for (std::size_t b = 0; b < conic.blocks.size(); ++b) {
    CHECK(r.dual[b].rows() == conic.blocks[b].dim);
    CHECK(r.dual[b].cols() == (conic.blocks[b].diagonal ? 1 : conic.blocks[b].dim));
  }
}

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arrowsdp/cli.hpp"

namespace {

using namespace arrowsdp;

std::pair<int, int> parse_pair(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    const int a = std::stoi(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    const std::string rest = text.substr(x + 1);
    const int b = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
    return {a, b};
  } catch (const std::exception&) {
    throw cli::UsageError("expected AxB, got '" + text + "'");
  }
}

struct ModelFlags {
  std::string config;
  int nx = 40, ny = 20;
  std::string form = "original";
  int subx = 1, suby = 1;
  bool both_diagonals = false;
  bool corner_matrices = false;

  void add(CLI::App* app) {
    app->add_option("--config", config, "key=value model file (overrides the default mesh)");
    app->add_option("--nx", nx, "elements in x")->capture_default_str();
    app->add_option("--ny", ny, "elements in y")->capture_default_str();
    app->add_option("--form", form, "original, chordal, arrow or fictitious")->capture_default_str();
    app->add_option("--subx", subx, "subdomains in x")->capture_default_str();
    app->add_option("--suby", suby, "subdomains in y")->capture_default_str();
    app->add_flag("--both-diagonals", both_diagonals,
                  "interface variables on both diagonal pairs of a cross point");
    app->add_flag("--corner-matrices", corner_matrices,
                  "chordal form: matrix variables also on corner-sharing pairs");
  }

  cli::GenOptions gen() const {
    cli::GenOptions g;
    if (!config.empty()) {
      g.config = fem2d::read_config_file(config);
    } else {
      g.config = fem2d::FemConfig::cantilever(nx, ny);
    }
    g.form = form;
    g.nx_sub = subx;
    g.ny_sub = suby;
    g.build.cross_points = both_diagonals ? sdp::CrossPoints::both_diagonals
                                          : sdp::CrossPoints::single_diagonal;
    g.build.corner_matrices = corner_matrices;
    return g;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chordal and arrow decompositions of minimum-compliance SDPs"};
  app.require_subcommand(1);

  ModelFlags gen_flags;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "generate a problem, write SDPA and counts");
  gen_flags.add(gen);
  gen->add_option("--out", gen_out, "output prefix for <out>.dat-s and <out>.counts.csv");

  std::string dec_in, dec_out;
  auto* dec = app.add_subcommand("decompose", "arrow-decompose a serialized arrow system");
  dec->add_option("--input", dec_in, "arrow system file")->required();
  dec->add_option("--out-dir", dec_out, "directory for the block matrices");

  ModelFlags solve_flags;
  cli::SolveCommand solve_cmd;
  auto* solve = app.add_subcommand("solve", "solve a generated problem or an SDPA file");
  solve_flags.add(solve);
  solve->add_option("--sdpa", solve_cmd.sdpa, "SDPA sparse input instead of a generated problem");
  solve->add_option("--rel-gap-tol", solve_cmd.solve.rel_gap_tol)->capture_default_str();
  solve->add_option("--feas-tol", solve_cmd.solve.feas_tol)->capture_default_str();
  solve->add_option("--max-iters", solve_cmd.solve.max_iters)->capture_default_str();
  solve->add_option("--step-fraction", solve_cmd.solve.step_fraction)->capture_default_str();
  solve->add_option("--time-limit", solve_cmd.solve.time_limit, "seconds, 0 = none");
  solve->add_option("--csv", solve_cmd.csv, "write the report as CSV");
  solve->add_flag("--verbose", solve_cmd.verbose, "print one line per iteration");

  cli::VerifyOptions verify_opts;
  auto* verify = app.add_subcommand("verify", "randomized decomposition and model checks");
  verify->add_option("--seed", verify_opts.seed)->capture_default_str();
  verify->add_option("--trials", verify_opts.trials)->capture_default_str();
  verify->add_option("--corrupt", verify_opts.corrupt, "inject a broken split: sum or psd");

  cli::BenchOptions bench_opts;
  std::vector<std::string> meshes, plans;
  auto* bench = app.add_subcommand("bench", "solve a sweep of meshes and fit t = c * size^q");
  bench->add_option("--meshes", meshes, "comma separated, e.g. 8x4,16x8")->delimiter(',');
  bench->add_option("--forms", bench_opts.forms, "comma separated forms")->delimiter(',');
  bench->add_option("--plans", plans, "subdomain grids, e.g. 2x1,4x2")->delimiter(',');
  bench->add_option("--sub-elems", bench_opts.sub_elems,
                    "square subdomain size in elements when --plans is not given")
      ->capture_default_str();
  bench->add_option("--time-budget", bench_opts.time_budget, "seconds per solve, 0 = none");
  bench->add_option("--csv", bench_opts.csv, "write the rows as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::exit_ok : cli::exit_usage;
  }

  try {
    if (*gen) {
      cli::GenOptions g = gen_flags.gen();
      g.out = gen_out;
      cli::cmd_gen(g, std::cout);
      return cli::exit_ok;
    }
    if (*dec) return cli::cmd_decompose(dec_in, dec_out, std::cout);
    if (*solve) {
      if (solve_cmd.sdpa.empty()) solve_cmd.gen = solve_flags.gen();
      try {
        solve_cmd.solve.validate();
      } catch (const DomainError& e) {
        throw cli::UsageError(e.what());
      }
      return cli::cmd_solve(solve_cmd, std::cout);
    }
    if (*verify) {
      const auto results = cli::cmd_verify(verify_opts, std::cout);
      for (const auto& r : results) {
        if (!r.passed()) return cli::exit_failure;
      }
      return cli::exit_ok;
    }
    if (*bench) {
      if (!meshes.empty()) {
        bench_opts.meshes.clear();
        for (const auto& m : meshes) bench_opts.meshes.push_back(parse_pair(m));
      }
      for (const auto& p : plans) bench_opts.plans.push_back(parse_pair(p));
      cli::cmd_bench(bench_opts, std::cout);
      return cli::exit_ok;
    }
  } catch (const cli::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_usage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_failure;
  }
  return cli::exit_usage;
}

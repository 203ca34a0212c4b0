#include <filesystem>
#include <fstream>
#include <ostream>

#include "arrowsdp/cli.hpp"

namespace arrowsdp::cli {

sdp::SdoProblem build_form(const fem2d::FemModel& model, const std::string& form, int nx_sub,
                           int ny_sub, sdp::BuildOptions opts) {
  if (form == "original") return sdp::build_original(model);
  if (form != "chordal" && form != "arrow" && form != "fictitious") {
    throw UsageError("unknown form '" + form + "' (original, chordal, arrow, fictitious)");
  }
  if (nx_sub < 1 || ny_sub < 1) throw UsageError("subdomain counts must be positive");
  fem2d::SubdomainPlan plan;
  try {
    plan = fem2d::partition(model, nx_sub, ny_sub);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  if (form == "chordal") return sdp::build_chordal(model, plan, opts);
  if (form == "arrow") return sdp::build_arrow(model, plan, opts);
  if (plan.size() != 2) throw UsageError("the fictitious form needs exactly two subdomains");
  return sdp::build_fictitious(model, plan);
}

sdp::CountReport cmd_gen(const GenOptions& opts, std::ostream& out) {
  try {
    opts.config.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const fem2d::FemModel model = fem2d::build_model(opts.config);
  const sdp::SdoProblem prob = build_form(model, opts.form, opts.nx_sub, opts.ny_sub, opts.build);
  const sdp::CountReport counts = sdp::count_report(prob);
  out << counts.n_vars << " vars, block " << counts.max_block << '\n';
  out << "form " << counts.form << "  subdomains " << counts.p << "  psd blocks "
      << counts.n_blocks << "\n";
  for (const auto& [name, n] : counts.breakdown) {
    if (n > 0) out << "  " << name << ' ' << n << '\n';
  }
  if (!opts.out.empty()) {
    sdp::export_sdpa(opts.out + ".dat-s", prob);
    std::ofstream csv(opts.out + ".counts.csv");
    if (!csv) throw IoError("cannot write " + opts.out + ".counts.csv");
    csv << sdp::count_csv_header() << '\n' << sdp::count_csv_row(counts) << '\n';
    out << "wrote " << opts.out << ".dat-s and " << opts.out << ".counts.csv\n";
  }
  return counts;
}

int cmd_decompose(const std::string& input, const std::string& out_dir, std::ostream& out) {
  std::ifstream in(input);
  if (!in) throw IoError("cannot open " + input);
  const decomp::ArrowSystem sys = decomp::read_arrow_system(in);
  decomp::ArrowSplit split;
  try {
    split = decomp::arrow_decompose(sys);
  } catch (const PreconditionError& e) {
    out << "precondition failed: " << e.what() << '\n';
    return exit_failure;
  } catch (const ConditioningError& e) {
    out << "linear solve failed: " << e.what() << '\n';
    return exit_failure;
  }
  const SymMat m = sys.assemble();
  const decomp::SplitReport rep = decomp::verify_split(m, split.blocks);
  out << "n " << sys.n << "  m " << sys.m << "  p " << sys.parts.size() << '\n';
  out << "sum residual " << rep.max_residual / rep.scale << " (relative)  min eigenvalue "
      << rep.min_eigenvalue / rep.scale << " (relative)\n";
  for (const auto& [key, d] : split.d) {
    out << "D[" << key.first << ',' << key.second << "]  rows "
        << (d.rowwise().norm().array() > 0.0).count() << '\n';
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    for (std::size_t k = 0; k < split.blocks.size(); ++k) {
      write_matrix_market(out_dir + "/block_" + std::to_string(k) + ".mtx", split.blocks[k]);
    }
    out << "wrote " << split.blocks.size() << " blocks to " << out_dir << '\n';
  }
  out << (rep.passed ? "PASS" : "FAIL") << '\n';
  return rep.passed ? exit_ok : exit_failure;
}

int cmd_solve(const SolveCommand& cmd, std::ostream& out) {
  sdp::SdoProblem prob;
  if (!cmd.sdpa.empty()) {
    prob = sdp::import_sdpa(cmd.sdpa);
  } else {
    try {
      cmd.gen.config.validate();
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    const fem2d::FemModel model = fem2d::build_model(cmd.gen.config);
    prob = build_form(model, cmd.gen.form, cmd.gen.nx_sub, cmd.gen.ny_sub, cmd.gen.build);
  }
  ipm::SolveOptions opts = cmd.solve;
  if (cmd.verbose) opts.log = &out;
  const ipm::SolveReport rep = ipm::solve(prob, opts);
  ipm::write_log(out, rep);
  if (!cmd.csv.empty()) {
    std::ofstream csv(cmd.csv);
    if (!csv) throw IoError("cannot write " + cmd.csv);
    csv << ipm::report_csv_header() << '\n' << ipm::report_csv_row(rep) << '\n';
  }
  const bool ok = rep.status == ipm::Status::optimal || rep.status == ipm::Status::near_optimal;
  return ok ? exit_ok : exit_failure;
}

}  // namespace arrowsdp::cli

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include "arrowsdp/cli.hpp"

namespace arrowsdp::cli {

std::string bench_csv_header() {
  return "form,nx,ny,Nx,Ny,n_vars,max_block,iters,total_s,per_iter_s,speedup,speedup_iter,mu";
}

std::string bench_csv_row(const BenchRow& r) {
  char buf[512];
  if (r.skipped) {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%d,%d,%d,skipped,skipped,skipped,skipped,skipped,skipped",
                  r.form.c_str(), r.nx, r.ny, r.nx_sub, r.ny_sub, r.n_vars, r.max_block);
  } else {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%d,%d,%d,%d,%.6f,%.6f,%.4f,%.4f,%.6f",
                  r.form.c_str(), r.nx, r.ny, r.nx_sub, r.ny_sub, r.n_vars, r.max_block,
                  r.iterations, r.total_time, r.per_iter_time, r.speedup_total,
                  r.speedup_per_iter, r.opt_status_metric);
  }
  return buf;
}

ComplexityFit fit_complexity(std::span<const std::pair<double, double>> size_time) {
  if (size_time.size() < 2) throw DomainError("a complexity fit needs at least two rows");
  const double n = static_cast<double>(size_time.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [size, t] : size_time) {
    if (!(size > 0.0) || !(t > 0.0)) throw DomainError("sizes and times must be positive");
    sx += std::log(size);
    sy += std::log(t);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [size, t] : size_time) {
    const double dx = std::log(size) - mx, dy = std::log(t) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw DomainError("a complexity fit needs at least two distinct sizes");
  ComplexityFit fit;
  fit.q = sxy / sxx;
  fit.c = std::exp(my - fit.q * mx);
  const double res = std::max(0.0, syy - fit.q * sxy);
  fit.r2 = syy > 0.0 ? 1.0 - res / syy : 1.0;
  fit.rows = static_cast<int>(size_time.size());
  return fit;
}

BenchResult cmd_bench(const BenchOptions& opts, std::ostream& out) {
  if (opts.meshes.empty()) throw UsageError("no meshes given");
  if (opts.sub_elems < 1) throw UsageError("--sub-elems must be positive");
  for (const auto& f : opts.forms) {
    if (f != "original" && f != "chordal" && f != "arrow" && f != "fictitious") {
      throw UsageError("unknown form '" + f + "'");
    }
  }
  BenchResult result;
  char line[256];
  out << "form         mesh    plan   vars  block  iters   total_s  per_iter_s  speedup  "
         "speedup_it        mu  status\n";
  for (const auto& [nx, ny] : opts.meshes) {
    fem2d::FemConfig cfg = fem2d::FemConfig::cantilever(nx, ny);
    try {
      cfg.validate();
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    const fem2d::FemModel model = fem2d::build_model(cfg);
    const BenchRow* base = nullptr;
    const std::size_t first = result.rows.size();
    for (const auto& form : opts.forms) {
      std::vector<std::pair<int, int>> plans;
      if (form == "original") {
        plans = {{1, 1}};
      } else if (form == "fictitious") {
        plans = {{2, 1}};
      } else if (opts.plans.empty()) {
        if (nx % opts.sub_elems || ny % opts.sub_elems) {
          out << "skipping " << form << " on " << nx << "x" << ny << ": not divisible into "
              << opts.sub_elems << "x" << opts.sub_elems << " subdomains\n";
          continue;
        }
        plans = {{nx / opts.sub_elems, ny / opts.sub_elems}};
      } else {
        for (const auto& pl : opts.plans) {
          if (nx % pl.first == 0 && ny % pl.second == 0) plans.push_back(pl);
        }
      }
      for (const auto& [sx, sy] : plans) {
        const sdp::SdoProblem prob = build_form(model, form, sx, sy);
        const sdp::CountReport counts = sdp::count_report(prob);
        ipm::SolveOptions so = opts.solve;
        so.log = nullptr;
        if (opts.time_budget > 0.0) so.time_limit = opts.time_budget;
        const ipm::SolveReport rep = ipm::solve(prob, so);
        BenchRow row;
        row.form = form;
        row.nx = nx;
        row.ny = ny;
        row.nx_sub = sx;
        row.ny_sub = sy;
        row.n_vars = counts.n_vars;
        row.max_block = counts.max_block;
        row.iterations = rep.iterations;
        row.total_time = rep.total_time;
        row.per_iter_time = rep.per_iter_time;
        row.opt_status_metric = rep.opt_status_metric;
        row.objective = rep.objective;
        row.status = ipm::to_string(rep.status);
        row.skipped = rep.message == "time limit reached";
        result.rows.push_back(row);
      }
    }
    for (std::size_t i = first; i < result.rows.size(); ++i) {
      if (result.rows[i].form == "original" && !result.rows[i].skipped) base = &result.rows[i];
    }
    for (std::size_t i = first; i < result.rows.size(); ++i) {
      BenchRow& r = result.rows[i];
      const double nan = std::numeric_limits<double>::quiet_NaN();
      r.speedup_total = base && r.total_time > 0.0 ? base->total_time / r.total_time : nan;
      r.speedup_per_iter = base && r.per_iter_time > 0.0 ? base->per_iter_time / r.per_iter_time : nan;
      if (r.skipped) {
        std::snprintf(line, sizeof line, "%-10s %3dx%-3d %3dx%-3d %6d %6d  skipped (time budget)\n",
                      r.form.c_str(), r.nx, r.ny, r.nx_sub, r.ny_sub, r.n_vars, r.max_block);
      } else {
        std::snprintf(line, sizeof line,
                      "%-10s %3dx%-3d %3dx%-3d %6d %6d %6d %9.3f %11.5f %8.3f %11.3f %9.6f  %s\n",
                      r.form.c_str(), r.nx, r.ny, r.nx_sub, r.ny_sub, r.n_vars, r.max_block,
                      r.iterations, r.total_time, r.per_iter_time, r.speedup_total,
                      r.speedup_per_iter, r.opt_status_metric, r.status.c_str());
      }
      out << line;
    }
  }

  for (const auto& form : opts.forms) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : result.rows) {
      if (r.form == form && !r.skipped && r.total_time > 0.0) pts.emplace_back(r.n_vars, r.total_time);
    }
    if (pts.size() < 3) continue;
    const ComplexityFit fit = fit_complexity(pts);
    result.fits[form] = fit;
    std::snprintf(line, sizeof line, "complexity %-10s  t = %.3e * size^%.3f  (r2 %.3f, %d rows)\n",
                  form.c_str(), fit.c, fit.q, fit.r2, fit.rows);
    out << line;
  }

  if (!opts.csv.empty()) {
    std::ofstream csv(opts.csv);
    if (!csv) throw IoError("cannot write " + opts.csv);
    csv << bench_csv_header() << '\n';
    for (const auto& r : result.rows) csv << bench_csv_row(r) << '\n';
  }
  return result;
}

}  // namespace arrowsdp::cli

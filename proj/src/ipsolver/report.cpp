#include <cstdio>
#include <ostream>
#include <sstream>

#include "arrowsdp/ipsolver.hpp"

namespace arrowsdp::ipm {

std::string report_csv_header() {
  return "status,objective,dual_objective,iterations,final_gap,primal_infeas,dual_infeas,"
         "total_s,per_iter_s,mu";
}

std::string report_csv_row(const SolveReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%d,%.6g,%.6g,%.6g,%.6f,%.6f,%.10f",
                to_string(r.status).c_str(), r.objective, r.dual_objective, r.iterations,
                r.final_gap, r.primal_infeas, r.dual_infeas, r.total_time, r.per_iter_time,
                r.opt_status_metric);
  return buf;
}

void write_log(std::ostream& out, const SolveReport& r) {
  char buf[256];
  out << " iter        pobj                dobj            gap       pinf      dinf"
         "       mu      step_p  step_d\n";
  for (const auto& h : r.history) {
    std::snprintf(buf, sizeof buf, "%5d  %+.10e  %+.10e  %.2e  %.2e  %.2e  %.2e  %.3f  %.3f\n",
                  h.iter, h.primal_obj, h.dual_obj, h.rel_gap, h.primal_infeas, h.dual_infeas,
                  h.mu, h.step_primal, h.step_dual);
    out << buf;
  }
  std::snprintf(buf, sizeof buf,
                "status %s  objective %.12g  iterations %d  gap %.2e  time %.3fs (%.4fs/iter)"
                "  mu %.6f\n",
                to_string(r.status).c_str(), r.objective, r.iterations, r.final_gap,
                r.total_time, r.per_iter_time, r.opt_status_metric);
  out << buf;
  if (!r.message.empty()) out << r.message << '\n';
}

}  // namespace arrowsdp::ipm

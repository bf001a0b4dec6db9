#pragma once

#include <string>
#include <vector>

#include "ahpe/solvers.hpp"

namespace ahpe {

inline constexpr const char* kTraceVersionLine = "# ahpe-trace v1";
inline constexpr const char* kTraceHeader =
    "k,f_gap,potential,A,B,a,theta,delta,xi,dist_to_opt,d_wz,iprox_residual,"
    "y_yprime_gap,xi_recursion_residual";

std::string format_double(double v);  // 17 significant digits
std::string trace_row(const TraceRecord& r);
std::string trace_csv(const std::vector<TraceRecord>& trace);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace ahpe

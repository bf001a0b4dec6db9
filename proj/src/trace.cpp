#include "ahpe/trace.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ahpe/errors.hpp"

namespace ahpe {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trace_row(const TraceRecord& r) {
  std::string s = std::to_string(r.k);
  for (double v : {r.f_gap, r.potential, r.A, r.B, r.a, r.theta, r.delta, r.xi,
                   r.dist_to_opt, r.d_wz, r.iprox_residual, r.y_yprime_gap,
                   r.xi_recursion_residual}) {
    s += ',';
    s += format_double(v);
  }
  return s;
}

std::string trace_csv(const std::vector<TraceRecord>& trace) {
  std::string out = std::string(kTraceVersionLine) + "\n" + kTraceHeader + "\n";
  for (const auto& r : trace) out += trace_row(r) + "\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw IoError("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace ahpe

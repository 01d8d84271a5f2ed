#pragma once

#include <optional>

namespace smvi {

// One row of the per-iterate trace. Columns match the CSV schema exactly.
struct TraceRecord {
  long n = 0;
  double res_split = 0.0;   // ||w_n - A z_n||
  double res_yz = 0.0;      // ||y_n - z_n||
  double bound_yz = 0.0;    // gamma * ||A*|| * ||w_n - A z_n||
  double ratio_cond2 = 0.0; // ||x_n - u_n|| / (alpha_n * sigma_n)
  double dist_x0 = 0.0;     // ||x_n - x_0||
  std::optional<double> dist_p;  // ||x_n - p|| when a planted solution is known
  double sigma_n = 0.0;
  double alpha_n = 0.0;
};

}  // namespace smvi

#include "vvkrr/report.hpp"

#include <cmath>
#include <ostream>

#include "vvkrr/textio.hpp"

namespace vvkrr {

using text::format_double;

std::string_view to_string(ErrorPath path) {
  switch (path) {
    case ErrorPath::exact_gamma: return "exact-gamma";
    case ErrorPath::monte_carlo_l2: return "monte-carlo-l2";
  }
  return "unknown";
}

void write_cells_csv(const RateReport& report, std::ostream& out) {
  out << "n,seed,lambda,error\n";
  for (Eigen::Index k = 0; k < report.errors.rows(); ++k) {
    for (Eigen::Index s = 0; s < report.errors.cols(); ++s) {
      out << report.ns[static_cast<std::size_t>(k)] << ',' << s << ','
          << format_double(report.lambdas[static_cast<std::size_t>(k)]) << ',' << format_double(report.errors(k, s))
          << '\n';
    }
  }
}

void write_summary(const RateReport& report, std::ostream& out) {
  out << "config_id = " << report.config_id << '\n';
  out << "error_path = " << to_string(report.path) << '\n';
  out << "n_sizes = " << report.ns.size() << '\n';
  out << "n_seeds = " << report.errors.cols() << '\n';
  out << "fitted_slope = " << format_double(report.fitted_slope) << '\n';
  out << "theory_exponent = " << format_double(report.theory_exponent) << '\n';
  out << "tolerance = " << format_double(report.tolerance) << '\n';
  out << "deviation = " << format_double(std::abs(report.fitted_slope + report.theory_exponent)) << '\n';
  out << "pass = " << (report.pass ? "true" : "false") << '\n';
  for (std::size_t k = 0; k < report.ns.size(); ++k) {
    out << "median." << report.ns[k] << " = " << format_double(report.medians[k]) << '\n';
  }
}

void write_plot_data(const RateReport& report, std::ostream& out) {
  out << "# log_n log_median_error\n";
  for (std::size_t k = 0; k < report.ns.size(); ++k) {
    out << format_double(std::log(static_cast<double>(report.ns[k]))) << ' '
        << format_double(std::log(report.medians[k])) << '\n';
  }
}

}  // namespace vvkrr

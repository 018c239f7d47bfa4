#pragma once

#include <iosfwd>
#include <string_view>

#include "vvkrr/analysis.hpp"

namespace vvkrr {

std::string_view to_string(ErrorPath path);

// Header "n,seed,lambda,error"; one row per cell.
void write_cells_csv(const RateReport& report, std::ostream& out);
// "key = value" summary: slope, theory exponent, tolerance, pass, medians.
void write_summary(const RateReport& report, std::ostream& out);
// Two whitespace-separated columns: log n, log median error.
void write_plot_data(const RateReport& report, std::ostream& out);

}  // namespace vvkrr

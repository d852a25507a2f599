#pragma once

// Self-contained SVG box plots (no scripts, fonts or external references).

#include <string>
#include <vector>

#include "tsn/profiler.hpp"

namespace tsn::svg {

struct Box {
  std::string label;
  prof::StatSummary summary;
};

/// One box per entry, y axis in microseconds. Whiskers reach min/max
/// clipped to the 1.5 IQR fences; outliers are drawn as circles.
std::string box_plot(const std::string& title, const std::vector<Box>& boxes);

std::string escape(const std::string& text);

}  // namespace tsn::svg

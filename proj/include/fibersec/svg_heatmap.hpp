#pragma once

#include <filesystem>
#include <string>

#include "fibersec/security_analysis.hpp"

namespace fibersec {

/// Renders one side of a sweep report as an SVG heatmap: channels along x,
/// noise levels along y (increasing upward), SNR color-coded with failed
/// cells drawn in a distinct gray. When snr_min == snr_max the color range
/// is taken from the report's finite cells.
void save_sweep_heatmap_svg(const std::filesystem::path& path,
                            const SweepReport& report, const std::string& side,
                            double snr_min = 0.0, double snr_max = 0.0);

}  // namespace fibersec

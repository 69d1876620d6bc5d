#include "fibersec/svg_heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fibersec {

namespace {

struct Color {
  int r, g, b;
};

// compact viridis-like ramp
constexpr Color kStops[] = {
    {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};

std::string color_for(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * 4.0;
  const int lo = std::min(static_cast<int>(pos), 3);
  const double f = pos - lo;
  const Color a = kStops[lo], b = kStops[lo + 1];
  std::ostringstream out;
  out << "rgb(" << static_cast<int>(a.r + f * (b.r - a.r)) << ","
      << static_cast<int>(a.g + f * (b.g - a.g)) << ","
      << static_cast<int>(a.b + f * (b.b - a.b)) << ")";
  return out.str();
}

}  // namespace

void save_sweep_heatmap_svg(const std::filesystem::path& path,
                            const SweepReport& report, const std::string& side,
                            double snr_min, double snr_max) {
  const bool bob = side == "bob";
  if (!bob && side != "eve")
    throw std::invalid_argument("save_sweep_heatmap_svg: side must be bob or eve");
  const std::vector<double>& grid =
      bob ? report.bob_mean_snr_db : report.eve_mean_snr_db;

  if (snr_min == snr_max) {
    snr_min = 1e300;
    snr_max = -1e300;
    for (double v : grid)
      if (v != kFailedSnr) {
        snr_min = std::min(snr_min, v);
        snr_max = std::max(snr_max, v);
      }
    if (snr_min > snr_max) {
      snr_min = 0.0;
      snr_max = 1.0;
    }
  }
  if (snr_max == snr_min) snr_max = snr_min + 1.0;

  const int n_ch = static_cast<int>(report.channels.size());
  const int n_lv = static_cast<int>(report.noise_levels.size());
  const int cell_w = std::max(6, 660 / std::max(n_ch, 1));
  const int cell_h = std::max(10, 300 / std::max(n_lv, 1));
  const int left = 70, bottom = 50, top = 40, right = 30;
  const int plot_w = cell_w * n_ch, plot_h = cell_h * n_lv;
  const int width = left + plot_w + right;
  const int height = top + plot_h + bottom;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" "
         "font-size=\"15\">"
      << (bob ? "Bob" : "Eve")
      << " mean SNR (dB); gray = detection failed</text>\n";

  for (int ci = 0; ci < n_ch; ++ci)
    for (int li = 0; li < n_lv; ++li) {
      const double v = grid[report.cell(ci, li)];
      const std::string fill =
          v == kFailedSnr
              ? std::string("rgb(120,120,120)")
              : color_for((v - snr_min) / (snr_max - snr_min));
      const int x = left + ci * cell_w;
      const int y = top + (n_lv - 1 - li) * cell_h;  // levels increase upward
      svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_w
          << "\" height=\"" << cell_h << "\" fill=\"" << fill << "\"/>\n";
    }

  // x axis: channel labels
  const int x_step = n_ch > 20 ? 5 : 1;
  for (int ci = 0; ci < n_ch; ci += x_step) {
    const int x = left + ci * cell_w + cell_w / 2;
    svg << "<text x=\"" << x << "\" y=\"" << top + plot_h + 18
        << "\" font-family=\"sans-serif\" font-size=\"10\" "
           "text-anchor=\"middle\">"
        << report.channels[ci] << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << top + plot_h + 38
      << "\" font-family=\"sans-serif\" font-size=\"12\" "
         "text-anchor=\"middle\">mode channel</text>\n";

  // y axis: noise levels
  for (int li = 0; li < n_lv; ++li) {
    const int y = top + (n_lv - 1 - li) * cell_h + cell_h / 2 + 4;
    std::ostringstream label;
    label.precision(3);
    label << report.noise_levels[li];
    svg << "<text x=\"" << left - 8 << "\" y=\"" << y
        << "\" font-family=\"sans-serif\" font-size=\"10\" "
           "text-anchor=\"end\">"
        << label.str() << "</text>\n";
  }
  svg << "<text x=\"16\" y=\"" << top + plot_h / 2
      << "\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 "
      << top + plot_h / 2 << ")\" text-anchor=\"middle\">noise level</text>\n";
  svg << "</svg>\n";

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out)
      throw std::runtime_error("save_sweep_heatmap_svg: cannot open " + tmp.string());
    out << svg.str();
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace fibersec

#include "noisydet/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string_view>
#include <vector>

namespace noisydet::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

// Clean level in blue, noisy levels from yellow to purple.
constexpr std::array<std::string_view, 8> kPalette = {"#1f77b4", "#fde725", "#5ec962", "#21918c",
                                                      "#3b528b", "#440154", "#8c564b", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void open_document(std::ostringstream& os, std::string_view title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
     << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight) << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kWidth / 2.0) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
     << "</text>\n";
}

void line(std::ostringstream& os, double x1, double y1, double x2, double y2, std::string_view stroke = "black") {
  os << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
     << "\" stroke=\"" << stroke << "\"/>\n";
}

void text(std::ostringstream& os, double x, double y, std::string_view anchor, std::string_view body) {
  os << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor << "\">" << escape(body)
     << "</text>\n";
}

}  // namespace

std::string render_census(std::span<const CensusRow> rows) {
  std::vector<std::string> criteria;
  std::vector<std::string> levels;
  for (const auto& r : rows) {
    if (std::find(criteria.begin(), criteria.end(), r.criterion) == criteria.end()) criteria.push_back(r.criterion);
    if (std::find(levels.begin(), levels.end(), r.level) == levels.end()) levels.push_back(r.level);
  }

  // Log axis from a decade at or below the smallest positive value to one at
  // or above the largest.
  double lo = 1.0;
  double hi = 10.0;
  bool any = false;
  for (const auto& r : rows) {
    if (r.positives_per_lesion <= 0.0) continue;
    const double v = std::log10(r.positives_per_lesion);
    lo = any ? std::min(lo, std::floor(v)) : std::floor(v);
    hi = any ? std::max(hi, std::ceil(v)) : std::ceil(v);
    any = true;
  }
  if (hi <= lo) hi = lo + 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double base_y = kTop + plot_h;
  const auto y_of = [&](double value) {
    const double v = value > 0.0 ? std::clamp(std::log10(value), lo, hi) : lo;
    return base_y - (v - lo) / (hi - lo) * plot_h;
  };

  std::ostringstream os;
  open_document(os, "Positive anchors per lesion");
  line(os, kLeft, kTop, kLeft, base_y);
  line(os, kLeft, base_y, kLeft + plot_w, base_y);
  for (double d = lo; d <= hi + 1e-9; d += 1.0) {
    const double y = base_y - (d - lo) / (hi - lo) * plot_h;
    line(os, kLeft - 4.0, y, kLeft, y);
    line(os, kLeft, y, kLeft + plot_w, y, "#dddddd");
    char label[32];
    std::snprintf(label, sizeof(label), "1e%d", static_cast<int>(d));
    text(os, kLeft - 8.0, y + 4.0, "end", label);
  }

  const double group_w = criteria.empty() ? plot_w : plot_w / static_cast<double>(criteria.size());
  const double bar_w = levels.empty() ? 0.0 : group_w * 0.8 / static_cast<double>(levels.size());
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const double gx = kLeft + group_w * static_cast<double>(c) + group_w * 0.1;
    text(os, gx + group_w * 0.4, base_y + 20.0, "middle", criteria[c]);
    for (const auto& r : rows) {
      if (r.criterion != criteria[c]) continue;
      const auto li = static_cast<std::size_t>(std::find(levels.begin(), levels.end(), r.level) - levels.begin());
      const double y = y_of(r.positives_per_lesion);
      os << "<rect x=\"" << num(gx + bar_w * static_cast<double>(li)) << "\" y=\"" << num(y) << "\" width=\""
         << num(bar_w) << "\" height=\"" << num(base_y - y) << "\" fill=\"" << kPalette[li % kPalette.size()]
         << "\"><title>" << escape(r.criterion) << ' ' << escape(r.level) << ": " << num(r.positives_per_lesion)
         << "</title></rect>\n";
    }
  }

  for (std::size_t li = 0; li < levels.size(); ++li) {
    const double y = kTop + 18.0 * static_cast<double>(li);
    os << "<rect x=\"" << num(kWidth - kRight + 20.0) << "\" y=\"" << num(y) << "\" width=\"12\" height=\"12\" fill=\""
       << kPalette[li % kPalette.size()] << "\"/>\n";
    text(os, kWidth - kRight + 38.0, y + 10.0, "start", levels[li]);
  }
  text(os, kLeft + plot_w / 2.0, kHeight - 15.0, "middle", "matching criterion");
  os << "</svg>\n";
  return os.str();
}

std::string render_froc(const FrocCurve& curve, const SensitivityBand* band) {
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double base_y = kTop + plot_h;
  const double cut = curve.fp_cut > 0.0 ? curve.fp_cut : 1.0;
  const auto x_of = [&](double fp) { return kLeft + std::clamp(fp / cut, 0.0, 1.0) * plot_w; };
  const auto y_of = [&](double s) { return base_y - std::clamp(s, 0.0, 1.0) * plot_h; };

  std::ostringstream os;
  open_document(os, "FROC");
  line(os, kLeft, kTop, kLeft, base_y);
  line(os, kLeft, base_y, kLeft + plot_w, base_y);
  for (int i = 0; i <= 4; ++i) {
    const double s = i / 4.0;
    line(os, kLeft - 4.0, y_of(s), kLeft, y_of(s));
    text(os, kLeft - 8.0, y_of(s) + 4.0, "end", num(s));
    const double fp = cut * i / 4.0;
    line(os, x_of(fp), base_y, x_of(fp), base_y + 4.0);
    text(os, x_of(fp), base_y + 18.0, "middle", num(fp));
  }

  if (band != nullptr && !band->fp_per_image.empty()) {
    // Step-shaped envelope: upper edge forward, lower edge backward.
    os << "<path d=\"";
    const std::size_t n = band->fp_per_image.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double x0 = x_of(band->fp_per_image[i]);
      const double x1 = i + 1 < n ? x_of(band->fp_per_image[i + 1]) : x0;
      os << (i == 0 ? "M" : " L") << num(x0) << ',' << num(y_of(band->high[i])) << " L" << num(x1) << ','
         << num(y_of(band->high[i]));
    }
    for (std::size_t k = n; k-- > 0;) {
      const double x0 = x_of(band->fp_per_image[k]);
      const double x1 = k + 1 < n ? x_of(band->fp_per_image[k + 1]) : x0;
      os << " L" << num(x1) << ',' << num(y_of(band->low[k])) << " L" << num(x0) << ',' << num(y_of(band->low[k]));
    }
    os << " Z\" fill=\"#1f77b4\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
  }

  os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"" << num(x_of(0.0)) << ','
     << num(y_of(0.0));
  double last_s = 0.0;
  for (const auto& p : curve.points) {
    os << ' ' << num(x_of(p.fp_per_image)) << ',' << num(y_of(last_s)) << ' ' << num(x_of(p.fp_per_image)) << ','
       << num(y_of(p.sensitivity));
    last_s = p.sensitivity;
  }
  os << ' ' << num(x_of(cut)) << ',' << num(y_of(last_s)) << "\"/>\n";

  text(os, kLeft + plot_w / 2.0, kHeight - 15.0, "middle", "false positives per image");
  os << "<text x=\"18\" y=\"" << num(kTop + plot_h / 2.0) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << num(kTop + plot_h / 2.0) << ")\">sensitivity</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace noisydet::svg

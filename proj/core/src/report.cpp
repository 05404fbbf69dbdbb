#include "bmlab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace bmlab::report {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

bool needs_quoting(const std::string& field) {
  return field.find_first_of(",\"\r\n") != std::string::npos;
}

std::string csv_field(const std::string& field) {
  if (!needs_quoting(field)) return field;
  std::string out = "\"";
  for (char c : field) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

void appendf(std::string& out, const char* fmt, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), fmt, v);
  out += buf;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string to_csv(const bounds::BoundReport& rep) {
  std::string out;
  for (std::size_t i = 0; i < rep.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_field(rep.columns[i]);
  }
  out += "\r\n";
  for (const auto& row : rep.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += "\r\n";
  }
  return out;
}

nlohmann::ordered_json to_json(const bounds::BoundReport& rep) {
  nlohmann::ordered_json j;
  j["columns"] = rep.columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : rep.rows) j["rows"].push_back(row);
  j["fits"] = nlohmann::ordered_json::array();
  for (const auto& f : rep.fits) {
    nlohmann::ordered_json fit;
    fit["column"] = f.column;
    fit["slope"] = f.slope;
    fit["intercept"] = f.intercept;
    fit["ci_95"] = f.ci_95;
    j["fits"].push_back(fit);
  }
  j["config"] = rep.config_echo;
  return j;
}

std::string svg_loglog(const std::string& title,
                       const std::vector<Series>& series,
                       const std::vector<std::string>& annotations) {
  constexpr double kX0 = 70.0, kX1 = 615.0, kY0 = 50.0, kY1 = 360.0;

  double lx0 = 0.0, lx1 = 1.0, ly0 = 0.0, ly1 = 1.0;
  bool any = false;
  for (const auto& s : series)
    for (const auto& [x, y] : s.pts) {
      if (!(x > 0.0) || !(y > 0.0)) continue;
      double lx = std::log10(x), ly = std::log10(y);
      if (!any) {
        lx0 = lx1 = lx;
        ly0 = ly1 = ly;
        any = true;
      } else {
        lx0 = std::min(lx0, lx);
        lx1 = std::max(lx1, lx);
        ly0 = std::min(ly0, ly);
        ly1 = std::max(ly1, ly);
      }
    }
  if (lx1 - lx0 < 1e-9) lx1 = lx0 + 1.0;
  if (ly1 - ly0 < 1e-9) ly1 = ly0 + 1.0;

  auto sx = [&](double lx) { return kX0 + (lx - lx0) / (lx1 - lx0) * (kX1 - kX0); };
  auto sy = [&](double ly) { return kY1 - (ly - ly0) / (ly1 - ly0) * (kY1 - kY0); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
         "height=\"420\" viewBox=\"0 0 640 420\">\n";
  svg += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" font-size=\"15\" font-family=\"sans-serif\" "
         "text-anchor=\"middle\">" + title + "</text>\n";

  // frame
  {
    std::string d;
    appendf(d, "M %.2f", kX0);
    appendf(d, " %.2f", kY0);
    appendf(d, " L %.2f", kX0);
    appendf(d, " %.2f", kY1);
    appendf(d, " L %.2f", kX1);
    appendf(d, " %.2f", kY1);
    svg += "<path d=\"" + d + "\" fill=\"none\" stroke=\"#333333\" "
           "stroke-width=\"1\"/>\n";
  }

  // ticks: five per axis, linear in log space, labelled with the raw value
  for (int t = 0; t <= 4; ++t) {
    double fx = lx0 + (lx1 - lx0) * t / 4.0;
    double fy = ly0 + (ly1 - ly0) * t / 4.0;
    char lab[32];
    std::string tick;
    appendf(tick, "<line x1=\"%.2f\"", sx(fx));
    appendf(tick, " y1=\"%.2f\"", kY1);
    appendf(tick, " x2=\"%.2f\"", sx(fx));
    appendf(tick, " y2=\"%.2f\"", kY1 + 5.0);
    tick += " stroke=\"#333333\"/>";
    svg += tick + "\n";
    std::snprintf(lab, sizeof(lab), "%.3g", std::pow(10.0, fx));
    std::string txt;
    appendf(txt, "<text x=\"%.2f\"", sx(fx));
    appendf(txt, " y=\"%.2f\"", kY1 + 18.0);
    svg += txt + " font-size=\"11\" font-family=\"sans-serif\" "
           "text-anchor=\"middle\">" + lab + "</text>\n";
    tick.clear();
    appendf(tick, "<line x1=\"%.2f\"", kX0 - 5.0);
    appendf(tick, " y1=\"%.2f\"", sy(fy));
    appendf(tick, " x2=\"%.2f\"", kX0);
    appendf(tick, " y2=\"%.2f\"", sy(fy));
    tick += " stroke=\"#333333\"/>";
    svg += tick + "\n";
    std::snprintf(lab, sizeof(lab), "%.3g", std::pow(10.0, fy));
    txt.clear();
    appendf(txt, "<text x=\"%.2f\"", kX0 - 8.0);
    appendf(txt, " y=\"%.2f\"", sy(fy) + 4.0);
    svg += txt + " font-size=\"11\" font-family=\"sans-serif\" "
           "text-anchor=\"end\">" + lab + "</text>\n";
  }

  // series polylines and markers
  int ci = 0;
  for (const auto& s : series) {
    const char* color = kPalette[ci % kPaletteSize];
    ++ci;
    std::string pts;
    for (const auto& [x, y] : s.pts) {
      if (!(x > 0.0) || !(y > 0.0)) continue;
      appendf(pts, "%.2f", sx(std::log10(x)));
      appendf(pts, ",%.2f ", sy(std::log10(y)));
    }
    if (!pts.empty()) {
      svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
             color + "\" stroke-width=\"1.5\"/>\n";
      for (const auto& [x, y] : s.pts) {
        if (!(x > 0.0) || !(y > 0.0)) continue;
        std::string c;
        appendf(c, "<circle cx=\"%.2f\"", sx(std::log10(x)));
        appendf(c, " cy=\"%.2f\"", sy(std::log10(y)));
        svg += c + " r=\"2.5\" fill=\"" + std::string(color) + "\"/>\n";
      }
    }
  }

  // legend, one row per series, top right of the plot area
  ci = 0;
  for (const auto& s : series) {
    const char* color = kPalette[ci % kPaletteSize];
    double y = kY0 + 14.0 + 16.0 * ci;
    ++ci;
    std::string row;
    appendf(row, "<line x1=\"%.2f\"", kX1 - 150.0);
    appendf(row, " y1=\"%.2f\"", y - 4.0);
    appendf(row, " x2=\"%.2f\"", kX1 - 126.0);
    appendf(row, " y2=\"%.2f\"", y - 4.0);
    svg += row + " stroke=\"" + std::string(color) + "\" stroke-width=\"2\"/>\n";
    std::string txt;
    appendf(txt, "<text x=\"%.2f\"", kX1 - 120.0);
    appendf(txt, " y=\"%.2f\"", y);
    svg += txt + " font-size=\"11\" font-family=\"sans-serif\">" + s.name +
           "</text>\n";
  }

  // free-text annotations under the title
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    std::string txt;
    appendf(txt, "<text x=\"%.2f\"", kX0 + 6.0);
    appendf(txt, " y=\"%.2f\"", kY0 + 14.0 + 16.0 * static_cast<double>(i));
    svg += txt + " font-size=\"11\" font-family=\"sans-serif\" "
           "fill=\"#555555\">" + annotations[i] + "</text>\n";
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace bmlab::report

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dpsn/error.hpp"
#include "dpsn/formats.hpp"
#include "dpsn/pipeline.hpp"

namespace dpsn {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 90;
const char* kPalette[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// "--" may not appear inside an XML comment.
std::string comment_safe(std::string s) {
  for (std::size_t p; (p = s.find("--")) != std::string::npos;) s.replace(p, 2, "- -");
  return s;
}

// Round the axis maximum up to 1, 2 or 5 times a power of ten.
double nice_max(double v) {
  if (!(v > 0)) return 1.0;
  const double p = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * p >= v) return m * p;
  return 10 * p;
}

struct Frame {
  std::string body;
  double y_max = 1.0;
  double plot_h() const { return kHeight - kTop - kBottom; }
  double plot_w() const { return kWidth - kLeft - kRight; }
  double y(double v) const { return kTop + plot_h() * (1.0 - v / y_max); }
};

std::string open_svg(const std::string& title, const std::string& data) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         num(kWidth) + "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"11\">\n<!-- data\n" + comment_safe(data) + "-->\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<text x=\"" + num(kWidth / 2) +
         "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) + "</text>\n";
}

void axes(Frame& f, const std::vector<std::string>& categories, const std::string& y_label) {
  const double x0 = kLeft, y0 = kTop + f.plot_h();
  f.body += "<line x1=\"" + num(x0) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(x0) + "\" y2=\"" + num(y0) +
            "\" stroke=\"black\"/>\n";
  f.body += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(kWidth - kRight) + "\" y2=\"" +
            num(y0) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = f.y_max * i / 5;
    f.body += "<line x1=\"" + num(x0 - 4) + "\" y1=\"" + num(f.y(v)) + "\" x2=\"" + num(x0) + "\" y2=\"" +
              num(f.y(v)) + "\" stroke=\"black\"/><text x=\"" + num(x0 - 6) + "\" y=\"" + num(f.y(v) + 4) +
              "\" text-anchor=\"end\">" + format_double(std::round(v * 1e6) / 1e6) + "</text>\n";
  }
  f.body += "<text transform=\"translate(16," + num(kTop + f.plot_h() / 2) +
            ") rotate(-90)\" text-anchor=\"middle\">" + escape(y_label) + "</text>\n";
  const double slot = f.plot_w() / static_cast<double>(std::max<std::size_t>(categories.size(), 1));
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double cx = kLeft + slot * (static_cast<double>(c) + 0.5);
    f.body += "<text transform=\"translate(" + num(cx) + "," + num(y0 + 14) +
              ") rotate(20)\" text-anchor=\"start\">" + escape(categories[c]) + "</text>\n";
  }
}

}  // namespace

std::string svg_bar_chart(const std::string& title, const std::vector<std::string>& categories,
                          const std::vector<std::string>& series, const std::vector<std::vector<double>>& values,
                          const std::string& y_label, bool stacked) {
  if (values.size() != series.size()) throw PreconditionError("bar chart: one value row per series");
  for (const auto& row : values)
    if (row.size() != categories.size()) throw PreconditionError("bar chart: one value per category");

  std::string data = "category";
  for (const auto& s : series) data += "," + s;
  data += "\n";
  double top = 0.0;
  for (std::size_t c = 0; c < categories.size(); ++c) {
    data += categories[c];
    double sum = 0.0;
    for (std::size_t s = 0; s < series.size(); ++s) {
      data += "," + format_double(values[s][c]);
      sum += values[s][c];
      top = std::max(top, values[s][c]);
    }
    data += "\n";
    if (stacked) top = std::max(top, sum);
  }

  Frame f;
  f.y_max = nice_max(top);
  axes(f, categories, y_label);
  const double slot = f.plot_w() / static_cast<double>(std::max<std::size_t>(categories.size(), 1));
  const double group = slot * 0.7;
  const double bar = stacked ? group : group / static_cast<double>(std::max<std::size_t>(series.size(), 1));
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = kLeft + slot * static_cast<double>(c) + (slot - group) / 2;
    double base = 0.0;
    for (std::size_t s = 0; s < series.size(); ++s) {
      const double v = std::max(0.0, values[s][c]);
      const double x = stacked ? gx : gx + bar * static_cast<double>(s);
      const double lo = stacked ? base : 0.0;
      f.body += "<rect x=\"" + num(x) + "\" y=\"" + num(f.y(lo + v)) + "\" width=\"" + num(bar) + "\" height=\"" +
                num(f.y(lo) - f.y(lo + v)) + "\" fill=\"" + kPalette[s % 6] + "\"/>\n";
      if (stacked) base += v;
    }
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double lx = kWidth - kRight - 120, ly = kTop + 14.0 * static_cast<double>(s);
    f.body += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly) + "\" width=\"10\" height=\"10\" fill=\"" +
              kPalette[s % 6] + "\"/><text x=\"" + num(lx + 14) + "\" y=\"" + num(ly + 9) + "\">" +
              escape(series[s]) + "</text>\n";
  }
  return open_svg(title, data) + f.body + "</svg>\n";
}

std::string svg_box_chart(const std::string& title, const std::vector<std::string>& categories,
                          const std::vector<std::vector<double>>& samples, const std::string& y_label) {
  if (samples.size() != categories.size()) throw PreconditionError("box chart: one sample per category");
  std::string data = "category,value\n";
  double top = 0.0;
  for (std::size_t c = 0; c < categories.size(); ++c)
    for (double v : samples[c]) {
      data += categories[c] + "," + format_double(v) + "\n";
      top = std::max(top, v);
    }

  Frame f;
  f.y_max = nice_max(top);
  axes(f, categories, y_label);
  const double slot = f.plot_w() / static_cast<double>(std::max<std::size_t>(categories.size(), 1));
  auto quantile = [](const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  for (std::size_t c = 0; c < categories.size(); ++c) {
    if (samples[c].empty()) continue;
    auto v = samples[c];
    std::sort(v.begin(), v.end());
    const double q1 = quantile(v, 0.25), med = quantile(v, 0.5), q3 = quantile(v, 0.75);
    const double cx = kLeft + slot * (static_cast<double>(c) + 0.5), w = slot * 0.4;
    const char* color = kPalette[c % 6];
    f.body += "<line x1=\"" + num(cx) + "\" y1=\"" + num(f.y(v.front())) + "\" x2=\"" + num(cx) + "\" y2=\"" +
              num(f.y(v.back())) + "\" stroke=\"black\"/>\n";
    f.body += "<rect x=\"" + num(cx - w / 2) + "\" y=\"" + num(f.y(q3)) + "\" width=\"" + num(w) + "\" height=\"" +
              num(std::max(1.0, f.y(q1) - f.y(q3))) + "\" fill=\"" + color + "\" stroke=\"black\"/>\n";
    f.body += "<line x1=\"" + num(cx - w / 2) + "\" y1=\"" + num(f.y(med)) + "\" x2=\"" + num(cx + w / 2) +
              "\" y2=\"" + num(f.y(med)) + "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  }
  return open_svg(title, data) + f.body + "</svg>\n";
}

}  // namespace dpsn

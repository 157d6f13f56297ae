#include "tsg/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tsg::report {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
  std::ostringstream s;
  s << header << '\n';
  for (const auto& r : rows) s << r << '\n';
  write_text_file(path, s.str());
}

namespace {

struct Mapper {
  double lo, hi;
  double a, b;  // pixel range
  bool log;
  double operator()(double v) const {
    if (log) v = std::log10(v);
    if (hi == lo) return (a + b) / 2;
    return a + (b - a) * (v - lo) / (hi - lo);
  }
};

const char* kColors[] = {"#1f6fb2", "#d9541e", "#2e8540", "#7f4fa0", "#b0368c", "#6b6b6b"};

std::string tick_label(double v, bool log) {
  return num(log ? std::pow(10.0, v) : v);
}

}  // namespace

void write_line_svg(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<Series>& series, bool logx, bool logy) {
  const double width = 720, height = 460;
  const double ml = 70, mr = 20, mt = 40, mb = 55;
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double xv = s.x[i], yv = s.y[i];
      if (logx) {
        if (xv <= 0) continue;
        xv = std::log10(xv);
      }
      if (logy) {
        if (yv <= 0) continue;
        yv = std::log10(yv);
      }
      xlo = std::min(xlo, xv); xhi = std::max(xhi, xv);
      ylo = std::min(ylo, yv); yhi = std::max(yhi, yv);
    }
  if (!(xlo <= xhi)) { xlo = 0; xhi = 1; }
  if (!(ylo <= yhi)) { ylo = 0; yhi = 1; }
  double ypad = (yhi - ylo) * 0.05 + 1e-12;
  ylo -= ypad; yhi += ypad;

  Mapper mx{xlo, xhi, ml, width - mr, false};
  Mapper my{ylo, yhi, height - mb, mt, false};

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
    << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
       "font-family=\"sans-serif\">" << title << "</text>\n";

  const int ticks = 5;
  s << "<g font-size=\"11\" font-family=\"sans-serif\" fill=\"#333\">\n";
  for (int i = 0; i <= ticks; ++i) {
    double tx = xlo + (xhi - xlo) * i / ticks;
    double px = mx(tx);
    s << "<line x1=\"" << px << "\" y1=\"" << mt << "\" x2=\"" << px << "\" y2=\""
      << height - mb << "\" stroke=\"#e0e0e0\"/>\n"
      << "<text x=\"" << px << "\" y=\"" << height - mb + 16
      << "\" text-anchor=\"middle\">" << tick_label(tx, logx) << "</text>\n";
    double ty = ylo + (yhi - ylo) * i / ticks;
    double py = my(ty);
    s << "<line x1=\"" << ml << "\" y1=\"" << py << "\" x2=\"" << width - mr << "\" y2=\""
      << py << "\" stroke=\"#e0e0e0\"/>\n"
      << "<text x=\"" << ml - 6 << "\" y=\"" << py + 4
      << "\" text-anchor=\"end\">" << tick_label(ty, logy) << "</text>\n";
  }
  s << "</g>\n"
    << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << width - ml - mr
    << "\" height=\"" << height - mt - mb << "\" fill=\"none\" stroke=\"#333\"/>\n"
    << "<text x=\"" << width / 2 << "\" y=\"" << height - 14
    << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" << xlabel
    << "</text>\n"
    << "<text x=\"18\" y=\"" << height / 2
    << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" transform=\"rotate(-90 18 "
    << height / 2 << ")\">" << ylabel << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& ser = series[k];
    const char* color = kColors[k % 6];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      double xv = ser.x[i], yv = ser.y[i];
      if ((logx && xv <= 0) || (logy && yv <= 0)) continue;
      s << mx(logx ? std::log10(xv) : xv) << ',' << my(logy ? std::log10(yv) : yv) << ' ';
    }
    s << "\"/>\n"
      << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 16 + 15 * static_cast<double>(k)
      << "\" font-size=\"11\" font-family=\"sans-serif\" fill=\"" << color << "\">"
      << ser.name << "</text>\n";
  }
  s << "</svg>\n";
  write_text_file(path, s.str());
}

}  // namespace tsg::report

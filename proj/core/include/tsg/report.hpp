#pragma once

#include <string>
#include <vector>

namespace tsg::report {

// Shortest round-trippable decimal rendering (deterministic across runs).
std::string num(double v);

void write_text_file(const std::string& path, const std::string& content);

// header = comma-joined column names; each row is pre-joined cells.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows);

struct Series {
  std::string name;
  std::vector<double> x, y;
};

// Minimal standalone line chart; log10 axes on request.
void write_line_svg(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<Series>& series, bool logx = false,
                    bool logy = false);

}  // namespace tsg::report

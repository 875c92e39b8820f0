#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypofp {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// 17 significant digits, '.' decimal separator.
std::string format_double(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values);
    std::string str() const;
};

void write_text(const std::filesystem::path& path, const std::string& text);

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

// Standalone SVG 1.1 line chart. Non-positive values are skipped on a log axis.
std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::vector<PlotSeries>& series,
                          bool log_y);

}  // namespace hypofp

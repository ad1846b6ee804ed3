#pragma once

// Minimal static SVG line plots for the CLI (no external dependencies).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace steklov::plot {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

class SvgPlot {
   public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

    void add_series(Series series) {
        if (series.x.size() != series.y.size())
            throw std::invalid_argument("SvgPlot: x/y size mismatch");
        series_.push_back(std::move(series));
    }

    void write(const std::string& path) const {
        const double width = 640, height = 420;
        const double ml = 70, mr = 20, mt = 40, mb = 50;
        double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
        double ymin = xmin, ymax = -xmin;
        for (const Series& s : series_) {
            for (double v : s.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
            for (double v : s.y) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
        }
        if (!(xmin <= xmax)) { xmin = 0; xmax = 1; }
        if (!(ymin <= ymax)) { ymin = 0; ymax = 1; }
        if (xmax == xmin) { xmax = xmin + 1; }
        if (ymax == ymin) { ymax = ymin + (ymin == 0 ? 1 : std::abs(ymin) * 0.1); }
        auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
        auto py = [&](double y) {
            return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
        };

        static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                        "#ff7f0e", "#8c564b"};
        std::ostringstream svg;
        svg.precision(6);
        svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
            << height << "'>\n";
        svg << "<rect width='100%' height='100%' fill='white'/>\n";
        svg << "<text x='" << width / 2 << "' y='24' text-anchor='middle' font-size='15'>"
            << title_ << "</text>\n";
        // axes box
        svg << "<rect x='" << ml << "' y='" << mt << "' width='" << width - ml - mr
            << "' height='" << height - mt - mb
            << "' fill='none' stroke='black' stroke-width='1'/>\n";
        // axis labels and range ticks
        svg << "<text x='" << (ml + width - mr) / 2 << "' y='" << height - 12
            << "' text-anchor='middle' font-size='12'>" << xlabel_ << "</text>\n";
        svg << "<text x='16' y='" << (mt + height - mb) / 2
            << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 "
            << (mt + height - mb) / 2 << ")'>" << ylabel_ << "</text>\n";
        svg << "<text x='" << ml << "' y='" << height - mb + 16
            << "' text-anchor='middle' font-size='10'>" << xmin << "</text>\n";
        svg << "<text x='" << width - mr << "' y='" << height - mb + 16
            << "' text-anchor='middle' font-size='10'>" << xmax << "</text>\n";
        svg << "<text x='" << ml - 6 << "' y='" << height - mb + 4
            << "' text-anchor='end' font-size='10'>" << ymin << "</text>\n";
        svg << "<text x='" << ml - 6 << "' y='" << mt + 4
            << "' text-anchor='end' font-size='10'>" << ymax << "</text>\n";

        int color = 0;
        double legend_y = mt + 16;
        for (const Series& s : series_) {
            const char* stroke = palette[color % 6];
            svg << "<polyline fill='none' stroke='" << stroke << "' stroke-width='1.5' points='";
            for (size_t i = 0; i < s.x.size(); ++i)
                svg << px(s.x[i]) << "," << py(s.y[i]) << " ";
            svg << "'/>\n";
            if (!s.label.empty()) {
                svg << "<text x='" << width - mr - 8 << "' y='" << legend_y
                    << "' text-anchor='end' font-size='11' fill='" << stroke << "'>" << s.label
                    << "</text>\n";
                legend_y += 14;
            }
            ++color;
        }
        svg << "</svg>\n";

        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write plot file: " + path);
        out << svg.str();
    }

   private:
    std::string title_, xlabel_, ylabel_;
    std::vector<Series> series_;
};

}  // namespace steklov::plot

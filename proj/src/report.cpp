#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "povm/experiments.hpp"

namespace povm {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string render_svg(const ResultRecord& record) {
    constexpr double width = 640, height = 400, left = 60, right = 20, top = 30, bottom = 50;
    const double plot_w = width - left - right, plot_h = height - top - bottom;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& row : record.curve_rows) {
        if (row.empty()) continue;
        xmin = std::min(xmin, row[0]);
        xmax = std::max(xmax, row[0]);
        for (std::size_t c = 1; c < row.size(); ++c) {
            if (!std::isfinite(row[c])) continue;
            ymin = std::min(ymin, row[c]);
            ymax = std::max(ymax, row[c]);
        }
    }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1;
    if (!std::isfinite(ymin)) ymin = 0, ymax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
    auto sy = [&](double y) { return top + (1.0 - (y - ymin) / (ymax - ymin)) * plot_h; };

    std::ostringstream os;
    os.precision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << left << "\" y=\"18\" font-size=\"14\">" << escape(record.experiment) << "</text>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\"" << top + plot_h
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << left << "\" y=\"" << height - 10 << "\" font-size=\"11\">"
       << escape(record.curve_columns.empty() ? "" : record.curve_columns[0]) << " [" << xmin << ", " << xmax
       << "]</text>\n";
    os << "<text x=\"4\" y=\"" << top + 4 << "\" font-size=\"10\">" << ymax << "</text>\n";
    os << "<text x=\"4\" y=\"" << top + plot_h << "\" font-size=\"10\">" << ymin << "</text>\n";

    for (std::size_t c = 1; c < record.curve_columns.size(); ++c) {
        const char* color = kColors[(c - 1) % std::size(kColors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
        for (const auto& row : record.curve_rows) {
            if (c < row.size() && std::isfinite(row[c])) os << sx(row[0]) << ',' << sy(row[c]) << ' ';
        }
        os << "\"/>\n";
        os << "<text x=\"" << left + 10 << "\" y=\"" << top + 14 * c << "\" font-size=\"10\" fill=\"" << color << "\">"
           << escape(record.curve_columns[c]) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace povm

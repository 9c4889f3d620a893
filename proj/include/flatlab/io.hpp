#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flatlab/errors.hpp"
#include "flatlab/stats.hpp"
#include "flatlab/version.hpp"

// File-format helpers: CSV with stable formatting, standalone SVG histograms,
// and JSON reports that embed the resolved configuration and version string.
namespace flatlab::io {

using json = nlohmann::json;

// Shortest round-trippable decimal representation, for bit-stable CSV output.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    double back = std::strtod(buf, nullptr);
    if (back == v) {
        for (int prec = 1; prec <= 16; ++prec) {
            char t[40];
            std::snprintf(t, sizeof t, "%.*g", prec, v);
            if (std::strtod(t, nullptr) == v) return t;
        }
    }
    return buf;
}

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw Error("Io", "cannot open '" + path + "' for writing");
        cols_ = header.size();
        write_cells(header);
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != cols_)
            throw InvalidParameter("csv row has wrong number of columns");
        write_cells(cells);
    }

  private:
    void write_cells(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::ofstream out_;
    std::size_t cols_ = 0;
};

// A self-contained SVG bar histogram (no plotting dependency).
inline void write_svg_histogram(const std::string& path, const stats::Histogram& h,
                                const std::string& title, int width = 640, int height = 400) {
    std::ofstream out(path);
    if (!out) throw Error("Io", "cannot open '" + path + "' for writing");
    const int ml = 50, mr = 15, mt = 30, mb = 35;  // margins
    const int pw = width - ml - mr, ph = height - mt - mb;
    long peak = 1;
    for (long c : h.counts) peak = std::max(peak, c);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
    const int n = static_cast<int>(h.counts.size());
    for (int i = 0; i < n; ++i) {
        double frac = static_cast<double>(h.counts[i]) / static_cast<double>(peak);
        double bh = frac * ph;
        double x = ml + static_cast<double>(i) / n * pw;
        double bw = static_cast<double>(pw) / n;
        out << "<rect x=\"" << num(x) << "\" y=\"" << num(mt + ph - bh) << "\" width=\""
            << num(bw) << "\" height=\"" << num(bh) << "\" fill=\"#4878a8\" "
            << "stroke=\"white\" stroke-width=\"0.5\"/>\n";
    }
    // axes and min/max labels
    out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
        << mt + ph << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(h.lo)
        << "</text>\n";
    out << "<text x=\"" << ml + pw << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(h.hi)
        << "</text>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << peak
        << "</text>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << mt + ph
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">0</text>\n";
    out << "</svg>\n";
}

// Report skeleton shared by all machine-readable outputs: every report
// carries the tool version and the resolved configuration that produced it.
inline json make_report(const std::string& kind, const json& config) {
    json j;
    j["tool"] = "flatlab";
    j["version"] = kVersion;
    j["kind"] = kind;
    j["config"] = config;
    return j;
}

inline void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("Io", "cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
}

}  // namespace flatlab::io

#pragma once

// Deterministic artifact writers: CSV with a config-hash comment line, and a
// self-contained SVG polyline plot.  CSV is the interface of record; plots
// are conveniences.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dskg/errors.hpp"
#include "dskg/field.hpp"

namespace dskg {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::uint64_t fnv1a_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& comment,
              const std::vector<std::string>& columns) {
        std::filesystem::create_directories(path.parent_path());
        out_.open(path);
        if (!out_) throw config_error("cannot open output file " + path.string());
        out_ << "# " << comment << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << columns[i] << (i + 1 < columns.size() ? "," : "");
        out_ << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << cells[i] << (i + 1 < cells.size() ? "," : "");
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

inline void write_snapshot_csv(const std::filesystem::path& path,
                               const std::string& comment, const SpectralField& f) {
    const auto& g = f.grid();
    const auto& v = f.values();
    if (g.d == 1) {
        CsvWriter csv(path, comment, {"x", "re_psi", "im_psi"});
        for (int i = 0; i < g.npts; ++i)
            csv.row({fmt_double(g.x(i)), fmt_double(v[i].real()), fmt_double(v[i].imag())});
    } else {
        CsvWriter csv(path, comment, {"x", "y", "re_psi", "im_psi"});
        for (int yy = 0; yy < g.npts; ++yy)
            for (int xx = 0; xx < g.npts; ++xx) {
                const auto& z = v[std::size_t(yy) * g.npts + xx];
                csv.row({fmt_double(g.x(xx)), fmt_double(g.x(yy)),
                         fmt_double(z.real()), fmt_double(z.imag())});
            }
    }
}

inline void write_trajectory_csv(const std::filesystem::path& path,
                                 const std::string& comment, const Trajectory& traj) {
    CsvWriter csv(path, comment, {"t", "hs_norm", "linf"});
    for (std::size_t i = 0; i < traj.size(); ++i)
        csv.row({fmt_double(traj.times[i]), fmt_double(traj.hs_norms[i]),
                 fmt_double(linf_norm(traj.fields[i]))});
}

// Minimal line plot: one or more series on shared axes, optional log-y.
struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

inline void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                           const std::vector<PlotSeries>& series, bool log_y = false) {
    const int W = 640, H = 420, ml = 60, mr = 20, mt = 36, mb = 44;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double yv = s.y[i];
            if (log_y) {
                if (!(yv > 0.0)) continue;
                yv = std::log10(yv);
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, yv);
            ymax = std::max(ymax, yv);
        }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw config_error("cannot open output file " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
        << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << title << (log_y ? " (log y)" : "") << "</text>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
        << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << H - mb << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double xv = xmin + (xmax - xmin) * i / 4;
        double yv = ymin + (ymax - ymin) * i / 4;
        out << "<text x=\"" << px(xv) << "\" y=\"" << H - mb + 16
            << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt_double(xv).substr(0, 8)
            << "</text>\n";
        out << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 3
            << "\" text-anchor=\"end\" font-size=\"10\">" << fmt_double(yv).substr(0, 8)
            << "</text>\n";
    }
    int ci = 0;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << colors[ci % 5]
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double yv = s.y[i];
            if (log_y) {
                if (!(yv > 0.0)) continue;
                yv = std::log10(yv);
            }
            out << px(s.x[i]) << "," << py(yv) << " ";
        }
        out << "\"/>\n";
        out << "<text x=\"" << W - mr - 6 << "\" y=\"" << mt + 14 * (ci + 1)
            << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << colors[ci % 5]
            << "\">" << s.label << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
}

}  // namespace dskg

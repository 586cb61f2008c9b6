#include "shorevo/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace shorevo {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 540.0;
constexpr double kMargin = 60.0;

struct Axes {
    double xmin, xmax, ymin, ymax;

    double px(double x) const {
        return kMargin + (x - xmin) / (xmax - xmin) * (kWidth - 2 * kMargin);
    }
    double py(double y) const {
        return kHeight - kMargin -
               (y - ymin) / (ymax - ymin) * (kHeight - 2 * kMargin);
    }

    void pad() {
        const double dx = std::max(1e-9, xmax - xmin) * 0.05;
        const double dy = std::max(1e-9, ymax - ymin) * 0.05;
        xmin -= dx;
        xmax += dx;
        ymin -= dy;
        ymax += dy;
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

void open_svg(std::ofstream& out, const std::filesystem::path& file) {
    out.open(file);
    if (!out) throw ParseError("cannot write " + file.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
        << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void axes_frame(std::ofstream& out, const Axes& ax, const std::string& xlabel,
                const std::string& ylabel) {
    out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
        << kWidth - 2 * kMargin << "\" height=\"" << kHeight - 2 * kMargin
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = ax.xmin + (ax.xmax - ax.xmin) * i / 4.0;
        const double fy = ax.ymin + (ax.ymax - ax.ymin) * i / 4.0;
        out << "<text x=\"" << ax.px(fx) << "\" y=\"" << kHeight - kMargin + 18
            << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(fx)
            << "</text>\n";
        out << "<text x=\"" << kMargin - 8 << "\" y=\"" << ax.py(fy) + 4
            << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(fy)
            << "</text>\n";
    }
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 14
        << "\" font-size=\"13\" text-anchor=\"middle\">" << xlabel
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << kHeight / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << kHeight / 2 << ")\">" << ylabel << "</text>\n";
}

void polyline(std::ofstream& out, const Axes& ax,
              const std::vector<Vec2>& pts, const std::string& color) {
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : pts) out << ax.px(p.x()) << "," << ax.py(p.y()) << " ";
    out << "\"/>\n";
}

}  // namespace

void plot_overlay(const CatmullRomSpline& g, const CatmullRomSpline& v,
                  const AffineTransform2D& align,
                  const std::filesystem::path& file) {
    const int n = 400;
    std::vector<Vec2> gp, vp;
    for (int i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / (n - 1);
        gp.push_back(g.point_at_fraction(u).vec());
        vp.push_back(align.apply(v.point_at_fraction(u).vec()));
    }
    Axes ax{gp[0].x(), gp[0].x(), gp[0].y(), gp[0].y()};
    for (const auto* series : {&gp, &vp})
        for (const auto& p : *series) {
            ax.xmin = std::min(ax.xmin, p.x());
            ax.xmax = std::max(ax.xmax, p.x());
            ax.ymin = std::min(ax.ymin, p.y());
            ax.ymax = std::max(ax.ymax, p.y());
        }
    ax.pad();

    std::ofstream out;
    open_svg(out, file);
    axes_frame(out, ax, "east [m]", "north [m]");
    polyline(out, ax, gp, "blue");
    polyline(out, ax, vp, "red");
    out << "<text x=\"" << kWidth - kMargin - 8 << "\" y=\"" << kMargin + 16
        << "\" font-size=\"12\" text-anchor=\"end\" fill=\"blue\">GPS</text>\n";
    out << "<text x=\"" << kWidth - kMargin - 8 << "\" y=\"" << kMargin + 32
        << "\" font-size=\"12\" text-anchor=\"end\" fill=\"red\">VO</text>\n";
    out << "</svg>\n";
}

void plot_error_vs_distance(const ErrorReport& rep,
                            const std::filesystem::path& file) {
    Axes ax{0.0, rep.distance_m.empty() ? 1.0 : rep.distance_m.back(), 0.0,
            std::max(rep.max_error, 1e-9)};
    ax.pad();
    std::vector<Vec2> pts;
    for (size_t i = 0; i < rep.errors.size(); ++i)
        pts.emplace_back(rep.distance_m[i], rep.errors[i]);

    std::ofstream out;
    open_svg(out, file);
    axes_frame(out, ax, "distance travelled [m]", "position error [m]");
    polyline(out, ax, pts, "red");
    out << "</svg>\n";
}

void plot_histogram(const ErrorReport& rep, const std::filesystem::path& file) {
    const int bins = static_cast<int>(rep.histogram_counts.size());
    int max_count = 1;
    for (int c : rep.histogram_counts) max_count = std::max(max_count, c);
    Axes ax{rep.histogram_edges.front(), std::max(rep.histogram_edges.back(), 1e-9),
            0.0, static_cast<double>(max_count)};
    ax.pad();

    std::ofstream out;
    open_svg(out, file);
    axes_frame(out, ax, "position error [m]", "count");
    for (int i = 0; i < bins; ++i) {
        const double x0 = ax.px(rep.histogram_edges[static_cast<size_t>(i)]);
        const double x1 = ax.px(rep.histogram_edges[static_cast<size_t>(i) + 1]);
        const double y = ax.py(rep.histogram_counts[static_cast<size_t>(i)]);
        out << "<rect x=\"" << x0 << "\" y=\"" << y << "\" width=\""
            << std::max(1.0, x1 - x0 - 1.0) << "\" height=\"" << ax.py(0.0) - y
            << "\" fill=\"red\" fill-opacity=\"0.6\" stroke=\"black\"/>\n";
    }
    out << "</svg>\n";
}

}  // namespace shorevo

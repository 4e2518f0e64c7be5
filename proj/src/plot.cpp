#include "ldagan/plot.hpp"

#include "ldagan/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ldagan {

namespace {

constexpr int kSize = 640;
constexpr int kMargin = 20;

// Tableau-style palette; cycles for K > 10.
const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b",
                                "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

std::string scatter_svg(const Matrix& real, const Matrix& fake, const std::vector<int>& generator_ids,
                        int num_generators) {
    double extent = 1.0;
    for (const Matrix* m : {&real, &fake}) {
        if (m->size() > 0) {
            extent = std::max(extent, m->cwiseAbs().maxCoeff());
        }
    }
    extent = std::min(extent * 1.1, 50.0);
    const double scale = (kSize - 2.0 * kMargin) / (2.0 * extent);
    auto px = [&](double x) { return kMargin + (x + extent) * scale; };
    auto py = [&](double y) { return kMargin + (extent - y) * scale; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
        << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<g id=\"real\" fill=\"#d62728\" fill-opacity=\"0.35\">\n";
    for (Eigen::Index i = 0; i < real.cols(); ++i) {
        svg << "<circle cx=\"" << fmt(px(real(0, i))) << "\" cy=\"" << fmt(py(real(1, i))) << "\" r=\"1.5\"/>\n";
    }
    svg << "</g>\n";
    for (int k = 0; k < num_generators; ++k) {
        svg << "<g id=\"generator-" << k << "\" fill=\"" << kPalette[k % 10] << "\" fill-opacity=\"0.8\">\n";
        for (Eigen::Index i = 0; i < fake.cols(); ++i) {
            if (generator_ids[static_cast<std::size_t>(i)] == k) {
                svg << "<circle cx=\"" << fmt(px(fake(0, i))) << "\" cy=\"" << fmt(py(fake(1, i)))
                    << "\" r=\"2\"/>\n";
            }
        }
        svg << "</g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_scatter_svg(const std::filesystem::path& path, const Matrix& real, const Matrix& fake,
                       const std::vector<int>& generator_ids, int num_generators) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << scatter_svg(real, fake, generator_ids, num_generators);
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

} // namespace ldagan

#pragma once

// Level curves of two-dimensional pseudospectrum fields, CSV export and a
// matplotlib script that redraws them.

#include "mpspec/pseudospectrum.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace mpspec {

struct Polyline {
    std::vector<std::array<double, 2>> points;
    bool closed = false;
};

struct ContourLevel {
    double eps = 0.0;
    std::vector<Polyline> lines;
};

/// Plane view of a field with exactly two real dimensions: two real axes, or
/// one complex box (x = real part, y = imaginary part).
struct Plane {
    int nx = 0;
    int ny = 0;
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> v;  // v[ix + nx * iy]
    std::string xlabel;
    std::string ylabel;
    int axis_x = -1;
    int axis_y = -1;

    double at(int ix, int iy) const { return v[static_cast<std::size_t>(ix + nx * iy)]; }
};

/// Throws InputError unless the field is two-dimensional.
Plane plane_view(const PseudospectrumField& f);

/// Marching squares with linear interpolation on each edge.
std::vector<ContourLevel> export_contours(const PseudospectrumField& f,
                                          const std::vector<double>& eps_levels);

/// Even-odd point-in-polygon test on a closed polyline.
bool encloses(const Polyline& p, double x, double y);

/// Header lambda1_re,lambda1_im,...,eta; one row per node in flat order.
void write_field_csv(std::ostream& os, const PseudospectrumField& f);

/// Self-contained python script reading `csv_path`; overlays the real secular
/// curves when the pencil is real with k = 3, l = 2, m = 2.
void write_plot_script(std::ostream& os, const PseudospectrumField& f,
                       const std::vector<double>& eps_levels, const std::string& csv_path,
                       const MultiParamPencil* pencil = nullptr);

}  // namespace mpspec

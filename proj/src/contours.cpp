#include "mpspec/contours.hpp"

#include "mpspec/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace mpspec {

Plane plane_view(const PseudospectrumField& f) {
    std::vector<int> swept;
    for (std::size_t i = 0; i < f.grid.axes.size(); ++i)
        if (f.grid.axes[i].swept()) swept.push_back(static_cast<int>(i));
    Plane p;
    const auto& axes = f.grid.axes;
    if (swept.size() == 1 && axes[static_cast<std::size_t>(swept[0])].kind == Axis::Kind::complex_box) {
        const Axis& a = axes[static_cast<std::size_t>(swept[0])];
        p.nx = a.n_re;
        p.ny = a.n_im;
        for (int i = 0; i < p.nx; ++i) p.xs.push_back(a.node(i).real());
        for (int i = 0; i < p.ny; ++i) p.ys.push_back(a.node(i * a.n_re).imag());
        p.v = f.values;
        const std::string n = std::to_string(swept[0] + 1);
        p.xlabel = "Re lambda" + n;
        p.ylabel = "Im lambda" + n;
        p.axis_x = p.axis_y = swept[0];
        return p;
    }
    if (swept.size() != 2 || axes[static_cast<std::size_t>(swept[0])].kind != Axis::Kind::real ||
        axes[static_cast<std::size_t>(swept[1])].kind != Axis::Kind::real)
        throw InputError("contours need a field with two real dimensions");
    const Axis& ax = axes[static_cast<std::size_t>(swept[0])];  // slow axis
    const Axis& ay = axes[static_cast<std::size_t>(swept[1])];  // fast axis
    p.nx = ax.n_re;
    p.ny = ay.n_re;
    for (int i = 0; i < p.nx; ++i) p.xs.push_back(ax.node(i).real());
    for (int i = 0; i < p.ny; ++i) p.ys.push_back(ay.node(i).real());
    p.v.resize(f.values.size());
    for (int ix = 0; ix < p.nx; ++ix)
        for (int iy = 0; iy < p.ny; ++iy)
            p.v[static_cast<std::size_t>(ix + p.nx * iy)] =
                f.values[static_cast<std::size_t>(ix * p.ny + iy)];
    p.xlabel = "lambda" + std::to_string(swept[0] + 1);
    p.ylabel = "lambda" + std::to_string(swept[1] + 1);
    p.axis_x = swept[0];
    p.axis_y = swept[1];
    return p;
}

namespace {

// Edge ids: horizontal edge from (ix, iy) to (ix+1, iy) is 2*(ix + nx*iy);
// vertical edge from (ix, iy) to (ix, iy+1) is 2*(ix + nx*iy) + 1.
struct Segment {
    long e0;
    long e1;
};

std::array<double, 2> edge_point(const Plane& p, long e, double level) {
    const long cell = e / 2;
    const int ix = static_cast<int>(cell % p.nx);
    const int iy = static_cast<int>(cell / p.nx);
    const int jx = (e % 2 == 0) ? ix + 1 : ix;
    const int jy = (e % 2 == 0) ? iy : iy + 1;
    const double a = p.at(ix, iy);
    const double b = p.at(jx, jy);
    double t = 0.5;
    if (a != b && std::isfinite(a) && std::isfinite(b)) t = (level - a) / (b - a);
    t = std::min(1.0, std::max(0.0, t));
    return {p.xs[static_cast<std::size_t>(ix)] + t * (p.xs[static_cast<std::size_t>(jx)] - p.xs[static_cast<std::size_t>(ix)]),
            p.ys[static_cast<std::size_t>(iy)] + t * (p.ys[static_cast<std::size_t>(jy)] - p.ys[static_cast<std::size_t>(iy)])};
}

std::vector<Segment> march(const Plane& p, double level) {
    std::vector<Segment> segs;
    auto id = [&](int ix, int iy) { return 2L * (ix + static_cast<long>(p.nx) * iy); };
    for (int iy = 0; iy + 1 < p.ny; ++iy) {
        for (int ix = 0; ix + 1 < p.nx; ++ix) {
            const double v0 = p.at(ix, iy);
            const double v1 = p.at(ix + 1, iy);
            const double v2 = p.at(ix + 1, iy + 1);
            const double v3 = p.at(ix, iy + 1);
            const int code = (v0 < level ? 1 : 0) | (v1 < level ? 2 : 0) | (v2 < level ? 4 : 0) |
                             (v3 < level ? 8 : 0);
            if (code == 0 || code == 15) continue;
            const long bottom = id(ix, iy);
            const long top = id(ix, iy + 1);
            const long left = id(ix, iy) + 1;
            const long right = id(ix + 1, iy) + 1;
            auto add = [&](long a, long b) { segs.push_back({a, b}); };
            switch (code) {
                case 1: case 14: add(left, bottom); break;
                case 2: case 13: add(bottom, right); break;
                case 3: case 12: add(left, right); break;
                case 4: case 11: add(right, top); break;
                case 6: case 9: add(bottom, top); break;
                case 7: case 8: add(left, top); break;
                case 5: case 10: {
                    const double centre = 0.25 * (v0 + v1 + v2 + v3);
                    const bool inside = centre < level;
                    if ((code == 5) == inside) {
                        add(left, top);
                        add(bottom, right);
                    } else {
                        add(left, bottom);
                        add(right, top);
                    }
                    break;
                }
                default: break;
            }
        }
    }
    return segs;
}

std::vector<Polyline> join(const Plane& p, const std::vector<Segment>& segs, double level) {
    std::multimap<long, std::size_t> by_edge;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        by_edge.emplace(segs[i].e0, i);
        by_edge.emplace(segs[i].e1, i);
    }
    std::vector<bool> used(segs.size(), false);
    auto next_from = [&](long edge) -> long {
        auto range = by_edge.equal_range(edge);
        for (auto it = range.first; it != range.second; ++it)
            if (!used[it->second]) return static_cast<long>(it->second);
        return -1;
    };
    std::vector<Polyline> out;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        if (used[s]) continue;
        used[s] = true;
        std::vector<long> chain{segs[s].e0, segs[s].e1};
        // extend forward, then backward
        for (int dir = 0; dir < 2; ++dir) {
            while (true) {
                const long tail = chain.back();
                const long n = next_from(tail);
                if (n < 0) break;
                used[static_cast<std::size_t>(n)] = true;
                const Segment& sg = segs[static_cast<std::size_t>(n)];
                chain.push_back(sg.e0 == tail ? sg.e1 : sg.e0);
            }
            std::reverse(chain.begin(), chain.end());
        }
        Polyline pl;
        pl.closed = chain.size() > 2 && chain.front() == chain.back();
        for (long e : chain) pl.points.push_back(edge_point(p, e, level));
        out.push_back(std::move(pl));
    }
    return out;
}

}  // namespace

std::vector<ContourLevel> export_contours(const PseudospectrumField& f,
                                          const std::vector<double>& eps_levels) {
    const Plane p = plane_view(f);
    std::vector<ContourLevel> out;
    for (double eps : eps_levels) {
        ContourLevel lv;
        lv.eps = eps;
        lv.lines = join(p, march(p, eps), eps);
        out.push_back(std::move(lv));
    }
    return out;
}

bool encloses(const Polyline& pl, double x, double y) {
    if (!pl.closed) return false;
    bool inside = false;
    const auto& v = pl.points;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        if ((v[i][1] > y) != (v[j][1] > y) &&
            x < (v[j][0] - v[i][0]) * (y - v[i][1]) / (v[j][1] - v[i][1]) + v[i][0])
            inside = !inside;
    }
    return inside;
}

void write_field_csv(std::ostream& os, const PseudospectrumField& f) {
    const std::size_t m = f.grid.axes.size();
    for (std::size_t j = 0; j < m; ++j)
        os << "lambda" << j + 1 << "_re,lambda" << j + 1 << "_im,";
    os << "eta\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const EigenTuple l = f.grid.node(i);
        for (std::size_t j = 0; j < m; ++j)
            os << l(static_cast<Eigen::Index>(j)).real() << ',' << l(static_cast<Eigen::Index>(j)).imag() << ',';
        os << f.values[i] << '\n';
    }
}

namespace {

std::string py_matrix(const CMatrix& a) {
    std::ostringstream os;
    os << std::setprecision(17) << "np.array([";
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        os << (r ? ", [" : "[");
        for (Eigen::Index c = 0; c < a.cols(); ++c) os << (c ? ", " : "") << a(r, c).real();
        os << "]";
    }
    os << "])";
    return os.str();
}

}  // namespace

void write_plot_script(std::ostream& os, const PseudospectrumField& f,
                       const std::vector<double>& eps_levels, const std::string& csv_path,
                       const MultiParamPencil* pencil) {
    const Plane p = plane_view(f);
    const bool complex_plane = p.axis_x == p.axis_y;
    os << "import numpy as np\nimport matplotlib.pyplot as plt\n\n";
    os << "data = np.genfromtxt(" << std::quoted(csv_path) << ", delimiter=',', names=True)\n";
    os << "nx, ny = " << p.nx << ", " << p.ny << "\n";
    if (complex_plane) {
        const std::string c = "lambda" + std::to_string(p.axis_x + 1);
        os << "X = data['" << c << "_re'].reshape(ny, nx)\n";
        os << "Y = data['" << c << "_im'].reshape(ny, nx)\n";
        os << "Z = data['eta'].reshape(ny, nx)\n";
    } else {
        os << "X = data['lambda" << p.axis_x + 1 << "_re'].reshape(nx, ny)\n";
        os << "Y = data['lambda" << p.axis_y + 1 << "_re'].reshape(nx, ny)\n";
        os << "Z = data['eta'].reshape(nx, ny)\n";
    }
    os << "levels = sorted([";
    for (std::size_t i = 0; i < eps_levels.size(); ++i) os << (i ? ", " : "") << eps_levels[i];
    os << "])\n\nfig, ax = plt.subplots(figsize=(6, 5))\n";
    os << "cs = ax.contour(X, Y, np.log10(np.maximum(Z, 1e-300)), levels=np.log10(levels), cmap='viridis')\n";
    os << "ax.clabel(cs, fmt=lambda v: f'1e{v:.0f}')\n";
    const bool secular = pencil && !complex_plane && pencil->is_real() && pencil->is_linear() &&
                         pencil->k() == 3 && pencil->l() == 2 && pencil->m() == 2;
    if (secular) {
        const auto c = linear_coefficients(*pencil);
        os << "\nA0 = " << py_matrix(c[0]) << "\nA1 = " << py_matrix(c[1]) << "\nA2 = "
           << py_matrix(c[2]) << "\n";
        os << "xs = np.linspace(X.min(), X.max(), 400)\nys = np.linspace(Y.min(), Y.max(), 400)\n";
        os << "GX, GY = np.meshgrid(xs, ys, indexing='ij')\n";
        os << "M = A0[None, None] + GX[..., None, None] * A1[None, None] + GY[..., None, None] * A2[None, None]\n";
        os << "for (i, j), col in zip([(0, 1), (0, 2), (1, 2)], ['tab:red', 'tab:blue', 'tab:green']):\n";
        os << "    chi = M[..., i, 0] * M[..., j, 1] - M[..., i, 1] * M[..., j, 0]\n";
        os << "    ax.contour(GX, GY, chi, levels=[0.0], colors=col, linewidths=0.8, linestyles='--')\n";
    }
    os << "\nax.set_xlabel(" << std::quoted(p.xlabel) << ")\nax.set_ylabel(" << std::quoted(p.ylabel)
       << ")\nax.set_title('pseudospectrum (" << to_string(f.model.mode) << " model)')\n";
    os << "fig.tight_layout()\nplt.show()\n";
}

}  // namespace mpspec

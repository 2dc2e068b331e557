#include "mpspec/sysid.hpp"

#include "mpspec/backward_error.hpp"
#include "mpspec/conditioning.hpp"
#include "mpspec/error.hpp"
#include "mpspec/solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mpspec {

void RealizationProblem::validate() const {
    if (n < 1) throw InputError("model order must be at least 1");
    if (N() <= 2 * n) throw InputError("need more than 2n data points");
    if (!y.allFinite()) throw InputError("data contain non-finite values");
}

RMatrix constraint_matrix(const RVector& alpha, int N) {
    const int n = static_cast<int>(alpha.size());
    if (N <= n) throw InputError("constraint matrix needs N > n");
    RMatrix t = RMatrix::Zero(N - n, N);
    for (int r = 0; r < N - n; ++r) {
        t(r, r + n) = 1.0;
        for (int i = 1; i <= n; ++i) t(r, r + n - i) = alpha(i - 1);
    }
    return t;
}

namespace {

// dT/dalpha_i (i one-based) applied to y_hat.
RVector dt_times(int n, int N, int i, const RVector& yh) {
    RVector out(N - n);
    for (int r = 0; r < N - n; ++r) out(r) = yh(r + n - i);
    return out;
}

// (dT/dalpha_i)^T v.
RVector dtt_times(int n, int N, int i, const RVector& v) {
    RVector out = RVector::Zero(N);
    for (int r = 0; r < N - n; ++r) out(r + n - i) = v(r);
    return out;
}

}  // namespace

KKTEval kkt_system(const RealizationProblem& p, const RVector& alpha, const RVector& y_hat,
                   const RVector& v) {
    const int n = p.n;
    const int N = p.N();
    if (alpha.size() != n || y_hat.size() != N || v.size() != N - n)
        throw InputError("KKT arguments have inconsistent sizes");
    const RMatrix t = constraint_matrix(alpha, N);
    const int dim = N + (N - n) + n;
    KKTEval e;
    e.residual.resize(dim);
    e.residual.head(N) = y_hat - p.y + t.transpose() * v;
    e.residual.segment(N, N - n) = t * y_hat;
    e.jacobian = RMatrix::Zero(dim, dim);
    e.jacobian.topLeftCorner(N, N).setIdentity();
    e.jacobian.block(0, N, N, N - n) = t.transpose();
    e.jacobian.block(N, 0, N - n, N) = t;
    for (int i = 1; i <= n; ++i) {
        const RVector dty = dt_times(n, N, i, y_hat);
        const RVector dtv = dtt_times(n, N, i, v);
        const int col = 2 * N - n + i - 1;
        e.residual(col) = v.dot(dty);
        e.jacobian.block(0, col, N, 1) = dtv;
        e.jacobian.block(col, 0, 1, N) = dtv.transpose();
        e.jacobian.block(N, col, N - n, 1) = dty;
        e.jacobian.block(col, N, 1, N - n) = dty.transpose();
    }
    return e;
}

const char* to_string(StationaryType t) {
    switch (t) {
        case StationaryType::minimum: return "minimum";
        case StationaryType::maximum: return "maximum";
        case StationaryType::saddle: return "saddle";
        case StationaryType::degenerate: return "degenerate";
    }
    return "?";
}

Classification classify(const RealizationProblem& p, const StationaryPoint& pt) {
    const int n = p.n;
    const int N = p.N();
    const RMatrix t = constraint_matrix(pt.alpha, N);
    const RMatrix tpinv = t.transpose() * (t * t.transpose()).ldlt().solve(RMatrix::Identity(N - n, N - n));
    RMatrix ga(N - n, n);
    RMatrix c(N, n);
    for (int i = 1; i <= n; ++i) {
        ga.col(i - 1) = dt_times(n, N, i, pt.y_hat);
        c.col(i - 1) = dtt_times(n, N, i, pt.v);
    }
    // null space of T, orthonormal
    Eigen::JacobiSVD<RMatrix> svd(t, Eigen::ComputeFullV);
    const RMatrix nf = svd.matrixV().rightCols(n);

    // tangent basis Z = [[I, 0], [-T^+ G_alpha, N_f]] in (alpha, y_hat)
    RMatrix z = RMatrix::Zero(n + N, 2 * n);
    z.topLeftCorner(n, n).setIdentity();
    z.bottomLeftCorner(N, n) = -tpinv * ga;
    z.bottomRightCorner(N, n) = nf;
    RMatrix h = RMatrix::Zero(n + N, n + N);
    h.topRightCorner(n, N) = c.transpose();
    h.bottomLeftCorner(N, n) = c;
    h.bottomRightCorner(N, N).setIdentity();
    const RMatrix r = z.transpose() * h * z;
    const RMatrix haa = r.topLeftCorner(n, n);
    const RMatrix haf = r.topRightCorner(n, n);
    const RMatrix hff = r.bottomRightCorner(n, n);
    RMatrix s = haa - haf * hff.ldlt().solve(haf.transpose());
    s = 0.5 * (s + s.transpose());
    // the cost is ||y_hat - y||^2, twice the Lagrangian objective
    s *= 2.0;

    Eigen::SelfAdjointEigenSolver<RMatrix> es(s);
    Classification out;
    out.eigenvalues = es.eigenvalues();
    const double scale = std::max(1.0, out.eigenvalues.cwiseAbs().maxCoeff());
    int pos = 0;
    int neg = 0;
    for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) {
        const double e = out.eigenvalues(i);
        if (std::abs(e) <= 1e-8 * scale) return out;  // degenerate
        (e > 0 ? pos : neg)++;
    }
    out.type = neg == 0 ? StationaryType::minimum
                        : (pos == 0 ? StationaryType::maximum : StationaryType::saddle);
    return out;
}

namespace {

struct NewtonResult {
    bool ok = false;
    RVector alpha, y_hat, v;
    double residual = 0.0;
};

NewtonResult newton(const RealizationProblem& p, const RVector& alpha0, int max_it) {
    const int n = p.n;
    const int N = p.N();
    NewtonResult r;
    RVector alpha = alpha0;
    const RMatrix t0 = constraint_matrix(alpha, N);
    RVector v = (t0 * t0.transpose()).ldlt().solve(t0 * p.y);
    RVector yh = p.y - t0.transpose() * v;
    const double tol = 1e-12 * (1.0 + p.y.norm());
    auto pack = [&](const RVector& a, const RVector& yy, const RVector& vv) {
        RVector z(2 * N);
        z << yy, vv, a;
        return z;
    };
    RVector z = pack(alpha, yh, v);
    auto unpack = [&](const RVector& zz) {
        yh = zz.head(N);
        v = zz.segment(N, N - n);
        alpha = zz.tail(n);
    };
    KKTEval e = kkt_system(p, alpha, yh, v);
    double fn = e.residual.norm();
    for (int it = 0; it < max_it && fn > tol; ++it) {
        Eigen::FullPivLU<RMatrix> lu(e.jacobian);
        RVector step = lu.solve(-e.residual);
        if (!step.allFinite()) return r;
        double s = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 40; ++ls, s *= 0.5) {
            const RVector trial = z + s * step;
            const RVector ta = trial.tail(n);
            const KKTEval te = kkt_system(p, ta, trial.head(N), trial.segment(N, N - n));
            const double tn = te.residual.norm();
            if (std::isfinite(tn) && tn < fn) {
                z = trial;
                unpack(z);
                e = te;
                fn = tn;
                moved = true;
                break;
            }
        }
        if (!moved) break;
        if (alpha.cwiseAbs().maxCoeff() > 1e6) return r;
    }
    r.ok = fn <= tol;
    r.alpha = alpha;
    r.y_hat = yh;
    r.v = v;
    r.residual = fn;
    return r;
}

}  // namespace

std::vector<StationaryPoint> find_stationary_points(const RealizationProblem& p,
                                                    const std::vector<double>& lo,
                                                    const std::vector<double>& hi,
                                                    const MultistartOptions& opts,
                                                    MultistartReport* report) {
    p.validate();
    const int n = p.n;
    if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n)
        throw InputError("box needs one interval per alpha");
    for (int i = 0; i < n; ++i)
        if (!(lo[static_cast<std::size_t>(i)] < hi[static_cast<std::size_t>(i)]) ||
            !std::isfinite(lo[static_cast<std::size_t>(i)]) || !std::isfinite(hi[static_cast<std::size_t>(i)]))
            throw InputError("box needs finite lo < hi");

    std::vector<RVector> starts;
    int g = std::max(opts.grid, 0);
    while (g > 1 && std::pow(static_cast<double>(g), n) > 1e5) --g;
    if (g >= 2) {
        std::vector<int> idx(static_cast<std::size_t>(n), 0);
        while (true) {
            RVector a(n);
            for (int i = 0; i < n; ++i) {
                const auto u = static_cast<std::size_t>(i);
                a(i) = lo[u] + (hi[u] - lo[u]) * idx[u] / (g - 1);
            }
            starts.push_back(a);
            int i = n - 1;
            while (i >= 0 && idx[static_cast<std::size_t>(i)] == g - 1) idx[static_cast<std::size_t>(i--)] = 0;
            if (i < 0) break;
            ++idx[static_cast<std::size_t>(i)];
        }
    }
    std::mt19937_64 rng(opts.seed);
    for (int r = 0; r < opts.random; ++r) {
        RVector a(n);
        for (int i = 0; i < n; ++i) {
            std::uniform_real_distribution<double> ud(lo[static_cast<std::size_t>(i)], hi[static_cast<std::size_t>(i)]);
            a(i) = ud(rng);
        }
        starts.push_back(a);
    }

    std::vector<NewtonResult> res(starts.size());
    const auto ns = static_cast<std::ptrdiff_t>(starts.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(opts.threads > 0 ? opts.threads : omp_get_max_threads())
#endif
    for (std::ptrdiff_t i = 0; i < ns; ++i)
        res[static_cast<std::size_t>(i)] = newton(p, starts[static_cast<std::size_t>(i)], opts.max_iterations);

    MultistartReport rep;
    rep.starts = static_cast<int>(starts.size());
    std::vector<StationaryPoint> out;
    for (const NewtonResult& r : res) {
        if (!r.ok) continue;
        ++rep.converged;
        bool inside = true;
        for (int i = 0; i < n; ++i)
            if (r.alpha(i) < lo[static_cast<std::size_t>(i)] || r.alpha(i) > hi[static_cast<std::size_t>(i)]) inside = false;
        if (!inside) {
            ++rep.outside;
            continue;
        }
        bool dup = false;
        for (const StationaryPoint& s : out)
            if ((s.alpha - r.alpha).norm() <= opts.dedup_tol) dup = true;
        if (dup) continue;
        StationaryPoint s;
        s.alpha = r.alpha;
        s.y_hat = r.y_hat;
        s.v = r.v;
        s.kkt_residual = r.residual;
        s.misfit_norm = (r.y_hat - p.y).norm();
        s.cost = s.misfit_norm * s.misfit_norm;
        const Classification c = classify(p, s);
        s.type = c.type;
        s.hessian_eigenvalues = c.eigenvalues;
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end(), [](const StationaryPoint& a, const StationaryPoint& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        for (Eigen::Index i = 0; i < a.alpha.size(); ++i)
            if (a.alpha(i) != b.alpha(i)) return a.alpha(i) < b.alpha(i);
        return false;
    });
    if (report) *report = rep;
    return out;
}

std::vector<ProbeRow> conditioning_probe(const MultiParamPencil& pencil,
                                         const PerturbationModel& model,
                                         const std::vector<RVector>& alphas) {
    std::vector<ProbeRow> rows;
    for (const RVector& a : alphas) {
        if (a.size() != pencil.m()) throw InputError("probe pencil must have m = model order");
        ProbeRow row;
        row.alpha = a;
        const EigenTuple l = a.cast<cplx>();
        row.eta = eigenvalue_backward_error(pencil, model, l);
        const RefineResult rr = refine(pencil, l);
        if (!rr.converged) {
            row.note = "refinement failed: " + rr.failure;
        } else if ((rr.pair.lambda - l).norm() > 1e-6 * (1.0 + l.norm())) {
            row.note = "alpha is not an eigenvalue of the pencil";
        } else {
            try {
                row.kappa = eigenvalue_condition(pencil, model, rr.pair).kappa;
                row.has_kappa = true;
            } catch (const NumericalRefusal& e) {
                row.note = e.what();
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace mpspec

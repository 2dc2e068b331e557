#include "mpspec/solver.hpp"

#include "mpspec/conditioning.hpp"
#include "mpspec/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <optional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mpspec {

namespace {

// Per-axis view of the flat grid: every swept real dimension, slow to fast.
struct Dims {
    std::vector<long> size;
    std::vector<long> stride;
};

Dims grid_dims(const GridSpec& g) {
    Dims d;
    for (const Axis& a : g.axes) {
        if (a.kind == Axis::Kind::real) d.size.push_back(a.n_re);
        if (a.kind == Axis::Kind::complex_box) {
            d.size.push_back(a.n_im);
            d.size.push_back(a.n_re);
        }
    }
    d.stride.assign(d.size.size(), 1);
    for (std::size_t i = d.size.size(); i-- > 1;) d.stride[i - 1] = d.stride[i] * d.size[i];
    return d;
}

}  // namespace

std::vector<EigenTuple> seed_candidates(const PseudospectrumField& field, int top) {
    const Dims d = grid_dims(field.grid);
    const std::size_t nd = d.size.size();
    const auto& v = field.values;
    std::vector<std::pair<double, std::size_t>> minima;
    std::vector<long> idx(nd);
    std::vector<int> off(nd);
    for (std::size_t flat = 0; flat < v.size(); ++flat) {
        long rem = static_cast<long>(flat);
        for (std::size_t i = 0; i < nd; ++i) {
            idx[i] = rem / d.stride[i];
            rem %= d.stride[i];
        }
        bool strict = true;
        bool any = false;
        std::fill(off.begin(), off.end(), -1);
        while (strict) {
            bool zero = true;
            bool inside = true;
            long nb = static_cast<long>(flat);
            for (std::size_t i = 0; i < nd; ++i) {
                if (off[i] != 0) zero = false;
                const long j = idx[i] + off[i];
                if (j < 0 || j >= d.size[i]) inside = false;
                nb += off[i] * d.stride[i];
            }
            if (!zero && inside) {
                any = true;
                if (!(v[flat] < v[static_cast<std::size_t>(nb)])) strict = false;
            }
            std::size_t i = 0;
            while (i < nd && off[i] == 1) off[i++] = -1;
            if (i == nd) break;
            ++off[i];
        }
        if (strict && any) minima.emplace_back(v[flat], flat);
    }
    std::stable_sort(minima.begin(), minima.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    if (top >= 0 && minima.size() > static_cast<std::size_t>(top))
        minima.resize(static_cast<std::size_t>(top));
    std::vector<EigenTuple> out;
    for (const auto& mnm : minima) out.push_back(field.grid.node(mnm.second));
    return out;
}

RefineResult refine_from(const MultiParamPencil& pencil, const EigenTuple& lambda0,
                         const CVector& x0, const CVector& c, int max_iterations) {
    const int k = pencil.k();
    const int l = pencil.l();
    const int m = pencil.m();
    RefineResult res;
    EigenTuple lambda = lambda0;
    CVector x = x0;
    const double tol = 1e-12 * (1.0 + pencil.coefficient_scale());
    for (int it = 0;; ++it) {
        const CMatrix mv = evaluate(pencil, lambda);
        CVector f(k + 1);
        f.head(k) = mv * x;
        f(k) = c.dot(x) - 1.0;
        const double fn = f.norm();
        res.residual_history.push_back(fn);
        res.iterates.push_back(lambda);
        if (!std::isfinite(fn)) {
            res.failure = "iteration diverged";
            break;
        }
        if (fn <= tol && (res.converged || it >= max_iterations)) break;
        if (fn <= tol) res.converged = true;  // one more step polishes the last digits
        if (!res.converged && it >= max_iterations) {
            res.failure = "no convergence in " + std::to_string(max_iterations) + " iterations";
            break;
        }
        CMatrix jac = CMatrix::Zero(k + 1, m + l);
        for (int j = 0; j < m; ++j) jac.block(0, j, k, 1) = partial_derivative(pencil, lambda, j + 1) * x;
        jac.block(0, m, k, l) = mv;
        jac.block(k, m, 1, l) = c.adjoint();
        Eigen::JacobiSVD<CMatrix> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const RVector& s = svd.singularValues();
        if (!(s(s.size() - 1) > 1e-14 * s(0))) {
            if (!res.converged) res.failure = "Jacobian is rank-deficient";
            break;
        }
        const CVector step = svd.solve(-f);
        if (res.converged) {
            // keep the polished iterate only if it is better
            const EigenTuple l2 = lambda + step.head(m);
            const CVector x2 = x + step.tail(l);
            CVector f2(k + 1);
            f2.head(k) = evaluate(pencil, l2) * x2;
            f2(k) = c.dot(x2) - 1.0;
            if (f2.norm() < fn) {
                lambda = l2;
                x = x2;
                res.residual_history.push_back(f2.norm());
                res.iterates.push_back(lambda);
            }
            break;
        }
        lambda += step.head(m);
        x += step.tail(l);
        ++res.iterations;
    }
    res.pair.lambda = lambda;
    res.pair.x = x.norm() > 0.0 ? CVector(x / x.norm()) : x;
    return res;
}

RefineResult refine(const MultiParamPencil& pencil, const EigenTuple& seed, int max_iterations) {
    const CVector c = min_right_singular_vector(evaluate(pencil, seed));
    return refine_from(pencil, seed, c, c, max_iterations);
}

bool tuple_less(const EigenTuple& a, const EigenTuple& b) {
    for (Eigen::Index i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
        if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
    }
    return a.size() < b.size();
}

bool verify_spectrum_secular(const MultiParamPencil& pencil, const EigenTuple& lambda, double tol) {
    for (const RowSelection& sel : enumerate_selections(pencil.k(), pencil.l()))
        if (!(std::abs(secular_value(pencil, sel, lambda)) <= tol * secular_scale(pencil, sel, lambda)))
            return false;
    return true;
}

bool verify_spectrum_sigma(const MultiParamPencil& pencil, const EigenTuple& lambda, double tol) {
    const CMatrix mv = evaluate(pencil, lambda);
    return sigma_min(mv) <= tol * spectral_norm(mv);
}

bool verify_spectrum(const MultiParamPencil& pencil, const EigenTuple& lambda, double tol) {
    const bool a = verify_spectrum_secular(pencil, lambda, tol);
    const bool b = verify_spectrum_sigma(pencil, lambda, tol);
    if (a != b) throw NumericalRefusal("secular and singular-value spectrum tests disagree");
    return a;
}

std::vector<Eigenpair> solve_all(const MultiParamPencil& pencil, const SearchBox& box,
                                 const SolveOptions& opts, SolveStats* stats) {
    const int m = pencil.m();
    if (static_cast<int>(box.lo.size()) != m || static_cast<int>(box.hi.size()) != m)
        throw InputError("box needs one interval per parameter");
    if (opts.resolution < 2) throw InputError("resolution must be at least 2");
    GridSpec grid;
    for (int j = 0; j < m; ++j) {
        const double lo = box.lo[static_cast<std::size_t>(j)];
        const double hi = box.hi[static_cast<std::size_t>(j)];
        if (!(lo < hi)) throw InputError("box needs lo < hi");
        if (box.complex) {
            const double h = 0.5 * (hi - lo);
            grid.axes.push_back(Axis::complex_box(lo, hi, -h, h, opts.resolution, opts.resolution));
        } else {
            grid.axes.push_back(Axis::real(lo, hi, opts.resolution));
        }
    }
    const PerturbationModel model = PerturbationModel::absolute(pencil);
    const PseudospectrumField f = field(pencil, model, grid, FieldMethod::naive, opts.threads);
    const std::vector<EigenTuple> seeds = seed_candidates(f, opts.top);

    std::vector<RefineResult> refined(seeds.size());
    const auto ns = static_cast<std::ptrdiff_t>(seeds.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(opts.threads > 0 ? opts.threads : omp_get_max_threads())
#endif
    for (std::ptrdiff_t i = 0; i < ns; ++i)
        refined[static_cast<std::size_t>(i)] = refine(pencil, seeds[static_cast<std::size_t>(i)]);

    SolveStats st;
    st.seeds = static_cast<int>(seeds.size());
    std::vector<Eigenpair> out;
    for (const RefineResult& r : refined) {
        if (!r.converged) continue;
        ++st.converged;
        const EigenTuple& l = r.pair.lambda;
        bool dup = false;
        for (const Eigenpair& e : out)
            if ((e.lambda - l).norm() <= opts.dedup_tol) dup = true;
        if (dup) {
            ++st.duplicates;
            continue;
        }
        bool inside = true;
        for (int j = 0; j < m; ++j) {
            const double lo = box.lo[static_cast<std::size_t>(j)];
            const double hi = box.hi[static_cast<std::size_t>(j)];
            const double slack = 1e-9 * (hi - lo);
            const cplx z = l(j);
            if (z.real() < lo - slack || z.real() > hi + slack) inside = false;
            const double h = box.complex ? 0.5 * (hi - lo) : 0.0;
            if (std::abs(z.imag()) > h + 1e-8 * (1.0 + std::abs(z))) inside = false;
        }
        if (!inside) {
            ++st.outside;
            continue;
        }
        if (!verify_spectrum_secular(pencil, l, opts.secular_tol)) {
            ++st.rejected_secular;
            continue;
        }
        try {
            eigenvalue_condition(pencil, model, r.pair, ConditionMode::absolute);
        } catch (const NumericalRefusal&) {
            ++st.rejected_simple;
            continue;
        }
        out.push_back(r.pair);
    }
    std::sort(out.begin(), out.end(),
              [](const Eigenpair& a, const Eigenpair& b) { return tuple_less(a.lambda, b.lambda); });
    if (stats) *stats = st;
    return out;
}

}  // namespace mpspec

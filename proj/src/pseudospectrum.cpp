#include "mpspec/pseudospectrum.hpp"

#include "mpspec/backward_error.hpp"
#include "mpspec/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mpspec {

Axis Axis::fixed(cplx v) {
    Axis a;
    a.kind = Kind::fixed;
    a.value = v;
    return a;
}

Axis Axis::real(double a, double b, int n) {
    Axis x;
    x.kind = Kind::real;
    x.a = a;
    x.b = b;
    x.n_re = n;
    return x;
}

Axis Axis::complex_box(double a, double b, double c, double d, int n_re, int n_im) {
    Axis x;
    x.kind = Kind::complex_box;
    x.a = a;
    x.b = b;
    x.c = c;
    x.d = d;
    x.n_re = n_re;
    x.n_im = n_im;
    return x;
}

int Axis::size() const {
    switch (kind) {
        case Kind::fixed: return 1;
        case Kind::real: return n_re;
        case Kind::complex_box: return n_re * n_im;
    }
    return 1;
}

namespace {

double linspace(double a, double b, int n, int i) {
    return a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

cplx Axis::node(int i) const {
    switch (kind) {
        case Kind::fixed: return value;
        case Kind::real: return cplx(linspace(a, b, n_re, i), 0.0);
        case Kind::complex_box:
            return cplx(linspace(a, b, n_re, i % n_re), linspace(c, d, n_im, i / n_re));
    }
    return value;
}

void GridSpec::validate(int m) const {
    if (static_cast<int>(axes.size()) != m)
        throw InputError("grid has " + std::to_string(axes.size()) + " axes, pencil has m = " +
                         std::to_string(m));
    bool any = false;
    for (const Axis& a : axes) {
        if (a.kind == Axis::Kind::fixed) {
            if (!std::isfinite(a.value.real()) || !std::isfinite(a.value.imag()))
                throw InputError("fixed axis value is not finite");
            continue;
        }
        any = true;
        if (!(a.a < a.b)) throw InputError("axis interval needs a < b");
        if (a.n_re < 2) throw InputError("swept axis needs at least 2 points");
        if (a.kind == Axis::Kind::complex_box) {
            if (!(a.c < a.d)) throw InputError("box needs c < d");
            if (a.n_im < 2) throw InputError("swept axis needs at least 2 points");
        }
    }
    if (!any) throw InputError("grid has no swept axis");
}

std::size_t GridSpec::size() const {
    std::size_t n = 1;
    for (const Axis& a : axes) n *= static_cast<std::size_t>(a.size());
    return n;
}

EigenTuple GridSpec::node(std::size_t flat) const {
    EigenTuple l(static_cast<Eigen::Index>(axes.size()));
    for (std::size_t r = axes.size(); r-- > 0;) {
        const auto n = static_cast<std::size_t>(axes[r].size());
        l(static_cast<Eigen::Index>(r)) = axes[r].node(static_cast<int>(flat % n));
        flat /= n;
    }
    return l;
}

int GridSpec::free_axis() const {
    for (std::size_t r = axes.size(); r-- > 0;)
        if (axes[r].swept()) return static_cast<int>(r);
    return -1;
}

const char* to_string(FieldMethod method) {
    switch (method) {
        case FieldMethod::naive: return "naive";
        case FieldMethod::slightly_tall: return "slightly_tall";
        case FieldMethod::very_tall: return "very_tall";
        case FieldMethod::automatic: return "auto";
    }
    return "?";
}

FieldMethod parse_field_method(const std::string& s) {
    if (s == "naive") return FieldMethod::naive;
    if (s == "slightly_tall") return FieldMethod::slightly_tall;
    if (s == "very_tall") return FieldMethod::very_tall;
    if (s == "auto") return FieldMethod::automatic;
    throw InputError("unknown method '" + s + "'");
}

namespace {

bool affine_in(const MultiParamPencil& pencil, int free) {
    for (const Term& t : pencil.terms()) {
        const int e = t.exponent[static_cast<std::size_t>(free)];
        if (e > 1) return false;
        if (e == 1)
            for (std::size_t j = 0; j < t.exponent.size(); ++j)
                if (static_cast<int>(j) != free && t.exponent[j] != 0) return false;
    }
    return true;
}

CMatrix free_coefficient(const MultiParamPencil& pencil, int free) {
    std::vector<int> e(static_cast<std::size_t>(pencil.m()), 0);
    e[static_cast<std::size_t>(free)] = 1;
    const int t = pencil.find_term(e);
    return t < 0 ? CMatrix::Zero(pencil.k(), pencil.l())
                 : pencil.terms()[static_cast<std::size_t>(t)].coeff;
}

CMatrix slice_constant(const MultiParamPencil& pencil, const EigenTuple& fixed, int free) {
    CMatrix s = CMatrix::Zero(pencil.k(), pencil.l());
    for (const Term& t : pencil.terms())
        if (t.exponent[static_cast<std::size_t>(free)] == 0) s += monomial(fixed, t.exponent) * t.coeff;
    return s;
}

void check_slice_args(const MultiParamPencil& pencil, const EigenTuple& fixed, int free) {
    if (fixed.size() != pencil.m()) throw InputError("slice point has the wrong length");
    if (free < 0 || free >= pencil.m()) throw InputError("free parameter out of range");
    if (!affine_in(pencil, free))
        throw InputError("pencil is not affine in the free parameter with a constant coefficient");
}

double eta_of(double sigma, double g) {
    if (sigma == 0.0) return 0.0;
    if (g == 0.0) return std::numeric_limits<double>::infinity();
    return sigma / g;
}

double naive_node(const MultiParamPencil& pencil, const PerturbationModel& model,
                  const EigenTuple& l, Telemetry& tel) {
    const double s = sigma_min(evaluate(pencil, l));
    tel.points += 1;
    tel.dense_svds += 1;
    tel.flops_dense += dense_svd_flops(pencil.k(), pencil.l());
    return eta_of(s, gamma(pencil, model, l));
}

struct SweepPlan {
    FieldMethod method;
    int free = -1;
    std::size_t per_slice = 1;
    std::size_t slices = 1;
};

SweepPlan plan(const MultiParamPencil& pencil, const GridSpec& grid, FieldMethod requested) {
    grid.validate(pencil.m());
    SweepPlan p;
    p.method = resolve_method(pencil, grid, requested);
    p.free = grid.free_axis();
    p.per_slice = static_cast<std::size_t>(grid.axes[static_cast<std::size_t>(p.free)].size());
    p.slices = grid.size() / p.per_slice;
    return p;
}

SlicePreparation prepare(const MultiParamPencil& pencil, const SweepPlan& p, Telemetry* tel) {
    const CMatrix af = free_coefficient(pencil, p.free);
    return p.method == FieldMethod::very_tall ? prepare_very_tall(af, tel)
                                              : prepare_slightly_tall(af, tel);
}

PseudospectrumField make_field(const GridSpec& grid, const PerturbationModel& model,
                               const SweepPlan& p) {
    PseudospectrumField f;
    f.grid = grid;
    f.model = model;
    f.method = p.method;
    f.values.assign(grid.size(), 0.0);
    f.slices = static_cast<int>(p.slices);
    return f;
}

}  // namespace

FieldMethod resolve_method(const MultiParamPencil& pencil, const GridSpec& grid,
                           FieldMethod requested) {
    const int k = pencil.k();
    const int l = pencil.l();
    const int free = grid.free_axis();
    const bool affine = free >= 0 && affine_in(pencil, free);
    switch (requested) {
        case FieldMethod::naive: return FieldMethod::naive;
        case FieldMethod::slightly_tall:
            if (!affine) throw InputError("slightly_tall needs a pencil affine in the free parameter");
            if (k < l || k >= 2 * l) throw InputError("slightly_tall needs l <= k < 2l");
            return requested;
        case FieldMethod::very_tall:
            if (!affine) throw InputError("very_tall needs a pencil affine in the free parameter");
            if (k < 2 * l) throw InputError("very_tall needs k >= 2l");
            return requested;
        case FieldMethod::automatic:
            if ((k <= 64 && l <= 64) || !affine || k < l) return FieldMethod::naive;
            return k >= 2 * l ? FieldMethod::very_tall : FieldMethod::slightly_tall;
    }
    return FieldMethod::naive;
}

PseudospectrumField field(const MultiParamPencil& pencil, const PerturbationModel& model,
                          const GridSpec& grid, FieldMethod method, int threads) {
    const SweepPlan p = plan(pencil, grid, method);
    PseudospectrumField f = make_field(grid, model, p);
#ifdef _OPENMP
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#else
    const int nt = 1;
    (void)threads;
#endif
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
    Telemetry total;

    if (p.method == FieldMethod::naive) {
#pragma omp parallel num_threads(nt)
        {
            Telemetry local;
#pragma omp for schedule(static)
            for (std::ptrdiff_t i = 0; i < n; ++i)
                f.values[static_cast<std::size_t>(i)] =
                    naive_node(pencil, model, grid.node(static_cast<std::size_t>(i)), local);
#pragma omp critical
            total += local;
        }
        f.telemetry = total;
        return f;
    }

    const SlicePreparation prep = prepare(pencil, p, &total);
    std::vector<ReducedSlicePencil> reduced(p.slices);
    const auto ns = static_cast<std::ptrdiff_t>(p.slices);
#pragma omp parallel num_threads(nt)
    {
        Telemetry local;
#pragma omp for schedule(static)
        for (std::ptrdiff_t s = 0; s < ns; ++s) {
            const EigenTuple l = grid.node(static_cast<std::size_t>(s) * p.per_slice);
            reduced[static_cast<std::size_t>(s)] =
                reduce_slice(prep, slice_constant(pencil, l, p.free), &local);
        }
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const auto u = static_cast<std::size_t>(i);
            const EigenTuple l = grid.node(u);
            const double s = sigma_min_point(reduced[u / p.per_slice], l(p.free), &local);
            f.values[u] = eta_of(s, gamma(pencil, model, l));
        }
#pragma omp critical
        total += local;
    }
    f.telemetry = total;
    return f;
}

PseudospectrumField field_serial(const MultiParamPencil& pencil, const PerturbationModel& model,
                                 const GridSpec& grid, FieldMethod method) {
    const SweepPlan p = plan(pencil, grid, method);
    PseudospectrumField f = make_field(grid, model, p);
    Telemetry tel;
    if (p.method == FieldMethod::naive) {
        for (std::size_t i = 0; i < grid.size(); ++i)
            f.values[i] = naive_node(pencil, model, grid.node(i), tel);
        f.telemetry = tel;
        return f;
    }
    const SlicePreparation prep = prepare(pencil, p, &tel);
    for (std::size_t s = 0; s < p.slices; ++s) {
        const EigenTuple first = grid.node(s * p.per_slice);
        const ReducedSlicePencil red = reduce_slice(prep, slice_constant(pencil, first, p.free), &tel);
        for (std::size_t j = 0; j < p.per_slice; ++j) {
            const std::size_t u = s * p.per_slice + j;
            const EigenTuple l = grid.node(u);
            f.values[u] = eta_of(sigma_min_point(red, l(p.free), &tel), gamma(pencil, model, l));
        }
    }
    f.telemetry = tel;
    return f;
}

ReducedSlicePencil preprocess_very_tall(const MultiParamPencil& pencil, const EigenTuple& fixed,
                                        int free, Telemetry* tel) {
    check_slice_args(pencil, fixed, free);
    const SlicePreparation prep = prepare_very_tall(free_coefficient(pencil, free), tel);
    return reduce_slice(prep, slice_constant(pencil, fixed, free), tel);
}

ReducedSlicePencil preprocess_slightly_tall(const MultiParamPencil& pencil,
                                            const EigenTuple& fixed, int free, Telemetry* tel) {
    check_slice_args(pencil, fixed, free);
    const SlicePreparation prep = prepare_slightly_tall(free_coefficient(pencil, free), tel);
    return reduce_slice(prep, slice_constant(pencil, fixed, free), tel);
}

bool membership(const MultiParamPencil& pencil, const PerturbationModel& model,
                const EigenTuple& lambda, double eps) {
    if (eps < 0.0) throw InputError("eps must be nonnegative");
    return eigenvalue_backward_error(pencil, model, lambda) <= eps;
}

MembershipTests membership_tests(const MultiParamPencil& pencil, const PerturbationModel& model,
                                 const EigenTuple& lambda, double eps) {
    if (eps < 0.0) throw InputError("eps must be nonnegative");
    MembershipTests out;
    const CMatrix mv = evaluate(pencil, lambda);
    const double g = gamma(pencil, model, lambda);
    const double s = sigma_min(mv);
    out.sigma = s <= eps * g;

    // pseudoinverse norm; a rank-deficient M(lambda) has an unbounded one
    Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(mv);
    cod.setThreshold(std::numeric_limits<double>::min());
    double pinv_norm = std::numeric_limits<double>::infinity();
    if (cod.rank() == pencil.l()) pinv_norm = spectral_norm(cod.pseudoInverse());
    out.pinv = pinv_norm >= 1.0 / (eps * g);

    // witness: the rank-one perturbation built on the minimizing vector
    const Eigenpair pair{lambda, min_right_singular_vector(mv)};
    if (g == 0.0) {
        out.witness = residual(pencil, pair).norm() == 0.0;
        return out;
    }
    const std::vector<CMatrix> deltas = attaining_perturbations(pencil, model, pair);
    bool admissible = true;
    for (std::size_t t = 0; t < deltas.size(); ++t)
        if (spectral_norm(deltas[t]) > eps * model.weights[t]) admissible = false;
    const MultiParamPencil pp = perturbed(pencil, deltas);
    const double scale = pp.coefficient_scale() * (1.0 + lambda.cwiseAbs().maxCoeff());
    const bool exact = residual(pp, pair).norm() <= 1e-12 * scale;
    out.witness = admissible && exact;
    return out;
}

SubmatrixReport submatrix_bound_check(const MultiParamPencil& pencil,
                                      const PerturbationModel& model, const EigenTuple& lambda,
                                      double eps) {
    const CMatrix mv = evaluate(pencil, lambda);
    const double g = gamma(pencil, model, lambda);
    SubmatrixReport rep;
    rep.sigma = sigma_min(mv);
    rep.in_pseudospectrum = rep.sigma <= eps * g;
    rep.in_all_selections = true;
    const double tol = 1e-12 * std::max(1.0, spectral_norm(mv));
    for (const RowSelection& sel : enumerate_selections(pencil.k(), pencil.l())) {
        const double s = sigma_min(select_rows(mv, sel));
        rep.sub_sigma.push_back(s);
        const double excess = s - rep.sigma;
        if (excess > tol) {
            ++rep.violations;
            rep.worst_excess = std::max(rep.worst_excess, excess);
        }
        if (!(s <= eps * g)) rep.in_all_selections = false;
    }
    return rep;
}

std::optional<EigenTuple> find_converse_counterexample(const MultiParamPencil& pencil,
                                                       const PerturbationModel& model,
                                                       const GridSpec& grid, double eps) {
    grid.validate(pencil.m());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const EigenTuple l = grid.node(i);
        const SubmatrixReport r = submatrix_bound_check(pencil, model, l, eps);
        if (r.in_all_selections && !r.in_pseudospectrum) return l;
    }
    return std::nullopt;
}

CMatrix delta0(const std::vector<std::vector<CMatrix>>& v) {
    const std::size_t m = v.size();
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    CMatrix sum;
    do {
        int inversions = 0;
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a + 1; b < m; ++b)
                if (perm[a] > perm[b]) ++inversions;
        CMatrix prod = v[0][static_cast<std::size_t>(perm[0])];
        for (std::size_t i = 1; i < m; ++i) {
            const CMatrix& f = v[i][static_cast<std::size_t>(perm[i])];
            CMatrix kron(prod.rows() * f.rows(), prod.cols() * f.cols());
            for (Eigen::Index r = 0; r < prod.rows(); ++r)
                for (Eigen::Index c = 0; c < prod.cols(); ++c)
                    kron.block(r * f.rows(), c * f.cols(), f.rows(), f.cols()) = prod(r, c) * f;
            prod = std::move(kron);
        }
        if (inversions % 2) prod = -prod;
        if (sum.size() == 0) sum = prod;
        else sum += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return sum;
}

namespace {

bool hermitian(const CMatrix& a) {
    const double n = a.cwiseAbs().maxCoeff();
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(n, 1e-300);
}

}  // namespace

DefinitenessResult right_definiteness(const MultiParamPencil& pencil, double tol) {
    const int m = pencil.m();
    const int l = pencil.l();
    if (std::pow(static_cast<double>(l), m) > 1e4)
        throw InputError("Kronecker operator too large (l^m > 1e4)");
    DefinitenessResult out;
    if (!pencil.is_linear()) return out;
    const std::vector<CMatrix> coeff = linear_coefficients(pencil);
    const auto sels = enumerate_selections(pencil.k(), l);
    const int nsel = static_cast<int>(sels.size());
    if (nsel < m) return out;

    std::vector<int> pick(static_cast<std::size_t>(m));
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
        ++out.subsets_tried;
        std::vector<std::vector<CMatrix>> v(static_cast<std::size_t>(m));
        bool herm = true;
        for (int i = 0; i < m && herm; ++i) {
            const RowSelection& sel = sels[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
            for (int j = 0; j <= m; ++j) {
                CMatrix vij = select_rows(coeff[static_cast<std::size_t>(j)], sel);
                if (!hermitian(vij)) herm = false;
                if (j > 0) v[static_cast<std::size_t>(i)].push_back(std::move(vij));
            }
        }
        if (herm) {
            CMatrix d = delta0(v);
            d = (0.5 * (d + d.adjoint())).eval();
            Eigen::SelfAdjointEigenSolver<CMatrix> es(d, Eigen::EigenvaluesOnly);
            const RVector ev = es.eigenvalues();
            const double norm = ev.cwiseAbs().maxCoeff();
            double margin = -1.0;
            bool flipped = false;
            if (norm > 0.0) {
                const double pos = ev.minCoeff() / norm;
                const double neg = -ev.maxCoeff() / norm;
                margin = std::max(pos, neg);
                flipped = neg > pos;
            }
            if (margin > out.best_margin) {
                out.best_margin = margin;
                out.best_selections = pick;
            }
            if (margin > tol) {
                out.certified = true;
                out.selections = pick;
                out.sign_flipped = flipped;
                out.margin = margin;
                out.delta0_spectrum.assign(ev.data(), ev.data() + ev.size());
                return out;
            }
        }
        // next combination
        int i = m - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == nsel - m + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < m; ++j)
            pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

}  // namespace mpspec

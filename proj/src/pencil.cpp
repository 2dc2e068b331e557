#include "mpspec/pencil.hpp"

#include "mpspec/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>

namespace mpspec {

namespace {

void check_tuple(const MultiParamPencil& pencil, const EigenTuple& lambda) {
    if (lambda.size() != pencil.m())
        throw InputError("parameter tuple has length " + std::to_string(lambda.size()) +
                         ", pencil has m = " + std::to_string(pencil.m()));
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        if (!std::isfinite(lambda(i).real()) || !std::isfinite(lambda(i).imag()))
            throw InputError("parameter tuple has a non-finite entry");
}

}  // namespace

MultiParamPencil::MultiParamPencil(int k, int l, int m, std::vector<Term> terms)
    : k_(k), l_(l), m_(m), terms_(std::move(terms)) {
    if (k <= 0 || l <= 0 || m <= 0) throw InputError("pencil dimensions must be positive");
    if (terms_.empty()) throw InputError("pencil needs at least one term");
    std::set<std::vector<int>> seen;
    for (const Term& t : terms_) {
        if (t.coeff.rows() != k || t.coeff.cols() != l)
            throw InputError("coefficient matrix is " + std::to_string(t.coeff.rows()) + "x" +
                             std::to_string(t.coeff.cols()) + ", expected " +
                             std::to_string(k) + "x" + std::to_string(l));
        if (static_cast<int>(t.exponent.size()) != m)
            throw InputError("exponent length differs from m");
        for (int e : t.exponent)
            if (e < 0) throw InputError("negative exponent");
        if (!seen.insert(t.exponent).second) throw InputError("duplicate exponent in pencil");
    }
}

MultiParamPencil MultiParamPencil::linear(const std::vector<CMatrix>& coefficients) {
    if (coefficients.size() < 2) throw InputError("linear pencil needs A_0 and at least A_1");
    const int m = static_cast<int>(coefficients.size()) - 1;
    std::vector<Term> terms;
    for (int i = 0; i <= m; ++i) {
        std::vector<int> e(m, 0);
        if (i > 0) e[i - 1] = 1;
        terms.push_back({std::move(e), coefficients[i]});
    }
    return MultiParamPencil(static_cast<int>(coefficients[0].rows()),
                            static_cast<int>(coefficients[0].cols()), m, std::move(terms));
}

bool MultiParamPencil::is_linear() const {
    for (const Term& t : terms_) {
        int total = 0;
        for (int e : t.exponent) {
            if (e > 1) return false;
            total += e;
        }
        if (total > 1) return false;
    }
    return true;
}

bool MultiParamPencil::is_real() const {
    for (const Term& t : terms_)
        if (t.coeff.imag().cwiseAbs().maxCoeff() != 0.0) return false;
    return true;
}

int MultiParamPencil::find_term(const std::vector<int>& exponent) const {
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].exponent == exponent) return static_cast<int>(i);
    return -1;
}

double MultiParamPencil::coefficient_scale() const {
    double s = 0.0;
    for (const Term& t : terms_) s += spectral_norm(t.coeff);
    return s;
}

std::vector<CMatrix> linear_coefficients(const MultiParamPencil& pencil) {
    if (!pencil.is_linear()) throw InputError("pencil is not linear");
    std::vector<CMatrix> out(static_cast<std::size_t>(pencil.m()) + 1,
                             CMatrix::Zero(pencil.k(), pencil.l()));
    for (const Term& t : pencil.terms()) {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < t.exponent.size(); ++j)
            if (t.exponent[j] == 1) idx = j + 1;
        out[idx] = t.coeff;
    }
    return out;
}

cplx monomial(const EigenTuple& lambda, const std::vector<int>& exponent) {
    cplx v = 1.0;
    for (std::size_t j = 0; j < exponent.size(); ++j)
        for (int p = 0; p < exponent[j]; ++p) v *= lambda(static_cast<Eigen::Index>(j));
    return v;
}

cplx monomial_derivative(const EigenTuple& lambda, const std::vector<int>& exponent, int j) {
    if (exponent[j] == 0) return 0.0;
    cplx v = static_cast<double>(exponent[j]);
    for (std::size_t i = 0; i < exponent.size(); ++i) {
        const int p = (static_cast<int>(i) == j) ? exponent[i] - 1 : exponent[i];
        for (int q = 0; q < p; ++q) v *= lambda(static_cast<Eigen::Index>(i));
    }
    return v;
}

CMatrix evaluate(const MultiParamPencil& pencil, const EigenTuple& lambda) {
    check_tuple(pencil, lambda);
    CMatrix out = CMatrix::Zero(pencil.k(), pencil.l());
    for (const Term& t : pencil.terms()) out += monomial(lambda, t.exponent) * t.coeff;
    return out;
}

CMatrix partial_derivative(const MultiParamPencil& pencil, const EigenTuple& lambda, int j) {
    check_tuple(pencil, lambda);
    if (j < 1 || j > pencil.m())
        throw InputError("parameter index " + std::to_string(j) + " out of range 1.." +
                         std::to_string(pencil.m()));
    CMatrix out = CMatrix::Zero(pencil.k(), pencil.l());
    for (const Term& t : pencil.terms()) {
        const cplx d = monomial_derivative(lambda, t.exponent, j - 1);
        if (d != 0.0) out += d * t.coeff;
    }
    return out;
}

PerturbationModel PerturbationModel::absolute(const MultiParamPencil& pencil) {
    return {Mode::absolute, std::vector<double>(pencil.terms().size(), 1.0)};
}

PerturbationModel PerturbationModel::relative(const MultiParamPencil& pencil) {
    PerturbationModel model{Mode::relative, {}};
    for (const Term& t : pencil.terms()) model.weights.push_back(spectral_norm(t.coeff));
    return model;
}

PerturbationModel PerturbationModel::custom(const MultiParamPencil& pencil,
                                            std::vector<double> weights) {
    if (weights.size() != pencil.terms().size())
        throw InputError("custom weights: expected " + std::to_string(pencil.terms().size()) +
                         " values, got " + std::to_string(weights.size()));
    for (double w : weights)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw InputError("custom weights must be finite and nonnegative");
    return {Mode::custom, std::move(weights)};
}

const char* to_string(PerturbationModel::Mode mode) {
    switch (mode) {
        case PerturbationModel::Mode::absolute: return "absolute";
        case PerturbationModel::Mode::relative: return "relative";
        case PerturbationModel::Mode::custom: return "custom";
    }
    return "?";
}

double gamma(const MultiParamPencil& pencil, const PerturbationModel& model,
             const EigenTuple& lambda) {
    check_tuple(pencil, lambda);
    if (model.weights.size() != pencil.terms().size())
        throw InputError("perturbation model does not match the pencil's term count");
    double g = 0.0;
    for (std::size_t t = 0; t < pencil.terms().size(); ++t)
        g += std::abs(monomial(lambda, pencil.terms()[t].exponent)) * model.weights[t];
    return g;
}

CVector residual(const MultiParamPencil& pencil, const Eigenpair& pair) {
    if (pair.x.size() != pencil.l()) throw InputError("eigenvector length differs from l");
    return evaluate(pencil, pair.lambda) * pair.x;
}

std::vector<RowSelection> enumerate_selections(int k, int l) {
    if (l > k || l <= 0) throw InputError("cannot select l rows out of k < l");
    std::vector<RowSelection> out;
    std::vector<int> idx(l);
    for (int i = 0; i < l; ++i) idx[i] = i;
    while (true) {
        out.push_back({idx});
        int i = l - 1;
        while (i >= 0 && idx[i] == k - l + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < l; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

CMatrix select_rows(const CMatrix& a, const RowSelection& sel) {
    CMatrix out(static_cast<Eigen::Index>(sel.rows.size()), a.cols());
    for (std::size_t i = 0; i < sel.rows.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = a.row(sel.rows[i]);
    return out;
}

cplx secular_value(const MultiParamPencil& pencil, const RowSelection& sel,
                   const EigenTuple& lambda) {
    const CMatrix c = select_rows(evaluate(pencil, lambda), sel);
    if (c.rows() != c.cols()) throw InputError("row selection does not give a square matrix");
    return c.determinant();
}

CVector secular_gradient(const MultiParamPencil& pencil, const RowSelection& sel,
                         const EigenTuple& lambda) {
    const CMatrix c = select_rows(evaluate(pencil, lambda), sel);
    if (c.rows() != c.cols()) throw InputError("row selection does not give a square matrix");
    const CMatrix adj = adjugate(c);
    CVector g(pencil.m());
    for (int j = 1; j <= pencil.m(); ++j)
        g(j - 1) = (adj * select_rows(partial_derivative(pencil, lambda, j), sel)).trace();
    return g;
}

double secular_scale(const MultiParamPencil& pencil, const RowSelection& sel,
                     const EigenTuple& lambda) {
    const CMatrix c = select_rows(evaluate(pencil, lambda), sel);
    double s = 1.0;
    for (Eigen::Index i = 0; i < c.rows(); ++i) s *= c.row(i).norm();
    return s;
}

NullSpaceBasis left_nullspace(const CMatrix& matrix, double tol) {
    if (tol < 0.0) tol = default_rank_tol(matrix.rows(), matrix.cols());
    // left null space of M = orthogonal complement of its column space
    return {orthogonal_complement(matrix, tol), tol};
}

int normal_rank(const MultiParamPencil& pencil, int trials, double tol, std::uint64_t seed) {
    if (trials < 1) throw InputError("normal_rank needs at least one trial");
    if (tol < 0.0) tol = default_rank_tol(pencil.k(), pencil.l());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int best = 0;
    for (int t = 0; t < trials; ++t) {
        EigenTuple lambda(pencil.m());
        for (int j = 0; j < pencil.m(); ++j)
            lambda(j) = std::polar(std::sqrt(unit(rng)), 2.0 * std::numbers::pi * unit(rng));
        best = std::max(best, numerical_rank(evaluate(pencil, lambda), tol));
    }
    return best;
}

}  // namespace mpspec

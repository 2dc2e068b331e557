#include "mpspec/backward_error.hpp"

#include "mpspec/error.hpp"

#include <limits>

namespace mpspec {

double eigenpair_backward_error(const MultiParamPencil& pencil, const PerturbationModel& model,
                                const Eigenpair& pair) {
    const double xn = pair.x.norm();
    if (xn == 0.0) throw InputError("eigenvector approximation is zero");
    const double rn = residual(pencil, pair).norm();
    if (rn == 0.0) return 0.0;
    const double g = gamma(pencil, model, pair.lambda);
    if (g == 0.0) return std::numeric_limits<double>::infinity();
    return rn / (g * xn);
}

double eigenvalue_backward_error(const MultiParamPencil& pencil, const PerturbationModel& model,
                                 const EigenTuple& lambda) {
    const double s = sigma_min(evaluate(pencil, lambda));
    if (s == 0.0) return 0.0;
    const double g = gamma(pencil, model, lambda);
    if (g == 0.0) return std::numeric_limits<double>::infinity();
    return s / g;
}

std::vector<CMatrix> attaining_perturbations(const MultiParamPencil& pencil,
                                             const PerturbationModel& model,
                                             const Eigenpair& pair) {
    const double xn = pair.x.norm();
    if (xn == 0.0) throw InputError("eigenvector approximation is zero");
    const double g = gamma(pencil, model, pair.lambda);
    if (g == 0.0) throw InputError("gamma = 0: the model forbids every perturbation");
    const CVector r = residual(pencil, pair);
    // w is the l2 dual of x: w^H x = 1, ||w|| = 1/||x||
    const CVector w = pair.x / (xn * xn);
    const CMatrix rank_one = r * w.adjoint();
    std::vector<CMatrix> deltas;
    deltas.reserve(pencil.terms().size());
    for (std::size_t t = 0; t < pencil.terms().size(); ++t) {
        const cplx s = complex_sign(monomial(pair.lambda, pencil.terms()[t].exponent));
        deltas.push_back(-s * (model.weights[t] / g) * rank_one);
    }
    return deltas;
}

MultiParamPencil perturbed(const MultiParamPencil& pencil, const std::vector<CMatrix>& deltas) {
    if (deltas.size() != pencil.terms().size())
        throw InputError("one perturbation per pencil term is required");
    std::vector<Term> terms = pencil.terms();
    for (std::size_t t = 0; t < terms.size(); ++t) terms[t].coeff += deltas[t];
    return MultiParamPencil(pencil.k(), pencil.l(), pencil.m(), std::move(terms));
}

}  // namespace mpspec

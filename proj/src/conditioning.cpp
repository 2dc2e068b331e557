#include "mpspec/conditioning.hpp"

#include "mpspec/backward_error.hpp"
#include "mpspec/error.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace mpspec {

const char* to_string(ConditionMode mode) {
    return mode == ConditionMode::relative ? "relative" : "absolute";
}

CMatrix auxiliary_matrix(const MultiParamPencil& pencil, const Eigenpair& pair, const CMatrix& y) {
    const int m = pencil.m();
    if (y.rows() != pencil.k()) throw InputError("left basis has the wrong row count");
    CMatrix b(y.cols(), m);
    for (int j = 0; j < m; ++j) b.col(j) = y.adjoint() * (partial_derivative(pencil, pair.lambda, j + 1) * pair.x);
    return b;
}

CMatrix auxiliary_matrix(const MultiParamPencil& pencil, const Eigenpair& pair,
                         const NullSpaceBasis& y) {
    return auxiliary_matrix(pencil, pair, y.basis);
}

ConditionReport eigenvalue_condition(const MultiParamPencil& pencil,
                                     const PerturbationModel& model, const Eigenpair& pair,
                                     ConditionMode mode, const SimplicityCheck& check) {
    const CMatrix mv = evaluate(pencil, pair.lambda);
    Eigenpair p = pair;
    if (p.x.size() == 0) p.x = min_right_singular_vector(mv);
    if (p.x.size() != pencil.l()) throw InputError("eigenvector has the wrong length");
    if (p.x.norm() == 0.0) throw InputError("eigenvector approximation is zero");
    p.x /= p.x.norm();

    const double eta = eigenpair_backward_error(pencil, model, p);
    if (!(eta <= check.max_backward_error))
        throw NumericalRefusal("not an eigenpair: backward error " + std::to_string(eta));

    ConditionReport rep;
    const NullSpaceBasis y = left_nullspace(mv, check.null_tol);
    rep.left_null_dim = y.dim();
    if (y.dim() != pencil.m())
        throw NumericalRefusal("eigenvalue is not simple: left null space has dimension " +
                               std::to_string(y.dim()) + ", expected " +
                               std::to_string(pencil.m()));
    const CMatrix b = auxiliary_matrix(pencil, p, y);
    const RVector s = singular_values(b);
    const double smin = s(s.size() - 1);
    rep.b_condition = smin > 0.0 ? s(0) / smin : INFINITY;
    if (!(rep.b_condition <= check.max_b_condition))
        throw NumericalRefusal("eigenvalue is not simple: B is singular (cond " +
                               std::to_string(rep.b_condition) + ")");
    rep.b_inverse_norm = 1.0 / smin;
    rep.gamma_star = gamma(pencil, model, p.lambda);
    rep.mode = mode;
    const double ln = p.lambda.norm();
    if (mode == ConditionMode::relative && ln == 0.0) {
        rep.mode = ConditionMode::absolute;
        rep.switched_to_absolute = true;
    }
    rep.kappa = rep.b_inverse_norm * rep.gamma_star;
    if (rep.mode == ConditionMode::relative) rep.kappa /= ln;
    return rep;
}

double eigenvector_condition(const MultiParamPencil& pencil, const PerturbationModel& model,
                             const Eigenpair& pair, const std::optional<CVector>& g) {
    const int l = pencil.l();
    const int m = pencil.m();
    if (pair.x.size() != l) throw InputError("eigenvector has the wrong length");
    if (pair.x.norm() == 0.0) throw InputError("eigenvector approximation is zero");
    if (l == 1) return 0.0;
    const CVector x = pair.x / pair.x.norm();
    CVector gv = g ? *g : x;
    if (gv.size() != l) throw InputError("normalization vector has the wrong length");
    const cplx gx = gv.dot(x);
    if (std::abs(gx) <= 1e-14 * gv.norm()) throw NumericalRefusal("normalization vector is orthogonal to x");
    gv /= std::conj(gx);  // now g^H x = 1

    const Eigenpair p{pair.lambda, x};
    CMatrix dx(pencil.k(), m);
    for (int j = 0; j < m; ++j) dx.col(j) = partial_derivative(pencil, pair.lambda, j + 1) * x;
    const CMatrix v = orthogonal_complement(gv, 1e-12);
    const CMatrix w = orthogonal_complement(dx, 1e-10);
    if (w.cols() != v.cols())
        throw NumericalRefusal("derivative directions are linearly dependent");
    const CMatrix core = w.adjoint() * evaluate(pencil, pair.lambda) * v;
    const RVector s = singular_values(core);
    if (!(s(s.size() - 1) > 1e-12 * s(0)))
        throw NumericalRefusal("eigenvector is not simple: projected pencil is singular");
    const CMatrix sol = v * core.partialPivLu().solve(w.adjoint());
    return spectral_norm(sol) * gamma(pencil, model, p.lambda);
}

CMatrix secular_jacobian(const MultiParamPencil& pencil, const EigenTuple& lambda) {
    const auto sels = enumerate_selections(pencil.k(), pencil.l());
    CMatrix j(static_cast<Eigen::Index>(sels.size()), pencil.m());
    for (std::size_t i = 0; i < sels.size(); ++i)
        j.row(static_cast<Eigen::Index>(i)) = secular_gradient(pencil, sels[i], lambda).transpose();
    return j;
}

JacobianFactorization verify_jacobian_factorization(const MultiParamPencil& pencil,
                                                    const Eigenpair& pair) {
    if (pencil.k() != 3 || pencil.l() != 2 || pencil.m() != 2)
        throw InputError("factorization check needs k = 3, l = 2, m = 2");
    const CMatrix mv = evaluate(pencil, pair.lambda);
    const auto sels = enumerate_selections(3, 2);
    JacobianFactorization f;
    f.basis = CMatrix::Zero(3, 2);
    for (int i = 0; i < 2; ++i) {
        const CMatrix c = select_rows(mv, sels[i]);
        Eigen::JacobiSVD<CMatrix> svd(c, Eigen::ComputeFullU);
        const CVector w = svd.matrixU().col(1);
        for (int r = 0; r < 2; ++r) f.basis(sels[i].rows[r], i) = w(r);
    }
    Eigenpair p = pair;
    p.x /= p.x.norm();
    f.b = auxiliary_matrix(pencil, p, f.basis);
    f.jacobian = secular_jacobian(pencil, pair.lambda);
    f.d = CMatrix::Zero(3, 2);
    for (int i = 0; i < 2; ++i) {
        const CVector bi = f.b.row(i).transpose();
        const CVector ji = f.jacobian.row(i).transpose();
        f.d(i, i) = bi.dot(ji) / bi.squaredNorm();
    }
    f.d.row(2) = f.jacobian.row(2) * f.b.inverse();
    const double jn = spectral_norm(f.jacobian);
    f.residual = jn > 0.0 ? spectral_norm(f.jacobian - f.d * f.b) / jn : 0.0;
    return f;
}

IntersectionAngles intersection_angles(const MultiParamPencil& pencil, const EigenTuple& lambda,
                                       double tol) {
    if (pencil.m() != 2) throw InputError("intersection angles need m = 2");
    if (!pencil.is_real()) throw InputError("intersection angles need a real pencil");
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        if (std::abs(lambda(i).imag()) > 1e-10 * (1.0 + std::abs(lambda(i).real())))
            throw InputError("intersection angles need a real eigenvalue");
    EigenTuple lr = lambda.real().cast<cplx>();
    const auto sels = enumerate_selections(pencil.k(), pencil.l());
    IntersectionAngles out;
    std::vector<Eigen::Vector2d> grads;
    for (std::size_t i = 0; i < sels.size(); ++i) {
        const double scale = secular_scale(pencil, sels[i], lr);
        if (std::abs(secular_value(pencil, sels[i], lr)) > tol * scale) continue;
        const CVector g = secular_gradient(pencil, sels[i], lr);
        out.curves.push_back(static_cast<int>(i));
        grads.emplace_back(g(0).real(), g(1).real());
    }
    // a curve with a vanishing gradient has no tangent line at lambda
    double gmax = 0.0;
    for (const auto& g : grads) gmax = std::max(gmax, g.norm());
    std::vector<Eigen::Vector2d> kept;
    std::vector<int> kept_curves;
    for (std::size_t i = 0; i < grads.size(); ++i)
        if (grads[i].norm() > 1e-12 * gmax) {
            kept.push_back(grads[i]);
            kept_curves.push_back(out.curves[i]);
        }
    grads.swap(kept);
    out.curves.swap(kept_curves);
    if (grads.size() < 2) throw NumericalRefusal("fewer than two secular curves pass through lambda");
    double sum = 0.0;
    for (std::size_t a = 0; a < grads.size(); ++a)
        for (std::size_t b = a + 1; b < grads.size(); ++b) {
            const double cross = grads[a](0) * grads[b](1) - grads[a](1) * grads[b](0);
            const double ang = std::atan2(std::abs(cross), std::abs(grads[a].dot(grads[b])));
            out.angles.push_back(ang);
            sum += ang;
        }
    out.mean = sum / static_cast<double>(out.angles.size());
    return out;
}

}  // namespace mpspec

#pragma once

// Eigenvalue and eigenvector condition numbers of simple eigenpairs, the
// auxiliary matrix B, and secular-equation geometry at an eigenvalue.

#include "mpspec/pencil.hpp"

#include <optional>
#include <vector>

namespace mpspec {

enum class ConditionMode { relative, absolute };

const char* to_string(ConditionMode mode);

struct ConditionReport {
    double kappa = 0.0;
    ConditionMode mode = ConditionMode::relative;
    double b_inverse_norm = 0.0;
    double gamma_star = 0.0;
    int left_null_dim = 0;
    // set when relative mode was requested at lambda = 0
    bool switched_to_absolute = false;
    double b_condition = 0.0;
};

/// Thresholds used to certify that an eigenvalue is simple before a condition
/// number is reported.
struct SimplicityCheck {
    double null_tol = 1e-10;         // relative rank tolerance for the left null space
    double max_b_condition = 1e12;   // cond(B) above this is treated as singular
    double max_backward_error = 1e-8;
};

/// B_ij = y_i^H (dM/dlambda_j) x for the columns y_i of `y`.
CMatrix auxiliary_matrix(const MultiParamPencil& pencil, const Eigenpair& pair, const CMatrix& y);
CMatrix auxiliary_matrix(const MultiParamPencil& pencil, const Eigenpair& pair,
                         const NullSpaceBasis& y);

/// kappa = ||B^{-1}|| gamma / ||lambda|| (relative) or ||B^{-1}|| gamma (absolute).
/// Throws NumericalRefusal when the eigenvalue is not certified simple.
ConditionReport eigenvalue_condition(const MultiParamPencil& pencil,
                                     const PerturbationModel& model, const Eigenpair& pair,
                                     ConditionMode mode = ConditionMode::relative,
                                     const SimplicityCheck& check = {});

/// kappa(x) = ||V (W^H M V)^{-1} W^H|| gamma with g^H V = 0 and W orthogonal to
/// every (dM/dlambda_i) x. Defaults to g = x.
double eigenvector_condition(const MultiParamPencil& pencil, const PerturbationModel& model,
                             const Eigenpair& pair, const std::optional<CVector>& g = {});

/// L x m matrix whose rows are the secular gradients in canonical selection order.
CMatrix secular_jacobian(const MultiParamPencil& pencil, const EigenTuple& lambda);

struct JacobianFactorization {
    CMatrix d;         // 3 x 2 with d(0,1) = d(1,0) = 0
    CMatrix jacobian;  // 3 x 2
    CMatrix b;         // 2 x 2, built on the selection-derived left null vectors
    CMatrix basis;     // 3 x 2, the embedded left null vectors w_1, w_2
    double residual = 0.0;  // ||J - D B|| / ||J||
};

/// For k = 3, l = 2, m = 2: fits J = D B with the structured D.
JacobianFactorization verify_jacobian_factorization(const MultiParamPencil& pencil,
                                                    const Eigenpair& pair);

struct IntersectionAngles {
    std::vector<double> angles;  // pairwise acute angles, radians
    std::vector<int> curves;     // canonical selection indices passing through lambda
    double mean = 0.0;
};

/// Acute angles between the tangent lines of the real secular curves passing
/// through lambda (|chi| <= tol * Hadamard scale). Real pencils, real lambda, m = 2.
IntersectionAngles intersection_angles(const MultiParamPencil& pencil, const EigenTuple& lambda,
                                       double tol = 1e-8);

}  // namespace mpspec

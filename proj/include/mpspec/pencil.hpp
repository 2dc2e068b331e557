#pragma once

// Rectangular multiparameter matrix pencils M(lambda) = sum_t lambda^{e_t} C_t
// with k x l complex coefficients and m spectral parameters.

#include "mpspec/linalg.hpp"

#include <cstdint>
#include <vector>

namespace mpspec {

/// A point in parameter space (lambda_1, ..., lambda_m).
using EigenTuple = CVector;

struct Term {
    std::vector<int> exponent;  // length m, nonnegative
    CMatrix coeff;              // k x l
};

class MultiParamPencil {
public:
    MultiParamPencil(int k, int l, int m, std::vector<Term> terms);

    /// Linear pencil A_0 + sum_i lambda_i A_i from {A_0, ..., A_m}.
    static MultiParamPencil linear(const std::vector<CMatrix>& coefficients);

    int k() const { return k_; }
    int l() const { return l_; }
    int m() const { return m_; }
    const std::vector<Term>& terms() const { return terms_; }

    bool is_linear() const;
    bool is_standard_shape() const { return k_ == l_ + m_ - 1; }
    bool is_real() const;

    /// Index of the term with the given exponent, or -1.
    int find_term(const std::vector<int>& exponent) const;

    /// Sum of the spectral norms of all coefficients (a size for tolerances).
    double coefficient_scale() const;

private:
    int k_;
    int l_;
    int m_;
    std::vector<Term> terms_;
};

/// {A_0, A_1, ..., A_m} of a linear pencil; absent terms are zero. Throws
/// InputError for a nonlinear pencil.
std::vector<CMatrix> linear_coefficients(const MultiParamPencil& pencil);

/// lambda^e for a multi-index e.
cplx monomial(const EigenTuple& lambda, const std::vector<int>& exponent);

/// d/d lambda_j of lambda^e (j zero-based).
cplx monomial_derivative(const EigenTuple& lambda, const std::vector<int>& exponent, int j);

CMatrix evaluate(const MultiParamPencil& pencil, const EigenTuple& lambda);

/// dM/d lambda_j at lambda; j is one-based, matching the parameter numbering.
CMatrix partial_derivative(const MultiParamPencil& pencil, const EigenTuple& lambda, int j);

struct Eigenpair {
    EigenTuple lambda;
    CVector x;
};

struct PerturbationModel {
    enum class Mode { absolute, relative, custom };

    Mode mode = Mode::relative;
    std::vector<double> weights;  // ||E_t||, one per pencil term

    static PerturbationModel absolute(const MultiParamPencil& pencil);
    static PerturbationModel relative(const MultiParamPencil& pencil);
    static PerturbationModel custom(const MultiParamPencil& pencil, std::vector<double> weights);
};

const char* to_string(PerturbationModel::Mode mode);

/// gamma(lambda) = sum_t |lambda^{e_t}| ||E_t||.
double gamma(const MultiParamPencil& pencil, const PerturbationModel& model,
             const EigenTuple& lambda);

CVector residual(const MultiParamPencil& pencil, const Eigenpair& pair);

/// Zero-based, strictly increasing row indices of length l.
struct RowSelection {
    std::vector<int> rows;
};

/// All C(k, l) selections in lexicographic order.
std::vector<RowSelection> enumerate_selections(int k, int l);

CMatrix select_rows(const CMatrix& a, const RowSelection& sel);

/// chi_sigma(lambda) = det [M(lambda)]_sigma.
cplx secular_value(const MultiParamPencil& pencil, const RowSelection& sel,
                   const EigenTuple& lambda);

/// Gradient of chi_sigma via trace(adj(C) dC/dlambda_j).
CVector secular_gradient(const MultiParamPencil& pencil, const RowSelection& sel,
                         const EigenTuple& lambda);

/// Hadamard bound prod_{i in sigma} ||row_i M(lambda)||, the natural scale of chi_sigma.
double secular_scale(const MultiParamPencil& pencil, const RowSelection& sel,
                     const EigenTuple& lambda);

struct NullSpaceBasis {
    CMatrix basis;  // k x d, orthonormal columns
    double tol = 0.0;

    int dim() const { return static_cast<int>(basis.cols()); }
};

/// Orthonormal basis of {y : y^H M = 0}; singular values <= tol * sigma_max count
/// as zero. A negative tol selects default_rank_tol.
NullSpaceBasis left_nullspace(const CMatrix& matrix, double tol = -1.0);

/// Max numerical rank over `trials` random points drawn uniformly from the
/// complex unit disc per component.
int normal_rank(const MultiParamPencil& pencil, int trials, double tol = -1.0,
                std::uint64_t seed = 0);

}  // namespace mpspec

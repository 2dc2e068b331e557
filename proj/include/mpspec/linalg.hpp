#pragma once

// Dense complex linear algebra helpers shared by all modules.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

namespace mpspec {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Singular values in decreasing order (min(rows, cols) of them).
RVector singular_values(const CMatrix& a);

/// Spectral norm; 0 for empty matrices.
double spectral_norm(const CMatrix& a);

/// min over unit x of ||A x||. Zero when A has more columns than rows.
double sigma_min(const CMatrix& a);

/// Default rank tolerance: max(rows, cols) * machine epsilon (relative to sigma_max).
double default_rank_tol(Eigen::Index rows, Eigen::Index cols);

/// Number of singular values strictly above rel_tol * sigma_max.
int numerical_rank(const CMatrix& a, double rel_tol);

/// Orthonormal basis (n x (n - r)) of the orthogonal complement of the column
/// span of `cols`, where r is its numerical rank at rel_tol.
CMatrix orthogonal_complement(const CMatrix& cols, double rel_tol);

/// Adjugate of a square matrix via the SVD, valid for singular input.
CMatrix adjugate(const CMatrix& a);

/// sign(z) = conj(z)/|z|, sign(0) = 0.
cplx complex_sign(cplx z);

/// Unitary 2x2 G with G * [a; b] = [r; 0].
Eigen::Matrix2cd givens_rows(cplx a, cplx b);

/// Unitary 2x2 Z with [u v] * Z = [0 r].
Eigen::Matrix2cd givens_cols(cplx u, cplx v);

/// Apply G from the left to rows p and q of `a`, restricted to columns [c0, c1).
void apply_rows(CMatrix& a, const Eigen::Matrix2cd& g, Eigen::Index p, Eigen::Index q,
                Eigen::Index c0, Eigen::Index c1);

/// Apply Z from the right to columns p and q of `a`.
void apply_cols(CMatrix& a, const Eigen::Matrix2cd& z, Eigen::Index p, Eigen::Index q);

}  // namespace mpspec

namespace mpspec {

/// Unit right singular vector for the smallest singular value (a minimizer of
/// ||A x|| over unit x).
CVector min_right_singular_vector(const CMatrix& a);

}  // namespace mpspec

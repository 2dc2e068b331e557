#include "mpspec/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mpspec {

RVector singular_values(const CMatrix& a) {
    if (a.size() == 0) return RVector();
    if (std::min(a.rows(), a.cols()) <= 64) {
        Eigen::JacobiSVD<CMatrix> svd(a);
        return svd.singularValues();
    }
    Eigen::BDCSVD<CMatrix> svd(a);
    return svd.singularValues();
}

double spectral_norm(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    return singular_values(a)(0);
}

double sigma_min(const CMatrix& a) {
    if (a.cols() == 0) return 0.0;
    if (a.rows() < a.cols()) return 0.0;
    RVector s = singular_values(a);
    return s(s.size() - 1);
}

double default_rank_tol(Eigen::Index rows, Eigen::Index cols) {
    return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

int numerical_rank(const CMatrix& a, double rel_tol) {
    if (a.size() == 0) return 0;
    RVector s = singular_values(a);
    if (s(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0)) ++r;
    return r;
}

CMatrix orthogonal_complement(const CMatrix& cols, double rel_tol) {
    const Eigen::Index n = cols.rows();
    if (cols.cols() == 0) return CMatrix::Identity(n, n);
    Eigen::JacobiSVD<CMatrix> svd(cols, Eigen::ComputeFullU);
    const RVector& s = svd.singularValues();
    int r = 0;
    if (s(0) > 0.0)
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > rel_tol * s(0)) ++r;
    return svd.matrixU().rightCols(n - r);
}

CMatrix adjugate(const CMatrix& a) {
    const Eigen::Index n = a.rows();
    if (n == 1) return CMatrix::Ones(1, 1);
    // A = U S V^H  =>  adj(A) = adj(V^H) adj(S) adj(U) = det(U) det(V^H) V adj(S) U^H
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RVector& s = svd.singularValues();
    RVector adj_s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double p = 1.0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) p *= s(j);
        adj_s(i) = p;
    }
    const cplx det_u = svd.matrixU().determinant();
    const cplx det_vh = std::conj(svd.matrixV().determinant());
    return det_u * det_vh * svd.matrixV() * adj_s.cast<cplx>().asDiagonal() *
           svd.matrixU().adjoint();
}

cplx complex_sign(cplx z) {
    const double r = std::abs(z);
    if (r == 0.0) return 0.0;
    return std::conj(z) / r;
}

Eigen::Matrix2cd givens_rows(cplx a, cplx b) {
    Eigen::Matrix2cd g;
    const double na = std::abs(a);
    const double nb = std::abs(b);
    if (nb == 0.0) {
        g.setIdentity();
        return g;
    }
    const double rho = std::hypot(na, nb);
    if (na == 0.0) {
        const cplx s = std::conj(b) / nb;
        g << 0.0, s, -std::conj(s), 0.0;
        return g;
    }
    const double c = na / rho;
    const cplx s = (a / na) * std::conj(b) / rho;
    g << c, s, -std::conj(s), c;
    return g;
}

Eigen::Matrix2cd givens_cols(cplx u, cplx v) {
    Eigen::Matrix2cd z;
    const double rho = std::hypot(std::abs(u), std::abs(v));
    if (std::abs(u) == 0.0) {
        z.setIdentity();
        return z;
    }
    z << v / rho, std::conj(u) / rho, -u / rho, std::conj(v) / rho;
    return z;
}

void apply_rows(CMatrix& a, const Eigen::Matrix2cd& g, Eigen::Index p, Eigen::Index q,
                Eigen::Index c0, Eigen::Index c1) {
    for (Eigen::Index j = c0; j < c1; ++j) {
        const cplx x = a(p, j);
        const cplx y = a(q, j);
        a(p, j) = g(0, 0) * x + g(0, 1) * y;
        a(q, j) = g(1, 0) * x + g(1, 1) * y;
    }
}

void apply_cols(CMatrix& a, const Eigen::Matrix2cd& z, Eigen::Index p, Eigen::Index q) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const cplx x = a(i, p);
        const cplx y = a(i, q);
        a(i, p) = x * z(0, 0) + y * z(1, 0);
        a(i, q) = x * z(0, 1) + y * z(1, 1);
    }
}

}  // namespace mpspec

namespace mpspec {

CVector min_right_singular_vector(const CMatrix& a) {
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
    return svd.matrixV().col(a.cols() - 1);
}

}  // namespace mpspec

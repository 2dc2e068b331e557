#include "mpspec/banded.hpp"

#include "mpspec/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <random>

namespace mpspec {

Telemetry& Telemetry::operator+=(const Telemetry& o) {
    setup_factorizations += o.setup_factorizations;
    reductions += o.reductions;
    point_factorizations += o.point_factorizations;
    lanczos_steps += o.lanczos_steps;
    fallbacks += o.fallbacks;
    dense_svds += o.dense_svds;
    flops_setup += o.flops_setup;
    flops_reduction += o.flops_reduction;
    flops_point_qr += o.flops_point_qr;
    flops_iter += o.flops_iter;
    flops_dense += o.flops_dense;
    points += o.points;
    return *this;
}

std::int64_t dense_svd_flops(Eigen::Index rows, Eigen::Index cols) {
    const double k = static_cast<double>(std::max(rows, cols));
    const double l = static_cast<double>(std::min(rows, cols));
    return static_cast<std::int64_t>(4.0 * k * l * l - 4.0 * l * l * l / 3.0);
}

namespace {

// Householder QR of an r x c matrix, r >= c.
std::int64_t householder_flops(Eigen::Index r, Eigen::Index c) {
    const double rr = static_cast<double>(r);
    const double cc = static_cast<double>(c);
    return static_cast<std::int64_t>(2.0 * rr * cc * cc - 2.0 * cc * cc * cc / 3.0);
}

}  // namespace

CMatrix banded_qr_r(CMatrix a, int bandwidth, Telemetry* tel) {
    const Eigen::Index k = a.rows();
    const Eigen::Index l = a.cols();
    if (k < l) throw InputError("banded QR needs rows >= cols");
    std::int64_t flops = 0;
    for (Eigen::Index j = 0; j < l; ++j) {
        const Eigen::Index last = std::min<Eigen::Index>(j + bandwidth, k - 1);
        for (Eigen::Index i = last; i > j; --i) {
            if (a(i, j) == cplx(0.0)) continue;
            const Eigen::Matrix2cd g = givens_rows(a(i - 1, j), a(i, j));
            apply_rows(a, g, i - 1, i, j, l);
            a(i, j) = 0.0;
            flops += 4 * (l - j);
        }
    }
    if (tel) {
        tel->point_factorizations += 1;
        tel->flops_point_qr += flops;
    }
    CMatrix r = a.topRows(l);
    r.triangularView<Eigen::StrictlyLower>().setZero();
    return r;
}

double triangular_sigma_min(const CMatrix& r, Telemetry* tel) {
    const Eigen::Index n = r.rows();
    if (n == 0) return 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (r(i, i) == cplx(0.0)) return 0.0;

    std::mt19937_64 rng(0x5eedULL + static_cast<std::uint64_t>(n));
    std::normal_distribution<double> nd;
    CVector q(n);
    for (Eigen::Index i = 0; i < n; ++i) q(i) = cplx(nd(rng), nd(rng));
    q /= q.norm();

    const auto upper = r.triangularView<Eigen::Upper>();
    const Eigen::Index max_steps = std::min<Eigen::Index>(n, 300);
    CMatrix basis(n, max_steps);
    std::vector<double> alpha;
    std::vector<double> beta;
    double theta = 0.0;
    bool converged = false;
    std::int64_t steps = 0;
    std::int64_t flops = 0;

    for (Eigen::Index j = 0; j < max_steps; ++j) {
        basis.col(j) = q;
        CVector w = upper.adjoint().solve(q);
        w = upper.solve(w);
        flops += n * n;
        ++steps;
        const double a = q.dot(w).real();
        alpha.push_back(a);
        w -= a * q;
        if (j > 0) w -= beta.back() * basis.col(j - 1);
        // full reorthogonalization, twice
        for (int pass = 0; pass < 2; ++pass) {
            w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * w);
            flops += 2 * (j + 1) * n;
        }
        const double b = w.norm();

        const Eigen::Index d = j + 1;
        RVector diag(d);
        RVector sub(std::max<Eigen::Index>(d - 1, 0));
        for (Eigen::Index i = 0; i < d; ++i) diag(i) = alpha[static_cast<std::size_t>(i)];
        for (Eigen::Index i = 0; i + 1 < d; ++i) sub(i) = beta[static_cast<std::size_t>(i)];
        Eigen::SelfAdjointEigenSolver<RMatrix> es;
        es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        theta = es.eigenvalues()(d - 1);
        const double res = b * std::abs(es.eigenvectors()(d - 1, d - 1));
        if (!std::isfinite(theta) || !std::isfinite(res)) break;
        if (res <= 1e-12 * theta || d == n) {
            converged = theta > 0.0;
            break;
        }
        beta.push_back(b);
        q = w / b;
    }
    if (tel) {
        tel->lanczos_steps += steps;
        tel->flops_iter += flops;
    }
    if (converged) return 1.0 / std::sqrt(theta);
    if (tel) {
        tel->fallbacks += 1;
        tel->dense_svds += 1;
        tel->flops_dense += dense_svd_flops(n, n);
    }
    return sigma_min(r);
}

SlicePreparation prepare_slightly_tall(const CMatrix& free_coeff, Telemetry* tel) {
    const Eigen::Index k = free_coeff.rows();
    const Eigen::Index l = free_coeff.cols();
    if (k < l || k >= 2 * l) throw InputError("slightly tall preprocessing needs l <= k < 2l");
    SlicePreparation p;
    p.kind = SlicePreparation::Kind::slightly_tall;
    Eigen::HouseholderQR<CMatrix> qr(free_coeff.bottomRows(l));
    p.q = CMatrix::Identity(k, k);
    p.q.bottomRightCorner(l, l) = qr.householderQ();
    p.c1 = p.q.adjoint() * free_coeff;
    p.c1.bottomRows(l).triangularView<Eigen::StrictlyLower>().setZero();
    if (tel) {
        tel->setup_factorizations += 1;
        tel->flops_setup += householder_flops(l, l);
    }
    return p;
}

SlicePreparation prepare_very_tall(const CMatrix& free_coeff, Telemetry* tel) {
    const Eigen::Index k = free_coeff.rows();
    const Eigen::Index l = free_coeff.cols();
    if (k < 2 * l) throw InputError("very tall preprocessing needs k >= 2l");
    SlicePreparation p;
    p.kind = SlicePreparation::Kind::very_tall;
    Eigen::HouseholderQR<CMatrix> qr(free_coeff);
    p.q = qr.householderQ();
    p.c1 = p.q.adjoint() * free_coeff;
    p.c1.triangularView<Eigen::StrictlyLower>().setZero();
    if (tel) {
        tel->setup_factorizations += 1;
        tel->flops_setup += householder_flops(k, l);
    }
    return p;
}

ReducedSlicePencil reduce_slice(const SlicePreparation& prep, const CMatrix& slice_const,
                                Telemetry* tel) {
    const Eigen::Index k = slice_const.rows();
    const Eigen::Index l = slice_const.cols();
    if (prep.c1.rows() != k || prep.c1.cols() != l) throw InputError("slice shape mismatch");
    ReducedSlicePencil out;
    std::int64_t flops = 0;

    if (prep.kind == SlicePreparation::Kind::very_tall) {
        const CMatrix t = prep.q.adjoint() * slice_const;
        flops += k * k * l;
        Eigen::HouseholderQR<CMatrix> qr(t.bottomRows(k - l));
        flops += householder_flops(k - l, l);
        CMatrix r2 = qr.matrixQR().topRows(l);
        r2.triangularView<Eigen::StrictlyLower>().setZero();
        out.c0.resize(2 * l, l);
        out.c0.topRows(l) = t.topRows(l);
        out.c0.bottomRows(l) = r2;
        out.c1 = CMatrix::Zero(2 * l, l);
        out.c1.topRows(l) = prep.c1.topRows(l);
        out.bandwidth = static_cast<int>(l);
    } else {
        const Eigen::Index top = k - l;
        CMatrix s0 = slice_const;
        s0.bottomRows(l) = prep.q.bottomRightCorner(l, l).adjoint() * slice_const.bottomRows(l);
        flops += l * l * l;
        CMatrix s1 = prep.c1;
        // Lower blocks: s1 stays upper triangular while s0 becomes upper Hessenberg.
        for (Eigen::Index j = 0; j + 2 < l; ++j) {
            for (Eigen::Index i = l - 1; i >= j + 2; --i) {
                const Eigen::Index p = top + i - 1;
                const Eigen::Index q = top + i;
                if (s0(q, j) != cplx(0.0)) {
                    const Eigen::Matrix2cd g = givens_rows(s0(p, j), s0(q, j));
                    apply_rows(s0, g, p, q, j, l);
                    apply_rows(s1, g, p, q, i - 1, l);
                    s0(q, j) = 0.0;
                    flops += 4 * (l - j) + 4 * (l - i + 1);
                }
                if (s1(q, i - 1) != cplx(0.0)) {
                    const Eigen::Matrix2cd z = givens_cols(s1(q, i - 1), s1(q, i));
                    apply_cols(s0, z, i - 1, i);
                    apply_cols(s1, z, i - 1, i);
                    s1(q, i - 1) = 0.0;
                    flops += 8 * k;
                }
            }
        }
        out.c0 = std::move(s0);
        out.c1 = std::move(s1);
        out.bandwidth = static_cast<int>(std::min<Eigen::Index>(top + 1, k - 1));
    }
    if (tel) {
        tel->reductions += 1;
        tel->flops_reduction += flops;
    }
    return out;
}

double sigma_min_point(const ReducedSlicePencil& reduced, cplx z, Telemetry* tel) {
    if (reduced.c0.rows() < reduced.c0.cols()) return 0.0;
    if (tel) tel->points += 1;
    const CMatrix r = banded_qr_r(reduced.c0 + z * reduced.c1, reduced.bandwidth, tel);
    return triangular_sigma_min(r, tel);
}

}  // namespace mpspec

#pragma once

// Trapezoidal slice reductions and the banded sigma_min kernel used by the
// preprocessed pseudospectrum methods.

#include "mpspec/linalg.hpp"

#include <cstdint>

namespace mpspec {

/// Operation counters. Flop fields count complex multiply-adds of the kernels
/// that actually ran; dense SVDs are charged with the standard flop model
/// 4 k l^2 - 4 l^3 / 3. All fields are sums, so merging is order-independent.
struct Telemetry {
    std::int64_t setup_factorizations = 0;  // one-time QRs of the free coefficient
    std::int64_t reductions = 0;            // per-slice reductions
    std::int64_t point_factorizations = 0;  // banded QRs, one per grid point
    std::int64_t lanczos_steps = 0;
    std::int64_t fallbacks = 0;             // stagnated iterations finished by dense SVD
    std::int64_t dense_svds = 0;
    std::int64_t flops_setup = 0;
    std::int64_t flops_reduction = 0;
    std::int64_t flops_point_qr = 0;
    std::int64_t flops_iter = 0;
    std::int64_t flops_dense = 0;
    std::int64_t points = 0;

    Telemetry& operator+=(const Telemetry& o);
    std::int64_t point_flops() const { return flops_point_qr + flops_iter + flops_dense; }
};

std::int64_t dense_svd_flops(Eigen::Index rows, Eigen::Index cols);

/// R factor (cols x cols) of a k x l matrix whose entries vanish below
/// a(i, j) for i > j + bandwidth, by Givens rotations confined to the band.
CMatrix banded_qr_r(CMatrix a, int bandwidth, Telemetry* tel = nullptr);

/// Smallest singular value of an upper-triangular R by Lanczos on (R^H R)^{-1}
/// with full reorthogonalization; dense SVD if the iteration stagnates.
double triangular_sigma_min(const CMatrix& r, Telemetry* tel = nullptr);

/// One-parameter slice pencil c0 + z c1 in trapezoidal form.
struct ReducedSlicePencil {
    CMatrix c0;
    CMatrix c1;
    int bandwidth = 0;
};

/// Unitary data computed once per sweep from the free coefficient.
struct SlicePreparation {
    enum class Kind { slightly_tall, very_tall };
    Kind kind = Kind::slightly_tall;
    CMatrix q;   // k x k unitary: full Q (very tall) or Q of the lower l x l block (slightly tall)
    CMatrix c1;  // the free coefficient after the one-time transformation
};

/// k < 2l: QR of the lower l x l block of the free coefficient.
SlicePreparation prepare_slightly_tall(const CMatrix& free_coeff, Telemetry* tel = nullptr);

/// k >= 2l: QR of the whole free coefficient.
SlicePreparation prepare_very_tall(const CMatrix& free_coeff, Telemetry* tel = nullptr);

/// Reduce the slice c0 + z A_f. Slightly tall: Hessenberg-triangular reduction
/// of the lower blocks, bandwidth k - l + 1. Very tall: QR of the lower k - l
/// rows of Q^H c0, leaving a 2l x l pencil of bandwidth l.
ReducedSlicePencil reduce_slice(const SlicePreparation& prep, const CMatrix& slice_const,
                                Telemetry* tel = nullptr);

double sigma_min_point(const ReducedSlicePencil& reduced, cplx z, Telemetry* tel = nullptr);

}  // namespace mpspec

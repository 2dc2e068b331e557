#pragma once

// Least-squares realization: stationary points of
//   min ||y_hat - y||^2  subject to  T(alpha) y_hat = 0,
// their classification, and a conditioning probe over the found parameters.

#include "mpspec/pencil.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mpspec {

struct RealizationProblem {
    RVector y;
    int n = 0;

    int N() const { return static_cast<int>(y.size()); }
    /// Throws InputError unless N > 2n, n >= 1 and the data are finite.
    void validate() const;
};

/// (N - n) x N banded Toeplitz matrix; row r holds (alpha_n, ..., alpha_1, 1)
/// in columns r .. r + n.
RMatrix constraint_matrix(const RVector& alpha, int N);

struct KKTEval {
    RVector residual;  // [y_hat - y + T^T v; T y_hat; v^T dT/dalpha_i y_hat]
    RMatrix jacobian;  // symmetric, unknowns ordered (y_hat, v, alpha)
};

KKTEval kkt_system(const RealizationProblem& p, const RVector& alpha, const RVector& y_hat,
                   const RVector& v);

enum class StationaryType { minimum, maximum, saddle, degenerate };

const char* to_string(StationaryType t);

struct StationaryPoint {
    RVector alpha;
    RVector y_hat;
    RVector v;
    double cost = 0.0;         // ||y_hat - y||^2
    double misfit_norm = 0.0;  // ||y_hat - y||
    double kkt_residual = 0.0;
    StationaryType type = StationaryType::degenerate;
    RVector hessian_eigenvalues;  // reduced Hessian of the cost in alpha
};

struct Classification {
    StationaryType type = StationaryType::degenerate;
    RVector eigenvalues;
};

/// Signs of the Hessian of the cost reduced to alpha: the Lagrangian Hessian
/// on the tangent space of T(alpha) y_hat = 0, with the y_hat directions at
/// fixed alpha eliminated by a Schur complement.
Classification classify(const RealizationProblem& p, const StationaryPoint& point);

struct MultistartOptions {
    int grid = 21;          // per axis
    int random = 100;
    std::uint64_t seed = 0;
    int max_iterations = 100;
    double dedup_tol = 1e-6;
    int threads = 0;
};

struct MultistartReport {
    int starts = 0;
    int converged = 0;
    int outside = 0;
};

/// Damped Newton on the KKT system from a grid plus random alpha seeds in the
/// box; deduplicated, classified, sorted by cost.
std::vector<StationaryPoint> find_stationary_points(const RealizationProblem& p,
                                                    const std::vector<double>& lo,
                                                    const std::vector<double>& hi,
                                                    const MultistartOptions& opts = {},
                                                    MultistartReport* report = nullptr);

struct ProbeRow {
    RVector alpha;
    double eta = 0.0;     // eigenvalue backward error at alpha
    bool has_kappa = false;
    double kappa = 0.0;   // relative eigenvalue condition number after refinement
    std::string note;
};

/// eta and kappa of a user-supplied pencil at each alpha (m = n).
std::vector<ProbeRow> conditioning_probe(const MultiParamPencil& pencil,
                                         const PerturbationModel& model,
                                         const std::vector<RVector>& alphas);

}  // namespace mpspec

#pragma once

// Grid-seeded Gauss-Newton solver for all isolated eigenpairs of small pencils.

#include "mpspec/pseudospectrum.hpp"

#include <string>
#include <vector>

namespace mpspec {

/// Strict local minima of the field (all 3^d - 1 grid neighbours larger),
/// ascending by eta, at most `top` of them.
std::vector<EigenTuple> seed_candidates(const PseudospectrumField& field, int top);

struct RefineResult {
    bool converged = false;
    Eigenpair pair;          // x has unit norm when converged
    int iterations = 0;
    std::vector<double> residual_history;  // ||F|| before each step and at exit
    std::vector<EigenTuple> iterates;      // lambda before each step and at exit
    std::string failure;
};

/// Gauss-Newton on F(lambda, x) = [M(lambda) x; c^H x - 1], c the right singular
/// vector of M(seed) for sigma_min, frozen for the whole run.
RefineResult refine(const MultiParamPencil& pencil, const EigenTuple& seed,
                    int max_iterations = 100);

/// Same iteration from an explicit start (lambda0, x0) and normalization c.
RefineResult refine_from(const MultiParamPencil& pencil, const EigenTuple& lambda0,
                         const CVector& x0, const CVector& c, int max_iterations = 100);

/// Search box: real part ranges per parameter. In complex mode each parameter
/// also sweeps imaginary parts in [-(hi-lo)/2, (hi-lo)/2].
struct SearchBox {
    std::vector<double> lo;
    std::vector<double> hi;
    bool complex = false;
};

struct SolveOptions {
    int resolution = 101;
    int top = 64;
    double dedup_tol = 1e-8;
    double secular_tol = 1e-8;
    int threads = 0;
};

struct SolveStats {
    int seeds = 0;
    int converged = 0;
    int duplicates = 0;
    int outside = 0;
    int rejected_secular = 0;
    int rejected_simple = 0;
};

/// Field, seeds, refinement, deduplication and oracle filtering. Results are in
/// lexicographic order of (Re, Im) per parameter.
std::vector<Eigenpair> solve_all(const MultiParamPencil& pencil, const SearchBox& box,
                                 const SolveOptions& opts = {}, SolveStats* stats = nullptr);

/// Every secular value vanishes: |chi_sigma| <= tol * Hadamard scale.
bool verify_spectrum_secular(const MultiParamPencil& pencil, const EigenTuple& lambda,
                             double tol = 1e-8);
/// sigma_min(M(lambda)) <= tol * ||M(lambda)||.
bool verify_spectrum_sigma(const MultiParamPencil& pencil, const EigenTuple& lambda,
                           double tol = 1e-8);
/// Both tests; throws NumericalRefusal if they disagree.
bool verify_spectrum(const MultiParamPencil& pencil, const EigenTuple& lambda, double tol = 1e-8);

/// Lexicographic order on (Re lambda_1, Im lambda_1, Re lambda_2, ...).
bool tuple_less(const EigenTuple& a, const EigenTuple& b);

}  // namespace mpspec

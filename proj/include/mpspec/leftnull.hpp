#pragma once

// Left null spaces of M(lambda) along affine parameter paths, and the split of
// the left null space at an eigenvalue into its trivial part and the left
// eigenvector.

#include "mpspec/pencil.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mpspec {

/// lambda(t) = origin + t * direction.
struct AffinePath {
    EigenTuple origin;
    EigenTuple direction;

    EigenTuple at(double t) const { return origin + t * direction; }
};

/// Parses "affine:t*(c,d)" or "affine:(a,b)+t*(c,d)"; entries are real numbers
/// or re+imj complex literals.
AffinePath parse_affine_path(const std::string& spec, int m);

struct PathSample {
    double t = 0.0;
    EigenTuple lambda;
    NullSpaceBasis basis;
};

/// Orthonormal left null bases at each sample, aligned in sample order: each
/// basis is rotated by the unitary closest to its overlap with the previous
/// one; where the dimension grows, the leading columns continue the previous
/// vectors.
std::vector<PathSample> nullspace_along_path(const MultiParamPencil& pencil,
                                             const AffinePath& path,
                                             const std::vector<double>& samples,
                                             double tol = 1e-10, int threads = 0);

struct EigenvalueSplit {
    CMatrix trivial;          // k x (m - 1)
    CVector left_eigenvector; // unit, orthogonal to `trivial`
    double residual = 0.0;    // ||y^H M(lambda)||
};

/// The trivial part is the limit of the off-spectrum null space approached
/// along `direction` (random when absent) at distance delta, projected onto
/// the null space at lambda.
EigenvalueSplit split_at_eigenvalue(const MultiParamPencil& pencil, const Eigenpair& pair,
                                    const std::optional<EigenTuple>& direction = {},
                                    double delta = 1e-7, std::uint64_t seed = 0,
                                    double tol = 1e-10);

}  // namespace mpspec

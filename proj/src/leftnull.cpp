#include "mpspec/leftnull.hpp"

#include "mpspec/error.hpp"
#include "mpspec/io.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <random>
#include <regex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mpspec {

namespace {

EigenTuple parse_tuple(const std::string& s, int m) {
    const std::vector<cplx> v = parse_complex_list(s);
    if (static_cast<int>(v.size()) != m)
        throw InputError("path tuple has " + std::to_string(v.size()) + " entries, expected " +
                         std::to_string(m));
    EigenTuple t(m);
    for (int i = 0; i < m; ++i) t(i) = v[static_cast<std::size_t>(i)];
    return t;
}

// Unitary factor of the polar decomposition.
CMatrix polar_unitary(const CMatrix& a) {
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

// Gram-Schmidt on the columns of `a` (twice), dropping near-dependent ones.
CMatrix orthonormalize(const CMatrix& a, double tol = 1e-12) {
    CMatrix q(a.rows(), 0);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        CVector v = a.col(j);
        const double n0 = v.norm();
        for (int pass = 0; pass < 2; ++pass) v -= q * (q.adjoint() * v);
        if (v.norm() <= tol * n0 || n0 == 0.0) continue;
        q.conservativeResize(Eigen::NoChange, q.cols() + 1);
        q.col(q.cols() - 1) = v / v.norm();
    }
    return q;
}

CMatrix align(const CMatrix& prev, const CMatrix& cur) {
    const Eigen::Index dp = prev.cols();
    const Eigen::Index dc = cur.cols();
    if (dp == 0 || dc == 0) return cur;
    if (dc <= dp) {
        const CMatrix overlap = cur.adjoint() * prev.leftCols(dc);
        return cur * polar_unitary(overlap);
    }
    // dimension grew: continue the previous vectors, then fill up
    CMatrix lead = orthonormalize(cur * (cur.adjoint() * prev));
    const CMatrix rest = cur * orthogonal_complement(cur.adjoint() * lead, 1e-10);
    CMatrix out(cur.rows(), lead.cols() + rest.cols());
    out << lead, rest;
    return out;
}

}  // namespace

AffinePath parse_affine_path(const std::string& spec, int m) {
    static const std::regex full(R"(^\s*affine:\s*(?:\(([^)]*)\)\s*\+\s*)?t\s*\*\s*\(([^)]*)\)\s*$)");
    std::smatch mt;
    if (!std::regex_match(spec, mt, full))
        throw InputError("path must look like affine:t*(c,d) or affine:(a,b)+t*(c,d)");
    AffinePath p;
    p.origin = mt[1].matched ? parse_tuple(mt[1].str(), m) : EigenTuple(EigenTuple::Zero(m));
    p.direction = parse_tuple(mt[2].str(), m);
    return p;
}

std::vector<PathSample> nullspace_along_path(const MultiParamPencil& pencil,
                                             const AffinePath& path,
                                             const std::vector<double>& samples, double tol,
                                             int threads) {
    if (path.origin.size() != pencil.m() || path.direction.size() != pencil.m())
        throw InputError("path dimension does not match the pencil");
    std::vector<PathSample> out(samples.size());
    const auto n = static_cast<std::ptrdiff_t>(samples.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads > 0 ? threads : omp_get_max_threads())
#else
    (void)threads;
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        PathSample& s = out[static_cast<std::size_t>(i)];
        s.t = samples[static_cast<std::size_t>(i)];
        s.lambda = path.at(s.t);
        s.basis = left_nullspace(evaluate(pencil, s.lambda), tol);
    }
    for (std::size_t i = 1; i < out.size(); ++i)
        out[i].basis.basis = align(out[i - 1].basis.basis, out[i].basis.basis);
    return out;
}

EigenvalueSplit split_at_eigenvalue(const MultiParamPencil& pencil, const Eigenpair& pair,
                                    const std::optional<EigenTuple>& direction, double delta,
                                    std::uint64_t seed, double tol) {
    const int m = pencil.m();
    const CMatrix mv = evaluate(pencil, pair.lambda);
    const NullSpaceBasis at = left_nullspace(mv, tol);
    if (at.dim() != m)
        throw NumericalRefusal("eigenvalue is not simple: left null space has dimension " +
                               std::to_string(at.dim()));
    EigenTuple dir(m);
    if (direction) {
        if (direction->size() != m) throw InputError("direction has the wrong length");
        dir = *direction;
    } else {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd;
        for (int i = 0; i < m; ++i) dir(i) = cplx(nd(rng), nd(rng));
    }
    if (dir.norm() == 0.0) throw InputError("direction is zero");
    dir /= dir.norm();
    const NullSpaceBasis near = left_nullspace(evaluate(pencil, pair.lambda + delta * dir), tol);
    if (near.dim() != m - 1)
        throw NumericalRefusal("off-spectrum null space near lambda has dimension " +
                               std::to_string(near.dim()) + ", expected " + std::to_string(m - 1));
    EigenvalueSplit out;
    out.trivial = orthonormalize(at.basis * (at.basis.adjoint() * near.basis));
    if (out.trivial.cols() != m - 1) throw NumericalRefusal("trivial limit is degenerate");
    const CMatrix comp = orthogonal_complement(at.basis.adjoint() * out.trivial, 1e-10);
    if (comp.cols() != 1) throw NumericalRefusal("left eigenvector is not unique");
    out.left_eigenvector = at.basis * comp.col(0);
    out.left_eigenvector /= out.left_eigenvector.norm();
    out.residual = (out.left_eigenvector.adjoint() * mv).norm();
    return out;
}

}  // namespace mpspec

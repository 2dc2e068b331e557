#include <doctest.h>

#include "oracles.hpp"

#include "mpspec/error.hpp"
#include "mpspec/fixtures.hpp"
#include "mpspec/leftnull.hpp"
#include "mpspec/solver.hpp"

#include <Eigen/Eigenvalues>

using namespace mpspec;

namespace {

EigenTuple tup(cplx a, cplx b) {
    EigenTuple t(2);
    t << a, b;
    return t;
}

// printed polynomial left null vector of the running example
CVector pqr(cplx l1, cplx l2) {
    CVector v(3);
    v << -2.0 * (l1 - 1.0) * (l2 - 1.0), -3.0 * l1 + 7.0 * l2 - l1 * l2 + l1 * l1 - 2.0 * l2 * l2 - 2.0,
        2.0 * (l2 - 1.0) * (l1 + l2 - 3.0);
    return v;
}

double phase_distance(const CVector& a, const CVector& b) {
    const cplx d = b.dot(a);
    const cplx ph = std::abs(d) > 0 ? d / std::abs(d) : cplx(1.0);
    return (a - ph * b).norm();
}

}  // namespace

TEST_CASE("affine path parsing") {
    const auto a = parse_affine_path("affine:t*(1,1)", 2);
    CHECK(a.origin.norm() == 0.0);
    CHECK(a.direction == tup(1, 1));
    const auto b = parse_affine_path("affine:(0.5,1+2j)+t*(1,-1)", 2);
    CHECK(b.origin(1) == cplx(1, 2));
    CHECK(b.at(2.0)(0) == cplx(2.5, 0));
    CHECK_THROWS_AS(parse_affine_path("t*(1,1)", 2), InputError);
    CHECK_THROWS_AS(parse_affine_path("affine:t*(1,1,1)", 2), InputError);
}

TEST_CASE("null space dimension along the diagonal") {
    const auto p = running_example();
    std::vector<double> ts;
    for (int i = 0; i <= 200; ++i) ts.push_back(i / 100.0);
    const auto s = nullspace_along_path(p, parse_affine_path("affine:t*(1,1)", 2), ts, 1e-10);
    REQUIRE(s.size() == 201);
    for (const auto& x : s) CHECK(x.basis.dim() == (x.t == 1.0 ? 2 : 1));

    for (int i = 0; i < 20; ++i) {
        const auto& x = s[static_cast<std::size_t>(5 + 10 * i)];
        REQUIRE(x.t != 1.0);
        const CVector v = pqr(x.lambda(0), x.lambda(1));
        CHECK(phase_distance(x.basis.basis.col(0), v / v.norm()) <= 1e-8);
        CHECK((v.adjoint() * oracle::eval_pow(p, x.lambda)).norm() <= 1e-12 * v.norm() * 20);
    }

    // aligned columns vary continuously away from the crossing
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i].basis.dim() != 1 || s[i - 1].basis.dim() != 1) continue;
        const double c = std::abs(s[i - 1].basis.basis.col(0).dot(s[i].basis.basis.col(0)));
        const double angle = std::acos(std::min(1.0, c));
        if (std::abs(s[i].t - 1.0) > 0.05) CHECK(angle <= 10 * 0.01);
    }
}

TEST_CASE("constant path keeps the basis") {
    const auto p = second_example();
    AffinePath path{tup(0.3, -0.7), tup(0, 0)};
    const auto s = nullspace_along_path(p, path, {0, 1, 2, 3, 4});
    for (const auto& x : s) CHECK((x.basis.basis - s[0].basis.basis).norm() <= 1e-14);
}

TEST_CASE("split at an eigenvalue") {
    const auto p = running_example();
    Eigenpair e{tup(1, 1), CVector(2)};
    e.x << -1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const auto s = split_at_eigenvalue(p, e, tup(1, 1) / std::sqrt(2.0));
    REQUIRE(s.trivial.cols() == 1);
    // (p, q, r) / (t - 1) along (t, t) tends to (0, 0, -2)
    CVector limit(3);
    limit << 0, 0, 1;
    CHECK(phase_distance(s.trivial.col(0), limit) <= 1e-6);
    CHECK(std::abs(s.trivial.col(0).dot(s.left_eigenvector)) <= 1e-12);
    CHECK(s.residual <= 1e-10);

    for (const auto& q : {running_example(), second_example(), hankel_example()}) {
        for (const auto& pair : solve_all(q, {{-2, -4}, {10, 6}, false}, {61, 64, 1e-8, 1e-8, 0})) {
            const auto sp = split_at_eigenvalue(q, pair);
            CHECK((sp.left_eigenvector.adjoint() * oracle::eval_pow(q, pair.lambda)).norm() <= 1e-10);
            const auto y = left_nullspace(evaluate(q, pair.lambda), 1e-10);
            const CVector off = sp.left_eigenvector - y.basis * (y.basis.adjoint() * sp.left_eigenvector);
            CHECK(off.norm() <= 1e-10);
        }
    }
}

TEST_CASE("split for a generalized eigenvalue problem") {
    CMatrix a0(3, 3), a1(3, 3);
    a0 << 1, 2, 0, 0, 3, 1, 1, 0, 2;
    a1 << 2, 0, 1, 1, 1, 0, 0, 1, 1;
    const auto p = MultiParamPencil::linear({a0, a1});
    Eigen::ComplexEigenSolver<CMatrix> es(-a1.inverse() * a0);
    EigenTuple l(1);
    l << es.eigenvalues()(0);
    const CMatrix m = a0 + l(0) * a1;
    const Eigenpair e{l, min_right_singular_vector(m)};
    const auto s = split_at_eigenvalue(p, e);
    CHECK(s.trivial.cols() == 0);
    const CVector y = min_right_singular_vector(m.adjoint());
    CHECK(phase_distance(s.left_eigenvector, y) <= 1e-8);
}

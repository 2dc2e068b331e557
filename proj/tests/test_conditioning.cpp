#include <doctest.h>

#include "oracles.hpp"

#include "mpspec/backward_error.hpp"
#include "mpspec/conditioning.hpp"
#include "mpspec/error.hpp"
#include "mpspec/fixtures.hpp"
#include "mpspec/solver.hpp"

#include <Eigen/Eigenvalues>

#include <random>

using namespace mpspec;

namespace {

EigenTuple tup(double a, double b) {
    EigenTuple t(2);
    t << a, b;
    return t;
}

Eigenpair refined(const MultiParamPencil& p, const EigenTuple& seed) {
    const RefineResult r = refine(p, seed);
    REQUIRE(r.converged);
    return r.pair;
}

Eigenpair approx_pair() {
    Eigenpair e{tup(0.9999, 0.9999), CVector(2)};
    e.x << -0.7070, 0.7072;
    return e;
}

}  // namespace

TEST_CASE("eigenpair and eigenvalue backward errors at the approximate pair") {
    const auto p = running_example();
    const auto rel = PerturbationModel::relative(p);
    const Eigenpair e = approx_pair();
    CHECK(eigenpair_backward_error(p, rel, e) == doctest::Approx(2.1e-5).epsilon(0.05));
    CHECK(eigenvalue_backward_error(p, rel, e.lambda) == doctest::Approx(1.0e-5).epsilon(0.05));

    Eigenpair scaled = e;
    scaled.x *= cplx(-3.0, 2.0);
    CHECK(eigenpair_backward_error(p, rel, scaled) ==
          doctest::Approx(eigenpair_backward_error(p, rel, e)).epsilon(1e-13));

    std::mt19937_64 rng(4);
    const double eta = eigenvalue_backward_error(p, rel, e.lambda);
    for (int i = 0; i < 100; ++i)
        CHECK(eta <= eigenpair_backward_error(p, rel, {e.lambda, oracle::random_unit(2, rng)}) * (1 + 1e-14));
    const CVector v = min_right_singular_vector(evaluate(p, e.lambda));
    CHECK(eigenpair_backward_error(p, rel, {e.lambda, v}) == doctest::Approx(eta).epsilon(1e-12));
    CHECK(eta == doctest::Approx(oracle::sigma_min_bdc(oracle::eval_pow(p, e.lambda)) /
                                 oracle::gamma_of(p, rel, e.lambda)).epsilon(1e-12));
}

TEST_CASE("backward error edge cases") {
    const auto p = running_example();
    const auto rel = PerturbationModel::relative(p);
    Eigenpair exact{tup(1, 1), CVector(2)};
    exact.x << -1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    CHECK(eigenpair_backward_error(p, rel, exact) <= 1e-14);
    for (const auto& d : attaining_perturbations(p, rel, exact)) CHECK(d.norm() == 0.0);

    const auto none = PerturbationModel::custom(p, {0.0, 0.0, 0.0});
    CHECK(std::isinf(eigenpair_backward_error(p, none, approx_pair())));
    CHECK(eigenpair_backward_error(p, none, exact) == 0.0);
    Eigenpair zero = exact;
    zero.x.setZero();
    CHECK_THROWS_AS(eigenpair_backward_error(p, rel, zero), InputError);
}

TEST_CASE("attaining perturbations") {
    const auto p = running_example();
    const auto rel = PerturbationModel::relative(p);
    const Eigenpair e = approx_pair();
    const double eta = eigenpair_backward_error(p, rel, e);
    const auto d = attaining_perturbations(p, rel, e);
    REQUIRE(d.size() == p.terms().size());
    for (std::size_t t = 0; t < d.size(); ++t)
        CHECK(oracle::norm2(d[t]) == doctest::Approx(eta * rel.weights[t]).epsilon(1e-10));
    const auto q = oracle::add_terms(p, d);
    CHECK((oracle::eval_pow(q, e.lambda) * e.x).norm() <= 1e-12 * oracle::norm2(evaluate(p, e.lambda)) * e.x.norm());

    Eigenpair on_axis{tup(0.7, 0.0), CVector::Ones(2)};
    const auto d0 = attaining_perturbations(p, rel, on_axis);
    CHECK(d0[static_cast<std::size_t>(p.find_term({0, 1}))].norm() == 0.0);
}

TEST_CASE("running example condition numbers") {
    const auto p = running_example();
    const auto rel = PerturbationModel::relative(p);
    const std::vector<std::pair<EigenTuple, double>> cases = {
        {tup(1, 2), 9.1899}, {tup(3, 1), 6.9633}, {tup(1, 1), 11.2077}};
    for (const auto& [l, kappa] : cases) {
        const Eigenpair e = refined(p, l);
        const ConditionReport r = eigenvalue_condition(p, rel, e);
        CHECK(r.kappa == doctest::Approx(kappa).epsilon(1e-3));
        CHECK(r.kappa == doctest::Approx(r.b_inverse_norm * r.gamma_star / e.lambda.norm()).epsilon(1e-13));
        CHECK(r.kappa == doctest::Approx(oracle::kappa_lambda(p, rel, e.lambda, e.x)).epsilon(1e-8));
        CHECK(r.left_null_dim == 2);
        const ConditionReport a = eigenvalue_condition(p, rel, e, ConditionMode::absolute);
        CHECK(a.kappa == doctest::Approx(r.b_inverse_norm * r.gamma_star).epsilon(1e-13));
    }
}

TEST_CASE("second example table values") {
    const auto p = second_example();
    const auto rel = PerturbationModel::relative(p);
    struct Row {
        EigenTuple l;
        double kappa, binv;
    };
    const std::vector<Row> rows = {{tup(3.6026, -0.4183), 37.9315, 7.3740},
                                   {tup(1.3683, 0.0552), 62.8704, 7.3355},
                                   {tup(0.9338, -1.3750), 11.9969, 0.9036}};
    for (const auto& row : rows) {
        const Eigenpair e = refined(p, row.l);
        const ConditionReport r = eigenvalue_condition(p, rel, e);
        CHECK(r.kappa == doctest::Approx(row.kappa).epsilon(1e-3));
        CHECK(r.b_inverse_norm == doctest::Approx(row.binv).epsilon(1e-3));
        CHECK(numerical_rank(secular_jacobian(p, e.lambda), 1e-8) == 2);
    }
}

TEST_CASE("condition number does not depend on the null basis") {
    const auto p = second_example();
    const auto rel = PerturbationModel::relative(p);
    const Eigenpair e = refined(p, tup(1.3683, 0.0552));
    const NullSpaceBasis y = left_nullspace(evaluate(p, e.lambda), 1e-10);
    REQUIRE(y.dim() == 2);
    std::mt19937_64 rng(8);
    CMatrix z(2, 2);
    for (Eigen::Index i = 0; i < 4; ++i) z(i) = oracle::random_unit(1, rng)(0) * double(i + 1);
    const CMatrix u = Eigen::HouseholderQR<CMatrix>(z).householderQ();
    const double n1 = oracle::norm2(auxiliary_matrix(p, e, y.basis).inverse());
    const double n2 = oracle::norm2(auxiliary_matrix(p, e, CMatrix(y.basis * u)).inverse());
    CHECK(n1 == doctest::Approx(n2).epsilon(1e-12));
}

TEST_CASE("refusals for non-eigenvalues and bad input") {
    const auto p = running_example();
    const auto rel = PerturbationModel::relative(p);
    CHECK_THROWS_AS(eigenvalue_condition(p, rel, {tup(2, 2), CVector::Ones(2)}), NumericalRefusal);
    CHECK_THROWS_AS(auxiliary_matrix(p, {tup(1, 1), CVector::Ones(2)}, CMatrix::Zero(2, 2)), InputError);
    CHECK_THROWS_AS(verify_jacobian_factorization(hankel_example(), {EigenTuple::Zero(3), CVector()}),
                    InputError);
}

TEST_CASE("zero eigenvalue switches to absolute mode") {
    // A_0 + l1 A_1 + l2 A_2 with eigenvalue (0, 0): A_0 annihilates e_1
    CMatrix a0(3, 2), a1(3, 2), a2(3, 2);
    a0 << 0, 1, 0, 2, 0, 3;
    a1 << 1, 0, 2, 1, 0, 1;
    a2 << 0, 1, 1, 0, 3, 1;
    const auto p = MultiParamPencil::linear({a0, a1, a2});
    Eigenpair e{tup(0, 0), CVector(2)};
    e.x << 1, 0;
    const auto r = eigenvalue_condition(p, PerturbationModel::relative(p), e);
    CHECK(r.switched_to_absolute);
    CHECK(r.mode == ConditionMode::absolute);
    CHECK(r.kappa == doctest::Approx(r.b_inverse_norm * r.gamma_star));
}

TEST_CASE("generalized eigenvalue problem reduction") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 5; ++trial) {
        CMatrix a0(5, 5), a1(5, 5);
        for (Eigen::Index i = 0; i < 25; ++i) {
            a0(i) = cplx(nd(rng), nd(rng));
            a1(i) = cplx(nd(rng), nd(rng));
        }
        const auto p = MultiParamPencil::linear({a0, a1});
        const auto rel = PerturbationModel::relative(p);
        Eigen::ComplexEigenSolver<CMatrix> es(-a1.inverse() * a0);
        const cplx lam = es.eigenvalues()(0);
        EigenTuple l(1);
        l << lam;
        const CMatrix m = a0 + lam * a1;
        const CVector x = min_right_singular_vector(m);
        const CVector y = min_right_singular_vector(m.adjoint());
        const Eigenpair e{l, x};
        const double g = oracle::gamma_of(p, rel, l);
        const double classical = g / (std::abs(y.dot(a1 * x)) * std::abs(lam));
        const ConditionReport r = eigenvalue_condition(p, rel, e);
        CHECK(r.kappa == doctest::Approx(classical).epsilon(1e-10));
        CHECK(std::abs(auxiliary_matrix(p, e, y)(0, 0)) == doctest::Approx(std::abs(y.dot(a1 * x))).epsilon(1e-12));

        const double kx = eigenvector_condition(p, rel, e);
        CHECK(kx == doctest::Approx(oracle::kappa_x(p, rel, l, x)).epsilon(1e-2));
    }
}

TEST_CASE("eigenvector condition") {
    const auto p = running_example();
    const auto rel = PerturbationModel::relative(p);
    for (const auto& l : {tup(1, 2), tup(3, 1), tup(1, 1)}) {
        const Eigenpair e = refined(p, l);
        const double kx = eigenvector_condition(p, rel, e);
        CHECK(kx == doctest::Approx(oracle::kappa_x(p, rel, e.lambda, e.x)).epsilon(1e-6));
        // g is rescaled internally
        CHECK(eigenvector_condition(p, rel, e, CVector(3.0 * e.x)) == doctest::Approx(kx).epsilon(1e-12));
    }

    CMatrix a0(2, 1), a1(2, 1), a2(2, 1);
    a0 << 1, 1;
    a1 << -1, 0;
    a2 << 0, -1;
    const auto col = MultiParamPencil::linear({a0, a1, a2});
    Eigenpair e{tup(1, 1), CVector::Ones(1)};
    CHECK(eigenvector_condition(col, PerturbationModel::relative(col), e) == 0.0);
}

TEST_CASE("jacobian factorization") {
    for (const auto& [p, seeds] :
         std::vector<std::pair<MultiParamPencil, std::vector<EigenTuple>>>{
             {running_example(), {tup(1, 2), tup(3, 1), tup(1, 1)}},
             {second_example(), {tup(3.6026, -0.4183), tup(1.3683, 0.0552), tup(0.9338, -1.3750)}}}) {
        for (const auto& s : seeds) {
            const Eigenpair e = refined(p, s);
            const JacobianFactorization f = verify_jacobian_factorization(p, e);
            CHECK(f.residual <= 1e-8);
            CHECK(f.d(0, 1) == cplx(0.0));
            CHECK(f.d(1, 0) == cplx(0.0));
            // J row i parallel to B row i for the first two selections
            for (int i = 0; i < 2; ++i) {
                const CVector a = f.jacobian.row(i).transpose();
                const CVector b = f.b.row(i).transpose();
                const double c = std::abs(a.dot(b)) / (a.norm() * b.norm());
                CHECK(std::acos(std::min(1.0, c)) <= 1e-7);
            }
            // the fitted jacobian is the independent finite-difference one
            const CMatrix j = secular_jacobian(p, e.lambda);
            const auto sels = enumerate_selections(3, 2);
            for (std::size_t i = 0; i < sels.size(); ++i)
                for (int v = 0; v < 2; ++v) {
                    const double h = 1e-6;
                    EigenTuple a = e.lambda, b = e.lambda;
                    a(v) += h;
                    b(v) -= h;
                    const cplx fd = (oracle::leibniz_det(oracle::select(oracle::eval_pow(p, a), sels[i].rows)) -
                                     oracle::leibniz_det(oracle::select(oracle::eval_pow(p, b), sels[i].rows))) /
                                    (2 * h);
                    CHECK(std::abs(fd - j(static_cast<Eigen::Index>(i), v)) <= 1e-6 * std::max(1.0, j.norm()));
                }
        }
    }
}

TEST_CASE("intersection angles") {
    const auto p = second_example();
    const std::vector<std::pair<EigenTuple, double>> rows = {
        {tup(3.6026, -0.4183), 0.0977}, {tup(1.3683, 0.0552), 0.2077}, {tup(0.9338, -1.3750), 0.6283}};
    for (const auto& [s, mean] : rows) {
        const Eigenpair e = refined(p, s);
        EigenTuple re = e.lambda.real().cast<cplx>();
        const IntersectionAngles a = intersection_angles(p, re);
        CHECK(a.curves.size() == 3);
        CHECK(a.angles.size() == 3);
        CHECK(std::abs(a.mean - mean) <= 1e-3);
    }

    // rows (0, l1), (0, l2), (1, 0): chi = -l1 and -l2 cross at right angles; the
    // first selection vanishes identically and has no tangent
    CMatrix b0(3, 2), b1(3, 2), b2(3, 2);
    b0 << 0, 0, 0, 0, 1, 0;
    b1 << 0, 1, 0, 0, 0, 0;
    b2 << 0, 0, 0, 1, 0, 0;
    const auto orth = MultiParamPencil::linear({b0, b1, b2});
    const auto o = intersection_angles(orth, tup(0, 0));
    REQUIRE(o.angles.size() == 1);
    CHECK(o.angles[0] == doctest::Approx(M_PI / 2));

    // tangential: chi_a = l2, chi_b = l2 - l1^2 both touch at the origin with the same tangent
    const MultiParamPencil tang(3, 2, 2,
                                {{{0, 0}, (CMatrix(3, 2) << 0, 0, 0, 0, 1, 0).finished()},
                                 {{0, 1}, (CMatrix(3, 2) << 0, 1, 0, 1, 0, 0).finished()},
                                 {{2, 0}, (CMatrix(3, 2) << 0, 0, 0, -1, 0, 0).finished()}});
    const auto t = intersection_angles(tang, tup(0, 0));
    REQUIRE(t.angles.size() == 1);
    CHECK(t.angles[0] == doctest::Approx(0.0));

    CHECK_THROWS_AS(intersection_angles(p, tup(2, 2)), NumericalRefusal);
}

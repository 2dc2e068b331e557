#include <doctest.h>

#include "oracles.hpp"

#include "mpspec/error.hpp"
#include "mpspec/fixtures.hpp"
#include "mpspec/sysid.hpp"

#include <Eigen/Eigenvalues>

#include <random>

using namespace mpspec;

namespace {

RVector vec(std::initializer_list<double> v) {
    RVector r(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) r(i++) = x;
    return r;
}

// min ||y_hat - y||^2 subject to T(alpha) y_hat = 0, by explicit projection
double reduced_cost(const RVector& y, const RVector& alpha) {
    const int n = static_cast<int>(alpha.size());
    const int N = static_cast<int>(y.size());
    RMatrix t = RMatrix::Zero(N - n, N);
    for (int r = 0; r < N - n; ++r) {
        for (int j = 0; j < n; ++j) t(r, r + j) = alpha(n - 1 - j);
        t(r, r + n) = 1.0;
    }
    const RVector ty = t * y;
    return ty.dot((t * t.transpose()).ldlt().solve(ty));
}

RMatrix fd_hessian(const RVector& y, const RVector& a, double h = 1e-4) {
    const Eigen::Index n = a.size();
    RMatrix hs(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            RVector pp = a, pm = a, mp = a, mm = a;
            pp(i) += h; pp(j) += h;
            pm(i) += h; pm(j) -= h;
            mp(i) -= h; mp(j) += h;
            mm(i) -= h; mm(j) -= h;
            hs(i, j) = (reduced_cost(y, pp) - reduced_cost(y, pm) - reduced_cost(y, mp) + reduced_cost(y, mm)) /
                       (4 * h * h);
        }
    return hs;
}

}  // namespace

TEST_CASE("constraint matrix") {
    const RMatrix t = constraint_matrix(vec({-0.5, -0.5}), 5);
    RMatrix expect(3, 5);
    expect << -.5, -.5, 1, 0, 0, 0, -.5, -.5, 1, 0, 0, 0, -.5, -.5, 1;
    CHECK((t - expect).norm() == 0.0);

    const RMatrix t0 = constraint_matrix(vec({0, 0}), 6);
    RVector y = RVector::LinSpaced(6, 1, 6);
    CHECK((t0 * y - y.tail(4)).norm() == 0.0);

    const RVector a = vec({0.3, -0.8});
    RVector g(8);
    g(0) = 1.0;
    g(1) = -2.0;
    for (int k = 2; k < 8; ++k) g(k) = -a(0) * g(k - 1) - a(1) * g(k - 2);
    CHECK((constraint_matrix(a, 8) * g).norm() <= 1e-12);
    CHECK_THROWS_AS(constraint_matrix(a, 2), InputError);
}

TEST_CASE("KKT system") {
    RealizationProblem p{realization_data(), 2};
    const RVector alpha = vec({-0.5, -0.5});
    const KKTEval at = kkt_system(p, alpha, p.y, RVector::Zero(3));
    CHECK(at.residual.norm() <= 1e-12);

    std::mt19937_64 rng(12);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 5; ++trial) {
        RVector a(2), yh(5), v(3);
        for (auto* x : {&a, &yh, &v})
            for (Eigen::Index i = 0; i < x->size(); ++i) (*x)(i) = nd(rng);
        const KKTEval e = kkt_system(p, a, yh, v);
        CHECK((e.jacobian - e.jacobian.transpose()).norm() <= 1e-12 * e.jacobian.norm());
        RVector z(10);
        z << yh, v, a;
        const double h = 1e-6;
        for (Eigen::Index j = 0; j < 10; ++j) {
            RVector zp = z, zm = z;
            zp(j) += h;
            zm(j) -= h;
            const RVector fp = kkt_system(p, zp.tail(2), zp.head(5), zp.segment(5, 3)).residual;
            const RVector fm = kkt_system(p, zm.tail(2), zm.head(5), zm.segment(5, 3)).residual;
            const RVector col = (fp - fm) / (2 * h);
            CHECK((col - e.jacobian.col(j)).norm() <= 1e-6 * std::max(1.0, e.jacobian.col(j).norm()));
        }

        const KKTEval free = kkt_system(p, a, yh, RVector::Zero(3));
        CHECK((free.residual.head(5) - (yh - p.y)).norm() <= 1e-14);
        CHECK(free.residual.tail(2).norm() == 0.0);
    }
}

TEST_CASE("problem validation") {
    CHECK_THROWS_AS((RealizationProblem{vec({1, 2, 3, 4}), 2}).validate(), InputError);
    CHECK_THROWS_AS((RealizationProblem{vec({1, 2, 3, 4, 5}), 0}).validate(), InputError);
    CHECK_THROWS_AS((RealizationProblem{vec({1, 2, 3, 4, std::nan("")}), 2}).validate(), InputError);
}

TEST_CASE("stationary points of the realization data") {
    RealizationProblem p{realization_data(), realization_order};
    MultistartReport rep;
    const auto pts = find_stationary_points(p, {-10, -10}, {10, 10}, {}, &rep);
    struct Row {
        double a1, a2, cost;
        StationaryType type;
    };
    const std::vector<Row> table = {{-0.5, -0.5, 0.0, StationaryType::minimum},
                                    {-0.4506, 0.9892, 51.8125, StationaryType::maximum},
                                    {1.5275, 0.6221, 51.8125, StationaryType::maximum},
                                    {0.7851, 0.7888, 45.4285, StationaryType::saddle},
                                    {5.7691, -7.5333, 1.6429, StationaryType::saddle}};
    REQUIRE(pts.size() == table.size());
    for (const auto& row : table) {
        const StationaryPoint* hit = nullptr;
        for (const auto& s : pts)
            if (std::abs(s.alpha(0) - row.a1) <= 1e-3 && std::abs(s.alpha(1) - row.a2) <= 1e-3) hit = &s;
        REQUIRE(hit != nullptr);
        CHECK(std::abs(hit->cost - row.cost) <= 1e-3);
        CHECK(hit->type == row.type);
        CHECK(hit->kkt_residual <= 1e-10 * (1 + p.y.norm()));
        CHECK(hit->cost == doctest::Approx((hit->y_hat - p.y).squaredNorm()).epsilon(1e-12));
        CHECK(hit->cost == doctest::Approx(reduced_cost(p.y, hit->alpha)).epsilon(1e-8).scale(1e-10));

        // classification against the finite-difference Hessian of the reduced cost
        const Eigen::SelfAdjointEigenSolver<RMatrix> es(fd_hessian(p.y, hit->alpha));
        const RVector ev = es.eigenvalues();
        RVector mine = hit->hessian_eigenvalues;
        std::sort(mine.data(), mine.data() + mine.size());
        REQUIRE(mine.size() == 2);
        for (int i = 0; i < 2; ++i)
            CHECK(std::abs(mine(i) - ev(i)) <= 1e-4 * std::max(1.0, ev.cwiseAbs().maxCoeff()));
    }
    CHECK(rep.starts == 21 * 21 + 100);
}

TEST_CASE("compliant data are fitted exactly") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> root(-0.9, 0.9), start(-3, 3);
    std::uniform_int_distribution<int> len(5, 8);
    MultistartOptions opts;
    opts.grid = 9;
    opts.random = 20;
    for (int trial = 0; trial < 20; ++trial) {
        const double r1 = root(rng), r2 = root(rng);
        const RVector a = vec({-(r1 + r2), r1 * r2});
        const int N = len(rng);
        RVector y(N);
        y(0) = start(rng);
        y(1) = start(rng);
        for (int k = 2; k < N; ++k) y(k) = -a(0) * y(k - 1) - a(1) * y(k - 2);
        RealizationProblem p{y, 2};
        const auto pts = find_stationary_points(p, {-3, -3}, {3, 3}, opts);
        REQUIRE(!pts.empty());
        CHECK(pts.front().cost <= 1e-10);
        CHECK((pts.front().alpha - a).norm() <= 1e-8);
        CHECK(pts.front().type == StationaryType::minimum);
    }
}

TEST_CASE("conditioning probe") {
    const auto pen = running_example();
    std::vector<RVector> alphas = {vec({1, 2}), vec({3, 1}), vec({1, 1}), vec({2, 2})};
    const auto rows = conditioning_probe(pen, PerturbationModel::relative(pen), alphas);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].kappa == doctest::Approx(9.1899).epsilon(1e-3));
    CHECK(rows[1].kappa == doctest::Approx(6.9633).epsilon(1e-3));
    CHECK(rows[2].kappa == doctest::Approx(11.2077).epsilon(1e-3));
    for (int i = 0; i < 3; ++i) CHECK(rows[static_cast<std::size_t>(i)].eta <= 1e-14);
    CHECK(rows[3].eta > 1e-3);
}

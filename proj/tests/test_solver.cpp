#include <doctest.h>

#include "oracles.hpp"

#include "mpspec/error.hpp"
#include "mpspec/fixtures.hpp"
#include "mpspec/solver.hpp"

#include <random>

using namespace mpspec;

namespace {

EigenTuple tup(cplx a, cplx b) {
    EigenTuple t(2);
    t << a, b;
    return t;
}

void check_spectrum(const std::vector<Eigenpair>& got, const std::vector<EigenTuple>& expect, double tol) {
    REQUIRE(got.size() == expect.size());
    for (const auto& e : expect) {
        double best = 1e300;
        for (const auto& g : got) best = std::min(best, (g.lambda - e).norm());
        CHECK(best <= tol);
    }
}

}  // namespace

TEST_CASE("seed candidates") {
    const auto p = running_example();
    GridSpec g{{Axis::real(0, 4, 101), Axis::real(0, 4, 101)}};
    const auto f = field(p, PerturbationModel::absolute(p), g, FieldMethod::naive);
    const auto seeds = seed_candidates(f, 64);
    for (const auto& e : {tup(1, 2), tup(3, 1), tup(1, 1)}) {
        bool near = false;
        for (const auto& s : seeds) near = near || (s - e).cwiseAbs().maxCoeff() <= 0.04 + 1e-12;
        CHECK(near);
    }
    const auto one = seed_candidates(f, 1);
    REQUIRE(one.size() == 1);
    CHECK((one[0] - seeds[0]).norm() == 0.0);

    PseudospectrumField flat = f;
    std::fill(flat.values.begin(), flat.values.end(), 1.0);
    CHECK(seed_candidates(flat, 64).empty());
}

TEST_CASE("refinement") {
    const auto p = running_example();
    const auto r = refine(p, tup(1.1, 1.9));
    REQUIRE(r.converged);
    CHECK((r.pair.lambda - tup(1, 2)).norm() <= 1e-10);
    CHECK(r.pair.x.norm() == doctest::Approx(1.0).epsilon(1e-14));

    const auto exact = refine(p, tup(3, 1));
    CHECK(exact.converged);
    CHECK(exact.iterations <= 2);

    // quadratic convergence: e_{n+1} / e_n^2 stays bounded
    const auto q = refine(second_example(), tup(3.3, -0.2));
    REQUIRE(q.converged);
    std::vector<double> err;
    for (const auto& it : q.iterates) err.push_back((it - q.pair.lambda).norm());
    int checked = 0;
    for (std::size_t i = 0; i + 1 < err.size(); ++i)
        if (err[i] > 1e-6 && err[i] < 0.1 && err[i + 1] > 0.0) {
            CHECK(err[i + 1] / (err[i] * err[i]) < 1e3);
            ++checked;
        }
    CHECK(checked >= 1);
}

TEST_CASE("solve_all on the examples") {
    SolveStats stats;
    const auto run = solve_all(running_example(), {{0, 0}, {4, 4}, false}, {}, &stats);
    check_spectrum(run, {tup(1, 2), tup(3, 1), tup(1, 1)}, 1e-8);
    CHECK(stats.seeds >= 3);
    for (std::size_t i = 1; i < run.size(); ++i) CHECK(tuple_less(run[i - 1].lambda, run[i].lambda));

    const auto again = solve_all(running_example(), {{0, 0}, {4, 4}, false});
    REQUIRE(again.size() == run.size());
    for (std::size_t i = 0; i < run.size(); ++i) CHECK((again[i].lambda - run[i].lambda).norm() == 0.0);

    check_spectrum(solve_all(second_example(), {{-2, -4}, {6, 4}, false}),
                   {tup(3.6026, -0.4183), tup(1.3683, 0.0552), tup(0.9338, -1.3750)}, 1e-4);

    const auto h = solve_all(hankel_example(), {{-1, -1}, {10, 6}, true}, {31, 64, 1e-8, 1e-8, 0});
    CHECK(h.size() == 3);
    for (const auto& e : h) CHECK(e.lambda.imag().norm() <= 1e-10);
}

TEST_CASE("spectrum verification") {
    const auto p = running_example();
    for (const auto& e : {tup(1, 2), tup(3, 1), tup(1, 1)}) CHECK(verify_spectrum(p, e));
    CHECK_FALSE(verify_spectrum(p, tup(2, 1.5)));
    CHECK(oracle::sigma_min_bdc(oracle::eval_pow(p, tup(2, 1.5))) > 1e-3);

    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-4, 4);
    for (const auto& q : {running_example(), second_example(), hankel_example()})
        for (int i = 0; i < 1000; ++i) {
            const EigenTuple l = tup(cplx(u(rng), u(rng)), cplx(u(rng), u(rng)));
            CHECK(verify_spectrum_secular(q, l) == verify_spectrum_sigma(q, l));
        }
    CHECK_THROWS_AS(solve_all(p, {{0}, {4}, false}), InputError);
}

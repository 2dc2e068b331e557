#include <doctest.h>

#include "mpspec/cli.hpp"
#include "mpspec/fixtures.hpp"
#include "mpspec/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mpspec;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "mpspec");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string fixture_dir() {
    static const std::string dir = [] {
        const fs::path d = fs::temp_directory_path() / "mpspec_cli_tests";
        install_examples(d.string());
        return d.string();
    }();
    return dir;
}

std::string fx(const std::string& name) { return (fs::path(fixture_dir()) / name).string(); }

}  // namespace

TEST_CASE("examples install writes the fixtures") {
    const fs::path d = fs::temp_directory_path() / "mpspec_cli_install";
    fs::remove_all(d);
    const Run r = cli({"examples", "install", "--dir", d.string()});
    CHECK(r.code == 0);
    for (const char* f : {"running.json", "second.json", "hankel.json", "realization.csv"})
        CHECK(fs::exists(d / f));
    const MultiParamPencil p = load_pencil((d / "running.json").string());
    CHECK((evaluate(p, EigenTuple::Ones(2)) - evaluate(running_example(), EigenTuple::Ones(2))).norm() == 0.0);
}

TEST_CASE("solve then condition numbers from its output") {
    const std::string eigs = (fs::path(fixture_dir()) / "eigs.json").string();
    Run r = cli({"solve", "--pencil", fx("running.json"), "--box", "0,4,0,4", "--res", "101", "--out", eigs});
    REQUIRE(r.code == 0);
    const json j = read_json(eigs);
    REQUIRE(j["eigenpairs"].size() == 3);

    r = cli({"mpcond", "--pencil", fx("running.json"), "--from", eigs});
    REQUIRE(r.code == 0);
    const json c = json::parse(r.out);
    std::vector<double> kappas;
    for (const auto& row : c["results"]) kappas.push_back(row["kappa"].get<double>());
    REQUIRE(kappas.size() == 3);
    // lexicographic order: (1,1), (1,2), (3,1)
    CHECK(kappas[0] == doctest::Approx(11.2077).epsilon(1e-3));
    CHECK(kappas[1] == doctest::Approx(9.1899).epsilon(1e-3));
    CHECK(kappas[2] == doctest::Approx(6.9633).epsilon(1e-3));

    r = cli({"mperr", "--pencil", fx("running.json"), "--from", eigs});
    REQUIRE(r.code == 0);
    for (const auto& row : json::parse(r.out)["results"]) CHECK(row["eta_pair"].get<double>() <= 1e-14);

    r = cli({"solve", "--pencil", fx("running.json"), "--box", "0,4,0,4", "--res", "101"});
    const std::string first = r.out;
    CHECK(cli({"solve", "--pencil", fx("running.json"), "--box", "0,4,0,4", "--res", "101"}).out == first);
}

TEST_CASE("mperr and mpcond single pairs") {
    Run r = cli({"mperr", "--pencil", fx("running.json"), "--lambda", "0.9999,0.9999", "--x", "-0.7070,0.7072"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["residual_norm"].get<double>() == doctest::Approx(2.9e-4).epsilon(0.05));
    CHECK(j["eta_pair"].get<double>() == doctest::Approx(2.1e-5).epsilon(0.05));
    CHECK(j["eta_lambda"].get<double>() == doctest::Approx(1.0e-5).epsilon(0.05));

    r = cli({"mpcond", "--pencil", fx("running.json"), "--lambda", "1,1", "--vector-cond"});
    REQUIRE(r.code == 0);
    j = json::parse(r.out);
    CHECK(j["kappa"].get<double>() == doctest::Approx(11.2077).epsilon(1e-3));
    CHECK(j.contains("kappa_x"));

    r = cli({"mpcond", "--pencil", fx("second.json"), "--lambda", "0.9337707639985937,-1.374977341863181", "--angles"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["mean_angle"].get<double>() == doctest::Approx(0.6283).epsilon(1e-3));
}

TEST_CASE("exit codes") {
    CHECK(cli({"mperr", "--pencil", "/nonexistent/p.json", "--lambda", "1,1"}).code == 2);
    const Run missing = cli({"solve", "--pencil", "/nonexistent/p.json", "--box", "0,1,0,1"});
    CHECK(missing.code == 2);
    CHECK(missing.out.empty());
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"mperr", "--pencil", fx("running.json"), "--bogus"}).code == 2);
    CHECK(cli({"mpcond", "--pencil", fx("running.json"), "--lambda", "2,2"}).code == 3);
    CHECK(cli({"mperr", "--pencil", fx("running.json"), "--lambda", "1,1,1"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("pseudospectrum, path, definiteness and sysid commands") {
    const fs::path d = fixture_dir();
    {
        std::ofstream g(d / "grid.json");
        g << R"({"axes":[{"real":[0,4,21]},{"real":[0,4,21]}]})";
    }
    Run r = cli({"mppseudo", "--pencil", fx("running.json"), "--grid", (d / "grid.json").string(), "--eps",
                 "1e-1,1e-2", "--out", (d / "field.csv").string(), "--plot", (d / "plot.py").string()});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(d / "field.csv"));
    CHECK(fs::exists(d / "plot.py"));
    const json s = json::parse(r.out);
    CHECK(s["telemetry"]["points"].get<int>() == 441);

    r = cli({"leftnull", "--pencil", fx("running.json"), "--path", "affine:t*(1,1)", "--range", "0,2", "--n", "201",
             "--out", (d / "path.csv").string()});
    CHECK(r.code == 0);
    std::ifstream csv(d / "path.csv");
    int lines = 0;
    for (std::string line; std::getline(csv, line);) ++lines;
    CHECK(lines == 202);

    r = cli({"definiteness", "--pencil", fx("hankel.json")});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["certified"].get<bool>());
    r = cli({"definiteness", "--pencil", fx("running.json")});
    CHECK(r.code == 0);
    CHECK_FALSE(json::parse(r.out)["certified"].get<bool>());

    r = cli({"sysid", "--data", fx("realization.csv"), "--order", "2", "--box", "-10,10,-10,10"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["points"].size() == 5);
}

TEST_CASE("pencil JSON round trip") {
    const MultiParamPencil p = hankel_example();
    const MultiParamPencil q = pencil_from_json(json::parse(pencil_to_json(p).dump()));
    EigenTuple l(2);
    l << cplx(0.3, -1), 2.5;
    CHECK((evaluate(p, l) - evaluate(q, l)).norm() == 0.0);

    const json shorthand = json::parse(R"({"A":[[[1,0],[0,1]],[[1,0],[0,0]],[[0,0],[0,[2,1]]]]})");
    const MultiParamPencil s = pencil_from_json(shorthand);
    CHECK(s.m() == 2);
    CHECK(s.k() == 2);
    CHECK(evaluate(s, l)(1, 1) == cplx(1.0) + l(1) * cplx(2, 1));
    CHECK(parse_complex("2-3j") == cplx(2, -3));
    CHECK(parse_complex("-j") == cplx(0, -1));
}

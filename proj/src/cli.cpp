#include "mpspec/cli.hpp"

#include "mpspec/backward_error.hpp"
#include "mpspec/conditioning.hpp"
#include "mpspec/contours.hpp"
#include "mpspec/error.hpp"
#include "mpspec/fixtures.hpp"
#include "mpspec/io.hpp"
#include "mpspec/leftnull.hpp"
#include "mpspec/pseudospectrum.hpp"
#include "mpspec/solver.hpp"
#include "mpspec/sysid.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

namespace mpspec {

namespace {

struct Common {
    std::uint64_t seed = 0;
    int threads = 0;
};

struct PairInput {
    std::string pencil;
    std::string lambda;
    std::string x;
    std::string from;
    int index = -1;
    std::string model = "rel";
    std::string weights;
};

void add_pair_options(CLI::App* sc, PairInput& in) {
    sc->add_option("--pencil", in.pencil, "pencil JSON file")->required();
    sc->add_option("--lambda", in.lambda, "eigenvalue tuple, e.g. 1,2 or 1+2j,3");
    sc->add_option("--x", in.x, "eigenvector entries, comma separated");
    sc->add_option("--from", in.from, "eigenpairs JSON written by 'solve'");
    sc->add_option("--index", in.index, "which eigenpair of --from (default: all)");
    sc->add_option("--model", in.model, "perturbation model: rel, abs or custom")
        ->check(CLI::IsMember({"rel", "abs", "custom"}));
    sc->add_option("--weights", in.weights, "custom weights ||E_t||, one per pencil term");
}

PerturbationModel make_model(const MultiParamPencil& p, const std::string& name,
                             const std::string& weights) {
    if (!weights.empty()) return PerturbationModel::custom(p, parse_real_list(weights));
    if (name == "custom") throw InputError("--model custom needs --weights");
    return name == "abs" ? PerturbationModel::absolute(p) : PerturbationModel::relative(p);
}

EigenTuple tuple_from(const std::string& s, int m) {
    const std::vector<cplx> v = parse_complex_list(s);
    if (static_cast<int>(v.size()) != m)
        throw InputError("lambda has " + std::to_string(v.size()) + " entries, pencil has m = " +
                         std::to_string(m));
    EigenTuple t(m);
    for (int i = 0; i < m; ++i) t(i) = v[static_cast<std::size_t>(i)];
    return t;
}

// Eigenpairs to analyse; x is empty when it was not supplied.
std::vector<Eigenpair> gather_pairs(const MultiParamPencil& p, const PairInput& in) {
    std::vector<Eigenpair> pairs;
    if (!in.from.empty()) {
        const json j = read_json(in.from);
        if (!j.contains("eigenpairs")) throw InputError("'" + in.from + "' has no eigenpairs");
        const json& list = j.at("eigenpairs");
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (in.index >= 0 && static_cast<int>(i) != in.index) continue;
            Eigenpair e{vector_from_json(list[i].at("lambda")), CVector()};
            if (list[i].contains("x")) e.x = vector_from_json(list[i].at("x"));
            pairs.push_back(std::move(e));
        }
        if (in.index >= static_cast<int>(list.size())) throw InputError("--index out of range");
    } else {
        if (in.lambda.empty()) throw InputError("give --lambda or --from");
        Eigenpair e{tuple_from(in.lambda, p.m()), CVector()};
        if (!in.x.empty()) {
            const std::vector<cplx> xv = parse_complex_list(in.x);
            e.x.resize(static_cast<Eigen::Index>(xv.size()));
            for (std::size_t i = 0; i < xv.size(); ++i) e.x(static_cast<Eigen::Index>(i)) = xv[i];
        }
        pairs.push_back(std::move(e));
    }
    for (Eigenpair& e : pairs) {
        if (e.lambda.size() != p.m()) throw InputError("lambda length does not match the pencil");
        if (e.x.size() != 0 && e.x.size() != p.l()) throw InputError("x length does not match the pencil");
    }
    return pairs;
}

void emit(const json& j, const std::string& out_path, std::ostream& out) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw InputError("cannot write '" + out_path + "'");
    f << text;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot write '" + path + "'");
    f << text;
}

json telemetry_json(const Telemetry& t) {
    return {{"setup_factorizations", t.setup_factorizations},
            {"reductions", t.reductions},
            {"point_factorizations", t.point_factorizations},
            {"lanczos_steps", t.lanczos_steps},
            {"fallbacks", t.fallbacks},
            {"dense_svds", t.dense_svds},
            {"flops_setup", t.flops_setup},
            {"flops_reduction", t.flops_reduction},
            {"flops_point_qr", t.flops_point_qr},
            {"flops_iter", t.flops_iter},
            {"flops_dense", t.flops_dense},
            {"points", t.points}};
}

json pair_result(const json& base, bool single, std::vector<json>& rows) {
    if (single) return rows.front();
    json j = base;
    j["results"] = rows;
    return j;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Perturbation analysis for rectangular multiparameter eigenvalue problems"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--seed", common.seed, "seed for every random draw");
    app.add_option("--threads", common.threads, "worker threads (default: all cores)");

    // mperr
    PairInput err_in;
    CLI::App* mperr = app.add_subcommand("mperr", "backward errors of approximate eigenpairs");
    add_pair_options(mperr, err_in);

    // mpcond
    PairInput cond_in;
    std::string cond_mode = "rel";
    bool vector_cond = false;
    bool angles = false;
    std::string gvec;
    CLI::App* mpcond = app.add_subcommand("mpcond", "condition numbers of simple eigenpairs");
    add_pair_options(mpcond, cond_in);
    mpcond->add_option("--mode", cond_mode, "rel or abs eigenvalue condition number")
        ->check(CLI::IsMember({"rel", "abs"}));
    mpcond->add_flag("--vector-cond", vector_cond, "also report the eigenvector condition number");
    mpcond->add_option("--g", gvec, "normalization vector for the eigenvector (default x)");
    mpcond->add_flag("--angles", angles, "intersection angles of the secular curves");

    // mppseudo
    std::string ps_pencil, ps_grid, ps_model = "rel", ps_weights, ps_method = "auto", ps_eps,
                                    ps_out, ps_plot;
    CLI::App* mppseudo = app.add_subcommand("mppseudo", "pseudospectrum field over a grid");
    mppseudo->add_option("--pencil", ps_pencil)->required();
    mppseudo->add_option("--grid", ps_grid, "grid JSON file")->required();
    mppseudo->add_option("--model", ps_model)->check(CLI::IsMember({"rel", "abs", "custom"}));
    mppseudo->add_option("--weights", ps_weights);
    mppseudo->add_option("--method", ps_method)
        ->check(CLI::IsMember({"naive", "auto", "slightly_tall", "very_tall"}));
    mppseudo->add_option("--eps", ps_eps, "comma-separated levels");
    mppseudo->add_option("--out", ps_out, "field CSV");
    mppseudo->add_option("--plot", ps_plot, "python plotting script to write");

    // solve
    std::string sv_pencil, sv_box, sv_out;
    int sv_res = 101;
    bool sv_complex = false;
    CLI::App* solve = app.add_subcommand("solve", "all eigenpairs inside a box");
    solve->add_option("--pencil", sv_pencil)->required();
    solve->add_option("--box", sv_box, "lo1,hi1,lo2,hi2,...")->required();
    solve->add_option("--res", sv_res, "grid points per axis");
    solve->add_flag("--complex", sv_complex, "also sweep imaginary parts");
    solve->add_option("--out", sv_out);

    // leftnull
    std::string ln_pencil, ln_path, ln_range = "0,1", ln_out;
    int ln_n = 101;
    CLI::App* leftnull = app.add_subcommand("leftnull", "left null spaces along an affine path");
    leftnull->add_option("--pencil", ln_pencil)->required();
    leftnull->add_option("--path", ln_path, "affine:t*(c,d) or affine:(a,b)+t*(c,d)")->required();
    leftnull->add_option("--range", ln_range, "t0,t1");
    leftnull->add_option("--n", ln_n, "number of samples");
    leftnull->add_option("--out", ln_out, "CSV file");

    // sysid
    std::string si_data, si_box = "-10,10,-10,10", si_out, si_pencil, si_model = "rel";
    int si_order = 2;
    int si_grid = 21;
    int si_random = 100;
    CLI::App* sysid = app.add_subcommand("sysid", "stationary points of the realization problem");
    sysid->add_option("--data", si_data, "output data file")->required();
    sysid->add_option("--order", si_order);
    sysid->add_option("--box", si_box);
    sysid->add_option("--grid", si_grid, "multistart grid points per axis");
    sysid->add_option("--random", si_random, "random multistarts");
    sysid->add_option("--out", si_out);
    sysid->add_option("--pencil", si_pencil, "pencil whose eigenvalues are the model parameters");
    sysid->add_option("--model", si_model)->check(CLI::IsMember({"rel", "abs"}));

    // definiteness
    std::string df_pencil;
    CLI::App* definiteness = app.add_subcommand("definiteness", "search for a right definite certificate");
    definiteness->add_option("--pencil", df_pencil)->required();

    // examples
    std::string ex_dir = "examples_data";
    CLI::App* examples = app.add_subcommand("examples", "built-in example problems");
    CLI::App* install = examples->add_subcommand("install", "write the example fixtures");
    install->add_option("--dir", ex_dir);
    examples->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (mperr->parsed()) {
            const MultiParamPencil p = load_pencil(err_in.pencil);
            const PerturbationModel model = make_model(p, err_in.model, err_in.weights);
            std::vector<json> rows;
            for (const Eigenpair& e : gather_pairs(p, err_in)) {
                json r = {{"lambda", to_json(e.lambda)},
                          {"model", to_string(model.mode)},
                          {"gamma", number_json(gamma(p, model, e.lambda))},
                          {"eta_lambda", number_json(eigenvalue_backward_error(p, model, e.lambda))}};
                if (e.x.size()) {
                    r["x"] = to_json(e.x);
                    r["residual_norm"] = number_json(residual(p, e).norm());
                    r["eta_pair"] = number_json(eigenpair_backward_error(p, model, e));
                }
                rows.push_back(r);
            }
            emit(pair_result({{"model", to_string(model.mode)}}, err_in.from.empty(), rows), "", out);
            return 0;
        }
        if (mpcond->parsed()) {
            const MultiParamPencil p = load_pencil(cond_in.pencil);
            const PerturbationModel model = make_model(p, cond_in.model, cond_in.weights);
            const ConditionMode mode = cond_mode == "abs" ? ConditionMode::absolute : ConditionMode::relative;
            std::vector<json> rows;
            for (Eigenpair e : gather_pairs(p, cond_in)) {
                if (e.x.size() == 0) e.x = min_right_singular_vector(evaluate(p, e.lambda));
                const ConditionReport rep = eigenvalue_condition(p, model, e, mode);
                json r = {{"lambda", to_json(e.lambda)},
                          {"kappa", number_json(rep.kappa)},
                          {"mode", to_string(rep.mode)},
                          {"switched_to_absolute", rep.switched_to_absolute},
                          {"b_inverse_norm", number_json(rep.b_inverse_norm)},
                          {"b_condition", number_json(rep.b_condition)},
                          {"gamma", number_json(rep.gamma_star)},
                          {"left_null_dim", rep.left_null_dim},
                          {"model", to_string(model.mode)}};
                if (vector_cond) {
                    std::optional<CVector> g;
                    if (!gvec.empty()) {
                        const std::vector<cplx> gv = parse_complex_list(gvec);
                        g = CVector(static_cast<Eigen::Index>(gv.size()));
                        for (std::size_t i = 0; i < gv.size(); ++i) (*g)(static_cast<Eigen::Index>(i)) = gv[i];
                    }
                    r["kappa_x"] = number_json(eigenvector_condition(p, model, e, g));
                }
                if (angles) {
                    const IntersectionAngles a = intersection_angles(p, e.lambda);
                    r["angles"] = a.angles;
                    r["mean_angle"] = a.mean;
                    r["curves"] = a.curves;
                }
                rows.push_back(r);
            }
            emit(pair_result({{"model", to_string(model.mode)}}, cond_in.from.empty(), rows), "", out);
            return 0;
        }
        if (mppseudo->parsed()) {
            const MultiParamPencil p = load_pencil(ps_pencil);
            const PerturbationModel model = make_model(p, ps_model, ps_weights);
            const GridSpec grid = grid_from_json(read_json(ps_grid));
            const std::vector<double> levels = ps_eps.empty() ? std::vector<double>{} : parse_real_list(ps_eps);
            for (double e : levels)
                if (!(e >= 0.0)) throw InputError("eps levels must be nonnegative");
            const PseudospectrumField f = field(p, model, grid, parse_field_method(ps_method), common.threads);
            json summary = {{"method", to_string(f.method)},
                            {"model", to_string(model.mode)},
                            {"nodes", f.values.size()},
                            {"slices", f.slices},
                            {"grid", grid_to_json(grid)},
                            {"telemetry", telemetry_json(f.telemetry)}};
            double mn = INFINITY;
            for (double v : f.values) mn = std::min(mn, v);
            summary["min_eta"] = number_json(mn);
            json members = json::array();
            for (double e : levels) {
                std::size_t c = 0;
                for (double v : f.values) c += v <= e;
                members.push_back({{"eps", e}, {"nodes_inside", c}});
            }
            summary["levels"] = members;
            bool planar = true;
            try {
                plane_view(f);
            } catch (const InputError&) {
                planar = false;
            }
            if (planar && !levels.empty()) {
                json cs = json::array();
                for (const ContourLevel& lv : export_contours(f, levels)) {
                    int closed = 0;
                    for (const Polyline& pl : lv.lines) closed += pl.closed;
                    cs.push_back({{"eps", lv.eps}, {"polylines", lv.lines.size()}, {"closed", closed}});
                }
                summary["contours"] = cs;
            }
            if (!ps_plot.empty() && !planar) throw InputError("--plot needs a two-dimensional field");
            if (!ps_out.empty()) {
                std::ostringstream csv;
                write_field_csv(csv, f);
                write_text(ps_out, csv.str());
            }
            if (!ps_plot.empty()) {
                std::ostringstream py;
                write_plot_script(py, f, levels, ps_out.empty() ? "field.csv" : ps_out, &p);
                write_text(ps_plot, py.str());
            }
            emit(summary, "", out);
            return 0;
        }
        if (solve->parsed()) {
            const MultiParamPencil p = load_pencil(sv_pencil);
            const std::vector<double> b = parse_real_list(sv_box);
            if (static_cast<int>(b.size()) != 2 * p.m()) throw InputError("--box needs 2m numbers");
            SearchBox box;
            for (int j = 0; j < p.m(); ++j) {
                box.lo.push_back(b[static_cast<std::size_t>(2 * j)]);
                box.hi.push_back(b[static_cast<std::size_t>(2 * j + 1)]);
            }
            box.complex = sv_complex;
            SolveOptions opts;
            opts.resolution = sv_res;
            opts.threads = common.threads;
            SolveStats st;
            const std::vector<Eigenpair> pairs = solve_all(p, box, opts, &st);
            const PerturbationModel model = PerturbationModel::relative(p);
            json list = json::array();
            for (const Eigenpair& e : pairs)
                list.push_back({{"lambda", to_json(e.lambda)},
                                {"x", to_json(e.x)},
                                {"eta", number_json(eigenpair_backward_error(p, model, e))}});
            json j = {{"eigenpairs", list},
                      {"stats",
                       {{"seeds", st.seeds},
                        {"converged", st.converged},
                        {"duplicates", st.duplicates},
                        {"outside_box", st.outside},
                        {"rejected_secular", st.rejected_secular},
                        {"rejected_not_simple", st.rejected_simple}}}};
            emit(j, sv_out, out);
            return 0;
        }
        if (leftnull->parsed()) {
            const MultiParamPencil p = load_pencil(ln_pencil);
            const AffinePath path = parse_affine_path(ln_path, p.m());
            const std::vector<double> r = parse_real_list(ln_range);
            if (r.size() != 2) throw InputError("--range needs t0,t1");
            if (ln_n < 1) throw InputError("--n must be positive");
            std::vector<double> ts;
            for (int i = 0; i < ln_n; ++i)
                ts.push_back(ln_n == 1 ? r[0] : r[0] + (r[1] - r[0]) * i / (ln_n - 1));
            const std::vector<PathSample> samples = nullspace_along_path(p, path, ts, 1e-10, common.threads);
            int maxd = 0;
            for (const PathSample& s : samples) maxd = std::max(maxd, s.basis.dim());
            std::ostringstream csv;
            csv << "t";
            for (int c = 0; c < maxd; ++c)
                for (int i = 0; i < p.k(); ++i) csv << ",y" << c + 1 << "_" << i + 1 << "_re,y" << c + 1 << "_" << i + 1 << "_im";
            csv << ",dimension\n" << std::setprecision(17);
            std::map<int, int> dims;
            json jumps = json::array();
            for (const PathSample& s : samples) {
                csv << s.t;
                for (int c = 0; c < maxd; ++c)
                    for (int i = 0; i < p.k(); ++i) {
                        if (c < s.basis.dim()) csv << ',' << s.basis.basis(i, c).real() << ',' << s.basis.basis(i, c).imag();
                        else csv << ",,";
                    }
                csv << ',' << s.basis.dim() << '\n';
                ++dims[s.basis.dim()];
                if (s.basis.dim() != p.m() - 1) jumps.push_back(s.t);
            }
            if (ln_out.empty()) {
                out << csv.str();
            } else {
                write_text(ln_out, csv.str());
                json d = json::object();
                for (auto [k, v] : dims) d[std::to_string(k)] = v;
                emit({{"samples", samples.size()}, {"dimension_counts", d}, {"off_trivial_t", jumps}}, "", out);
            }
            return 0;
        }
        if (sysid->parsed()) {
            RealizationProblem prob{load_data(si_data), si_order};
            prob.validate();
            const std::vector<double> b = parse_real_list(si_box);
            if (static_cast<int>(b.size()) != 2 * si_order) throw InputError("--box needs 2 * order numbers");
            std::vector<double> lo, hi;
            for (int i = 0; i < si_order; ++i) {
                lo.push_back(b[static_cast<std::size_t>(2 * i)]);
                hi.push_back(b[static_cast<std::size_t>(2 * i + 1)]);
            }
            std::optional<MultiParamPencil> probe;
            if (!si_pencil.empty()) probe = load_pencil(si_pencil);
            MultistartOptions opts;
            opts.grid = si_grid;
            opts.random = si_random;
            opts.seed = common.seed;
            opts.threads = common.threads;
            MultistartReport rep;
            const std::vector<StationaryPoint> pts = find_stationary_points(prob, lo, hi, opts, &rep);
            std::vector<ProbeRow> rows;
            if (probe) {
                std::vector<RVector> alphas;
                for (const StationaryPoint& s : pts) alphas.push_back(s.alpha);
                const PerturbationModel model = si_model == "abs" ? PerturbationModel::absolute(*probe)
                                                                  : PerturbationModel::relative(*probe);
                rows = conditioning_probe(*probe, model, alphas);
            }
            json list = json::array();
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const StationaryPoint& s = pts[i];
                json r = {{"alpha", std::vector<double>(s.alpha.data(), s.alpha.data() + s.alpha.size())},
                          {"cost", s.cost},
                          {"misfit_norm", s.misfit_norm},
                          {"type", to_string(s.type)},
                          {"hessian_eigenvalues",
                           std::vector<double>(s.hessian_eigenvalues.data(),
                                               s.hessian_eigenvalues.data() + s.hessian_eigenvalues.size())},
                          {"kkt_residual", s.kkt_residual},
                          {"y_hat", std::vector<double>(s.y_hat.data(), s.y_hat.data() + s.y_hat.size())}};
                if (probe) {
                    r["eta"] = number_json(rows[i].eta);
                    r["kappa"] = rows[i].has_kappa ? number_json(rows[i].kappa) : json(nullptr);
                    if (!rows[i].note.empty()) r["probe_note"] = rows[i].note;
                }
                list.push_back(r);
            }
            json j = {{"points", list},
                      {"cost", "squared misfit ||y_hat - y||^2"},
                      {"multistart", {{"starts", rep.starts}, {"converged", rep.converged}, {"outside_box", rep.outside}}},
                      {"box", b}};
            emit(j, si_out, out);
            return 0;
        }
        if (definiteness->parsed()) {
            const MultiParamPencil p = load_pencil(df_pencil);
            const DefinitenessResult d = right_definiteness(p);
            const auto sels = enumerate_selections(p.k(), p.l());
            auto rows_of = [&](const std::vector<int>& idx) {
                json a = json::array();
                for (int i : idx) {
                    std::vector<int> r = sels[static_cast<std::size_t>(i)].rows;
                    for (int& x : r) ++x;
                    a.push_back(r);
                }
                return a;
            };
            json j = {{"certified", d.certified},
                      {"subsets_tried", d.subsets_tried},
                      {"best_margin", d.best_margin},
                      {"best_selections", rows_of(d.best_selections)}};
            if (d.certified) {
                j["selections"] = rows_of(d.selections);
                j["delta0_spectrum"] = d.delta0_spectrum;
                j["sign_flipped"] = d.sign_flipped;
                j["margin"] = d.margin;
            }
            emit(j, "", out);
            return 0;
        }
        if (install->parsed()) {
            emit({{"written", install_examples(ex_dir)}}, "", out);
            return 0;
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalRefusal& e) {
        err << "refused: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

}  // namespace mpspec

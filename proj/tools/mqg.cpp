// Command-line front end: gram | verify | conjugate | sweep.
//
// Data goes to files under --out; logs and timings go to stderr. Exit
// status: 0 all checks pass, 1 a check failed, 2 invalid input or runtime
// error (a JSON error record is printed on stderr).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "mqg/io.hpp"
#include "mqg/verify.hpp"

namespace fs = std::filesystem;
using mqg::RunConfig;
using mqg::io::Json;

namespace {

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void log(const std::string& msg) { std::cerr << "[mqg] " << msg << '\n'; }

struct CliOptions {
    RunConfig cfg;
    std::string config_path;
    std::string q_matrix_path;
    double q_random = -1;
    std::string formats;
    std::vector<std::string> tolerances;
    double grid_lo = 1e-5;
    double grid_hi = 0.1;
    int per_decade = 16;
};

void add_common(CLI::App* app, CliOptions& o)
{
    app->add_option("--config", o.config_path, "key = value configuration file (flags override it)");
    app->add_option("--n", o.cfg.n_generators, "number of generators N");
    app->add_option("--q", o.cfg.q, "uniform deformation parameter");
    app->add_option("--q-matrix", o.q_matrix_path, "file with the symmetric N x N matrix Q");
    app->add_option("--q-random", o.q_random, "random symmetric Q with entries in [-q, q] drawn from --seed");
    app->add_option("--depth", o.cfg.depth, "Fock truncation depth d");
    app->add_option("--eps", o.cfg.eps, "radius parameter eps > 0");
    app->add_option("--neumann", o.cfg.neumann, "Neumann order K (default from pi)");
    app->add_option("--cutoff", o.cfg.cutoff, "degree cutoff D (default d)");
    app->add_option("--seed", o.cfg.seed, "random seed");
    app->add_option("--out", o.cfg.out, "output directory");
    app->add_option("--format", o.formats, "comma-separated subset of json,csv,txt");
    app->add_option("--threshold", o.cfg.threshold, "smallness constant c (external)");
    app->add_option("--tol", o.tolerances, "tolerance override name=value")->take_all();
}

/// Config file first, then flags that were given explicitly.
RunConfig resolve(const CLI::App& app, CliOptions o)
{
    RunConfig cfg;
    if (!o.config_path.empty()) cfg.apply_config_text(mqg::io::read_file(o.config_path));
    auto given = [&](const char* name) { return app.count(name) > 0; };
    if (given("--n")) cfg.n_generators = o.cfg.n_generators;
    if (given("--q")) {
        cfg.q = o.cfg.q;
        cfg.q_source = RunConfig::QSource::uniform;
    }
    if (given("--q-random")) {
        cfg.q = o.q_random;
        cfg.q_source = RunConfig::QSource::random;
    }
    if (given("--q-matrix")) {
        cfg.q_matrix_path = o.q_matrix_path;
        cfg.q_matrix = mqg::io::matrix_from_text(mqg::io::read_file(o.q_matrix_path));
        cfg.q_source = RunConfig::QSource::matrix;
    }
    if (given("--q") + given("--q-random") + given("--q-matrix") > 1)
        throw std::invalid_argument("give at most one of --q, --q-random, --q-matrix");
    if (given("--depth")) cfg.depth = o.cfg.depth;
    if (given("--eps")) cfg.eps = o.cfg.eps;
    if (given("--neumann")) cfg.neumann = o.cfg.neumann;
    if (given("--cutoff")) cfg.cutoff = o.cfg.cutoff;
    if (given("--seed")) cfg.seed = o.cfg.seed;
    if (given("--out")) cfg.out = o.cfg.out;
    if (given("--threshold")) cfg.threshold = o.cfg.threshold;
    if (given("--format")) {
        std::string text = "format = " + o.formats;
        cfg.apply_config_text(text);
    }
    for (const auto& t : o.tolerances) {
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--tol expects name=value");
        cfg.tolerances[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
    }
    if (cfg.q_source == RunConfig::QSource::matrix) cfg.n_generators = static_cast<int>(cfg.q_matrix.rows());
    cfg.validate();
    return cfg;
}

std::string path_in(const RunConfig& cfg, const std::string& name) { return (fs::path(cfg.out) / name).string(); }

void prepare_out(const RunConfig& cfg) { fs::create_directories(cfg.out); }

int cmd_gram(const RunConfig& cfg)
{
    prepare_out(cfg);
    const auto q = cfg.qspec();
    const mqg::FockSpace<double> space(q, cfg.depth);
    Json levels = Json::array();
    for (int n = 0; n <= cfg.depth; ++n) {
        const mqg::GramSpectrum spec(space, n);
        const auto b = mqg::pnorm_bounds(q.q_max(), n);
        Json lvl;
        lvl["level"] = n;
        lvl["dimension"] = space.basis().level_size(n);
        lvl["min_eigenvalue"] = spec.min_eigenvalue();
        lvl["max_eigenvalue"] = spec.max_eigenvalue();
        lvl["inverse_norm"] = 1.0 / spec.min_eigenvalue();
        lvl["bound_product"] = b.product;
        lvl["bound_theta"] = b.theta;
        lvl["bound_simple"] = b.simple;
        Json words = Json::array();
        for (const auto& w : space.basis().words(n)) words.push_back(mqg::io::word_to_text(w));
        lvl["basis"] = std::move(words);
        if (cfg.wants("json")) lvl["gram"] = mqg::io::matrix_to_json(space.gram(n));
        if (cfg.wants("csv"))
            mqg::io::write_file(path_in(cfg, "gram_" + std::to_string(n) + ".csv"), mqg::io::matrix_to_csv(space.gram(n)));
        levels.push_back(std::move(lvl));
    }
    Json out;
    out["config"] = cfg.to_json();
    out["levels"] = std::move(levels);
    mqg::io::write_file(path_in(cfg, "gram.json"), mqg::io::dump_json(out));
    log("wrote " + path_in(cfg, "gram.json"));
    return 0;
}

int cmd_verify(const RunConfig& cfg)
{
    prepare_out(cfg);
    const Stopwatch sw;
    const auto report = mqg::run_verification(cfg);
    mqg::io::write_file(path_in(cfg, "report.json"), mqg::io::dump_json(report.to_json()));
    int failed = 0;
    for (const auto& c : report.checks()) {
        if (c.status == mqg::CheckStatus::fail) ++failed;
        std::fprintf(stderr, "[mqg] %-8s %-44s residual %.3e bound %.3e\n", mqg::to_string(c.status).c_str(),
                     c.name.c_str(), c.max_residual, c.bound);
    }
    log("verify: " + std::to_string(report.checks().size()) + " checks, " + std::to_string(failed) + " failed, " +
        std::to_string(sw.seconds()) + " s");
    return report.passed() ? 0 : 1;
}

int cmd_conjugate(const RunConfig& cfg)
{
    prepare_out(cfg);
    const Stopwatch sw;
    const auto q = cfg.qspec();
    const int N = q.n_generators();
    const auto params = mqg::TransportParams::make(q.q_max(), N, cfg.eps, cfg.neumann, cfg.effective_cutoff());
    const auto bundle = mqg::compute_conjugates(q, params);
    const mqg::FockSpace<double> space(q, params.cutoff);
    const mqg::VacuumStates<double> states(space);
    const int top = std::min(5, 2 * params.cutoff - (params.cutoff + 1));

    Json out;
    out["config"] = cfg.to_json();
    out["params"] = Json{{"pi", params.pi},   {"R", params.R},
                         {"K", params.neumann_order}, {"D", params.cutoff},
                         {"eps", params.eps}};
    Json gens = Json::array();
    for (int j = 0; j < N; ++j) {
        Json g;
        g["generator"] = j + 1;
        g["xi_norm"] = bundle.xi_norms[j];
        g["neumann_residual"] = bundle.neumann_residuals[j];
        g["distance_to_free"] = bundle.distances[j];
        g["star_asymmetry"] = bundle.star_asymmetry[j];
        if (top >= 1) {
            const auto c = mqg::conjugate_relation_check(states, j, bundle.xi[j], top);
            g["conjugate_relation"] = Json{{"max_degree", top},
                                           {"monomials", c.monomials},
                                           {"max_residual", c.max_residual},
                                           {"worst", mqg::io::word_to_text(c.worst)}};
        }
        g["xi"] = mqg::io::poly_to_json(bundle.xi[j]);
        if (cfg.wants("txt"))
            mqg::io::write_file(path_in(cfg, "xi_" + std::to_string(j + 1) + ".txt"), mqg::io::poly_to_text(bundle.xi[j]));
        gens.push_back(std::move(g));
    }
    out["generators"] = std::move(gens);
    out["potential"] = mqg::io::poly_to_json(bundle.potential);
    if (cfg.wants("txt")) mqg::io::write_file(path_in(cfg, "potential.txt"), mqg::io::poly_to_text(bundle.potential));
    mqg::io::write_file(path_in(cfg, "conjugate.json"), mqg::io::dump_json(out));
    log("conjugate: " + std::to_string(sw.seconds()) + " s");
    return 0;
}

int cmd_sweep(const RunConfig& cfg, double lo, double hi, int per_decade)
{
    prepare_out(cfg);
    const Stopwatch sw;
    const int N = cfg.n_generators;
    const mqg::Mat<double> shape =
        cfg.q_source == RunConfig::QSource::matrix ? cfg.q_matrix : mqg::Mat<double>::Ones(N, N);
    const auto grid = mqg::log_grid(lo, hi, per_decade);
    const int K = cfg.neumann < 0 ? 6 : cfg.neumann;
    const auto scan = mqg::q0_scan(shape, cfg.eps, cfg.threshold, grid, K, cfg.effective_cutoff());
    const double eps_list[] = {0.5, 1.0, 2.0};

    auto pi_or_inf = [&](double q, double eps) {
        return mqg::in_regime(q, N, eps) ? mqg::pi_bound(q, N, eps) : std::numeric_limits<double>::infinity();
    };
    std::string csv = "q,pi,in_regime,xi_norm,distance,pi_eps_0.5,pi_eps_1,pi_eps_2\n";
    Json rows = Json::array();
    for (const auto& r : scan.rows) {
        csv += mqg::io::format_double(r.q) + "," + mqg::io::format_double(r.pi) + "," + (r.in_regime ? "1" : "0") + "," +
               mqg::io::format_double(r.xi_norm) + "," + mqg::io::format_double(r.distance);
        Json pis = Json::array();
        for (double e : eps_list) {
            csv += "," + mqg::io::format_double(pi_or_inf(r.q, e));
            pis.push_back(pi_or_inf(r.q, e));
        }
        csv += "\n";
        rows.push_back(Json{{"q", r.q},
                            {"pi", r.pi},
                            {"in_regime", r.in_regime},
                            {"xi_norm", r.xi_norm},
                            {"distance", r.distance},
                            {"pi_eps_0.5_1_2", std::move(pis)}});
    }
    if (cfg.wants("csv")) mqg::io::write_file(path_in(cfg, "sweep.csv"), csv);
    Json out;
    out["config"] = cfg.to_json();
    out["grid"] = Json{{"lo", lo}, {"hi", hi}, {"per_decade", per_decade}, {"K", K}, {"D", cfg.effective_cutoff()}};
    out["threshold"] = scan.threshold;
    out["threshold_source"] = "external constant, supplied as configuration";
    out["q0"] = scan.q0 ? Json(*scan.q0) : Json(nullptr);
    out["rows"] = std::move(rows);
    if (cfg.wants("json")) mqg::io::write_file(path_in(cfg, "sweep.json"), mqg::io::dump_json(out));
    log("sweep: " + std::to_string(scan.rows.size()) + " grid points, " + std::to_string(sw.seconds()) + " s");
    return 0;
}

void print_error(const std::string& type, const std::string& message)
{
    std::cerr << mqg::io::dump_json(Json{{"error", Json{{"type", type}, {"message", message}}}});
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mixed q-Gaussian verification toolkit"};
    app.require_subcommand(1);
    CliOptions gram_o, verify_o, conj_o, sweep_o;
    auto* gram = app.add_subcommand("gram", "Gram matrices, inverse norms and bounds per level");
    auto* verify = app.add_subcommand("verify", "run the identity and bound suite, write report.json");
    auto* conj = app.add_subcommand("conjugate", "conjugate variables and potential");
    auto* sweep = app.add_subcommand("sweep", "q0 scan over a log grid");
    add_common(gram, gram_o);
    add_common(verify, verify_o);
    add_common(conj, conj_o);
    add_common(sweep, sweep_o);
    sweep->add_option("--grid-lo", sweep_o.grid_lo, "smallest q");
    sweep->add_option("--grid-hi", sweep_o.grid_hi, "largest q");
    sweep->add_option("--per-decade", sweep_o.per_decade, "grid points per decade");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", e.what());
        return 2;
    }
    try {
        if (*gram) return cmd_gram(resolve(*gram, gram_o));
        if (*verify) return cmd_verify(resolve(*verify, verify_o));
        if (*conj) return cmd_conjugate(resolve(*conj, conj_o));
        if (*sweep) return cmd_sweep(resolve(*sweep, sweep_o), sweep_o.grid_lo, sweep_o.grid_hi, sweep_o.per_decade);
    } catch (const std::domain_error& e) {
        print_error("out_of_regime", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        print_error("invalid_config", e.what());
        return 2;
    } catch (const std::exception& e) {
        print_error("runtime", e.what());
        return 2;
    }
    return 2;
}

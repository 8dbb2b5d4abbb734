// topobatt.cpp: command-line front end. Exit codes: 0 success, 2 config
// error, 3 solver error, 4 precondition (light cone, on-spectrum) error.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "topobatt/config_io.hpp"
#include "topobatt/csv.hpp"
#include "topobatt/errors.hpp"
#include "topobatt/phases.hpp"
#include "topobatt/zeno.hpp"

using namespace topobatt;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitPrecondition = 4;

int default_jobs()
{
    if (const char* env = std::getenv("TOPOBATT_JOBS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            std::cerr << "warning: ignoring non-integer TOPOBATT_JOBS\n";
        }
    }
    return 1;
}

struct Common {
    std::string config_path;
    std::string out{"-"};
    std::string manifest;
    int jobs{default_jobs()};
    ResolventOptions resolvent;
};

void add_tolerances(CLI::App* cmd, ResolventOptions& r)
{
    cmd->add_option("--scan-step", r.scan_step, "real-axis bracket grid step (J)")->capture_default_str();
    cmd->add_option("--bisect-tol", r.bisect_tol, "bisection tolerance (J)")->capture_default_str();
    cmd->add_option("--accept-residual", r.accept_residual, "max |D(root)| (J^2)")->capture_default_str();
    cmd->add_option("--merge-tol", r.merge_tol, "coherent root merge distance (J)")->capture_default_str();
    cmd->add_option("--tol-im", r.tol_im, "coherent/dissipative threshold (J)")->capture_default_str();
    cmd->add_option("--fd-step", r.fd_step, "residue finite-difference step (J)")->capture_default_str();
    cmd->add_option("--kappa-step", r.kappa_step, "continuation step in kappa (J)")->capture_default_str();
    cmd->add_option("--tol-spec", r.greens.tol_spec, "minimum distance to the continuum (J)")->capture_default_str();
}

json tolerances_json(const ResolventOptions& r)
{
    return {{"scan_step", r.scan_step},       {"bisect_tol", r.bisect_tol},
            {"accept_residual", r.accept_residual}, {"merge_tol", r.merge_tol},
            {"dissipative_merge_tol", r.dissipative_merge_tol}, {"tol_im", r.tol_im},
            {"fd_step", r.fd_step},           {"kappa_step", r.kappa_step},
            {"secular_tol", r.secular_tol},   {"tol_spec", r.greens.tol_spec},
            {"greens_abs_tol", r.greens.abs_tol}};
}

// Output stream: stdout for "-", otherwise the named file.
class Output {
public:
    explicit Output(const std::string& path) : path_(path)
    {
        if (path_ != "-") {
            file_ = std::make_unique<std::ofstream>(path_);
            if (!*file_) {
                throw ConfigError("cannot write " + path_);
            }
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
};

class Manifest {
public:
    Manifest(std::string command, const std::vector<std::string>& argv)
        : start_(std::chrono::steady_clock::now())
    {
        j_["command"] = std::move(command);
        j_["argv"] = argv;
        j_["version"] = TOPOBATT_VERSION;
        j_["outputs"] = json::array();
    }
    json& data() { return j_; }
    void add_output(const std::string& path)
    {
        if (path != "-") {
            j_["outputs"].push_back(path);
        }
    }
    // Written next to the first output unless an explicit path is given.
    void write(const std::string& explicit_path, const std::string& primary_out)
    {
        std::string path = explicit_path;
        if (path.empty() && primary_out != "-") {
            path = primary_out + ".manifest.json";
        }
        if (path.empty()) {
            return;
        }
        j_["elapsed_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        write_json_file(path, j_);
    }

private:
    json j_;
    std::chrono::steady_clock::time_point start_;
};

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw ConfigError("not a number in list: '" + item + "'");
        }
    }
    if (v.empty()) {
        throw ConfigError("empty list");
    }
    return v;
}

json report_json(const PoleSearchReport& r)
{
    return {{"brackets_scanned", r.brackets_scanned},
            {"roots_found", r.roots_found},
            {"refinement_iterations", r.refinement_iterations},
            {"max_residual", r.max_residual},
            {"warnings", r.warnings}};
}

int run_bound_states(const Common& c, Manifest& m)
{
    const ModelConfig config = load_config(c.config_path);
    const PoleSet set = config.bath.lossless() ? find_coherent_bse(config, c.resolvent)
                                               : find_dissipative_poles(config, c.resolvent);
    Output out(c.out);
    write_bound_states_csv(out.stream(), set.poles);
    for (const auto& w : set.report.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    std::cerr << set.poles.size() << " poles, max |D| = " << set.report.max_residual << '\n';
    m.data()["config"] = to_json(config);
    m.data()["decoupled_limit"] = config.decoupled_limit();
    m.data()["tolerances"] = tolerances_json(c.resolvent);
    m.data()["report"] = report_json(set.report);
    m.add_output(c.out);
    return 0;
}

struct DynamicsArgs {
    double tmax{0.0};
    double dt{0.01};
    int cells{0};
    std::string boundary{"periodic"};
    EvolveOptions evolve;
};

int run_dynamics(const Common& c, const DynamicsArgs& a, Manifest& m)
{
    const ModelConfig config = load_config(c.config_path);
    if (!(a.tmax > 0.0)) {
        throw ConfigError("--tmax must be positive");
    }
    const auto times = uniform_times(a.tmax, a.dt);
    const AmplitudeTrace trace = evolve_finite(config, a.cells, boundary_from_string(a.boundary), times, a.evolve);
    const IndicatorSeries ind = indicators(trace, config.emitters.omega_e);
    Output out(c.out);
    write_dynamics_csv(out.stream(), trace, ind);
    m.data()["config"] = to_json(config);
    m.data()["decoupled_limit"] = config.decoupled_limit();
    m.data()["tolerances"] = {{"ode_abs_tol", a.evolve.abs_tol}, {"ode_rel_tol", a.evolve.rel_tol}};
    m.data()["cells"] = trace.cells;
    m.data()["boundary"] = to_string(trace.boundary);
    m.data()["tmax"] = a.tmax;
    m.data()["dt"] = a.dt;
    m.add_output(c.out);
    return 0;
}

struct SweepArgs {
    std::string kind{"mse"};
    GridSpec grid;
    double kappa{0.0};
    std::string overlay_out;
};

int run_sweep(const Common& c, const SweepArgs& a, Manifest& m)
{
    const ModelConfig config = load_config(c.config_path);
    SweepOptions opt;
    opt.jobs = c.jobs;
    opt.kappa = a.kappa;
    opt.resolvent = c.resolvent;
    PhaseGrid grid;
    if (a.kind == "mse") {
        grid = mse_sweep(a.grid, config, opt);
    } else if (a.kind == "ergotropy") {
        if (!config.emitters.same_site()) {
            throw ConfigError("ergotropy sweep needs same-cavity emitters (x1 = x2, alpha = beta)");
        }
        grid = max_ergotropy_sweep(a.grid, config, opt);
    } else {
        throw ConfigError("--kind must be mse or ergotropy");
    }
    Output out(c.out);
    write_sweep_csv(out.stream(), grid);
    m.add_output(c.out);
    std::string overlay = a.overlay_out;
    if (overlay.empty() && c.out != "-") {
        overlay = c.out + ".overlay.csv";
    }
    if (!overlay.empty()) {
        Output ov(overlay);
        write_overlay_csv(ov.stream(), grid);
        m.add_output(overlay);
    }
    std::size_t failed = 0;
    for (const auto& f : grid.flags) {
        failed += f.rfind("error", 0) == 0 ? 1 : 0;
    }
    if (failed) {
        std::cerr << "warning: " << failed << " grid points failed (see flags column)\n";
    }
    m.data()["config"] = to_json(config);
    m.data()["decoupled_limit"] = std::abs(a.grid.delta.lo) == 1.0 || std::abs(a.grid.delta.hi) == 1.0;
    m.data()["tolerances"] = tolerances_json(c.resolvent);
    m.data()["kind"] = a.kind;
    m.data()["kappa"] = a.kappa;
    m.data()["grid"] = {{"delta", {a.grid.delta.lo, a.grid.delta.hi, a.grid.delta.count}},
                        {"g", {a.grid.g.lo, a.grid.g.hi, a.grid.g.count}}};
    return 0;
}

struct ZenoArgs {
    std::string kappa_grid;
    std::string qze_multiples;
    ZenoOptions options;
    std::string boundary{"periodic"};
};

int run_zeno(const Common& c, ZenoArgs a, Manifest& m)
{
    const ModelConfig config = load_config(c.config_path);
    if (!config.emitters.same_site()) {
        throw ConfigError("zeno needs same-cavity emitters (x1 = x2, alpha = beta)");
    }
    std::vector<double> kappas;
    if (!a.kappa_grid.empty() && !a.qze_multiples.empty()) {
        throw ConfigError("give either --kappa-grid or --qze-multiples");
    }
    if (!a.qze_multiples.empty()) {
        const double q = kappa_qze(coherent_pair_E0(config, c.resolvent).E0);
        for (double f : parse_list(a.qze_multiples)) {
            kappas.push_back(f * q);
        }
    } else {
        kappas = parse_list(a.kappa_grid.empty() ? std::string("0") : a.kappa_grid);
    }
    for (double k : kappas) {
        if (k < 0.0) {
            throw ConfigError("kappa samples must be >= 0");
        }
    }
    a.options.jobs = c.jobs;
    a.options.resolvent = c.resolvent;
    a.options.boundary = boundary_from_string(a.boundary);
    const ZenoReport report = max_power_vs_kappa(kappas, config, a.options);
    Output out(c.out);
    write_zeno_csv(out.stream(), report);
    for (const auto& p : report.points) {
        if (!p.error.empty()) {
            std::cerr << "warning: kappa = " << p.kappa << ": " << p.error << '\n';
        }
    }
    m.data()["config"] = to_json(config);
    m.data()["decoupled_limit"] = config.decoupled_limit();
    m.data()["tolerances"] = tolerances_json(c.resolvent);
    m.data()["E0"] = report.E0;
    m.data()["kappa_qze"] = report.kappa_qze;
    m.data()["R0"] = report.R0;
    m.data()["tmax"] = a.options.t_max;
    m.data()["dt"] = a.options.dt;
    m.add_output(c.out);
    return 0;
}

struct GreensArgs {
    double z_re{0.0};
    double z_im{0.0};
    int xm{0};
    int xn{0};
    std::string sublattices{"AA"};
    std::string method{"quadrature"};
    int oracle{0};
    std::string boundary{"periodic"};
};

int run_greens(const Common& c, const GreensArgs& a, Manifest& m)
{
    const ModelConfig config = load_config(c.config_path);
    if (a.sublattices.size() != 2) {
        throw ConfigError("--sublattices takes two letters, e.g. AB");
    }
    const Site sm{a.xm, sublattice_from_string(a.sublattices.substr(0, 1))};
    const Site sn{a.xn, sublattice_from_string(a.sublattices.substr(1, 1))};
    GreensOptions go = c.resolvent.greens;
    if (a.method == "quadrature") {
        go.method = GreensMethod::quadrature;
    } else if (a.method == "contour") {
        go.method = GreensMethod::contour;
    } else {
        throw ConfigError("--method must be quadrature or contour");
    }
    const cplx z(a.z_re, a.z_im);
    const GreensValue v = greens_function(sm, sn, z, config.bath, go);
    json j = {{"re", v.value.real()}, {"im", v.value.imag()}, {"method", a.method}, {"est_error", v.error_estimate}};
    if (a.oracle > 0) {
        const FiniteLattice lattice = build_finite_lattice(a.oracle, boundary_from_string(a.boundary), config.bath);
        const cplx o = greens_function_finite(sm, sn, z, lattice);
        j["oracle"] = {{"re", o.real()}, {"im", o.imag()}, {"cells", a.oracle}, {"abs_diff", std::abs(o - v.value)}};
    }
    Output out(c.out);
    out.stream() << j.dump() << '\n';
    m.data()["config"] = to_json(config);
    m.data()["decoupled_limit"] = config.decoupled_limit();
    m.add_output(c.out);
    return 0;
}

struct BoundaryArgs {
    double delta{0.0};
    int d{-1};
    double J{1.0};
};

json boundary_json(const BoundaryValue& b)
{
    json j = {{"present", b.g.has_value()}, {"degenerate", b.degenerate}, {"divergent", b.divergent}};
    j["g"] = b.g ? json(*b.g) : json(nullptr);
    return j;
}

int run_boundaries(const Common& c, const BoundaryArgs& a, Manifest& m)
{
    const PhaseBoundaries b = phase_boundaries(a.delta, a.d, a.J);
    json j = {{"delta", a.delta}, {"d", a.d}, {"J", a.J}, {"l1", boundary_json(b.l1)}, {"l2", boundary_json(b.l2)}};
    j["winding"] = a.delta != 0.0 ? json(winding_number(a.delta, a.J)) : json(nullptr);
    Output out(c.out);
    out.stream() << j.dump() << '\n';
    m.add_output(c.out);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-emitter quantum battery coupled to a lossy SSH lattice"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(TOPOBATT_VERSION));

    Common common;
    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", common.config_path, "JSON model config")->check(CLI::ExistingFile);
        if (needs_config) {
            opt->required();
        }
        cmd->add_option("--out", common.out, "output file, '-' for stdout")->capture_default_str();
        cmd->add_option("--manifest", common.manifest, "manifest path (default <out>.manifest.json)");
        cmd->add_option("--jobs", common.jobs, "worker threads (default $TOPOBATT_JOBS or 1)")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
    };

    auto* bs = app.add_subcommand("bound-states", "bound-state energies and residues");
    add_common(bs, true);
    add_tolerances(bs, common.resolvent);

    DynamicsArgs dyn;
    auto* dy = app.add_subcommand("dynamics", "finite-lattice evolution with indicators");
    add_common(dy, true);
    dy->add_option("--tmax", dyn.tmax, "final time (1/J)")->required();
    dy->add_option("--dt", dyn.dt, "output spacing (1/J)")->capture_default_str();
    dy->add_option("--N", dyn.cells, "unit cells, 0 = light-cone default")->capture_default_str();
    dy->add_option("--boundary", dyn.boundary, "periodic or open")->capture_default_str();
    dy->add_option("--ode-abs-tol", dyn.evolve.abs_tol, "integrator absolute tolerance")->capture_default_str();
    dy->add_option("--ode-rel-tol", dyn.evolve.rel_tol, "integrator relative tolerance")->capture_default_str();

    SweepArgs sw;
    auto* sp = app.add_subcommand("sweep", "(delta, g) phase diagram of MSE or max ergotropy");
    add_common(sp, true);
    add_tolerances(sp, common.resolvent);
    sp->add_option("--kind", sw.kind, "mse or ergotropy")->capture_default_str();
    sp->add_option("--delta-min", sw.grid.delta.lo)->capture_default_str();
    sp->add_option("--delta-max", sw.grid.delta.hi)->capture_default_str();
    sp->add_option("--delta-count", sw.grid.delta.count)->capture_default_str();
    sp->add_option("--g-min", sw.grid.g.lo)->capture_default_str();
    sp->add_option("--g-max", sw.grid.g.hi)->capture_default_str();
    sp->add_option("--g-count", sw.grid.g.count)->capture_default_str();
    sp->add_option("--kappa", sw.kappa, "loss strength (J)")->capture_default_str();
    sp->add_option("--overlay-out", sw.overlay_out, "overlay CSV (default <out>.overlay.csv)");

    ZenoArgs ze;
    auto* zc = app.add_subcommand("zeno", "dissipative pair and max power versus loss");
    add_common(zc, true);
    add_tolerances(zc, common.resolvent);
    zc->add_option("--kappa-grid", ze.kappa_grid, "comma-separated kappa values (J)");
    zc->add_option("--qze-multiples", ze.qze_multiples, "comma-separated multiples of kappa_QZE");
    zc->add_option("--tmax", ze.options.t_max, "evolution window for max power (1/J)")->capture_default_str();
    zc->add_option("--dt", ze.options.dt, "output spacing (1/J)")->capture_default_str();
    zc->add_option("--N", ze.options.cells, "unit cells, 0 = light-cone default")->capture_default_str();
    zc->add_option("--boundary", ze.boundary, "periodic or open")->capture_default_str();

    GreensArgs gr;
    auto* gc = app.add_subcommand("greens", "one bath Green's function element as JSON");
    add_common(gc, true);
    gc->add_option("--z-re", gr.z_re, "Re z (J)")->required();
    gc->add_option("--z-im", gr.z_im, "Im z (J)")->capture_default_str();
    gc->add_option("--xm", gr.xm, "cell of the first site")->capture_default_str();
    gc->add_option("--xn", gr.xn, "cell of the second site")->capture_default_str();
    gc->add_option("--sublattices", gr.sublattices, "two letters, e.g. AB")->capture_default_str();
    gc->add_option("--method", gr.method, "quadrature or contour")->capture_default_str();
    gc->add_option("--abs-tol", common.resolvent.greens.abs_tol, "quadrature target")->capture_default_str();
    gc->add_option("--tol-spec", common.resolvent.greens.tol_spec, "minimum distance to the continuum (J)")
        ->capture_default_str();
    gc->add_option("--oracle", gr.oracle, "also invert an N-cell lattice")->capture_default_str();
    gc->add_option("--oracle-boundary", gr.boundary, "periodic or open")->capture_default_str();

    BoundaryArgs ba;
    auto* bd = app.add_subcommand("boundaries", "phase-boundary couplings and winding number");
    add_common(bd, false);
    bd->add_option("--delta", ba.delta)->required();
    bd->add_option("--d", ba.d, "cell distance")->capture_default_str();
    bd->add_option("--J", ba.J)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    std::vector<std::string> args(argv, argv + argc);
    auto* sub = app.get_subcommands().front();
    Manifest manifest(sub->get_name(), args);
    try {
        int rc = 0;
        if (sub == bs) {
            rc = run_bound_states(common, manifest);
        } else if (sub == dy) {
            rc = run_dynamics(common, dyn, manifest);
        } else if (sub == sp) {
            rc = run_sweep(common, sw, manifest);
        } else if (sub == zc) {
            rc = run_zeno(common, ze, manifest);
        } else if (sub == gc) {
            rc = run_greens(common, gr, manifest);
        } else {
            rc = run_boundaries(common, ba, manifest);
        }
        manifest.write(common.manifest, common.out);
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const LightConeError& e) {
        std::cerr << "precondition error: " << e.what() << " (suggested --N " << e.min_cells() << ")\n";
        return kExitPrecondition;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition error: " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kExitSolver;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSolver;
    }
}

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "parosc/parosc.hpp"

namespace {

using namespace parosc;

// Column parameter sets {A, phi, a, c, F0, alpha} from the figure captions;
// Omega0 = 1 and the one-step m = 4 chain throughout. The cosine presets feed
// both the potential and density commands; the sech preset is the pulse
// passage surface.
RunConfig preset_config(const std::string& preset, const std::string& column) {
    RunConfig cfg;
    cfg.level = 1;
    cfg.seed = SeedSpec::one_step(4);
    cfg.grid = {-6.0, 6.0, 121};
    if (preset == "fig3" || preset == "fig4") {
        double s2 = std::sqrt(2.0);
        if (column == "left") {
            cfg.profile = CosineDrive{1.0, 0.0, 3.0, 0.0, 0.0};
            cfg.a = cfg.c = s2;
        } else if (column == "middle") {
            cfg.profile = CosineDrive{1.0, 0.0, 3.0, 1.0, 0.0};
            cfg.a = cfg.c = 1.0;
        } else {
            cfg.profile = CosineDrive{1.0, 1.0, 3.0, 1.0, 0.0};
            cfg.a = cfg.c = s2;
        }
        cfg.time = {0.0, M_PI, 129, 2.5e-4};
        return cfg;
    }
    if (preset == "fig5") {
        cfg.profile = SechPulse{2.0, 15.0, 1.0, 6.0, 0.0, 0.0};
        cfg.a = cfg.c = 1.0;
        cfg.time = {0.0, 12.0, 121, 2.5e-4};
        return cfg;
    }
    throw DomainError("unknown preset " + preset);
}

RunConfig propagate_default_config() {
    RunConfig cfg;
    cfg.profile = CosineDrive{1.0, 0.0, 0.0, 0.0, 0.0};
    cfg.a = cfg.c = 1.0;
    cfg.level = 1;
    cfg.seed = SeedSpec::one_step(4);
    cfg.grid = {-12.0, 12.0, 1024};
    cfg.time = {0.0, M_PI, 25, 2.5e-4};
    return cfg;
}

struct CommonFlags {
    std::string config_path, out_path, format, preset, column = "left", mutate;
    int grid_n = 0;
    int n_state = -1;
    bool mismatch = false;
};

void add_io_flags(CLI::App* cmd, CommonFlags& f, bool with_preset) {
    cmd->add_option("--config", f.config_path, "JSON run config path");
    cmd->add_option("--out", f.out_path, "output file (default: stdout)");
    cmd->add_option("--format", f.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--grid", f.grid_n, "override spatial sample count")
        ->check(CLI::PositiveNumber);
    if (with_preset) {
        cmd->add_option("--preset", f.preset, "figure preset")
            ->check(CLI::IsMember({"fig3", "fig4", "fig5"}));
        cmd->add_option("--column", f.column, "figure column for cosine presets")
            ->check(CLI::IsMember({"left", "middle", "right"}));
    }
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

RunConfig resolve_config(const CommonFlags& f, RunConfig fallback) {
    if (!f.preset.empty() && !f.config_path.empty())
        throw DomainError("choose either --preset or --config, not both");
    RunConfig cfg = fallback;
    if (!f.preset.empty()) cfg = preset_config(f.preset, f.column);
    if (!f.config_path.empty()) cfg = load_config_file(f.config_path);
    if (f.grid_n > 0) cfg.grid.samples = f.grid_n;
    if (f.n_state >= 0) cfg.n = f.n_state;
    if (!f.format.empty()) cfg.format = f.format;
    validate_run_config(cfg);
    return cfg;
}

void emit(const CommonFlags& f, const RunConfig& cfg, const DataTable& table) {
    if (f.out_path.empty()) {
        write_table(std::cout, cfg, table);
        return;
    }
    std::ofstream out(f.out_path, std::ios::binary);
    if (!out) throw DomainError("cannot open output file " + f.out_path);
    write_table(out, cfg, table);
}

double time_at(const TimeSpec& ts, int i) {
    if (ts.samples == 1) return ts.t_min;
    return ts.t_min + (ts.t_max - ts.t_min) * double(i) / double(ts.samples - 1);
}

int cmd_potential(const CommonFlags& f) {
    RunConfig cfg = resolve_config(f, preset_config("fig3", f.column));
    ClassicalContext ctx(cfg.profile, ermakov_params(cfg));
    detail::PotentialTable table = detail::PotentialTable::build(cfg.level, cfg.seed);
    double dx = (cfg.grid.x_max - cfg.grid.x_min) / double(cfg.grid.samples - 1);

    DataTable out;
    out.columns = {"x", "t", "V"};
    for (int ti = 0; ti < cfg.time.samples; ++ti) {
        double t = time_at(cfg.time, ti);
        ClassicalState cs = ctx.state(t);
        double w = omega2_at(cfg.profile, t), force = force_at(cfg.profile, t);
        double inv = 1.0 / (cs.sigma * cs.sigma);
        for (int xi = 0; xi < cfg.grid.samples; ++xi) {
            double x = cfg.grid.x_min + dx * xi;
            double v = w * x * x + force * x;
            if (table.has_deformation) v += table.deformation((x + cs.gamma) / cs.sigma) * inv;
            out.rows.push_back({x, t, v});
        }
    }
    emit(f, cfg, out);
    return 0;
}

int cmd_density(const CommonFlags& f) {
    RunConfig cfg = resolve_config(f, preset_config("fig4", f.column));
    ClassicalContext ctx(cfg.profile, ermakov_params(cfg));
    SeedSpec spec = cfg.seed.value_or(SeedSpec::one_step(0));
    EigenState st = eigen_state(cfg.level, cfg.n, spec);
    double dx = (cfg.grid.x_max - cfg.grid.x_min) / double(cfg.grid.samples - 1);

    DataTable out;
    out.columns = {"x", "t", "density"};
    for (int ti = 0; ti < cfg.time.samples; ++ti) {
        double t = time_at(cfg.time, ti);
        StateEvaluator ev(st, ctx.state(t));
        for (int xi = 0; xi < cfg.grid.samples; ++xi) {
            double x = cfg.grid.x_min + dx * xi;
            out.rows.push_back({x, t, std::norm(ev(x))});
        }
    }
    emit(f, cfg, out);
    return 0;
}

ChiMutation mutation_by_name(const std::string& name) {
    if (name == "chi-sign") return ChiMutation::FlipLambda;
    if (name == "chi-envelope") return ChiMutation::FlipEnvelope;
    if (name == "chi-work") return ChiMutation::FlipWork;
    throw DomainError("unknown mutation " + name);
}

int cmd_verify(const std::string& selection, const CommonFlags& f) {
    std::vector<CheckReport> reports = run_suite(selection);

    if (!f.mutate.empty()) {
        ChiMutation mut = mutation_by_name(f.mutate);
        FrequencyProfile profile = CosineDrive{1.0, 1.0, 3.0, 1.0, 0.4};
        ErmakovParams params = ErmakovParams::make(profile, std::sqrt(2.0), std::sqrt(2.0));
        ClassicalContext ctx(profile, params);
        Grid grid = default_grid(ctx.state(1.0), 2);
        CheckReport r;
        r.name = "mutated-" + f.mutate;
        r.params = "k=1 n=0 m=4 driven cosine t=1";
        r.threshold = ThresholdManifest::defaults().at("tdse_residual");
        r.residual = tdse_residual(1, 0, SeedSpec::one_step(4), profile, params, grid, 1.0, mut);
        r.pass = r.residual <= r.threshold;
        reports.push_back(r);
    }

    std::cout << summary_table(reports);
    if (!f.out_path.empty()) {
        std::ofstream out(f.out_path, std::ios::binary);
        if (!out) throw DomainError("cannot open output file " + f.out_path);
        for (const CheckReport& r : reports) out << r.json_line() << "\n";
    }
    for (const CheckReport& r : reports)
        if (!r.pass) return 1;
    return 0;
}

int cmd_propagate(const CommonFlags& f) {
    RunConfig cfg = resolve_config(f, propagate_default_config());
    ErmakovParams params = ermakov_params(cfg);
    ClassicalContext ctx(cfg.profile, params);
    SeedSpec spec = cfg.seed.value_or(SeedSpec::one_step(0));

    PropagationPlan plan;
    plan.k = f.mismatch ? 0 : cfg.level;
    if (plan.k >= 1) plan.spec = spec;
    plan.profile = cfg.profile;
    plan.params = params;
    plan.grid = Grid{cfg.grid.x_min,
                     (cfg.grid.x_max - cfg.grid.x_min) / double(cfg.grid.samples - 1),
                     cfg.grid.samples};
    plan.t_a = cfg.time.t_min;
    plan.t_b = cfg.time.t_max;
    plan.dt = cfg.time.dt;
    long long steps = std::llround((plan.t_b - plan.t_a) / plan.dt);
    plan.snapshot_stride = int(std::max(1LL, steps / std::max(1, cfg.time.samples - 1)));

    WaveField psi0 = schrodinger_solution(cfg.level, cfg.n, spec, ctx, plan.grid, plan.t_a);
    Trajectory traj = propagate(plan, psi0);

    // Tracked invariant is always the one matching the analytic family, so a
    // mismatched Hamiltonian shows up as drift in the last column.
    OperatorKind kind = cfg.level == 0 ? OperatorKind::I0
                                       : (cfg.level == 1 ? OperatorKind::I1 : OperatorKind::I2);
    DataTable out;
    out.columns = {"t", "overlap", "invariant", "drift"};
    double e0 = 0.0;
    bool first = true;
    for (const WaveField& snap : traj.snapshots) {
        WaveField exact = schrodinger_solution(cfg.level, cfg.n, spec, ctx, snap.grid, snap.t);
        double ov = overlap_magnitude(snap, exact);
        GridOperator op = cfg.level == 0 ? make_operator(kind, ctx.state(snap.t))
                                         : make_operator(kind, ctx.state(snap.t), spec);
        WaveField ifield = apply(op, snap);
        double e = inner_product(snap, ifield).real() / inner_product(snap, snap).real();
        if (first) {
            e0 = e;
            first = false;
        }
        out.rows.push_back({snap.t, ov, e, std::abs(e - e0)});
    }
    emit(f, cfg, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"parametric oscillator rational chains: potentials, states, checks"};
    app.require_subcommand(1);

    CommonFlags fpot, fden, fver, fpro;
    CLI::App* pot = app.add_subcommand("potential", "tabulate V_k(x, t) as x,t,V rows");
    add_io_flags(pot, fpot, true);

    CLI::App* den = app.add_subcommand("density", "tabulate |psi_n^(k)(x, t)|^2");
    add_io_flags(den, fden, true);
    den->add_option("--n", fden.n_state, "state index")->check(CLI::NonNegativeNumber);

    std::string selection = "core";
    CLI::App* ver = app.add_subcommand("verify", "run a named check suite");
    ver->add_option("selection", selection, "core | rational | dynamics | all");
    ver->add_option("--out", fver.out_path, "write a json-lines report");
    ver->add_option("--mutate", fver.mutate,
                    "append a mutated-phase check that must fail (test only)");

    CLI::App* pro = app.add_subcommand("propagate", "integrate the TDSE and compare");
    add_io_flags(pro, fpro, false);
    pro->add_option("--n", fpro.n_state, "state index")->check(CLI::NonNegativeNumber);
    pro->add_flag("--mismatch", fpro.mismatch,
                  "propagate under the bare Hamiltonian while tracking the chain invariant");

    CLI11_PARSE(app, argc, argv);

    try {
        if (pot->parsed()) return cmd_potential(fpot);
        if (den->parsed()) return cmd_density(fden);
        if (ver->parsed()) return cmd_verify(selection, fver);
        return cmd_propagate(fpro);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

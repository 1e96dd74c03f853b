// Command-line front end: convergence sweeps, bound audits, closure tables,
// and the structural selftest. Exit codes: 0 success, 1 failed margins or
// selftest failures, 2 configuration errors.

#include <CLI11.hpp>

#include "slaterlab/experiments.hpp"

#include <cstdint>
#include <filesystem>
#include <iostream>

namespace {

using slaterlab::SweepConfig;

struct CommonFlags {
    std::string config_path;
    int dim = 0;
    int nmin = 0;
    int nmax = 0;
    double tfinal = 0.0;
    double dt = 0.0;
    double hbar = 0.0;
    std::uint64_t seed = 0;
    double vnorm = -1.0;
    std::string initial;
    std::string one_body_file;
    std::string out_dir;
    bool dense_oracle = false;
    int stride = 0;
    int apriori_m = -1;

    CLI::Option* opt_config = nullptr;
    CLI::Option* opt_dim = nullptr;
    CLI::Option* opt_nmin = nullptr;
    CLI::Option* opt_nmax = nullptr;
    CLI::Option* opt_tfinal = nullptr;
    CLI::Option* opt_dt = nullptr;
    CLI::Option* opt_hbar = nullptr;
    CLI::Option* opt_seed = nullptr;
    CLI::Option* opt_vnorm = nullptr;
    CLI::Option* opt_initial = nullptr;
    CLI::Option* opt_one_body = nullptr;
    CLI::Option* opt_out = nullptr;
    CLI::Option* opt_dense = nullptr;
    CLI::Option* opt_stride = nullptr;
    CLI::Option* opt_m = nullptr;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    f.opt_config = cmd->add_option("--config", f.config_path, "JSON config file (flags override it)");
    f.opt_dim = cmd->add_option("--dim", f.dim, "single-particle dimension d");
    f.opt_nmin = cmd->add_option("--nmin", f.nmin, "smallest particle count");
    f.opt_nmax = cmd->add_option("--nmax", f.nmax, "largest particle count");
    f.opt_tfinal = cmd->add_option("--tfinal", f.tfinal, "final time");
    f.opt_dt = cmd->add_option("--dt", f.dt, "integrator step");
    f.opt_hbar = cmd->add_option("--hbar", f.hbar, "value of hbar");
    f.opt_seed = cmd->add_option("--seed", f.seed, "master seed");
    f.opt_vnorm = cmd->add_option("--vnorm", f.vnorm, "operator norm of the pair potential");
    f.opt_initial = cmd->add_option("--initial", f.initial, "initial orbitals: coordinate | haar");
    f.opt_one_body = cmd->add_option("--one-body-file", f.one_body_file,
                                     "binary matrix file with the one-body generator");
    f.opt_out = cmd->add_option("--out", f.out_dir, "output directory");
    f.opt_dense = cmd->add_flag("--dense-oracle", f.dense_oracle, "enable dense cross-checks");
    f.opt_stride = cmd->add_option("--stride", f.stride, "record every k-th step");
    f.opt_m = cmd->add_option("--apriori-m", f.apriori_m, "iteration depth of the a-priori bound");
}

SweepConfig assemble_config(const CommonFlags& f) {
    SweepConfig c;
    if (f.opt_config->count() > 0) c = slaterlab::load_config(f.config_path);
    if (f.opt_dim->count() > 0) c.d = f.dim;
    if (f.opt_nmin->count() > 0) c.n_min = f.nmin;
    if (f.opt_nmax->count() > 0) c.n_max = f.nmax;
    if (f.opt_tfinal->count() > 0) c.t_final = f.tfinal;
    if (f.opt_dt->count() > 0) c.dt = f.dt;
    if (f.opt_hbar->count() > 0) c.hbar = f.hbar;
    if (f.opt_seed->count() > 0) c.seed = f.seed;
    if (f.opt_vnorm->count() > 0) c.v_norm = f.vnorm;
    if (f.opt_initial->count() > 0) c.initial = f.initial;
    if (f.opt_one_body->count() > 0) c.one_body_file = f.one_body_file;
    if (f.opt_out->count() > 0) c.out_dir = f.out_dir;
    if (f.opt_dense->count() > 0) c.dense_oracle = f.dense_oracle;
    if (f.opt_stride->count() > 0) c.output_stride = f.stride;
    if (f.opt_m->count() > 0) c.apriori_m = f.apriori_m;
    slaterlab::validate_config(c);
    return c;
}

int command_sweep(const SweepConfig& config) {
    const auto result = slaterlab::run_convergence_sweep(config);
    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path dir = config.out_dir;
    slaterlab::write_sweep_csv(dir / "sweep.csv", result);
    slaterlab::write_manifest(dir / "sweep_manifest.json", config, "sweep", {"sweep.csv"});
    int bad = 0;
    for (const auto& row : result.rows)
        if (row.bound_applicable && row.margin < -slaterlab::kMarginTolerance) ++bad;
    std::cout << "sweep: " << result.rows.size() << " rows -> " << (dir / "sweep.csv").string()
              << "\n";
    if (bad > 0) {
        std::cout << "sweep: " << bad << " rows exceed their bound\n";
        return 1;
    }
    return 0;
}

int command_audit(const SweepConfig& config) {
    const auto reports = slaterlab::run_bound_audit(config);
    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path dir = config.out_dir;
    slaterlab::write_bound_reports_csv(dir / "bounds.csv", reports);
    slaterlab::write_manifest(dir / "audit_manifest.json", config, "audit", {"bounds.csv"});
    int bad = 0, inapplicable = 0;
    for (const auto& r : reports) {
        if (!r.applicable) {
            ++inapplicable;
            continue;
        }
        if (r.margin < -slaterlab::kMarginTolerance) {
            std::cout << "audit: negative margin " << r.margin << " in " << r.quantity << " (N=" << r.N
                      << ", n=" << r.n << ", t=" << r.t << ")\n";
            ++bad;
        }
    }
    std::cout << "audit: " << reports.size() << " rows (" << inapplicable
              << " outside the bound hypothesis) -> " << (dir / "bounds.csv").string() << "\n";
    return bad > 0 ? 1 : 0;
}

int command_closure(const SweepConfig& config) {
    const auto rows = slaterlab::run_closure_table(config);
    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path dir = config.out_dir;
    slaterlab::write_closure_csv(dir / "closure.csv", rows);
    slaterlab::write_manifest(dir / "closure_manifest.json", config, "closure", {"closure.csv"});
    std::cout << "closure: " << rows.size() << " rows -> " << (dir / "closure.csv").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"slaterlab: exact N-body fermion dynamics vs the mean-field one-body flow"};
    app.require_subcommand(1);

    CommonFlags sweep_flags, audit_flags, closure_flags;
    CLI::App* sweep = app.add_subcommand("sweep", "convergence experiment over a range of N");
    add_common_flags(sweep, sweep_flags);
    CLI::App* audit = app.add_subcommand("audit", "trace-norm bound audit suite");
    add_common_flags(audit, audit_flags);
    CLI::App* closure = app.add_subcommand("closure", "closure-defect table for determinant and mixed data");
    add_common_flags(closure, closure_flags);
    app.add_subcommand("selftest", "run the structural property checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sweep->parsed()) return command_sweep(assemble_config(sweep_flags));
        if (audit->parsed()) return command_audit(assemble_config(audit_flags));
        if (closure->parsed()) return command_closure(assemble_config(closure_flags));
        return slaterlab::run_selftest(std::cout) == 0 ? 0 : 1;
    } catch (const slaterlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

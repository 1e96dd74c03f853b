#ifndef SLATERLAB_EXPERIMENTS_HPP
#define SLATERLAB_EXPERIMENTS_HPP

#include "slaterlab/hierarchy.hpp"
#include "slaterlab/nbody.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace slaterlab {

inline constexpr const char* kVersionString = "slaterlab 0.1.0";

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat run configuration. File format is a flat JSON object with exactly
// these keys (all optional); CLI flags override file values.
struct SweepConfig {
    int d = 8;
    int n_min = 2;
    int n_max = 6;
    double t_final = 0.5;
    double dt = 1e-3;
    double hbar = 1.0;
    std::uint64_t seed = 1234;
    double v_norm = 1.0;
    std::string initial = "coordinate";  // "coordinate" | "haar"
    std::string one_body_file;           // binary matrix; empty draws from the seed
    std::string out_dir = "out";
    bool dense_oracle = false;
    int output_stride = 25;  // record every output_stride-th integrator step
    int apriori_m = 3;       // iteration depth of the a-priori bound
};

SweepConfig load_config(const std::filesystem::path& path);
void validate_config(const SweepConfig& config);
std::string config_json(const SweepConfig& config);  // canonical form
std::uint64_t config_hash(const SweepConfig& config);

// The deterministic ingredients every experiment shares.
struct ExperimentSetup {
    Matrix L;
    Matrix V;
    double v_opnorm = 0.0;
};
ExperimentSetup build_setup(const SweepConfig& config);
SlaterOrbitals initial_orbitals(const SweepConfig& config, int N);

struct SweepRow {
    int N = 0;
    double t = 0.0;
    double err_tracenorm = 0.0;  // || D_{N:1}(t) - F(t) ||_tr
    double defect2 = 0.0;        // closure defect of the N-body state at t
    double opnorm_d1 = 0.0;      // || D_{N:1}(t) ||
    double t_scaled = 0.0;       // 2 ||V|| t / hbar
    double bound = 0.0;          // a-priori domination (binomial form, the tighter default)
    double margin = 0.0;
    bool bound_applicable = false;  // requires t_scaled < 1 and N >= 2
};

struct SweepResult {
    SweepConfig config;
    double v_opnorm = 0.0;
    std::vector<SweepRow> rows;  // sorted by (N, t)
};

// The convergence experiment: determinant initial data, exact N-body flow in
// occupation coordinates against the nonlinear one-body flow started from
// the same first marginal, per-N in a worker pool, deterministic outputs.
// Dense cross-checks of the occupation marginals run automatically for
// (d <= 4, N <= 3) and everywhere the dense_oracle flag demands.
SweepResult run_convergence_sweep(const SweepConfig& config);

// CSV columns: N,t,err_tracenorm,defect2,opnorm_D1,T_scaled,bound,margin
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result);

// JSON manifest with the canonical config, its hash, and the output files.
void write_manifest(const std::filesystem::path& path, const SweepConfig& config,
                    const std::string& command, const std::vector<std::string>& outputs);

// The bound-audit suite: 100 seeded cases per exact inequality plus the
// a-priori rows along a (d = 6, N = 5) pipeline. Rows where the a-priori
// hypothesis fails are marked inapplicable rather than failed.
std::vector<BoundReport> run_bound_audit(const SweepConfig& config);

struct ClosureRow {
    std::string kind;  // "slater" | "mixture" | "slater-dense"
    int d = 0;
    int N = 0;
    int n = 2;
    double defect = 0.0;
};
std::vector<ClosureRow> run_closure_table(const SweepConfig& config);
void write_closure_csv(const std::filesystem::path& path, const std::vector<ClosureRow>& rows);

// Quick pass over the structural property suite; prints one line per check.
// Returns the number of failed checks.
int run_selftest(std::ostream& os);

}  // namespace slaterlab

#endif

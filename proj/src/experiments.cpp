#include "slaterlab/experiments.hpp"

#include "slaterlab/matrix_io.hpp"
#include "slaterlab/tdhf.hpp"
#include "slaterlab/tensor_algebra.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <thread>

namespace slaterlab {

namespace {

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

SweepConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    SweepConfig c;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "d") c.d = value.get<int>();
            else if (key == "n_min") c.n_min = value.get<int>();
            else if (key == "n_max") c.n_max = value.get<int>();
            else if (key == "t_final") c.t_final = value.get<double>();
            else if (key == "dt") c.dt = value.get<double>();
            else if (key == "hbar") c.hbar = value.get<double>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else if (key == "v_norm") c.v_norm = value.get<double>();
            else if (key == "initial") c.initial = value.get<std::string>();
            else if (key == "one_body_file") c.one_body_file = value.get<std::string>();
            else if (key == "out_dir") c.out_dir = value.get<std::string>();
            else if (key == "dense_oracle") c.dense_oracle = value.get<bool>();
            else if (key == "output_stride") c.output_stride = value.get<int>();
            else if (key == "apriori_m") c.apriori_m = value.get<int>();
            else throw ConfigError("unknown config key: " + key);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config value error: ") + e.what());
    }
    return c;
}

void validate_config(const SweepConfig& c) {
    if (c.d < 1 || c.d > 16) throw ConfigError("d out of range [1, 16]");
    if (c.n_min < 2 || c.n_max < c.n_min)
        throw ConfigError("need 2 <= n_min <= n_max (two-body marginals are part of every run)");
    if (c.n_max > c.d) throw ConfigError("n_max exceeds d: no fermionic states");
    if (!(c.t_final > 0.0) || !(c.dt > 0.0)) throw ConfigError("t_final and dt must be positive");
    if (!(c.hbar > 0.0)) throw ConfigError("hbar must be positive");
    if (c.v_norm < 0.0) throw ConfigError("v_norm must be nonnegative");
    if (c.initial != "coordinate" && c.initial != "haar")
        throw ConfigError("initial must be 'coordinate' or 'haar'");
    if (c.output_stride < 1) throw ConfigError("output_stride must be >= 1");
    if (c.apriori_m < 0) throw ConfigError("apriori_m must be >= 0");
    if (c.dense_oracle) {
        long dim = 1;
        for (int k = 0; k < c.n_max; ++k) {
            dim *= c.d;
            if (dim > dense_dim_cap())
                throw ConfigError("dense_oracle requested but d^n_max exceeds the dense cap");
        }
    }
}

namespace {
nlohmann::json config_to_json(const SweepConfig& c) {
    nlohmann::json j;
    j["d"] = c.d;
    j["n_min"] = c.n_min;
    j["n_max"] = c.n_max;
    j["t_final"] = c.t_final;
    j["dt"] = c.dt;
    j["hbar"] = c.hbar;
    j["seed"] = c.seed;
    j["v_norm"] = c.v_norm;
    j["initial"] = c.initial;
    j["one_body_file"] = c.one_body_file;
    j["out_dir"] = c.out_dir;
    j["dense_oracle"] = c.dense_oracle;
    j["output_stride"] = c.output_stride;
    j["apriori_m"] = c.apriori_m;
    return j;
}
}  // namespace

std::string config_json(const SweepConfig& c) { return config_to_json(c).dump(); }

std::uint64_t config_hash(const SweepConfig& c) {
    // FNV-1a over the canonical serialized form
    const std::string s = config_json(c);
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

ExperimentSetup build_setup(const SweepConfig& c) {
    ExperimentSetup setup;
    if (c.one_body_file.empty()) {
        Rng rng(derive_seed(c.seed, 2));
        setup.L = random_one_body(c.d, rng);
    } else {
        setup.L = read_matrix(c.one_body_file);
        if (setup.L.rows() != c.d || setup.L.cols() != c.d)
            throw ConfigError("one_body_file matrix does not match d");
        if (hermiticity_defect(setup.L) > 1e-10)
            throw ConfigError("one_body_file matrix is not Hermitian");
    }
    Rng rng_v(derive_seed(c.seed, 1));
    setup.V = random_pair_potential(c.d, rng_v, c.v_norm);
    setup.v_opnorm = operator_norm(setup.V);
    return setup;
}

SlaterOrbitals initial_orbitals(const SweepConfig& c, int N) {
    if (c.initial == "coordinate") return coordinate_orbitals(c.d, N);
    Rng rng(derive_seed(derive_seed(c.seed, 3), static_cast<std::uint64_t>(N)));
    return random_orbitals(c.d, N, rng);
}

namespace {

std::vector<SweepRow> sweep_rows_for_particle_count(const SweepConfig& c,
                                                    const ExperimentSetup& setup, int N) {
    const auto sys = make_system(c.d, N, setup.L, setup.V, c.hbar);
    const auto orbitals = initial_orbitals(c, N);
    const AntisymDensity d0 = slater_density(orbitals);
    const FockBasis basis = d0.basis;
    const Matrix f0 = reduced_density(d0, 1).mat;
    const double f0_norm = operator_norm(f0);

    const int steps = static_cast<int>(std::llround(c.t_final / c.dt));
    const double dt_out = c.output_stride * c.dt;
    const int out_samples = steps / c.output_stride;

    // exact flow sampled only at output times; one-body flow stepped at dt
    const Trajectory nbody =
        nbody_trajectory_fock(sys, d0, out_samples * dt_out, dt_out);
    const Trajectory onebody = tdhf_trajectory(sys, f0, c.t_final, c.dt);

    // dense cross-check of the occupation path: automatic where it is cheap,
    // forced everywhere by the dense_oracle flag
    long full_dim = 1;
    for (int k = 0; k < N; ++k) full_dim *= c.d;
    const bool run_oracle =
        (c.dense_oracle || (c.d <= 4 && N <= 3)) && full_dim <= dense_dim_cap();
    std::optional<Trajectory> dense;
    if (run_oracle)
        dense = nbody_trajectory_dense(sys, embed_to_tensor(d0).mat, out_samples * dt_out, dt_out);

    const int m = std::min(c.apriori_m, N - 2);
    std::vector<double> gaps;
    if (m >= 0)
        for (int k = 0; k <= m; ++k) gaps.push_back(slater_initial_gap(f0, N, 1 + k));

    std::vector<SweepRow> rows;
    rows.reserve(out_samples + 1);
    for (int k = 0; k <= out_samples; ++k) {
        SweepRow row;
        row.N = N;
        row.t = nbody.times[k];
        const Matrix d1 = trajectory_marginal(nbody, k, 1);
        if (dense) {
            const Matrix d1_dense = trajectory_marginal(*dense, k, 1);
            if (trace_norm(Matrix(d1 - d1_dense)) > 1e-9)
                throw std::runtime_error("sweep: occupation and dense marginals disagree at N=" +
                                         std::to_string(N) + ", t=" + std::to_string(row.t));
        }
        const Matrix& f = onebody.states[k * c.output_stride];
        row.err_tracenorm = trace_norm(Matrix(d1 - f));
        row.defect2 = closure_defect(AntisymDensity{basis, nbody.states[k]}, 2);
        row.opnorm_d1 = operator_norm(d1);
        row.t_scaled = 2.0 * setup.v_opnorm * row.t / c.hbar;
        row.bound_applicable = (row.t_scaled < 1.0) && (N >= 2) && m >= 0;
        if (row.bound_applicable) {
            row.bound = apriori_bound_binomial(N, 1, m, row.t_scaled, gaps, f0_norm);
            row.margin = row.bound - row.err_tracenorm;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

SweepResult run_convergence_sweep(const SweepConfig& config) {
    validate_config(config);
    const ExperimentSetup setup = build_setup(config);

    std::vector<int> particle_counts;
    for (int N = config.n_min; N <= config.n_max; ++N) particle_counts.push_back(N);

    std::vector<std::future<std::vector<SweepRow>>> futures;
    futures.reserve(particle_counts.size());
    for (int N : particle_counts)
        futures.push_back(std::async(std::launch::async, sweep_rows_for_particle_count,
                                     std::cref(config), std::cref(setup), N));

    SweepResult result;
    result.config = config;
    result.v_opnorm = setup.v_opnorm;
    for (auto& f : futures) {
        auto rows = f.get();
        result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    }
    std::sort(result.rows.begin(), result.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.N != b.N) return a.N < b.N;
        return a.t < b.t;
    });
    return result;
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("write_sweep_csv: cannot open " + path.string());
    os << "N,t,err_tracenorm,defect2,opnorm_D1,T_scaled,bound,margin\n";
    for (const auto& r : result.rows) {
        os << r.N << ',' << fmt_double(r.t) << ',' << fmt_double(r.err_tracenorm) << ','
           << fmt_double(r.defect2) << ',' << fmt_double(r.opnorm_d1) << ','
           << fmt_double(r.t_scaled) << ',';
        if (r.bound_applicable)
            os << fmt_double(r.bound) << ',' << fmt_double(r.margin);
        else
            os << ',';
        os << '\n';
    }
    if (!os) throw std::runtime_error("write_sweep_csv: write failed");
}

void write_manifest(const std::filesystem::path& path, const SweepConfig& config,
                    const std::string& command, const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["schema"] = "slaterlab-run-v1";
    j["version"] = kVersionString;
    j["command"] = command;
    j["config"] = config_to_json(config);
    char hash_buf[32];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                  static_cast<unsigned long long>(config_hash(config)));
    j["config_hash"] = hash_buf;
    j["outputs"] = outputs;
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("write_manifest: cannot open " + path.string());
    os << std::setw(2) << j << "\n";
}

namespace {

// Deterministic case distribution for the audit quantities.
struct AuditDims {
    int d, N, n;
};

Matrix marginal_of_random_mixture(int d, int N, Rng& rng) {
    const auto density = random_fermionic_density(build_fock_basis(d, N), rng);
    return reduced_density(density, 1).mat;
}

void audit_signed_power(const SweepConfig& c, std::vector<BoundReport>& out) {
    // 100 cases: mostly small dense dims, a few at the top of the range
    const std::vector<AuditDims> grid = {
        {3, 2, 2}, {4, 2, 2}, {4, 3, 2}, {6, 3, 2}, {8, 4, 2},
        {3, 2, 3}, {4, 3, 3}, {6, 4, 3}, {8, 4, 3}, {4, 2, 3},
    };
    Rng rng(derive_seed(c.seed, 11));
    for (int i = 0; i < 100; ++i) {
        const AuditDims dims = grid[i % grid.size()];
        const Matrix f = marginal_of_random_mixture(dims.d, dims.N, rng);
        const double measured = trace_norm(antisym_tensor_power(f, dims.n));
        out.push_back(make_report("signed_power_tracenorm", dims.N, dims.n, 0.0, measured, 1.0,
                                  0.0, operator_norm(f)));
    }
}

void audit_remainder(const SweepConfig& c, std::vector<BoundReport>& out) {
    const std::vector<AuditDims> grid = {
        {3, 2, 2}, {4, 2, 2}, {4, 3, 2}, {6, 3, 2}, {8, 4, 2},
        {3, 2, 3}, {3, 3, 3}, {4, 3, 3}, {4, 2, 3}, {6, 3, 2},
    };
    Rng rng(derive_seed(c.seed, 12));
    for (int i = 0; i < 100; ++i) {
        const AuditDims dims = grid[i % grid.size()];
        Rng sys_rng(derive_seed(c.seed, 1200 + i));
        Matrix l = random_one_body(dims.d, sys_rng);
        Matrix v = random_pair_potential(dims.d, sys_rng, c.v_norm);
        const double v_norm = operator_norm(v);
        const auto sys = make_system(dims.d, dims.N, std::move(l), std::move(v), c.hbar);
        const Matrix f = marginal_of_random_mixture(dims.d, dims.N, rng);
        const double measured = trace_norm(hierarchy_remainder(sys, f, dims.n));
        const double f_norm = operator_norm(f);
        const double bound = 2.0 * dims.n * (dims.n - 1) * v_norm * f_norm;
        out.push_back(
            make_report("remainder_tracenorm", dims.N, dims.n, 0.0, measured, bound, v_norm, f_norm));
    }
}

void audit_coupling_error(const SweepConfig& c, std::vector<BoundReport>& out) {
    // trajectories: dense at d = 4 for n up to 3, occupation path at d = 8
    struct TrajCase {
        int d, N, n;
        bool dense;
    };
    const std::vector<TrajCase> cases = {
        {4, 3, 1, true}, {4, 3, 2, true}, {4, 4, 1, true}, {4, 4, 2, true},
        {4, 4, 3, true}, {8, 5, 1, false}, {6, 4, 1, false}, {8, 4, 1, false},
    };
    int emitted = 0;
    int salt = 0;
    while (emitted < 100) {
        for (const auto& tc : cases) {
            if (emitted >= 100) break;
            Rng sys_rng(derive_seed(c.seed, 1300 + salt));
            Matrix l = random_one_body(tc.d, sys_rng);
            Matrix v = random_pair_potential(tc.d, sys_rng, c.v_norm);
            const double v_norm = operator_norm(v);
            const auto sys = make_system(tc.d, tc.N, std::move(l), std::move(v), c.hbar);
            Rng state_rng(derive_seed(c.seed, 1400 + salt));
            const auto d0 = random_fermionic_density(build_fock_basis(tc.d, tc.N), state_rng);
            const Trajectory traj =
                tc.dense ? nbody_trajectory_dense(sys, embed_to_tensor(d0).mat, 0.3, 0.1)
                         : nbody_trajectory_fock(sys, d0, 0.3, 0.1);
            const double bound = 3.0 * tc.n * tc.n * v_norm / tc.N;
            for (double t : traj.times) {
                if (emitted >= 100) break;
                const double measured = trace_norm(hierarchy_error_term(sys, traj, tc.n, t));
                out.push_back(make_report("coupling_error_tracenorm", tc.N, tc.n, t, measured,
                                          bound, v_norm, 0.0));
                ++emitted;
            }
            ++salt;
        }
    }
}

void audit_marginal_opnorm(const SweepConfig& c, std::vector<BoundReport>& out) {
    const std::vector<AuditDims> grid = {
        {4, 2, 2}, {4, 3, 2}, {6, 2, 2}, {6, 3, 2}, {6, 4, 2}, {8, 3, 2}, {8, 4, 2},
    };
    Rng rng(derive_seed(c.seed, 13));
    for (int i = 0; i < 100; ++i) {
        const AuditDims dims = grid[i % grid.size()];
        const auto density = random_fermionic_density(build_fock_basis(dims.d, dims.N), rng);
        const double opn = operator_norm(reduced_density(density, 1).mat);
        const double defect = closure_defect(density, 2);
        out.push_back(make_report("marginal_opnorm_sq", dims.N, 2, 0.0, opn * opn, defect, 0.0, opn));
    }
}

void audit_apriori(const SweepConfig& c, std::vector<BoundReport>& out) {
    // full pipeline at d = 6, N = 5: scaled time runs up to 0.5
    const int d = 6, N = 5, n = 1;
    Rng sys_rng(derive_seed(c.seed, 14));
    Matrix l = random_one_body(d, sys_rng);
    Matrix v = random_pair_potential(d, sys_rng, c.v_norm);
    const double v_norm = operator_norm(v);
    const auto sys = make_system(d, N, std::move(l), std::move(v), c.hbar);
    const auto d0 = slater_density(coordinate_orbitals(d, N));
    const Matrix f0 = reduced_density(d0, 1).mat;
    const double f0_norm = operator_norm(f0);

    // end at T = 0.5 (a free run has T = 0 throughout)
    const double t_final = v_norm > 0.0 ? 0.5 * c.hbar / (2.0 * v_norm) : 0.5;
    const double dt = 1e-3;
    const int stride = 25;
    const int steps = static_cast<int>(std::llround(t_final / dt));
    const int out_samples = steps / stride;
    const Trajectory nbody = nbody_trajectory_fock(sys, d0, out_samples * stride * dt, stride * dt);
    const Trajectory onebody = tdhf_trajectory(sys, f0, t_final, dt);

    const int m = 3;  // = N - n - 1
    std::vector<double> gaps;
    for (int k = 0; k <= m; ++k) gaps.push_back(slater_initial_gap(f0, N, n + k));

    for (int k = 0; k <= out_samples; ++k) {
        const double t = nbody.times[k];
        const double T = 2.0 * v_norm * t / c.hbar;
        const Matrix d1 = trajectory_marginal(nbody, k, 1);
        const double measured = trace_norm(Matrix(d1 - onebody.states[k * stride]));
        BoundReport power = make_report("apriori_power", N, n, t, measured, 0.0, v_norm, f0_norm);
        BoundReport binom = make_report("apriori_binomial", N, n, t, measured, 0.0, v_norm, f0_norm);
        if (T < 1.0) {
            power.bound = apriori_bound_power(N, n, m, T, gaps, f0_norm);
            power.margin = power.bound - measured;
            binom.bound = apriori_bound_binomial(N, n, m, T, gaps, f0_norm);
            binom.margin = binom.bound - measured;
        } else {
            power.applicable = false;
            binom.applicable = false;
        }
        out.push_back(power);
        out.push_back(binom);
    }
}

}  // namespace

std::vector<BoundReport> run_bound_audit(const SweepConfig& config) {
    validate_config(config);
    std::vector<BoundReport> reports;
    reports.reserve(450);
    audit_signed_power(config, reports);
    audit_remainder(config, reports);
    audit_coupling_error(config, reports);
    audit_marginal_opnorm(config, reports);
    audit_apriori(config, reports);
    return reports;
}

std::vector<ClosureRow> run_closure_table(const SweepConfig& config) {
    validate_config(config);
    std::vector<ClosureRow> rows;
    Rng rng(derive_seed(config.seed, 21));
    for (int N = config.n_min; N <= config.n_max; ++N) {
        const auto slater = slater_density(initial_orbitals(config, N));
        rows.push_back({"slater", config.d, N, 2, closure_defect(slater, 2)});
        const auto mixture = random_fermionic_density(build_fock_basis(config.d, N), rng);
        rows.push_back({"mixture", config.d, N, 2, closure_defect(mixture, 2)});
        long dim = 1;
        bool dense_ok = true;
        for (int k = 0; k < N; ++k) {
            dim *= config.d;
            if (dim > dense_dim_cap()) dense_ok = false;
        }
        if (config.dense_oracle && dense_ok) {
            const Operator full = embed_to_tensor(slater);
            const Matrix d2 = partial_trace(full.mat, config.d, N, 2);
            const Matrix d1 = partial_trace(full.mat, config.d, N, 1);
            const Operator d1op(d1, Space::single(config.d));
            const Matrix pow2 = kron(d1op, d1op).mat * signed_permutation_sum(config.d, 2).mat;
            rows.push_back({"slater-dense", config.d, N, 2, trace_norm(Matrix(d2 - pow2))});
        }
    }
    return rows;
}

void write_closure_csv(const std::filesystem::path& path, const std::vector<ClosureRow>& rows) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("write_closure_csv: cannot open " + path.string());
    os << "kind,d,N,n,defect\n";
    for (const auto& r : rows)
        os << r.kind << ',' << r.d << ',' << r.N << ',' << r.n << ',' << fmt_double(r.defect) << '\n';
    if (!os) throw std::runtime_error("write_closure_csv: write failed");
}

namespace {
struct SelftestCheck {
    const char* name;
    bool passed;
};
}  // namespace

int run_selftest(std::ostream& os) {
    std::vector<SelftestCheck> checks;

    {
        bool ok = true;
        for (int d = 2; d <= 4 && ok; ++d)
            for (int n = 2; n <= 3 && ok; ++n) {
                const Matrix p = antisymmetrizer(d, n).mat;
                ok = operator_norm(p * p - p) <= 1e-12 && operator_norm(p - Matrix(p.adjoint())) <= 1e-12;
            }
        checks.push_back({"antisymmetrizer is an orthogonal projector", ok});
    }
    {
        bool ok = true;
        for (int d = 2; d <= 3 && ok; ++d)
            for (int n = 1; n <= 3 && ok; ++n) {
                const long dim = Space::tensor(d, n + 1).dim();
                Matrix swaps = Matrix::Zero(dim, dim);
                for (int k = 1; k <= n; ++k) swaps += transposition_operator(d, n + 1, k, n + 1).mat;
                const Matrix sn = signed_permutation_sum(d, n).mat;
                const Matrix ext = Eigen::kroneckerProduct(sn, Matrix::Identity(d, d));
                const Matrix rhs = (Matrix::Identity(dim, dim) - swaps) * ext;
                ok = operator_norm(signed_permutation_sum(d, n + 1).mat - rhs) <= 1e-12;
            }
        checks.push_back({"signed-sum recursion over one extra factor", ok});
    }
    {
        bool ok = true;
        Rng rng(31);
        for (int rep = 0; rep < 5 && ok; ++rep) {
            Matrix g = rng.gaussian_matrix(9, 9);
            Matrix rho = g * g.adjoint();
            rho /= rho.trace().real();
            const Matrix t1 = partial_trace(rho, 3, 2, 1);
            Eigen::SelfAdjointEigenSolver<Matrix> es(t1, Eigen::EigenvaluesOnly);
            ok = es.eigenvalues().minCoeff() >= -1e-12 && std::abs(t1.trace().real() - 1.0) < 1e-12 &&
                 trace_norm(t1) <= 1.0 + 1e-12;
        }
        checks.push_back({"partial trace is a positive trace-preserving contraction", ok});
    }
    {
        bool ok = true;
        const auto perms = all_permutations(4);
        std::vector<Matrix> mats;
        for (const auto& p : perms) mats.push_back(permutation_operator(p, 2).mat);
        for (std::size_t a = 0; a < perms.size() && ok; a += 5)
            for (std::size_t b = 0; b < perms.size() && ok; b += 3) {
                const auto prod = perms[a].compose(perms[b]);
                ok = prod.sign() == perms[a].sign() * perms[b].sign() &&
                     (mats[a] * mats[b] - permutation_operator(prod, 2).mat).cwiseAbs().maxCoeff() == 0.0;
            }
        checks.push_back({"permutation representation and sign morphism", ok});
    }
    {
        bool ok = true;
        const int d = 4;
        std::vector<FockBasis> sector;
        for (int n = 0; n <= d; ++n) sector.push_back(build_fock_basis(d, n));
        for (int n = 0; n <= d && ok; ++n)
            for (int i = 0; i < d && ok; ++i)
                for (int j = 0; j < d && ok; ++j) {
                    const long dim = sector[n].size();
                    Matrix acc = Matrix::Zero(dim, dim);
                    if (n < d)
                        acc += annihilation_matrix(sector[n + 1], sector[n], i) *
                               creation_matrix(sector[n], sector[n + 1], j);
                    if (n > 0)
                        acc += creation_matrix(sector[n - 1], sector[n], j) *
                               annihilation_matrix(sector[n], sector[n - 1], i);
                    const Matrix expect = (i == j) ? Matrix(Matrix::Identity(dim, dim))
                                                   : Matrix(Matrix::Zero(dim, dim));
                    ok = (acc - expect).cwiseAbs().maxCoeff() == 0.0;
                }
        checks.push_back({"ladder anticommutation relations", ok});
    }
    {
        bool ok = true;
        Rng rng(32);
        for (int d = 3; d <= 4 && ok; ++d)
            for (int N = 2; N <= 3 && ok; ++N) {
                const auto density = random_fermionic_density(build_fock_basis(d, N), rng);
                const Operator full = embed_to_tensor(density);
                for (int n = 1; n <= 2 && ok; ++n) {
                    const Matrix slow = partial_trace(full.mat, d, N, n);
                    const Matrix fast = reduced_density(density, n).mat;
                    ok = (slow - fast).cwiseAbs().maxCoeff() < 1e-10;
                }
            }
        checks.push_back({"occupation-path marginals equal dense partial traces", ok});
    }
    {
        bool ok = true;
        Rng rng(33);
        for (int N = 2; N <= 5 && ok; ++N) {
            const auto density = slater_density(random_orbitals(6, N, rng));
            ok = std::abs(closure_defect(density, 2) - 1.0 / N) < 1e-10;
        }
        checks.push_back({"determinant closure defect equals 1/N", ok});
    }
    {
        bool ok = true;
        Rng rng(34);
        for (int d = 2; d <= 3 && ok; ++d) {
            const Matrix v = random_pair_potential(d, rng, 1.0);
            const auto density = random_fermionic_density(build_fock_basis(d, 2), rng);
            const Matrix f = reduced_density(density, 1).mat;
            ok = contraction_identity_gap(v, f, 2) < 1e-10;
        }
        checks.push_back({"pair contraction identity", ok});
    }
    {
        bool ok = true;
        Rng rng(35);
        for (int rep = 0; rep < 10 && ok; ++rep) {
            const auto density = random_fermionic_density(build_fock_basis(4, 2), rng);
            const Matrix f = reduced_density(density, 1).mat;
            for (int n = 2; n <= 3 && ok; ++n)
                ok = trace_norm(antisym_tensor_power(f, n)) <= 1.0 + 1e-10;
        }
        checks.push_back({"signed powers have trace norm at most one", ok});
    }
    {
        bool ok = true;
        Rng rng(36);
        for (int rep = 0; rep < 5 && ok; ++rep) {
            Rng sys_rng(derive_seed(36, rep));
            Matrix l = random_one_body(3, sys_rng);
            Matrix v = random_pair_potential(3, sys_rng, 1.0);
            const auto sys = make_system(3, 3, std::move(l), std::move(v));
            const auto density = random_fermionic_density(build_fock_basis(3, 2), rng);
            const Matrix f = reduced_density(density, 1).mat;
            const double measured = trace_norm(hierarchy_remainder(sys, f, 2));
            ok = 4.0 * operator_norm(f) - measured >= -kMarginTolerance;
        }
        checks.push_back({"remainder bound on random inputs", ok});
    }
    {
        bool ok = true;
        Rng rng(37);
        Matrix l = random_one_body(4, rng);
        Matrix v = random_pair_potential(4, rng, 1.0);
        const auto sys = make_system(4, 2, std::move(l), std::move(v));
        for (int rep = 0; rep < 5 && ok; ++rep) {
            Matrix g = rng.gaussian_matrix(4, 4);
            Matrix f = g * g.adjoint();
            f /= f.trace().real();
            const Matrix h = hf_generator(sys, f);
            const Matrix lhs = commutator(h, f) / Complex(0.0, sys.hbar);
            ok = operator_norm(lhs - tdhf_rhs(sys, f)) < 1e-12;
        }
        checks.push_back({"mean-field generator matches the flow direction", ok});
    }
    {
        Rng rng(38);
        Matrix l = random_one_body(4, rng);
        Matrix v = random_pair_potential(4, rng, 1.0);
        const auto sys = make_system(4, 2, std::move(l), std::move(v));
        Matrix g = rng.gaussian_matrix(4, 4);
        Matrix f0 = g * g.adjoint();
        f0 /= f0.trace().real();
        const auto traj = tdhf_trajectory(sys, f0, 0.2, 1e-3);
        Eigen::SelfAdjointEigenSolver<Matrix> es0(f0, Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Matrix> es1(traj.states.back(), Eigen::EigenvaluesOnly);
        const double gap = (es0.eigenvalues() - es1.eigenvalues()).cwiseAbs().maxCoeff();
        checks.push_back({"one-body flow preserves the spectrum", gap < 1e-8});
    }

    int failures = 0;
    for (const auto& check : checks) {
        os << (check.passed ? "[ok]   " : "[FAIL] ") << check.name << "\n";
        if (!check.passed) ++failures;
    }
    os << (failures == 0 ? "selftest passed" : "selftest FAILED") << " (" << checks.size() - failures
       << "/" << checks.size() << ")\n";
    return failures;
}

}  // namespace slaterlab

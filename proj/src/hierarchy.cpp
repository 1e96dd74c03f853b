#include "slaterlab/hierarchy.hpp"

#include "slaterlab/tensor_algebra.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <cstdio>
#include <fstream>

namespace slaterlab {

namespace {

Matrix kron_power(const Matrix& F, int n) {
    const int d = static_cast<int>(F.rows());
    Matrix out = F;
    long dim = d;
    for (int k = 2; k <= n; ++k) {
        dim *= d;
        if (dim > dense_dim_cap())
            throw DimensionCapError("kron_power: d^n exceeds the dense cap");
        out = Eigen::kroneckerProduct(out, F).eval();
    }
    return out;
}

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

}  // namespace

Operator antisym_tensor_power(const Matrix& F, int n) {
    if (F.rows() != F.cols()) throw std::invalid_argument("antisym_tensor_power: F must be square");
    if (n < 1) throw std::invalid_argument("antisym_tensor_power: n must be >= 1");
    const int d = static_cast<int>(F.rows());
    if (n == 1) return Operator(F, Space::single(d));
    if (Space::tensor(d, n).dim() > dense_dim_cap())
        throw DimensionCapError("antisym_tensor_power: d^n exceeds the dense cap");
    const Matrix power = kron_power(F, n);
    return Operator(power * signed_permutation_sum(d, n).mat, Space::tensor(d, n));
}

double antisym_power_trace(const Matrix& F, int n) {
    if (F.rows() != F.cols()) throw std::invalid_argument("antisym_power_trace: F must be square");
    if (n < 1) throw std::invalid_argument("antisym_power_trace: n must be >= 1");
    // traces of powers Tr(F^k), k = 1..n
    std::vector<Complex> power_traces(n + 1);
    Matrix acc = F;
    power_traces[1] = F.trace();
    for (int k = 2; k <= n; ++k) {
        acc = (acc * F).eval();
        power_traces[k] = acc.trace();
    }
    Complex total = 0.0;
    std::vector<bool> seen(n);
    for (const auto& pi : all_permutations(n)) {
        std::fill(seen.begin(), seen.end(), false);
        Complex prod = pi.sign();
        for (int i = 0; i < n; ++i) {
            if (seen[i]) continue;
            int len = 0;
            for (int j = i; !seen[j]; j = pi(j)) {
                seen[j] = true;
                ++len;
            }
            prod *= power_traces[len];
        }
        total += prod;
    }
    return total.real();
}

Operator hierarchy_difference(const Trajectory& nbody, const Trajectory& onebody, int n, double t) {
    if (nbody.size() != onebody.size())
        throw std::invalid_argument("hierarchy_difference: trajectories have different grids");
    for (int k = 0; k < nbody.size(); ++k)
        if (std::abs(nbody.times[k] - onebody.times[k]) > 1e-12)
            throw std::invalid_argument("hierarchy_difference: trajectories have different grids");
    const int k = nbody.index_of_time(t);
    const Matrix dn = trajectory_marginal(nbody, k, n);
    const Operator fn = antisym_tensor_power(onebody.states[k], n);
    return Operator(dn - fn.mat, fn.space);
}

Operator hierarchy_error_term(const MeanFieldSystem& sys, const Trajectory& nbody, int n, double t) {
    if (n < 1 || n >= nbody.N)
        throw std::invalid_argument("hierarchy_error_term: need 1 <= n < N");
    const int k = nbody.index_of_time(t);
    const int d = sys.d;
    const int N = sys.N;
    const Matrix dn = trajectory_marginal(nbody, k, n);
    const Matrix dn1 = trajectory_marginal(nbody, k, n + 1);
    const Operator vop(sys.V, Space::tensor(d, 2));

    Matrix out = Matrix::Zero(dn.rows(), dn.cols());
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            out += commutator(embed_pair_operator(vop, i, j, n).mat, dn) / static_cast<double>(N);
    const double w = static_cast<double>(n) / N;
    for (int i = 1; i <= n; ++i) {
        const Matrix vi = embed_pair_operator(vop, i, n + 1, n + 1).mat;
        out -= w * partial_trace(commutator(vi, dn1), d, n + 1, n);
    }
    return Operator(std::move(out), Space::tensor(d, n));
}

Operator hierarchy_remainder(const MeanFieldSystem& sys, const Matrix& F, int n) {
    if (n < 1) throw std::invalid_argument("hierarchy_remainder: n must be >= 1");
    const int d = sys.d;
    if (n == 1) return Operator(Matrix::Zero(d, d), Space::single(d));
    if (Space::tensor(d, n + 1).dim() > dense_dim_cap())
        throw DimensionCapError("hierarchy_remainder: d^(n+1) exceeds the dense cap");

    const Matrix power = kron_power(F, n + 1);
    const Operator vop(sys.V, Space::tensor(d, 2));
    std::vector<Matrix> swap_up(n + 1);
    for (int kk = 1; kk <= n; ++kk) swap_up[kk] = transposition_operator(d, n + 1, kk, n + 1).mat;

    const long dim_n = Space::tensor(d, n).dim();
    Matrix out = Matrix::Zero(dim_n, dim_n);
    for (int j = 1; j <= n; ++j) {
        Matrix swaps = Matrix::Zero(power.rows(), power.cols());
        for (int kk = 1; kk <= n; ++kk)
            if (kk != j) swaps += swap_up[kk];
        const Matrix inner = power * swaps;
        const Matrix vj = embed_pair_operator(vop, j, n + 1, n + 1).mat;
        out += partial_trace(commutator(vj, inner), d, n + 1, n);
    }
    return Operator(out * signed_permutation_sum(d, n).mat, Space::tensor(d, n));
}

double contraction_identity_gap(const Matrix& V, const Matrix& F, int n) {
    if (n < 2) throw std::invalid_argument("contraction_identity_gap: n must be >= 2");
    const int d = static_cast<int>(F.rows());
    if (V.rows() != d * d) throw std::invalid_argument("contraction_identity_gap: V must be d^2 x d^2");
    const Operator vop(V, Space::tensor(d, 2));
    const Matrix fn = antisym_tensor_power(F, n).mat;

    // left side lives on n+1 factors before the contraction
    const Matrix v_up = embed_pair_operator(vop, n - 1, n + 1, n + 1).mat;
    const Matrix swap_last = transposition_operator(d, n + 1, n, n + 1).mat;
    const Matrix fn_ext = Eigen::kroneckerProduct(fn, F);
    const Matrix lhs = partial_trace(Matrix(v_up * swap_last * fn_ext), d, n + 1, n);

    const long dim_rest = Space::tensor(d, n - 1).dim();
    const Matrix id_f = Eigen::kroneckerProduct(Matrix::Identity(dim_rest, dim_rest), F);
    const Matrix v_in = embed_pair_operator(vop, n - 1, n, n).mat;
    const Matrix rhs = id_f * v_in * fn;
    return trace_norm(Matrix(lhs - rhs));
}

double slater_initial_gap(const Matrix& F0, int N, int n) {
    if (n < 1 || n > N) throw std::invalid_argument("slater_initial_gap: need 1 <= n <= N");
    double coef = std::pow(static_cast<double>(N), n);
    for (int k = N; k > N - n; --k) coef /= k;  // N^n (N-n)! / N!
    return (coef - 1.0) * antisym_power_trace(F0, n);
}

namespace {
void check_apriori_inputs(int N, int n, int m, double T, const std::vector<double>& gaps) {
    if (n < 1 || m < 0) throw std::invalid_argument("apriori bound: need n >= 1, m >= 0");
    if (m > N - n - 1) throw std::invalid_argument("apriori bound: m exceeds N - n - 1");
    if (T >= 1.0)
        throw std::domain_error(
            "apriori bound: T >= 1; continue on shorter subintervals (tau = hbar/(3||V||))");
    if (T < 0.0) throw std::invalid_argument("apriori bound: negative T");
    if (static_cast<int>(gaps.size()) < m + 1)
        throw std::invalid_argument("apriori bound: need m + 1 initial gap values");
    for (double g : gaps)
        if (g < 0.0) throw std::invalid_argument("apriori bound: negative gap value");
}
}  // namespace

double apriori_bound_power(int N, int n, int m, double T,
                           const std::vector<double>& initial_gaps, double f0_norm) {
    check_apriori_inputs(N, n, m, T, initial_gaps);
    const double amp = 2.0 / N + f0_norm;
    const double nfact = factorial(n);
    double sum_init = 0.0, sum_err = 0.0;
    for (int k = 0; k <= m; ++k) {
        const double base = std::pow(static_cast<double>(n + k), n);
        sum_init += base * initial_gaps[k] * std::pow(T, k);
        sum_err += base * (n + k) * (n + k) * amp * std::pow(T, k + 1);
    }
    const double tail = 2.0 * std::pow(static_cast<double>(n + m), n) * std::pow(T, m);
    return (sum_init + sum_err + tail) / nfact;
}

double apriori_bound_binomial(int N, int n, int m, double T,
                              const std::vector<double>& initial_gaps, double f0_norm) {
    check_apriori_inputs(N, n, m, T, initial_gaps);
    const double amp = 2.0 / N + f0_norm;
    double total = 0.0;
    for (int k = 0; k <= m; ++k) {
        const double coef = static_cast<double>(binomial(n + k - 1, n - 1));
        const double eps = initial_gaps[k] + (n + k) * (n + k) * T * amp;
        total += coef * std::pow(T, k) * eps;
    }
    total += static_cast<double>(binomial(n + m - 1, n - 1)) * std::pow(T, m) * 2.0;
    return total;
}

BoundReport make_report(std::string quantity, int N, int n, double t, double measured,
                        double bound, double v_norm, double f0_norm) {
    BoundReport r;
    r.quantity = std::move(quantity);
    r.N = N;
    r.n = n;
    r.t = t;
    r.measured = measured;
    r.bound = bound;
    r.margin = bound - measured;
    r.v_norm = v_norm;
    r.f0_norm = f0_norm;
    return r;
}

void write_bound_reports_csv(const std::filesystem::path& path,
                             const std::vector<BoundReport>& reports) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("write_bound_reports_csv: cannot open " + path.string());
    os << "quantity,N,n,t,measured,bound,margin\n";
    char buf[64];
    auto fmt = [&buf](double x) {
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        return std::string(buf);
    };
    for (const auto& r : reports) {
        os << r.quantity << ',' << r.N << ',' << r.n << ',' << fmt(r.t) << ',' << fmt(r.measured) << ',';
        if (r.applicable)
            os << fmt(r.bound) << ',' << fmt(r.margin);
        else
            os << ',';
        os << '\n';
    }
    if (!os) throw std::runtime_error("write_bound_reports_csv: write failed");
}

}  // namespace slaterlab

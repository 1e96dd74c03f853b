#ifndef SLATERLAB_HIERARCHY_HPP
#define SLATERLAB_HIERARCHY_HPP

#include "slaterlab/nbody.hpp"
#include "slaterlab/spaces.hpp"
#include "slaterlab/trajectory.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace slaterlab {

// F^{x n} Sigma_n on Tensor(d, n): the signed n-fold power of a one-body
// density. Positive, with trace norm at most 1 for densities F.
Operator antisym_tensor_power(const Matrix& F, int n);

// Tr(F^{x n} Sigma_n) by the cycle expansion over S_n:
//   sum_pi sgn(pi) prod_{cycles c of pi} Tr(F^{|c|}).
// Scales to any d without touching tensor spaces.
double antisym_power_trace(const Matrix& F, int n);

// D_{N:n}(t) - F(t)^{x n} Sigma_n on Tensor(d, n); the two trajectories must
// share their time grid.
Operator hierarchy_difference(const Trajectory& nbody, const Trajectory& onebody, int n, double t);

// Truncation error of rewriting the coupled marginal equations with unit
// coupling to the (n+1)-body marginal:
//   (1/N) sum_{i<j<=n} [V_ij, D_{N:n}] - (n/N) sum_{i<=n} [V_{i,n+1}, D_{N:n+1}]_{:n}.
// Trace norm bounded by 3 n^2 ||V|| / N.
Operator hierarchy_error_term(const MeanFieldSystem& sys, const Trajectory& nbody, int n, double t);

// Remainder of the bottom-up marginal equations built from the one-body flow:
// zero for n = 1, and for n > 1
//   sum_{j<=n} [V_{j,n+1}, F^{x(n+1)} sum_{k<=n, k!=j} U_{(k,n+1)}]_{:n} Sigma_n.
// Trace norm bounded by 2 n (n-1) ||V|| ||F|| for densities F.
Operator hierarchy_remainder(const MeanFieldSystem& sys, const Matrix& F, int n);

// Trace-norm gap of the contraction identity used to bound the remainder:
//   {V_{n-1,n+1} U_{(n,n+1)} (F_n x F)}_{:n}  =  (I^{x(n-1)} x F) V_{n-1,n} F_n,
// with F_n the signed n-fold power of F. Zero in exact arithmetic.
double contraction_identity_gap(const Matrix& V, const Matrix& F, int n);

// || D_{N:n}(0) - F^{x n} Sigma_n ||_tr for determinant initial data with
// marginal F0: equals (N^n (N-n)!/N! - 1) Tr(F0^{x n} Sigma_n), evaluated by
// the cycle expansion. Zero at n = 1.
double slater_initial_gap(const Matrix& F0, int N, int n);

// A-priori domination of || E_{N,n}(t) ||_tr after m iterations of the
// integral inequality, with T = 2 ||V|| t / hbar < 1. Inputs: the measured
// initial gaps ||E_{N,n+k}(0)||_tr for k = 0..m and the operator norm of the
// one-body initial datum. Two coefficient families:
//   power:    (n+k)^n / n!  with the closed-form error amplitudes
//   binomial: binom(n+k-1, n-1), tighter
// Both replace the unmeasurable tail supremum by its generic bound 2.
double apriori_bound_power(int N, int n, int m, double T,
                           const std::vector<double>& initial_gaps, double f0_norm);
double apriori_bound_binomial(int N, int n, int m, double T,
                              const std::vector<double>& initial_gaps, double f0_norm);

// One measured-vs-bound comparison; margin = bound - measured, and a report
// passes when margin >= -1e-8. `applicable` is false where the bound's
// hypothesis (T < 1) fails; such rows are informational, never failures.
struct BoundReport {
    std::string quantity;
    int N = 0;
    int n = 0;
    double t = 0.0;
    double measured = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    double v_norm = 0.0;
    double f0_norm = 0.0;
    bool applicable = true;
};

constexpr double kMarginTolerance = 1e-8;

BoundReport make_report(std::string quantity, int N, int n, double t, double measured,
                        double bound, double v_norm, double f0_norm);

// CSV columns: quantity,N,n,t,measured,bound,margin. Inapplicable rows carry
// empty bound/margin fields.
void write_bound_reports_csv(const std::filesystem::path& path,
                             const std::vector<BoundReport>& reports);

}  // namespace slaterlab

#endif

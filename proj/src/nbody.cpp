#include "slaterlab/nbody.hpp"

#include "slaterlab/tensor_algebra.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace slaterlab {

MeanFieldSystem make_system(int d, int N, Matrix L, Matrix V, double hbar) {
    if (d < 1 || N < 1) throw std::invalid_argument("make_system: need d >= 1, N >= 1");
    if (N > d) throw std::invalid_argument("make_system: N > d leaves no fermionic states");
    if (hbar <= 0.0) throw std::invalid_argument("make_system: hbar must be positive");
    if (L.rows() != d || L.cols() != d) throw std::invalid_argument("make_system: L must be d x d");
    if (V.rows() != d * d || V.cols() != d * d)
        throw std::invalid_argument("make_system: V must be d^2 x d^2");
    if (!is_hermitian(L)) throw std::invalid_argument("make_system: L is not Hermitian");
    if (!is_hermitian(V)) throw std::invalid_argument("make_system: V is not Hermitian");
    const Matrix u12 = transposition_operator(d, 2, 1, 2).mat;
    if (operator_norm(V * u12 - u12 * V) > 1e-10)
        throw std::invalid_argument("make_system: V does not commute with the factor swap");
    return MeanFieldSystem{d, N, std::move(L), std::move(V), hbar};
}

Matrix random_one_body(int d, Rng& rng) {
    Matrix l = rng.hermitian(d);
    const double norm = operator_norm(l);
    if (norm > 0) l /= norm;
    return l;
}

Matrix random_pair_potential(int d, Rng& rng, double norm_target) {
    if (norm_target < 0) throw std::invalid_argument("random_pair_potential: negative norm target");
    if (norm_target == 0.0) return Matrix::Zero(d * d, d * d);
    Matrix v = rng.hermitian(d * d);
    const Matrix u12 = transposition_operator(d, 2, 1, 2).mat;
    v = 0.5 * (v + u12 * v * u12).eval();
    const double norm = operator_norm(v);
    if (norm > 0) v *= norm_target / norm;
    return v;
}

Operator build_hamiltonian_dense(const MeanFieldSystem& sys) {
    const Space space = Space::tensor(sys.d, sys.N);
    if (space.dim() > dense_dim_cap())
        throw DimensionCapError("build_hamiltonian_dense: d^N exceeds the dense cap; use the occupation path");
    const long dim = space.dim();
    Matrix h = Matrix::Zero(dim, dim);
    for (int j = 1; j <= sys.N; ++j) h += embed_one_body(sys.L, j, sys.N).mat;
    if (sys.N >= 2) {
        const Operator vop(sys.V, Space::tensor(sys.d, 2));
        for (int i = 1; i <= sys.N; ++i)
            for (int j = i + 1; j <= sys.N; ++j)
                h += embed_pair_operator(vop, i, j, sys.N).mat / static_cast<double>(sys.N);
    }
    return Operator(std::move(h), space);
}

Matrix build_hamiltonian_fock(const MeanFieldSystem& sys, const FockBasis& basis) {
    if (basis.d != sys.d || basis.N != sys.N)
        throw std::invalid_argument("build_hamiltonian_fock: basis does not match the system");
    const int d = sys.d;
    const int N = sys.N;
    const long dim = basis.size();
    Matrix h = Matrix::Zero(dim, dim);

    // sum_j L_j  ->  sum_{pq} L(p,q) a+_p a_q
    const FockBasis below = build_fock_basis(d, N - 1);
    std::vector<Matrix> cre(d);
    for (int p = 0; p < d; ++p) cre[p] = creation_matrix(below, basis, p);
    for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) {
            if (sys.L(p, q) == Complex(0, 0)) continue;
            h += sys.L(p, q) * (cre[p] * cre[q].adjoint());
        }

    // (1/N) sum_{i<j} V_ij  ->  (1/2N) sum_{pqrs} <pq|V|rs> a+_p a+_q a_s a_r
    if (N >= 2) {
        const FockBasis below2 = build_fock_basis(d, N - 2);
        std::vector<Matrix> pair(static_cast<std::size_t>(d) * d);
        for (int r = 0; r < d; ++r)
            for (int s = 0; s < d; ++s)
                pair[r * d + s] = pair_annihilation_matrix(basis, below2, r, s);
        const double w = 1.0 / (2.0 * N);
        for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q) {
                if (p == q) continue;  // a+_p a+_p = 0
                Matrix acc = Matrix::Zero(below2.size(), dim);
                for (int r = 0; r < d; ++r)
                    for (int s = 0; s < d; ++s) {
                        const Complex coef = sys.V(p * d + q, r * d + s);
                        if (coef == Complex(0, 0)) continue;
                        acc += coef * pair[r * d + s];
                    }
                h += w * (pair[p * d + q].adjoint() * acc);
            }
    }
    return h;
}

ExactPropagator::ExactPropagator(const Matrix& H, double hbar) : hbar_(hbar) {
    if (hbar <= 0.0) throw std::invalid_argument("ExactPropagator: hbar must be positive");
    if (hermiticity_defect(H) > 1e-10)
        throw std::invalid_argument("ExactPropagator: Hamiltonian is not Hermitian to 1e-10");
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    vectors_ = es.eigenvectors();
    values_ = es.eigenvalues();
}

Matrix ExactPropagator::unitary(double t) const {
    Vector phases(values_.size());
    for (Eigen::Index k = 0; k < values_.size(); ++k)
        phases(k) = std::exp(Complex(0.0, -values_(k) * t / hbar_));
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

Matrix ExactPropagator::evolve(const Matrix& D0, double t) const {
    const Matrix u = unitary(t);
    return u * D0 * u.adjoint();
}

namespace {
void check_density(const Matrix& D0, const char* who) {
    if (D0.rows() != D0.cols()) throw std::invalid_argument(std::string(who) + ": density must be square");
    if (std::abs(D0.trace() - Complex(1.0, 0.0)) > 1e-8)
        throw std::invalid_argument(std::string(who) + ": density trace differs from 1 beyond 1e-8");
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (D0 + D0.adjoint())), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8)
        throw std::invalid_argument(std::string(who) + ": density has an eigenvalue below -1e-8");
}
}  // namespace

Matrix evolve_exact(const Matrix& H, const Matrix& D0, double t, double hbar) {
    check_density(D0, "evolve_exact");
    return ExactPropagator(H, hbar).evolve(D0, t);
}

Matrix evolve_exact_dense(const MeanFieldSystem& sys, const Matrix& D0, double t) {
    return evolve_exact(build_hamiltonian_dense(sys).mat, D0, t, sys.hbar);
}

AntisymDensity evolve_exact_fock(const MeanFieldSystem& sys, const AntisymDensity& D0, double t) {
    const Matrix h = build_hamiltonian_fock(sys, D0.basis);
    return AntisymDensity{D0.basis, evolve_exact(h, D0.mat, t, sys.hbar)};
}

namespace {
Trajectory sampled_trajectory(const Matrix& h, const Matrix& D0, StateRep rep,
                              const MeanFieldSystem& sys, double t_final, double dt) {
    if (dt <= 0.0 || t_final < 0.0)
        throw std::invalid_argument("nbody trajectory: need dt > 0 and t_final >= 0");
    check_density(D0, "nbody trajectory");
    const int steps = static_cast<int>(std::llround(t_final / dt));
    const ExactPropagator prop(h, sys.hbar);
    Trajectory traj;
    traj.rep = rep;
    traj.d = sys.d;
    traj.N = sys.N;
    traj.dt = dt;
    traj.hbar = sys.hbar;
    traj.scheme = "spectral";
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    for (int k = 0; k <= steps; ++k) {
        const double t = k * dt;
        traj.times.push_back(t);
        traj.states.push_back(k == 0 ? D0 : prop.evolve(D0, t));
    }
    return traj;
}
}  // namespace

Trajectory nbody_trajectory_dense(const MeanFieldSystem& sys, const Matrix& D0,
                                  double t_final, double dt) {
    return sampled_trajectory(build_hamiltonian_dense(sys).mat, D0, StateRep::DenseTensor, sys,
                              t_final, dt);
}

Trajectory nbody_trajectory_fock(const MeanFieldSystem& sys, const AntisymDensity& D0,
                                 double t_final, double dt) {
    return sampled_trajectory(build_hamiltonian_fock(sys, D0.basis), D0.mat, StateRep::Occupation,
                              sys, t_final, dt);
}

Matrix trajectory_marginal(const Trajectory& traj, int k, int n) {
    if (k < 0 || k >= traj.size()) throw std::invalid_argument("trajectory_marginal: sample out of range");
    if (n < 1 || n > traj.N) throw std::invalid_argument("trajectory_marginal: n out of range");
    switch (traj.rep) {
        case StateRep::DenseTensor:
            return partial_trace(traj.states[k], traj.d, traj.N, n);
        case StateRep::Occupation: {
            const FockBasis basis = build_fock_basis(traj.d, traj.N);
            const AntisymDensity density{basis, traj.states[k]};
            return reduced_density(density, n).mat;
        }
        case StateRep::OneBody:
            if (n != 1) throw std::invalid_argument("trajectory_marginal: one-body trajectory has n = 1 only");
            return traj.states[k];
    }
    throw std::logic_error("trajectory_marginal: unreachable");
}

double hierarchy_residual(const MeanFieldSystem& sys, const Trajectory& traj, int n) {
    if (n < 1 || n >= traj.N) throw std::invalid_argument("hierarchy_residual: need 1 <= n < N");
    if (traj.size() < 3) throw std::invalid_argument("hierarchy_residual: need at least 3 samples");
    traj.check_uniform_grid();
    const int d = sys.d;
    const int N = sys.N;
    const double dt = traj.dt;

    std::vector<Matrix> dn(traj.size()), dn1(traj.size());
    for (int k = 0; k < traj.size(); ++k) {
        dn[k] = trajectory_marginal(traj, k, n);
        dn1[k] = trajectory_marginal(traj, k, n + 1);
    }

    // operators featuring in the marginal evolution equation
    std::vector<Matrix> l_at(n + 1);
    for (int j = 1; j <= n; ++j) l_at[j] = embed_one_body(sys.L, j, n).mat;
    const Operator vop(sys.V, Space::tensor(d, 2));
    std::vector<std::vector<Matrix>> v_nn(n + 1, std::vector<Matrix>(n + 1));
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) v_nn[i][j] = embed_pair_operator(vop, i, j, n).mat;
    std::vector<Matrix> v_up(n + 1);
    for (int i = 1; i <= n; ++i) v_up[i] = embed_pair_operator(vop, i, n + 1, n + 1).mat;

    double worst = 0.0;
    for (int k = 1; k + 1 < traj.size(); ++k) {
        Matrix rhs = Matrix::Zero(dn[k].rows(), dn[k].cols());
        for (int j = 1; j <= n; ++j) rhs += commutator(l_at[j], dn[k]);
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) rhs += commutator(v_nn[i][j], dn[k]) / static_cast<double>(N);
        const double tail_weight = static_cast<double>(N - n) / N;
        for (int i = 1; i <= n; ++i)
            rhs += tail_weight * partial_trace(commutator(v_up[i], dn1[k]), d, n + 1, n);
        const Matrix lhs = Complex(0.0, sys.hbar) * (dn[k + 1] - dn[k - 1]) / (2.0 * dt);
        worst = std::max(worst, trace_norm(Matrix(lhs - rhs)));
    }
    return worst;
}

}  // namespace slaterlab

#include "slaterlab/tdhf.hpp"

#include "slaterlab/tensor_algebra.hpp"

#include <cmath>

namespace slaterlab {

Matrix pair_exchange_correction(const Matrix& F) {
    const int d = static_cast<int>(F.rows());
    Matrix out(d * d, d * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e)
                    out(a * d + b, c * d + e) = F(a, c) * F(b, e) - F(a, e) * F(b, c);
    return out;
}

Matrix direct_potential(const Matrix& V, const Matrix& F) {
    const int d = static_cast<int>(F.rows());
    Matrix out = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Complex acc = 0.0;
            for (int z = 0; z < d; ++z)
                for (int b = 0; b < d; ++b) acc += V(i * d + z, j * d + b) * F(b, z);
            out(i, j) = acc;
        }
    return out;
}

Matrix exchange_potential(const Matrix& V, const Matrix& F) {
    const int d = static_cast<int>(F.rows());
    Matrix out = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Complex acc = 0.0;
            for (int z = 0; z < d; ++z)
                for (int b = 0; b < d; ++b) acc += V(z * d + i, j * d + b) * F(b, z);
            out(i, j) = acc;
        }
    return out;
}

Matrix hf_generator(const MeanFieldSystem& sys, const Matrix& F) {
    return sys.L + direct_potential(sys.V, F) - exchange_potential(sys.V, F);
}

Matrix tdhf_rhs(const MeanFieldSystem& sys, const Matrix& F) {
    if (F.rows() != sys.d || F.cols() != sys.d)
        throw std::invalid_argument("tdhf_rhs: F must be d x d");
    const Matrix f2 = pair_exchange_correction(F);
    const Matrix contracted = partial_trace(commutator(sys.V, f2), sys.d, 2, 1);
    const Matrix bracket = commutator(sys.L, F) + contracted;
    return bracket / Complex(0.0, sys.hbar);
}

namespace {

// Midpoint-frozen generator for one step starting at F: a predictor half-step
// under h(F), then one fixed-point refinement of the midpoint.
Matrix frozen_generator(const MeanFieldSystem& sys, const Matrix& F, double dt) {
    Matrix h = hf_generator(sys, F);
    for (int it = 0; it < 2; ++it) {
        const Matrix u_half = unitary_propagator(Matrix(0.5 * (h + h.adjoint())), 0.5 * dt, sys.hbar);
        const Matrix f_mid = u_half * F * u_half.adjoint();
        h = hf_generator(sys, f_mid);
    }
    return 0.5 * (h + h.adjoint());
}

}  // namespace

TdhfState tdhf_step(const MeanFieldSystem& sys, const TdhfState& state, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("tdhf_step: dt must be positive");
    const Matrix h_mid = frozen_generator(sys, state.F, dt);
    const Matrix u = unitary_propagator(h_mid, dt, sys.hbar);
    TdhfState next = state;
    next.F = u * state.F * u.adjoint();
    next.t = state.t + dt;
    next.dt = dt;
    next.steps = state.steps + 1;
    return next;
}

Trajectory tdhf_trajectory(const MeanFieldSystem& sys, const Matrix& F0, double t_final, double dt) {
    if (dt <= 0.0 || t_final < 0.0)
        throw std::invalid_argument("tdhf_trajectory: need dt > 0 and t_final >= 0");
    if (F0.rows() != sys.d || F0.cols() != sys.d)
        throw std::invalid_argument("tdhf_trajectory: F0 must be d x d");
    if (hermiticity_defect(F0) > 1e-8 || std::abs(F0.trace() - Complex(1, 0)) > 1e-8)
        throw std::invalid_argument("tdhf_trajectory: F0 is not a unit-trace Hermitian density");
    const int steps = static_cast<int>(std::llround(t_final / dt));
    Trajectory traj;
    traj.rep = StateRep::OneBody;
    traj.d = sys.d;
    traj.N = sys.N;
    traj.dt = dt;
    traj.hbar = sys.hbar;
    traj.scheme = "strang-midpoint";
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    TdhfState state{F0, 0.0, dt, "strang-midpoint", 0};
    traj.times.push_back(0.0);
    traj.states.push_back(F0);
    for (int k = 1; k <= steps; ++k) {
        state = tdhf_step(sys, state, dt);
        traj.times.push_back(k * dt);
        traj.states.push_back(state.F);
    }
    return traj;
}

Matrix orbital_density(const SlaterOrbitals& orbitals) {
    return orbitals.frame * orbitals.frame.adjoint() / static_cast<double>(orbitals.N());
}

SlaterOrbitals orbital_step(const MeanFieldSystem& sys, const SlaterOrbitals& orbitals, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("orbital_step: dt must be positive");
    if (orbitals.gram_defect() > 1e-8)
        throw std::invalid_argument("orbital_step: orbitals are not orthonormal");
    const Matrix rho = orbital_density(orbitals);
    const Matrix h_mid = frozen_generator(sys, rho, dt);
    const Matrix u = unitary_propagator(h_mid, dt, sys.hbar);
    return SlaterOrbitals{u * orbitals.frame};
}

Trajectory orbital_trajectory(const MeanFieldSystem& sys, const SlaterOrbitals& initial,
                              double t_final, double dt) {
    if (dt <= 0.0 || t_final < 0.0)
        throw std::invalid_argument("orbital_trajectory: need dt > 0 and t_final >= 0");
    if (initial.gram_defect() > 1e-8)
        throw std::invalid_argument("orbital_trajectory: initial orbitals are not orthonormal");
    const int steps = static_cast<int>(std::llround(t_final / dt));
    Trajectory traj;
    traj.rep = StateRep::OneBody;
    traj.d = sys.d;
    traj.N = sys.N;
    traj.dt = dt;
    traj.hbar = sys.hbar;
    traj.scheme = "strang-midpoint-orbital";
    SlaterOrbitals current = initial;
    traj.times.push_back(0.0);
    traj.states.push_back(orbital_density(current));
    for (int k = 1; k <= steps; ++k) {
        current = orbital_step(sys, current, dt);
        traj.times.push_back(k * dt);
        traj.states.push_back(orbital_density(current));
    }
    return traj;
}

double hf_energy(const MeanFieldSystem& sys, const Matrix& F) {
    const Matrix f2 = pair_exchange_correction(F);
    return (sys.L * F).trace().real() + 0.5 * (sys.V * f2).trace().real();
}

double duhamel_residual(const MeanFieldSystem& sys, const Trajectory& traj) {
    if (traj.size() < 3) throw std::invalid_argument("duhamel_residual: need at least 3 samples");
    traj.check_uniform_grid();
    const int d = sys.d;
    const double dt = traj.dt;
    const double hbar = sys.hbar;
    const ExactPropagator free(sys.L, hbar);

    // Interaction frame: rotating everything by exp(+i t L / hbar) turns the
    // integral identity into  F~(t) = F(0) - (i/hbar) int_0^t G(s) ds  with
    // G(s) = exp(+isL/h)[V, F2-(s)]_{:1} exp(-isL/h).
    const int K = traj.size();
    std::vector<Matrix> g(K), rotated(K);
    for (int k = 0; k < K; ++k) {
        const Matrix u_back = free.unitary(-traj.times[k]);  // exp(+i t L / hbar)
        const Matrix f2 = pair_exchange_correction(traj.states[k]);
        const Matrix contracted = partial_trace(commutator(sys.V, f2), d, 2, 1);
        g[k] = u_back * contracted * u_back.adjoint();
        rotated[k] = u_back * traj.states[k] * u_back.adjoint();
    }

    // Prefix integrals: composite Simpson on even prefixes, a 3/8 closing rule
    // on odd prefixes, one trapezoid for the first interval.
    std::vector<Matrix> integral(K, Matrix::Zero(d, d));
    for (int k = 1; k < K; ++k) {
        if (k == 1) {
            integral[1] = 0.5 * dt * (g[0] + g[1]);
        } else if (k % 2 == 0) {
            integral[k] = integral[k - 2] + (dt / 3.0) * (g[k - 2] + 4.0 * g[k - 1] + g[k]);
        } else {
            integral[k] =
                integral[k - 3] + (3.0 * dt / 8.0) * (g[k - 3] + 3.0 * g[k - 2] + 3.0 * g[k - 1] + g[k]);
        }
    }

    double worst = 0.0;
    for (int k = 0; k < K; ++k) {
        const Matrix gap = rotated[k] - rotated[0] + Complex(0.0, 1.0 / hbar) * integral[k];
        worst = std::max(worst, trace_norm(gap));
    }
    return worst;
}

}  // namespace slaterlab

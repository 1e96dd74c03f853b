#ifndef SLATERLAB_TDHF_HPP
#define SLATERLAB_TDHF_HPP

#include "slaterlab/fock.hpp"
#include "slaterlab/nbody.hpp"
#include "slaterlab/spaces.hpp"
#include "slaterlab/trajectory.hpp"

namespace slaterlab {

// One-body density evolving under the nonlinear mean-field flow
//   i hbar dF/dt = [L, F] + [V, (F x F)(I - swap)]_{:1}.
struct TdhfState {
    Matrix F;  // d x d density
    double t = 0.0;
    double dt = 0.0;
    std::string scheme = "strang-midpoint";
    long steps = 0;
};

// (F x F)(I - swap) on Tensor(d, 2); vanishes on rank-1 densities.
Matrix pair_exchange_correction(const Matrix& F);

// Mean-field potentials contracted from V against F:
//   direct(i,j)   = sum_{z,b} V[(i,z),(j,b)] F(b,z)
//   exchange(i,j) = sum_{z,b} V[(z,i),(j,b)] F(b,z)
Matrix direct_potential(const Matrix& V, const Matrix& F);
Matrix exchange_potential(const Matrix& V, const Matrix& F);

// The instantaneous Hermitian generator h(F) = L + direct - exchange.
// Satisfies [h(F), F] = [L, F] + [V, pair_exchange_correction(F)]_{:1}.
Matrix hf_generator(const MeanFieldSystem& sys, const Matrix& F);

// dF/dt: (1/ i hbar)([L,F] + [V, F2-]_{:1}); Hermitian and traceless.
Matrix tdhf_rhs(const MeanFieldSystem& sys, const Matrix& F);

// One step of unitary-conjugation Strang splitting with a midpoint-frozen
// generator: F <- exp(-i h(F_mid) dt/hbar) F exp(+i h(F_mid) dt/hbar).
// Spectrum and trace are preserved exactly per step; local error O(dt^3).
TdhfState tdhf_step(const MeanFieldSystem& sys, const TdhfState& state, double dt);

// The flow sampled on t_k = k dt up to round(t_final/dt) steps.
Trajectory tdhf_trajectory(const MeanFieldSystem& sys, const Matrix& F0, double t_final, double dt);

// Coupled orbital form of the same flow: all N orbitals advance under the
// unitary generated by h(rho), rho = (1/N) sum_k psi_k psi_k*. Orthonormality
// is preserved; the induced rho tracks the operator-form F.
SlaterOrbitals orbital_step(const MeanFieldSystem& sys, const SlaterOrbitals& orbitals, double dt);

// Orbital flow recorded as the induced one-body densities.
Trajectory orbital_trajectory(const MeanFieldSystem& sys, const SlaterOrbitals& initial,
                              double t_final, double dt);
Matrix orbital_density(const SlaterOrbitals& orbitals);

// Mean-field energy Tr(LF) + (1/2) Tr(V F2-); a conserved quantity of the
// flow used as an integrator-quality gate.
double hf_energy(const MeanFieldSystem& sys, const Matrix& F);

// Max over the grid of the trace-norm gap in the integral (Duhamel) form of
// the flow, with the time integral done by composite Simpson (3/8 closing
// rule on odd prefixes). O(dt^2) for trajectories of this solver.
double duhamel_residual(const MeanFieldSystem& sys, const Trajectory& traj);

}  // namespace slaterlab

#endif

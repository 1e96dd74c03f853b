#ifndef SLATERLAB_NBODY_HPP
#define SLATERLAB_NBODY_HPP

#include "slaterlab/fock.hpp"
#include "slaterlab/rng.hpp"
#include "slaterlab/spaces.hpp"
#include "slaterlab/trajectory.hpp"

namespace slaterlab {

// One-body generator L, pairwise potential V on (C^d)^{x 2} (Hermitian,
// commuting with the factor swap), particle count N, and hbar. The pair
// interaction enters the Hamiltonian with the 1/N mean-field weight.
struct MeanFieldSystem {
    int d = 0;
    int N = 0;
    Matrix L;  // d x d
    Matrix V;  // d^2 x d^2
    double hbar = 1.0;
};

// Validates Hermiticity of L and V and the swap symmetry of V (1e-10 each).
MeanFieldSystem make_system(int d, int N, Matrix L, Matrix V, double hbar = 1.0);

// Gaussian Hermitian one-body generator, normalized to unit operator norm.
Matrix random_one_body(int d, Rng& rng);

// Gaussian Hermitian pair potential, symmetrized across the factor swap and
// scaled to the requested operator norm (zero target gives the zero matrix).
Matrix random_pair_potential(int d, Rng& rng, double norm_target = 1.0);

// H = sum_j L_j + (1/N) sum_{i<j} V_ij on Tensor(d, N). Cap-checked.
Operator build_hamiltonian_dense(const MeanFieldSystem& sys);

// The same Hamiltonian restricted to the antisymmetric subspace, assembled
// from ladder operators in the occupation-number basis.
Matrix build_hamiltonian_fock(const MeanFieldSystem& sys, const FockBasis& basis);

// Spectral propagation: caches one eigendecomposition of H and evolves
// densities by unitary conjugation, exact up to linear-algebra roundoff.
class ExactPropagator {
public:
    ExactPropagator(const Matrix& H, double hbar);
    Matrix unitary(double t) const;                      // exp(-i H t / hbar)
    Matrix evolve(const Matrix& D0, double t) const;     // U D0 U*
private:
    Matrix vectors_;
    RealVector values_;
    double hbar_;
};

// Checks trace 1 (1e-8) and positivity (eigenvalues >= -1e-8) of D0, then
// returns exp(-iHt/hbar) D0 exp(+iHt/hbar).
Matrix evolve_exact(const Matrix& H, const Matrix& D0, double t, double hbar);

Matrix evolve_exact_dense(const MeanFieldSystem& sys, const Matrix& D0, double t);
AntisymDensity evolve_exact_fock(const MeanFieldSystem& sys, const AntisymDensity& D0, double t);

// Sampled flows on the uniform grid t_k = k dt, k = 0 .. round(t_final/dt).
Trajectory nbody_trajectory_dense(const MeanFieldSystem& sys, const Matrix& D0,
                                  double t_final, double dt);
Trajectory nbody_trajectory_fock(const MeanFieldSystem& sys, const AntisymDensity& D0,
                                 double t_final, double dt);

// n-body marginal of sample k as a matrix on Tensor(d, n); dispatches on the
// trajectory representation (occupation-path marginals limited to n <= 2).
Matrix trajectory_marginal(const Trajectory& traj, int k, int n);

// Max over interior grid points of the trace norm of
//   i hbar (centered difference of D_{N:n}) - [coupled marginal evolution RHS],
// where the RHS uses the n-body and (n+1)-body marginals. O(dt^2) for exact
// trajectories; needs n < N and at least 3 samples.
double hierarchy_residual(const MeanFieldSystem& sys, const Trajectory& traj, int n);

}  // namespace slaterlab

#endif

#ifndef SLATERLAB_FOCK_HPP
#define SLATERLAB_FOCK_HPP

#include "slaterlab/rng.hpp"
#include "slaterlab/spaces.hpp"

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace slaterlab {

// Enumeration of the N-particle occupation states over d modes: N-element
// subsets of {0, .., d-1} as bit-sets, ordered lexicographically by the
// increasing mode tuple. Index <-> bit-set maps are inverse bijections.
struct FockBasis {
    int d = 0;
    int N = 0;
    std::vector<std::uint32_t> states;

    int size() const { return static_cast<int>(states.size()); }
    std::uint32_t bits(int index) const { return states[index]; }
    int index(std::uint32_t bits) const;
    std::vector<int> modes(int index) const;  // occupied modes, increasing

private:
    friend FockBasis build_fock_basis(int d, int N);
    std::unordered_map<std::uint32_t, int> index_of_;
};

// Errors when N > d (no antisymmetric states). N = 0 gives the one-state
// vacuum sector, which the creation/annihilation ladders need.
FockBasis build_fock_basis(int d, int N);

// a^dag_mode as a C(d,N) x C(d,N-1) matrix between sectors sharing d.
// Sign convention: acting on S with mode not in S gives
// (-1)^(number of occupied modes below `mode`) * (S with mode added).
Matrix creation_matrix(const FockBasis& from, const FockBasis& to, int mode);

// a_mode between sectors N -> N-1; the adjoint of creation_matrix.
Matrix annihilation_matrix(const FockBasis& from, const FockBasis& to, int mode);

// a_second a_first between sectors N -> N-2 (a_first applied first).
Matrix pair_annihilation_matrix(const FockBasis& from, const FockBasis& to,
                                int mode_first, int mode_second);

// An ordered orthonormal frame of N single-particle vectors (columns).
struct SlaterOrbitals {
    Matrix frame;  // d x N
    int d() const { return static_cast<int>(frame.rows()); }
    int N() const { return static_cast<int>(frame.cols()); }
    double gram_defect() const;  // max |(frame* frame - I)_ij|
};

SlaterOrbitals coordinate_orbitals(int d, int N);
SlaterOrbitals random_orbitals(int d, int N, Rng& rng);

// A fermionic N-body density in occupation-number coordinates:
// Hermitian, positive, unit trace (each to 1e-10, checked on construction).
struct AntisymDensity {
    FockBasis basis;
    Matrix mat;
    Space space() const { return Space::antisym(basis.d, basis.N); }
};

AntisymDensity make_antisym_density(FockBasis basis, Matrix mat, double tol = 1e-10);

// Rank-1 projector onto the determinant built from the orbitals.
// Coordinates: component on occupation state S is det(frame[S-rows, :]).
AntisymDensity slater_density(const SlaterOrbitals& orbitals);

// Isometry from occupation coordinates into the full tensor space: column S
// is the normalized antisymmetrized simple tensor over the modes of S.
// Needs d^N within the dense cap.
Matrix slater_embedding(const FockBasis& basis);

// The density as an operator on Tensor(d, N), for dense cross-checks.
Operator embed_to_tensor(const AntisymDensity& density);

// n-body marginal scaled to unit trace, as an operator on Tensor(d, n)
// (Single(d) for n = 1). Supported for n = 1, 2 and n <= N; entries come
// from one- and two-body correlation functions of the ladder operators.
Operator reduced_density(const AntisymDensity& density, int n);

// || D_{:n} - D_{:1}^{x n} (signed permutation sum) ||_tr, n = 2 here.
double closure_defect(const AntisymDensity& density, int n);

// Convex mixture of up to max_components random determinant projectors with
// flat simplex weights; stays exactly inside the fermionic class.
AntisymDensity random_fermionic_density(const FockBasis& basis, Rng& rng, int max_components = 5);

}  // namespace slaterlab

#endif

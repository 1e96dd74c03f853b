#ifndef SLATERLAB_TENSOR_ALGEBRA_HPP
#define SLATERLAB_TENSOR_ALGEBRA_HPP

#include "slaterlab/spaces.hpp"

namespace slaterlab {

// Tensor (Kronecker) product. First factor is the most significant index:
// (A x B)(ip+k, jq+l) = A(i,j) B(k,l). Throws DimensionCapError when the
// result would exceed dense_dim_cap().
Operator kron(const Operator& A, const Operator& B);

// U_pi on (C^d)^{x n}: maps x_1 x .. x x_n to the simple tensor whose
// slot pi(i) carries x_i. Unitary; U_pi U_sigma = U_{pi o sigma}.
Operator permutation_operator(const Permutation& pi, int d);

// U_{(ij)} on (C^d)^{x n}; i, j are 1-based factor slots.
Operator transposition_operator(int d, int n, int i, int j);

// Orthogonal projector onto the antisymmetric subspace of (C^d)^{x n}:
// P = (1/n!) sum_pi sgn(pi) U_pi.
Operator antisymmetrizer(int d, int n);

// The unnormalized signed permutation sum: sum_pi sgn(pi) U_pi = n! P.
Operator signed_permutation_sum(int d, int n);

// Trace out the last N-n factors of an operator on (C^d)^{x N}:
// result(w, x) = sum_z T(w z, x z). Trace-preserving positive contraction.
Operator partial_trace(const Operator& T, int keep);
Matrix partial_trace(const Matrix& T, int d, int total, int keep);

// Sum of singular values. Hermitian inputs go through an eigendecomposition
// (their singular values are |eigenvalues|), everything else through an SVD.
double trace_norm(const Matrix& T);
double trace_norm(const Operator& T);

// Largest singular value.
double operator_norm(const Matrix& T);
double operator_norm(const Operator& T);

// Embed a two-body operator V (on (C^d)^{x 2}, commuting with the factor
// swap) so that it acts on factors (i, j) of (C^d)^{x N}, 1-based, i < j.
// Independent of the permutation used to route factors to (1, 2).
Operator embed_pair_operator(const Operator& V, int i, int j, int N);

// Embed a one-body operator at factor slot j (1-based) of (C^d)^{x N}.
Operator embed_one_body(const Matrix& A, int j, int N);

// exp(-i H t / hbar) by eigendecomposition; H must be Hermitian to 1e-10
// in operator norm.
Operator unitary_propagator(const Operator& H, double t, double hbar);
Matrix unitary_propagator(const Matrix& H, double t, double hbar);

// Convenience checks used across modules.
double hermiticity_defect(const Matrix& A);       // ||A - A*|| (operator norm)
bool is_hermitian(const Matrix& A, double tol = 1e-10);
Matrix commutator(const Matrix& A, const Matrix& B);

}  // namespace slaterlab

#endif

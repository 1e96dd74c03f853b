#include "slaterlab/tensor_algebra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

namespace slaterlab {

namespace {

int tensor_rank(const Space& s) {
    if (s.kind == SpaceKind::Antisym)
        throw std::invalid_argument("expected a Single/Tensor space, got " + s.to_string());
    return s.kind == SpaceKind::Single ? 1 : s.n;
}

// Decode/encode row-major multi-indices (first factor most significant).
void decode_index(long idx, int d, int n, int* digits) {
    for (int k = n - 1; k >= 0; --k) {
        digits[k] = static_cast<int>(idx % d);
        idx /= d;
    }
}

long encode_index(const int* digits, int d, int n) {
    long idx = 0;
    for (int k = 0; k < n; ++k) idx = idx * d + digits[k];
    return idx;
}

}  // namespace

Operator kron(const Operator& A, const Operator& B) {
    const int ra = tensor_rank(A.space);
    const int rb = tensor_rank(B.space);
    if (A.space.d != B.space.d)
        throw std::invalid_argument("kron: operands live over different single-particle dimensions");
    const long dim = A.dim() * B.dim();
    if (dim > dense_dim_cap())
        throw DimensionCapError("kron: result dimension " + std::to_string(dim) + " exceeds dense cap " +
                                std::to_string(dense_dim_cap()) + "; use the occupation-number path");
    Matrix m = Eigen::kroneckerProduct(A.mat, B.mat);
    return Operator(std::move(m), Space::tensor(A.space.d, ra + rb));
}

Operator permutation_operator(const Permutation& pi, int d) {
    const int n = pi.size();
    const Space space = Space::tensor(d, n);
    const long dim = space.dim();
    if (dim > dense_dim_cap())
        throw DimensionCapError("permutation_operator: dimension exceeds dense cap");
    Matrix U = Matrix::Zero(dim, dim);
    std::vector<int> col(n), row(n);
    for (long j = 0; j < dim; ++j) {
        decode_index(j, d, n, col.data());
        // column e_{j_1} x .. x e_{j_n} maps to the tuple with slot pi(k) = j_k
        for (int k = 0; k < n; ++k) row[pi(k)] = col[k];
        U(encode_index(row.data(), d, n), j) = 1.0;
    }
    return Operator(std::move(U), space);
}

Operator transposition_operator(int d, int n, int i, int j) {
    if (i < 1 || j < 1 || i > n || j > n || i == j)
        throw std::invalid_argument("transposition_operator: need distinct 1-based slots in [1, n]");
    return permutation_operator(Permutation::transposition(n, i - 1, j - 1), d);
}

Operator signed_permutation_sum(int d, int n) {
    const Space space = Space::tensor(d, n);
    const long dim = space.dim();
    if (dim > dense_dim_cap())
        throw DimensionCapError("signed_permutation_sum: dimension exceeds dense cap");
    Matrix S = Matrix::Zero(dim, dim);
    std::vector<int> col(n), row(n);
    for (const auto& pi : all_permutations(n)) {
        const double sgn = pi.sign();
        for (long j = 0; j < dim; ++j) {
            decode_index(j, d, n, col.data());
            for (int k = 0; k < n; ++k) row[pi(k)] = col[k];
            S(encode_index(row.data(), d, n), j) += sgn;
        }
    }
    return Operator(std::move(S), space);
}

Operator antisymmetrizer(int d, int n) {
    Operator S = signed_permutation_sum(d, n);
    double fact = 1.0;
    for (int k = 2; k <= n; ++k) fact *= k;
    S.mat /= fact;
    return S;
}

Matrix partial_trace(const Matrix& T, int d, int total, int keep) {
    if (keep < 1 || keep > total)
        throw std::invalid_argument("partial_trace: keep must satisfy 1 <= keep <= total factors");
    long dim_keep = 1, dim_rest = 1;
    for (int k = 0; k < keep; ++k) dim_keep *= d;
    for (int k = keep; k < total; ++k) dim_rest *= d;
    if (T.rows() != dim_keep * dim_rest)
        throw std::invalid_argument("partial_trace: matrix dimension does not match d^total");
    Matrix out = Matrix::Zero(dim_keep, dim_keep);
    for (long w = 0; w < dim_keep; ++w)
        for (long x = 0; x < dim_keep; ++x) {
            Complex acc = 0.0;
            for (long z = 0; z < dim_rest; ++z) acc += T(w * dim_rest + z, x * dim_rest + z);
            out(w, x) = acc;
        }
    return out;
}

Operator partial_trace(const Operator& T, int keep) {
    const int total = tensor_rank(T.space);
    if (keep >= total)
        throw std::invalid_argument("partial_trace: keep must be < number of factors");
    Matrix m = partial_trace(T.mat, T.space.d, total, keep);
    return Operator(std::move(m), Space::tensor(T.space.d, keep));
}

namespace {
// Cheap entrywise test deciding whether the Hermitian eigenvalue route is
// numerically equivalent to a full SVD for this matrix.
bool hermitian_to_roundoff(const Matrix& T, double scale) {
    return (T - T.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * std::max(1.0, scale);
}
}  // namespace

double trace_norm(const Matrix& T) {
    if (T.size() == 0) return 0.0;
    if (T.rows() == T.cols()) {
        const double scale = T.cwiseAbs().maxCoeff();
        if (scale == 0.0) return 0.0;
        if (hermitian_to_roundoff(T, scale)) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(T, Eigen::EigenvaluesOnly);
            return es.eigenvalues().cwiseAbs().sum();
        }
    }
    Eigen::BDCSVD<Matrix> svd(T);
    return svd.singularValues().sum();
}

double trace_norm(const Operator& T) { return trace_norm(T.mat); }

double operator_norm(const Matrix& T) {
    if (T.size() == 0) return 0.0;
    if (T.rows() == T.cols()) {
        const double scale = T.cwiseAbs().maxCoeff();
        if (scale == 0.0) return 0.0;
        if (hermitian_to_roundoff(T, scale)) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(T, Eigen::EigenvaluesOnly);
            return es.eigenvalues().cwiseAbs().maxCoeff();
        }
    }
    Eigen::BDCSVD<Matrix> svd(T);
    return svd.singularValues()(0);
}

double operator_norm(const Operator& T) { return operator_norm(T.mat); }

Operator embed_pair_operator(const Operator& V, int i, int j, int N) {
    if (tensor_rank(V.space) != 2)
        throw std::invalid_argument("embed_pair_operator: V must live on a two-factor space");
    if (!(1 <= i && i < j && j <= N))
        throw std::invalid_argument("embed_pair_operator: need 1 <= i < j <= N");
    const int d = V.space.d;
    {
        const Matrix U12 = transposition_operator(d, 2, 1, 2).mat;
        if (operator_norm(V.mat * U12 - U12 * V.mat) > 1e-10)
            throw std::invalid_argument("embed_pair_operator: V does not commute with the factor swap");
    }
    const Space space = Space::tensor(d, N);
    const long dim = space.dim();
    if (dim > dense_dim_cap())
        throw DimensionCapError("embed_pair_operator: dimension exceeds dense cap");

    // Acts as V on factors (i, j) and as the identity elsewhere; equals the
    // conjugation of V x I x .. x I by any permutation routing (i, j) to the
    // leading slots. Assembled entrywise: rows and columns may differ only in
    // the digits at slots i and j.
    long stride_i = 1, stride_j = 1;
    for (int k = i; k < N; ++k) stride_i *= d;
    for (int k = j; k < N; ++k) stride_j *= d;

    Matrix out = Matrix::Zero(dim, dim);
    std::vector<int> digits(N);
    for (long r = 0; r < dim; ++r) {
        long rest = r;
        for (int k = N - 1; k >= 0; --k) {
            digits[k] = static_cast<int>(rest % d);
            rest /= d;
        }
        const int ri = digits[i - 1];
        const int rj = digits[j - 1];
        const long base = r - ri * stride_i - rj * stride_j;
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                const Complex val = V.mat(ri * d + rj, a * d + b);
                if (val == Complex(0, 0)) continue;
                out(r, base + a * stride_i + b * stride_j) = val;
            }
    }
    return Operator(std::move(out), space);
}

Operator embed_one_body(const Matrix& A, int j, int N) {
    if (A.rows() != A.cols()) throw std::invalid_argument("embed_one_body: A must be square");
    if (j < 1 || j > N) throw std::invalid_argument("embed_one_body: slot out of range");
    const int d = static_cast<int>(A.rows());
    Matrix out = (j == 1) ? A : Matrix::Identity(d, d);
    long dim = d;
    for (int k = 2; k <= N; ++k) {
        dim *= d;
        if (dim > dense_dim_cap()) throw DimensionCapError("embed_one_body: dimension exceeds dense cap");
        out = Eigen::kroneckerProduct(out, (k == j) ? A : Matrix::Identity(d, d)).eval();
    }
    return Operator(std::move(out), Space::tensor(d, N));
}

Matrix unitary_propagator(const Matrix& H, double t, double hbar) {
    if (hbar <= 0.0) throw std::invalid_argument("unitary_propagator: hbar must be positive");
    if (hermiticity_defect(H) > 1e-10)
        throw std::invalid_argument("unitary_propagator: H is not Hermitian to 1e-10");
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    const auto& ev = es.eigenvalues();
    Vector phases(ev.size());
    for (Eigen::Index k = 0; k < ev.size(); ++k)
        phases(k) = std::exp(Complex(0.0, -ev(k) * t / hbar));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Operator unitary_propagator(const Operator& H, double t, double hbar) {
    return Operator(unitary_propagator(H.mat, t, hbar), H.space);
}

double hermiticity_defect(const Matrix& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("hermiticity_defect: matrix must be square");
    // i(A - A*) is Hermitian with the same operator norm as A - A*.
    const Matrix K = Complex(0.0, 1.0) * (A - A.adjoint());
    if (K.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(K, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& A, double tol) { return hermiticity_defect(A) <= tol; }

Matrix commutator(const Matrix& A, const Matrix& B) { return A * B - B * A; }

}  // namespace slaterlab

#include "slaterlab/fock.hpp"

#include "slaterlab/tensor_algebra.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>

namespace slaterlab {

namespace {

int parity_below(std::uint32_t bits, int mode) {
    const std::uint32_t below = bits & ((1u << mode) - 1u);
    return (std::popcount(below) % 2 == 0) ? 1 : -1;
}

void check_sector_pair(const FockBasis& from, const FockBasis& to, int delta, const char* who) {
    if (from.d != to.d) throw std::invalid_argument(std::string(who) + ": bases differ in d");
    if (to.N != from.N + delta)
        throw std::invalid_argument(std::string(who) + ": particle sectors do not match the ladder step");
}

}  // namespace

int FockBasis::index(std::uint32_t bits) const {
    auto it = index_of_.find(bits);
    if (it == index_of_.end()) throw std::invalid_argument("FockBasis::index: state not in basis");
    return it->second;
}

std::vector<int> FockBasis::modes(int index) const {
    std::vector<int> out;
    out.reserve(N);
    std::uint32_t bits = states[index];
    while (bits) {
        const int m = std::countr_zero(bits);
        out.push_back(m);
        bits &= bits - 1u;
    }
    return out;
}

FockBasis build_fock_basis(int d, int N) {
    if (d < 1 || d > 30) throw std::invalid_argument("build_fock_basis: d out of range");
    if (N < 0) throw std::invalid_argument("build_fock_basis: N must be nonnegative");
    if (N > d) throw std::invalid_argument("build_fock_basis: N > d, no antisymmetric states exist");
    FockBasis basis;
    basis.d = d;
    basis.N = N;
    basis.states.reserve(binomial(d, N));
    // lexicographic enumeration of increasing mode tuples
    std::vector<int> c(N);
    for (int i = 0; i < N; ++i) c[i] = i;
    while (true) {
        std::uint32_t bits = 0;
        for (int m : c) bits |= 1u << m;
        basis.states.push_back(bits);
        if (N == 0) break;
        int i = N - 1;
        while (i >= 0 && c[i] == d - N + i) --i;
        if (i < 0) break;
        ++c[i];
        for (int k = i + 1; k < N; ++k) c[k] = c[k - 1] + 1;
    }
    basis.index_of_.reserve(basis.states.size());
    for (int i = 0; i < basis.size(); ++i) basis.index_of_[basis.states[i]] = i;
    return basis;
}

Matrix creation_matrix(const FockBasis& from, const FockBasis& to, int mode) {
    check_sector_pair(from, to, +1, "creation_matrix");
    if (mode < 0 || mode >= from.d) throw std::invalid_argument("creation_matrix: mode out of range");
    Matrix m = Matrix::Zero(to.size(), from.size());
    const std::uint32_t bit = 1u << mode;
    for (int s = 0; s < from.size(); ++s) {
        const std::uint32_t bits = from.bits(s);
        if (bits & bit) continue;
        m(to.index(bits | bit), s) = parity_below(bits, mode);
    }
    return m;
}

Matrix annihilation_matrix(const FockBasis& from, const FockBasis& to, int mode) {
    check_sector_pair(from, to, -1, "annihilation_matrix");
    return creation_matrix(to, from, mode).adjoint();
}

Matrix pair_annihilation_matrix(const FockBasis& from, const FockBasis& to,
                                int mode_first, int mode_second) {
    check_sector_pair(from, to, -2, "pair_annihilation_matrix");
    Matrix m = Matrix::Zero(to.size(), from.size());
    if (mode_first == mode_second) return m;  // a_i a_i = 0
    const std::uint32_t bit1 = 1u << mode_first;
    const std::uint32_t bit2 = 1u << mode_second;
    for (int s = 0; s < from.size(); ++s) {
        const std::uint32_t bits = from.bits(s);
        if (!(bits & bit1) || !(bits & bit2)) continue;
        int sign = parity_below(bits, mode_first);
        const std::uint32_t mid = bits & ~bit1;
        sign *= parity_below(mid, mode_second);
        m(to.index(mid & ~bit2), s) = sign;
    }
    return m;
}

double SlaterOrbitals::gram_defect() const {
    const Matrix g = frame.adjoint() * frame;
    return (g - Matrix::Identity(N(), N())).cwiseAbs().maxCoeff();
}

SlaterOrbitals coordinate_orbitals(int d, int N) {
    if (N > d) throw std::invalid_argument("coordinate_orbitals: N > d");
    return SlaterOrbitals{Matrix::Identity(d, N)};
}

SlaterOrbitals random_orbitals(int d, int N, Rng& rng) {
    return SlaterOrbitals{rng.orthonormal_columns(d, N)};
}

AntisymDensity make_antisym_density(FockBasis basis, Matrix mat, double tol) {
    if (mat.rows() != basis.size() || mat.cols() != basis.size())
        throw std::invalid_argument("make_antisym_density: matrix does not match basis dimension");
    if ((mat - mat.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("make_antisym_density: matrix not Hermitian");
    if (std::abs(mat.trace() - Complex(1.0, 0.0)) > tol)
        throw std::invalid_argument("make_antisym_density: trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol)
        throw std::invalid_argument("make_antisym_density: negative eigenvalue beyond tolerance");
    return AntisymDensity{std::move(basis), std::move(mat)};
}

AntisymDensity slater_density(const SlaterOrbitals& orbitals) {
    if (orbitals.gram_defect() > 1e-8)
        throw std::invalid_argument("slater_density: orbitals are not orthonormal");
    const int d = orbitals.d();
    const int N = orbitals.N();
    FockBasis basis = build_fock_basis(d, N);
    Vector v(basis.size());
    Matrix sub(N, N);
    for (int s = 0; s < basis.size(); ++s) {
        const auto rows = basis.modes(s);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) sub(a, b) = orbitals.frame(rows[a], b);
        v(s) = sub.determinant();
    }
    Matrix mat = v * v.adjoint();
    return AntisymDensity{std::move(basis), std::move(mat)};
}

Matrix slater_embedding(const FockBasis& basis) {
    const int d = basis.d;
    const int N = basis.N;
    long dim = 1;
    for (int k = 0; k < N; ++k) {
        dim *= d;
        if (dim > dense_dim_cap())
            throw DimensionCapError("slater_embedding: d^N exceeds dense cap");
    }
    double fact = 1.0;
    for (int k = 2; k <= N; ++k) fact *= k;
    const double amp = 1.0 / std::sqrt(fact);

    Matrix w = Matrix::Zero(dim, basis.size());
    const auto perms = all_permutations(N);
    std::vector<long> stride(N);
    for (int k = 0; k < N; ++k) {
        long s = 1;
        for (int l = k + 1; l < N; ++l) s *= d;
        stride[k] = s;
    }
    for (int s = 0; s < basis.size(); ++s) {
        const auto m = basis.modes(s);
        for (const auto& pi : perms) {
            long row = 0;
            for (int a = 0; a < N; ++a) row += m[a] * stride[pi(a)];
            w(row, s) = pi.sign() * amp;
        }
    }
    return w;
}

Operator embed_to_tensor(const AntisymDensity& density) {
    const Matrix w = slater_embedding(density.basis);
    return Operator(w * density.mat * w.adjoint(), Space::tensor(density.basis.d, density.basis.N));
}

namespace {

Matrix one_body_marginal(const AntisymDensity& density) {
    const int d = density.basis.d;
    const int N = density.basis.N;
    const FockBasis lower = build_fock_basis(d, N - 1);
    std::vector<Matrix> ann(d);
    for (int i = 0; i < d; ++i) ann[i] = annihilation_matrix(density.basis, lower, i);
    Matrix gamma(d, d);
    for (int i = 0; i < d; ++i) {
        const Matrix x = ann[i] * density.mat;  // a_i D
        for (int j = 0; j < d; ++j) gamma(i, j) = (ann[j].conjugate().cwiseProduct(x)).sum();
    }
    return gamma / static_cast<double>(N);
}

Matrix two_body_marginal(const AntisymDensity& density) {
    const int d = density.basis.d;
    const int N = density.basis.N;
    const FockBasis lower = build_fock_basis(d, N - 2);
    // pair(i1, i2) = a_{i2} a_{i1}, indexed like the tensor row (i1 d + i2)
    std::vector<Matrix> pair(static_cast<std::size_t>(d) * d);
    for (int i1 = 0; i1 < d; ++i1)
        for (int i2 = 0; i2 < d; ++i2)
            pair[i1 * d + i2] = pair_annihilation_matrix(density.basis, lower, i1, i2);
    Matrix gamma2(d * d, d * d);
    for (int r = 0; r < d * d; ++r) {
        const Matrix x = pair[r] * density.mat;
        for (int c = 0; c < d * d; ++c) gamma2(r, c) = (pair[c].conjugate().cwiseProduct(x)).sum();
    }
    return gamma2 / (static_cast<double>(N) * (N - 1));
}

}  // namespace

Operator reduced_density(const AntisymDensity& density, int n) {
    const int N = density.basis.N;
    if (n < 1 || n > 2)
        throw std::invalid_argument("reduced_density: only n = 1, 2 are served by the occupation-number path");
    if (n > N) throw std::invalid_argument("reduced_density: n exceeds particle count");
    const int d = density.basis.d;
    if (n == 1) return Operator(one_body_marginal(density), Space::single(d));
    return Operator(two_body_marginal(density), Space::tensor(d, 2));
}

double closure_defect(const AntisymDensity& density, int n) {
    if (n < 2) throw std::invalid_argument("closure_defect: n must be >= 2");
    const Operator d2 = reduced_density(density, n);
    const Operator d1 = reduced_density(density, 1);
    const Operator sum2 = signed_permutation_sum(density.basis.d, 2);
    return trace_norm(d2.mat - kron(d1, d1).mat * sum2.mat);
}

AntisymDensity random_fermionic_density(const FockBasis& basis, Rng& rng, int max_components) {
    const int k = 1 + static_cast<int>(rng.integer() % static_cast<std::uint64_t>(max_components));
    const auto weights = rng.simplex_weights(k);
    Matrix mat = Matrix::Zero(basis.size(), basis.size());
    for (int c = 0; c < k; ++c) {
        const auto orbs = random_orbitals(basis.d, basis.N, rng);
        mat += weights[c] * slater_density(orbs).mat;
    }
    return AntisymDensity{basis, std::move(mat)};
}

}  // namespace slaterlab

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "slaterlab/fock.hpp"
#include "slaterlab/tensor_algebra.hpp"

#include <unsupported/Eigen/KroneckerProduct>

using namespace slaterlab;

namespace {

// Dense route for the same marginal: embed into the tensor space and trace.
Matrix dense_marginal(const AntisymDensity& density, int n) {
    const Operator full = embed_to_tensor(density);
    if (n == density.basis.N) return full.mat;
    return partial_trace(full.mat, density.basis.d, density.basis.N, n);
}

}  // namespace

TEST_CASE("basis enumeration sizes") {
    CHECK(build_fock_basis(2, 2).size() == 1);
    CHECK(build_fock_basis(4, 2).size() == 6);
    CHECK(build_fock_basis(8, 4).size() == 70);
    CHECK(build_fock_basis(3, 0).size() == 1);
    CHECK_THROWS_AS(build_fock_basis(3, 4), std::invalid_argument);
}

TEST_CASE("basis order is lexicographic in the mode tuple") {
    const FockBasis b = build_fock_basis(4, 2);
    const std::vector<std::vector<int>> expect = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    for (int i = 0; i < b.size(); ++i) CHECK(b.modes(i) == expect[i]);
}

TEST_CASE("index and bit-set maps invert each other exhaustively") {
    const FockBasis b = build_fock_basis(8, 4);
    REQUIRE(b.size() == 70);
    for (int i = 0; i < b.size(); ++i) CHECK(b.index(b.bits(i)) == i);
}

TEST_CASE("creation from the vacuum sector") {
    const FockBasis vac = build_fock_basis(2, 0);
    const FockBasis one = build_fock_basis(2, 1);
    const Matrix c0 = creation_matrix(vac, one, 0);
    REQUIRE(c0.rows() == 2);
    REQUIRE(c0.cols() == 1);
    CHECK(c0(one.index(0b01u), 0) == Complex(1.0, 0.0));
    CHECK(std::abs(c0(one.index(0b10u), 0)) == 0.0);
}

TEST_CASE("same-mode annihilation is nilpotent") {
    const int d = 3;
    const FockBasis b2 = build_fock_basis(d, 2);
    const FockBasis b1 = build_fock_basis(d, 1);
    const FockBasis b0 = build_fock_basis(d, 0);
    const Matrix a1_hi = annihilation_matrix(b2, b1, 0);
    const Matrix a1_lo = annihilation_matrix(b1, b0, 0);
    CHECK((a1_lo * a1_hi).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ladder anticommutation relations hold in every sector of d = 4") {
    const int d = 4;
    std::vector<FockBasis> sector;
    for (int n = 0; n <= d; ++n) sector.push_back(build_fock_basis(d, n));
    for (int n = 0; n <= d; ++n) {
        const long dim = sector[n].size();
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                // {a_i, a+_j} on the n-particle sector
                Matrix acc = Matrix::Zero(dim, dim);
                if (n < d) {
                    const Matrix up = creation_matrix(sector[n], sector[n + 1], j);
                    const Matrix down = annihilation_matrix(sector[n + 1], sector[n], i);
                    acc += down * up;
                }
                if (n > 0) {
                    const Matrix down = annihilation_matrix(sector[n], sector[n - 1], i);
                    const Matrix up = creation_matrix(sector[n - 1], sector[n], j);
                    acc += up * down;
                }
                const Matrix expect =
                    (i == j) ? Matrix(Matrix::Identity(dim, dim)) : Matrix(Matrix::Zero(dim, dim));
                CHECK((acc - expect).cwiseAbs().maxCoeff() == 0.0);
            }
    }
}

TEST_CASE("pair annihilation matches two single steps") {
    const int d = 4;
    const FockBasis b3 = build_fock_basis(d, 3);
    const FockBasis b2 = build_fock_basis(d, 2);
    const FockBasis b1 = build_fock_basis(d, 1);
    for (int r = 0; r < d; ++r)
        for (int s = 0; s < d; ++s) {
            const Matrix direct = pair_annihilation_matrix(b3, b1, r, s);
            const Matrix steps = annihilation_matrix(b2, b1, s) * annihilation_matrix(b3, b2, r);
            CHECK((direct - steps).cwiseAbs().maxCoeff() == 0.0);
        }
}

TEST_CASE("coordinate orbitals give a single occupation state") {
    const auto density = slater_density(coordinate_orbitals(4, 2));
    const int idx = density.basis.index(0b0011u);
    Matrix expect = Matrix::Zero(6, 6);
    expect(idx, idx) = 1.0;
    CHECK((density.mat - expect).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(density.mat.trace() - Complex(1, 0)) < 1e-14);
}

TEST_CASE("determinant density is invariant under rotations within the span") {
    Rng rng(101);
    const auto orbs = random_orbitals(5, 3, rng);
    const Matrix q = rng.orthonormal_columns(3, 3);  // unitary mixing of the frame
    const SlaterOrbitals rotated{orbs.frame * q};
    const auto a = slater_density(orbs);
    const auto b = slater_density(rotated);
    CHECK((a.mat - b.mat).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("slater_density rejects non-orthonormal frames") {
    Matrix frame = Matrix::Identity(4, 2);
    frame(2, 0) = 0.3;
    CHECK_THROWS_AS(slater_density(SlaterOrbitals{frame}), std::invalid_argument);
}

TEST_CASE("embedded determinant equals the antisymmetrized tensor projector") {
    const auto density = slater_density(coordinate_orbitals(4, 2));
    const Operator dense = embed_to_tensor(density);
    // sqrt(2) P_{A2} (e1 x e2), normalized projector onto it
    Vector v = Vector::Zero(16);
    v(0 * 4 + 1) = 1.0 / std::sqrt(2.0);
    v(1 * 4 + 0) = -1.0 / std::sqrt(2.0);
    const Matrix expect = v * v.adjoint();
    CHECK((dense.mat - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("embedding is an isometry") {
    for (int d = 2; d <= 4; ++d)
        for (int N = 1; N <= std::min(d, 3); ++N) {
            const Matrix w = slater_embedding(build_fock_basis(d, N));
            CHECK((w.adjoint() * w - Matrix::Identity(w.cols(), w.cols())).cwiseAbs().maxCoeff() < 1e-12);
        }
}

TEST_CASE("one-body marginal of the coordinate determinant") {
    const auto density = slater_density(coordinate_orbitals(4, 2));
    const Operator d1 = reduced_density(density, 1);
    Matrix expect = Matrix::Zero(4, 4);
    expect(0, 0) = expect(1, 1) = 0.5;
    CHECK((d1.mat - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("a one-particle density is its own marginal") {
    Rng rng(103);
    const FockBasis b = build_fock_basis(3, 1);
    const auto density = random_fermionic_density(b, rng);
    const Operator d1 = reduced_density(density, 1);
    CHECK((d1.mat - density.mat).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("marginals agree with the dense partial trace for d <= 4, N <= 3") {
    Rng rng(107);
    for (int d = 2; d <= 4; ++d)
        for (int N = 1; N <= std::min(d, 3); ++N) {
            const FockBasis basis = build_fock_basis(d, N);
            for (int rep = 0; rep < 3; ++rep) {
                const auto density = random_fermionic_density(basis, rng);
                for (int n = 1; n <= std::min(N, 2); ++n) {
                    const Operator fast = reduced_density(density, n);
                    const Matrix slow = dense_marginal(density, n);
                    CHECK((fast.mat - slow).cwiseAbs().maxCoeff() < 1e-10);
                }
            }
        }
}

TEST_CASE("two-body marginal keeps the antisymmetric sign relation") {
    Rng rng(109);
    const FockBasis basis = build_fock_basis(5, 3);
    const auto density = random_fermionic_density(basis, rng);
    const Matrix d2 = reduced_density(density, 2).mat;
    const Matrix u12 = transposition_operator(5, 2, 1, 2).mat;
    CHECK(operator_norm(u12 * d2 + d2) < 1e-10);
    CHECK(operator_norm(d2 * u12 + d2) < 1e-10);
    CHECK(std::abs(d2.trace() - Complex(1, 0)) < 1e-12);
}

TEST_CASE("determinant marginals factor through the signed two-fold power") {
    // D_{:2} = (N/(N-1)) D_{:1}^{x2} Sigma_2 for determinant states
    Rng rng(113);
    const int d = 6;
    for (int N : {2, 3}) {
        const auto density = slater_density(random_orbitals(d, N, rng));
        const Matrix d1 = reduced_density(density, 1).mat;
        const Matrix d2 = reduced_density(density, 2).mat;
        const Matrix s2 = signed_permutation_sum(d, 2).mat;
        const Matrix pow2 = Eigen::kroneckerProduct(d1, d1) * s2;
        const double coef = static_cast<double>(N) / (N - 1);
        CHECK(operator_norm(d2 - coef * pow2) < 1e-10);
    }
}

TEST_CASE("determinant marginal coefficient checked densely at n = 3") {
    // (P)_{:3} = (N^3 (N-3)!/N!) (P_{:1})^{x3} Sigma_3
    Rng rng(127);
    struct Case { int d, N; };
    for (const Case c : {Case{4, 3}, Case{5, 4}}) {
        const auto density = slater_density(random_orbitals(c.d, c.N, rng));
        const Matrix d3 = dense_marginal(density, 3);
        const Matrix d1 = reduced_density(density, 1).mat;
        const Matrix s3 = signed_permutation_sum(c.d, 3).mat;
        const Matrix d1sq = Eigen::kroneckerProduct(d1, d1);
        const Matrix d1cube = Eigen::kroneckerProduct(d1, d1sq);
        double coef = std::pow(static_cast<double>(c.N), 3);
        for (int k = c.N; k > c.N - 3; --k) coef /= k;
        CHECK(operator_norm(d3 - coef * d1cube * s3) < 1e-10);
    }
}

TEST_CASE("closure defect of a determinant is exactly 1/N") {
    Rng rng(131);
    const int d = 6;
    for (int N = 2; N <= 5; ++N) {
        const auto density = slater_density(random_orbitals(d, N, rng));
        CHECK(closure_defect(density, 2) == doctest::Approx(1.0 / N).epsilon(1e-10));
    }
    const auto coord = slater_density(coordinate_orbitals(6, 4));
    CHECK(closure_defect(coord, 2) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("closure defect requires a two-body marginal") {
    Rng rng(137);
    const FockBasis b = build_fock_basis(4, 1);
    const auto density = random_fermionic_density(b, rng);
    CHECK_THROWS_AS(closure_defect(density, 2), std::invalid_argument);
}

TEST_CASE("mixing two orthogonal determinants increases the defect") {
    const int d = 6, N = 2;
    const auto da = slater_density(coordinate_orbitals(d, N));
    Matrix frame_b = Matrix::Zero(d, N);
    frame_b(2, 0) = 1.0;
    frame_b(3, 1) = 1.0;
    const auto db = slater_density(SlaterOrbitals{frame_b});
    const FockBasis basis = da.basis;
    AntisymDensity mix{basis, 0.5 * (da.mat + db.mat)};
    const double defect_mix = closure_defect(mix, 2);
    const double defect_a = closure_defect(da, 2);
    const double defect_b = closure_defect(db, 2);
    CHECK(defect_mix > defect_a + 1e-3);
    CHECK(defect_mix > defect_b + 1e-3);
    // the dense route agrees on the mixture
    const Matrix d2 = dense_marginal(mix, 2);
    const Matrix d1 = dense_marginal(mix, 1);
    const Matrix s2 = signed_permutation_sum(d, 2).mat;
    const Matrix pow2 = Eigen::kroneckerProduct(d1, d1) * s2;
    CHECK(trace_norm(Matrix(d2 - pow2)) == doctest::Approx(defect_mix).epsilon(1e-9));
}

TEST_CASE("marginal operator norm squared is below the closure defect") {
    Rng rng(139);
    for (int d : {4, 6}) {
        for (int N = 2; N <= std::min(d, 4); ++N) {
            const FockBasis basis = build_fock_basis(d, N);
            for (int rep = 0; rep < 5; ++rep) {
                const auto density = random_fermionic_density(basis, rng);
                const double opn = operator_norm(reduced_density(density, 1).mat);
                const double defect = closure_defect(density, 2);
                CHECK(opn * opn <= defect + 1e-10);
            }
        }
    }
}

TEST_CASE("determinant marginal has operator norm 1/N") {
    Rng rng(149);
    for (int N = 2; N <= 4; ++N) {
        const auto density = slater_density(random_orbitals(6, N, rng));
        CHECK(operator_norm(reduced_density(density, 1).mat) ==
              doctest::Approx(1.0 / N).epsilon(1e-10));
    }
}

TEST_CASE("fermionic mixtures are valid densities") {
    Rng rng(151);
    const FockBasis basis = build_fock_basis(5, 2);
    for (int rep = 0; rep < 5; ++rep) {
        const auto density = random_fermionic_density(basis, rng);
        CHECK_NOTHROW(make_antisym_density(density.basis, density.mat));
    }
}

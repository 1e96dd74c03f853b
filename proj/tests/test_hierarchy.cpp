#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "slaterlab/hierarchy.hpp"
#include "slaterlab/tdhf.hpp"
#include "slaterlab/tensor_algebra.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace slaterlab;

namespace {

MeanFieldSystem random_system(int d, int N, std::uint64_t seed, double vnorm = 1.0) {
    Rng rng(seed);
    Matrix l = random_one_body(d, rng);
    Matrix v = random_pair_potential(d, rng, vnorm);
    return make_system(d, N, std::move(l), std::move(v));
}

Matrix random_marginal(int d, int N, std::uint64_t seed) {
    Rng rng(seed);
    const auto density = random_fermionic_density(build_fock_basis(d, N), rng);
    return reduced_density(density, 1).mat;
}

}  // namespace

TEST_CASE("signed power of a pure state vanishes at n = 2") {
    Rng rng(61);
    Vector psi = rng.gaussian_matrix(3, 1);
    psi /= psi.norm();
    const Matrix f = psi * psi.adjoint();
    CHECK(antisym_tensor_power(f, 2).mat.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(antisym_power_trace(f, 2)) < 1e-14);
}

TEST_CASE("signed power trace of an even two-projector mixture is one half") {
    const int d = 4;
    Matrix f = Matrix::Zero(d, d);
    f(0, 0) = f(1, 1) = 0.5;
    CHECK(antisym_power_trace(f, 2) == doctest::Approx(0.5).epsilon(1e-14));
    const Operator f2 = antisym_tensor_power(f, 2);
    CHECK(std::abs(f2.mat.trace().real() - 0.5) < 1e-13);
    CHECK(trace_norm(f2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("determinant marginal has signed power trace 1 - 1/N") {
    Rng rng(62);
    const auto density = slater_density(random_orbitals(6, 3, rng));
    const Matrix f = reduced_density(density, 1).mat;
    CHECK(antisym_power_trace(f, 2) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(trace_norm(antisym_tensor_power(f, 2)) <= 1.0 + 1e-10);
}

TEST_CASE("cycle expansion matches the dense trace") {
    Rng rng(63);
    for (int d : {3, 4}) {
        for (int n : {2, 3}) {
            const Matrix f = random_marginal(d, std::min(d, 3), 700 + 10 * d + n);
            const double dense = antisym_tensor_power(f, n).mat.trace().real();
            CHECK(antisym_power_trace(f, n) == doctest::Approx(dense).epsilon(1e-12));
        }
    }
}

TEST_CASE("signed powers of densities are positive with trace norm at most 1") {
    Rng rng(64);
    for (int d : {3, 4}) {
        for (int rep = 0; rep < 5; ++rep) {
            const Matrix f = random_marginal(d, 2, 800 + 10 * d + rep);
            for (int n = 2; n <= 3; ++n) {
                const Operator fn = antisym_tensor_power(f, n);
                Eigen::SelfAdjointEigenSolver<Matrix> es(fn.mat, Eigen::EigenvaluesOnly);
                CHECK(es.eigenvalues().minCoeff() >= -1e-10);
                CHECK(trace_norm(fn) <= 1.0 + 1e-10);
            }
        }
    }
}

TEST_CASE("difference vanishes at t = 0 for n = 1 by construction") {
    const auto sys = random_system(4, 3, 65);
    Rng rng(66);
    const auto d0 = random_fermionic_density(build_fock_basis(4, 3), rng);
    const auto nbody = nbody_trajectory_fock(sys, d0, 0.1, 0.05);
    const Matrix f0 = reduced_density(d0, 1).mat;
    const auto onebody = tdhf_trajectory(sys, f0, 0.1, 0.05);
    const Operator e0 = hierarchy_difference(nbody, onebody, 1, 0.0);
    CHECK(e0.mat.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("free flows keep the first marginals equal") {
    const int d = 5;
    Rng rng(67);
    Matrix l = random_one_body(d, rng);
    const auto sys = make_system(d, 3, l, Matrix::Zero(d * d, d * d));
    const auto d0 = slater_density(random_orbitals(d, 3, rng));
    const auto nbody = nbody_trajectory_fock(sys, d0, 0.5, 0.05);
    const auto onebody = tdhf_trajectory(sys, reduced_density(d0, 1).mat, 0.5, 0.05);
    for (double t : nbody.times)
        CHECK(trace_norm(hierarchy_difference(nbody, onebody, 1, t)) < 1e-9);
}

TEST_CASE("initial two-body difference of determinant data is the closure defect") {
    const auto sys = random_system(5, 4, 68);
    Rng rng(69);
    const auto d0 = slater_density(random_orbitals(5, 4, rng));
    const auto nbody = nbody_trajectory_fock(sys, d0, 0.05, 0.05);
    const Matrix f0 = reduced_density(d0, 1).mat;
    const auto onebody = tdhf_trajectory(sys, f0, 0.05, 0.05);
    const double gap = trace_norm(hierarchy_difference(nbody, onebody, 2, 0.0));
    CHECK(gap == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(slater_initial_gap(f0, 4, 2) == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(slater_initial_gap(f0, 4, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("grid mismatch is rejected") {
    const auto sys = random_system(3, 2, 70);
    const auto d0 = slater_density(coordinate_orbitals(3, 2));
    const auto nbody = nbody_trajectory_fock(sys, d0, 0.1, 0.05);
    const auto onebody = tdhf_trajectory(sys, reduced_density(d0, 1).mat, 0.1, 0.025);
    CHECK_THROWS_AS(hierarchy_difference(nbody, onebody, 1, 0.0), std::invalid_argument);
}

TEST_CASE("initial gaps measured densely match the closed form at n = 3") {
    Rng rng(71);
    const auto density = slater_density(random_orbitals(4, 3, rng));
    const Matrix f0 = reduced_density(density, 1).mat;
    const Matrix d3 = embed_to_tensor(density).mat;  // n = N = 3
    const Matrix gap = d3 - antisym_tensor_power(f0, 3).mat;
    CHECK(trace_norm(gap) == doctest::Approx(slater_initial_gap(f0, 3, 3)).epsilon(1e-9));
    CHECK(slater_initial_gap(f0, 3, 3) == doctest::Approx(7.0 / 9.0).epsilon(1e-10));
}

TEST_CASE("truncation error vanishes without interaction") {
    const int d = 4;
    Rng rng(72);
    Matrix l = random_one_body(d, rng);
    const auto sys = make_system(d, 3, l, Matrix::Zero(d * d, d * d));
    const auto d0 = slater_density(random_orbitals(d, 3, rng));
    const auto nbody = nbody_trajectory_fock(sys, d0, 0.1, 0.05);
    CHECK(trace_norm(hierarchy_error_term(sys, nbody, 1, 0.05)) < 1e-13);
}

TEST_CASE("first truncation error is the single contracted commutator") {
    const auto sys = random_system(4, 3, 73);
    Rng rng(74);
    const auto d0 = random_fermionic_density(build_fock_basis(4, 3), rng);
    const auto nbody = nbody_trajectory_fock(sys, d0, 0.1, 0.05);
    const Operator e1 = hierarchy_error_term(sys, nbody, 1, 0.1);
    const int k = nbody.index_of_time(0.1);
    const Matrix d2 = trajectory_marginal(nbody, k, 2);
    const Matrix expect = -partial_trace(commutator(sys.V, d2), 4, 2, 1) / 3.0;
    CHECK(operator_norm(e1.mat - expect) < 1e-12);
}

TEST_CASE("truncation error obeys the 3 n^2 ||V|| / N bound along a trajectory") {
    const auto sys = random_system(4, 3, 75);
    Rng rng(76);
    const auto d0 = random_fermionic_density(build_fock_basis(4, 3), rng);
    const auto nbody = nbody_trajectory_dense(sys, embed_to_tensor(d0).mat, 0.4, 0.1);
    for (int n = 1; n <= 2; ++n)
        for (double t : nbody.times) {
            const double measured = trace_norm(hierarchy_error_term(sys, nbody, n, t));
            const double bound = 3.0 * n * n * 1.0 / sys.N;  // ||V|| = 1
            CHECK(bound - measured >= -kMarginTolerance);
        }
}

TEST_CASE("remainder is identically zero at n = 1") {
    const auto sys = random_system(3, 2, 77);
    const Matrix f = random_marginal(3, 2, 79);
    CHECK(hierarchy_remainder(sys, f, 1).mat.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("remainder trace norm stays under 2 n (n-1) ||V|| ||F||") {
    for (int rep = 0; rep < 10; ++rep) {
        const int d = 3;
        const auto sys = random_system(d, 3, 900 + rep);
        const Matrix f = random_marginal(d, 2, 950 + rep);
        for (int n = 2; n <= 3; ++n) {
            const double measured = trace_norm(hierarchy_remainder(sys, f, n));
            const double bound = 2.0 * n * (n - 1) * operator_norm(f);  // ||V|| = 1
            CHECK(bound - measured >= -kMarginTolerance);
        }
    }
}

TEST_CASE("remainder closes the bottom-up marginal equation exactly") {
    // For a flow of the one-body equation, the signed n-fold power satisfies
    //   i hbar d/dt F_n = sum_j [L_j, F_n] + sum_j [V_{j,n+1}, F_{n+1}]_{:n} + R_n(F),
    // which determines R_n; both sides are assembled independently here.
    const int d = 3;
    const auto sys = random_system(d, 3, 86);
    const Matrix f = random_marginal(d, 2, 87);
    const Matrix fdot = tdhf_rhs(sys, f);
    for (int n : {2, 3}) {
        const Matrix sum_n = signed_permutation_sum(d, n).mat;
        const long dim = sum_n.rows();
        // product rule for the n-fold power
        Matrix ddt_power = Matrix::Zero(dim, dim);
        for (int j = 1; j <= n; ++j) {
            Matrix factor = (j == 1) ? fdot : f;
            for (int k = 2; k <= n; ++k)
                factor = Eigen::kroneckerProduct(factor, (k == j) ? fdot : f).eval();
            ddt_power += factor;
        }
        const Matrix lhs = Complex(0.0, sys.hbar) * (ddt_power * sum_n);

        const Matrix fn = antisym_tensor_power(f, n).mat;
        const Matrix fn1 = antisym_tensor_power(f, n + 1).mat;
        Matrix rhs = hierarchy_remainder(sys, f, n).mat;
        for (int j = 1; j <= n; ++j) {
            rhs += commutator(embed_one_body(sys.L, j, n).mat, fn);
            const Matrix vj = embed_pair_operator(Operator(sys.V, Space::tensor(d, 2)), j, n + 1,
                                                  n + 1).mat;
            rhs += partial_trace(commutator(vj, fn1), d, n + 1, n);
        }
        CHECK(trace_norm(Matrix(lhs - rhs)) < 1e-10);
    }
}

TEST_CASE("remainder bound anchors: pure states and determinant marginals") {
    const auto sys = random_system(4, 4, 81);
    Rng rng(82);
    Vector psi = rng.gaussian_matrix(4, 1);
    psi /= psi.norm();
    const Matrix pure = psi * psi.adjoint();
    CHECK(trace_norm(hierarchy_remainder(sys, pure, 2)) <= 4.0 + 1e-10);

    const auto density = slater_density(random_orbitals(4, 4, rng));
    const Matrix f = reduced_density(density, 1).mat;  // operator norm 1/4
    CHECK(trace_norm(hierarchy_remainder(sys, f, 2)) <= 1.0 + 1e-10);
}

TEST_CASE("contraction identity holds to roundoff") {
    Rng rng(83);
    for (int d : {2, 3}) {
        const Matrix v = random_pair_potential(d, rng, 1.0);
        const Matrix f = random_marginal(d, 2, 1000 + d);
        CHECK(contraction_identity_gap(v, f, 2) < 1e-10);
    }
    const Matrix v2 = random_pair_potential(2, rng, 1.0);
    const Matrix f2 = random_marginal(2, 2, 1010);
    CHECK(contraction_identity_gap(v2, f2, 3) < 1e-10);

    // maximally mixed one-body state
    const Matrix v3 = random_pair_potential(3, rng, 1.0);
    const Matrix mixed = Matrix::Identity(3, 3) / 3.0;
    CHECK(contraction_identity_gap(v3, mixed, 2) < 1e-12);
}

TEST_CASE("a-priori bound degenerates to the tail as T -> 0") {
    const std::vector<double> zeros(4, 0.0);
    const double b1 = apriori_bound_power(6, 1, 1, 1e-9, zeros, 0.0);
    const double b2 = apriori_bound_power(6, 1, 2, 1e-9, zeros, 0.0);
    const double b3 = apriori_bound_power(6, 1, 3, 1e-9, zeros, 0.0);
    CHECK(b1 < 1e-6);
    CHECK(b2 < b1);
    CHECK(b3 < b2);
}

TEST_CASE("a-priori bound is monotone in the gaps and the initial norm") {
    const std::vector<double> base{0.0, 0.2, 0.5, 0.8};
    const double ref = apriori_bound_power(6, 1, 3, 0.5, base, 0.2);
    for (int k = 0; k < 4; ++k) {
        auto bumped = base;
        bumped[k] += 0.05;
        CHECK(apriori_bound_power(6, 1, 3, 0.5, bumped, 0.2) >= ref);
    }
    CHECK(apriori_bound_power(6, 1, 3, 0.5, base, 0.3) >= ref);
    CHECK(apriori_bound_binomial(6, 1, 3, 0.5, base, 0.3) >=
          apriori_bound_binomial(6, 1, 3, 0.5, base, 0.2));
}

TEST_CASE("a-priori bound rejects out-of-range inputs") {
    const std::vector<double> gaps{0.0, 0.1, 0.2, 0.3};
    CHECK_THROWS_AS(apriori_bound_power(6, 1, 3, 1.0, gaps, 0.1), std::domain_error);
    CHECK_THROWS_AS(apriori_bound_power(4, 1, 3, 0.5, gaps, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(apriori_bound_power(6, 1, 3, 0.5, {0.0}, 0.1), std::invalid_argument);
}

TEST_CASE("measured one-body gap stays under both bound forms") {
    const int d = 5, N = 4;
    const auto sys = random_system(d, N, 84);
    Rng rng(85);
    const auto d0 = slater_density(random_orbitals(d, N, rng));
    const Matrix f0 = reduced_density(d0, 1).mat;
    const double f0_norm = operator_norm(f0);
    const int m = 2;  // <= N - n - 1
    std::vector<double> gaps;
    for (int k = 0; k <= m; ++k) gaps.push_back(slater_initial_gap(f0, N, 1 + k));

    const double dt = 1e-3, tf = 0.2;  // T up to 0.4
    const auto nbody = nbody_trajectory_fock(sys, d0, tf, dt);
    const auto onebody = tdhf_trajectory(sys, f0, tf, dt);
    for (int k = 0; k < nbody.size(); k += 50) {
        const double t = nbody.times[k];
        const double T = 2.0 * t / sys.hbar;  // ||V|| = 1
        const double measured = trace_norm(hierarchy_difference(nbody, onebody, 1, t));
        const double pow_bound = apriori_bound_power(N, 1, m, T, gaps, f0_norm);
        const double bin_bound = apriori_bound_binomial(N, 1, m, T, gaps, f0_norm);
        CHECK(pow_bound - measured >= -kMarginTolerance);
        CHECK(bin_bound - measured >= -kMarginTolerance);
        CHECK(bin_bound <= pow_bound + 1e-12);
    }
}

TEST_CASE("bound reports serialize with inapplicable rows blanked") {
    std::vector<BoundReport> reports;
    reports.push_back(make_report("demo", 4, 1, 0.5, 0.25, 1.0, 1.0, 0.25));
    BoundReport na = make_report("demo", 4, 1, 0.9, 0.5, 0.0, 1.0, 0.25);
    na.applicable = false;
    reports.push_back(na);
    const auto path = std::filesystem::temp_directory_path() / "slaterlab_reports.csv";
    write_bound_reports_csv(path, reports);
    std::ifstream is(path);
    std::string header, row1, row2;
    std::getline(is, header);
    std::getline(is, row1);
    std::getline(is, row2);
    CHECK(header == "quantity,N,n,t,measured,bound,margin");
    CHECK(row1 == "demo,4,1,0.5,0.25,1,0.75");
    CHECK(row2 == "demo,4,1,0.90000000000000002,0.5,,");
    std::filesystem::remove(path);
}

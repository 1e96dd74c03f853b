#include "slaterlab/rng.hpp"

#include <Eigen/QR>
#include <cmath>

namespace slaterlab {

double Rng::uniform() {
    // 53-bit mantissa in [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

Complex Rng::complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re, im);
}

std::uint64_t Rng::integer() { return gen_(); }

Matrix Rng::gaussian_matrix(long rows, long cols) {
    Matrix m(rows, cols);
    for (long r = 0; r < rows; ++r)
        for (long c = 0; c < cols; ++c) m(r, c) = complex_gaussian();
    return m;
}

Matrix Rng::hermitian(int d) {
    Matrix a = gaussian_matrix(d, d);
    return 0.5 * (a + a.adjoint()).eval();
}

Matrix Rng::orthonormal_columns(int d, int n) {
    if (n > d) throw std::invalid_argument("orthonormal_columns: n > d");
    Matrix a = gaussian_matrix(d, n);
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ() * Matrix::Identity(d, n);
    // Fix column phases so the frame is a deterministic function of the draw.
    for (int c = 0; c < n; ++c) {
        const Complex piv = qr.matrixQR()(c, c);
        if (std::abs(piv) > 0) q.col(c) *= piv / std::abs(piv);
    }
    return q;
}

std::vector<double> Rng::simplex_weights(int k) {
    std::vector<double> w(k);
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        w[i] = -std::log(u);
        sum += w[i];
    }
    for (double& x : w) x /= sum;
    return w;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace slaterlab

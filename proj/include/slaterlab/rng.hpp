#ifndef SLATERLAB_RNG_HPP
#define SLATERLAB_RNG_HPP

#include "slaterlab/spaces.hpp"

#include <cstdint>
#include <random>

namespace slaterlab {

// Deterministic random source. Gaussian variates are produced by an explicit
// Box-Muller transform over mt19937_64 uniforms, so streams are reproducible
// across standard libraries, not just across runs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform();                 // [0, 1)
    double gaussian();                // standard normal
    Complex complex_gaussian();       // re, im iid N(0, 1)
    std::uint64_t integer();

    // iid complex Gaussian entries.
    Matrix gaussian_matrix(long rows, long cols);

    // (A + A*)/2 of a Gaussian draw, d x d.
    Matrix hermitian(int d);

    // Haar-ish orthonormal frame: QR of a Gaussian d x n matrix.
    Matrix orthonormal_columns(int d, int n);

    // Weights on the simplex (flat Dirichlet).
    std::vector<double> simplex_weights(int k);

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Derive an independent stream for a named sub-purpose (splitmix-style hash).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt);

}  // namespace slaterlab

#endif

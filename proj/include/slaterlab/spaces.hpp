#ifndef SLATERLAB_SPACES_HPP
#define SLATERLAB_SPACES_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace slaterlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Largest full-tensor dimension we are willing to materialize as a dense
// matrix. Problems above the cap must go through the occupation-number
// representation instead.
long dense_dim_cap();
void set_dense_dim_cap(long cap);

class DimensionCapError : public std::runtime_error {
public:
    explicit DimensionCapError(const std::string& what) : std::runtime_error(what) {}
};

long binomial(int n, int k);

// Which Hilbert space a matrix lives on:
//   Single(d)     : C^d
//   Tensor(d, n)  : (C^d)^{x n}, dimension d^n
//   Antisym(d, N) : the antisymmetric subspace in occupation-number
//                   coordinates, dimension C(d, N)
enum class SpaceKind { Single, Tensor, Antisym };

struct Space {
    SpaceKind kind = SpaceKind::Single;
    int d = 1;  // single-particle dimension
    int n = 1;  // tensor factors (Tensor) or particle count (Antisym)

    static Space single(int d);
    static Space tensor(int d, int n);  // n == 1 collapses to single(d)
    static Space antisym(int d, int N);

    long dim() const;
    bool operator==(const Space& other) const = default;
    std::string to_string() const;
};

// A dense complex square matrix tagged with the space it acts on. Every
// constructing operation leaves finite entries; the constructor enforces it.
struct Operator {
    Matrix mat;
    Space space;

    Operator(Matrix m, Space s);
    long dim() const { return space.dim(); }
};

Operator identity_operator(const Space& s);

// A permutation of {0, .., n-1}; images[i] is where slot i goes.
struct Permutation {
    std::vector<int> images;

    explicit Permutation(std::vector<int> imgs);
    static Permutation identity(int n);
    static Permutation transposition(int n, int a, int b);  // 0-based slots

    int size() const { return static_cast<int>(images.size()); }
    int operator()(int i) const { return images[i]; }
    int sign() const;
    Permutation compose(const Permutation& rhs) const;  // (this o rhs)(i) = this(rhs(i))
    Permutation inverse() const;
};

// All n! permutations in a deterministic order.
std::vector<Permutation> all_permutations(int n);

}  // namespace slaterlab

#endif

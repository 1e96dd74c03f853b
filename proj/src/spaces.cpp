#include "slaterlab/spaces.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>

namespace slaterlab {

namespace {
std::atomic<long> g_dense_cap{4096};
}

long dense_dim_cap() { return g_dense_cap.load(); }
void set_dense_dim_cap(long cap) {
    if (cap < 1) throw std::invalid_argument("dense_dim_cap: cap must be positive");
    g_dense_cap.store(cap);
}

long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

Space Space::single(int d) {
    if (d < 1) throw std::invalid_argument("Space::single: d must be >= 1");
    return Space{SpaceKind::Single, d, 1};
}

Space Space::tensor(int d, int n) {
    if (d < 1 || n < 1) throw std::invalid_argument("Space::tensor: d, n must be >= 1");
    if (n == 1) return single(d);
    return Space{SpaceKind::Tensor, d, n};
}

Space Space::antisym(int d, int N) {
    if (d < 1 || N < 0) throw std::invalid_argument("Space::antisym: need d >= 1, N >= 0");
    if (N > d) throw std::invalid_argument("Space::antisym: N > d has no antisymmetric states");
    return Space{SpaceKind::Antisym, d, N};
}

long Space::dim() const {
    switch (kind) {
        case SpaceKind::Single:
            return d;
        case SpaceKind::Tensor: {
            long dim = 1;
            for (int i = 0; i < n; ++i) {
                dim *= d;
                if (dim > (1L << 40)) throw std::overflow_error("Space::dim: tensor dimension overflow");
            }
            return dim;
        }
        case SpaceKind::Antisym:
            return binomial(d, n);
    }
    return 0;
}

std::string Space::to_string() const {
    switch (kind) {
        case SpaceKind::Single: return "Single(" + std::to_string(d) + ")";
        case SpaceKind::Tensor: return "Tensor(" + std::to_string(d) + "," + std::to_string(n) + ")";
        case SpaceKind::Antisym: return "Antisym(" + std::to_string(d) + "," + std::to_string(n) + ")";
    }
    return "?";
}

Operator::Operator(Matrix m, Space s) : mat(std::move(m)), space(s) {
    if (mat.rows() != mat.cols())
        throw std::invalid_argument("Operator: matrix must be square, got " +
                                    std::to_string(mat.rows()) + "x" + std::to_string(mat.cols()));
    if (mat.rows() != space.dim())
        throw std::invalid_argument("Operator: dimension " + std::to_string(mat.rows()) +
                                    " does not match space " + space.to_string());
    if (!mat.allFinite())
        throw std::invalid_argument("Operator: non-finite entries on " + space.to_string());
}

Operator identity_operator(const Space& s) {
    return Operator(Matrix::Identity(s.dim(), s.dim()), s);
}

Permutation::Permutation(std::vector<int> imgs) : images(std::move(imgs)) {
    const int n = static_cast<int>(images.size());
    if (n == 0) throw std::invalid_argument("Permutation: empty");
    std::vector<bool> seen(n, false);
    for (int v : images) {
        if (v < 0 || v >= n || seen[v]) throw std::invalid_argument("Permutation: images must be a bijection");
        seen[v] = true;
    }
}

Permutation Permutation::identity(int n) {
    std::vector<int> im(n);
    std::iota(im.begin(), im.end(), 0);
    return Permutation(std::move(im));
}

Permutation Permutation::transposition(int n, int a, int b) {
    auto p = identity(n);
    std::swap(p.images[a], p.images[b]);
    return p;
}

int Permutation::sign() const {
    // (-1)^(n - number of cycles)
    const int n = size();
    std::vector<bool> seen(n, false);
    int cycles = 0;
    for (int i = 0; i < n; ++i) {
        if (seen[i]) continue;
        ++cycles;
        for (int j = i; !seen[j]; j = images[j]) seen[j] = true;
    }
    return ((n - cycles) % 2 == 0) ? 1 : -1;
}

Permutation Permutation::compose(const Permutation& rhs) const {
    if (size() != rhs.size()) throw std::invalid_argument("Permutation::compose: size mismatch");
    std::vector<int> im(size());
    for (int i = 0; i < size(); ++i) im[i] = images[rhs.images[i]];
    return Permutation(std::move(im));
}

Permutation Permutation::inverse() const {
    std::vector<int> im(size());
    for (int i = 0; i < size(); ++i) im[images[i]] = i;
    return Permutation(std::move(im));
}

std::vector<Permutation> all_permutations(int n) {
    std::vector<int> im(n);
    std::iota(im.begin(), im.end(), 0);
    std::vector<Permutation> out;
    do {
        out.emplace_back(im);
    } while (std::next_permutation(im.begin(), im.end()));
    return out;
}

}  // namespace slaterlab

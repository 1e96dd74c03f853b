#include "slaterlab/matrix_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace slaterlab {

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& os, double x) { put_u64(os, std::bit_cast<std::uint64_t>(x)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("write_matrix: cannot open " + path.string());
    put_u64(os, static_cast<std::uint64_t>(m.rows()));
    put_u64(os, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            put_f64(os, m(r, c).real());
            put_f64(os, m(r, c).imag());
        }
    if (!os) throw std::runtime_error("write_matrix: write failed for " + path.string());
}

Matrix read_matrix(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_matrix: cannot open " + path.string());
    const auto rows = get_u64(is);
    const auto cols = get_u64(is);
    if (!is || rows > (1u << 20) || cols > (1u << 20))
        throw std::runtime_error("read_matrix: bad header in " + path.string());
    Matrix m(rows, cols);
    for (std::uint64_t r = 0; r < rows; ++r)
        for (std::uint64_t c = 0; c < cols; ++c) {
            const double re = get_f64(is);
            const double im = get_f64(is);
            m(r, c) = Complex(re, im);
        }
    if (!is) throw std::runtime_error("read_matrix: truncated file " + path.string());
    return m;
}

}  // namespace slaterlab

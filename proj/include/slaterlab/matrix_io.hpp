#ifndef SLATERLAB_MATRIX_IO_HPP
#define SLATERLAB_MATRIX_IO_HPP

#include "slaterlab/spaces.hpp"

#include <filesystem>

namespace slaterlab {

// Binary matrix layout (little-endian, fixed regardless of host order):
//   uint64 rows, uint64 cols,
//   then rows*cols pairs of float64 (re, im), row-major.
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

}  // namespace slaterlab

#endif

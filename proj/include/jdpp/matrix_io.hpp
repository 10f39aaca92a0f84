#pragma once

#include "jdpp/operator_matrix.hpp"

#include <string>

namespace jdpp {

// Binary container, little-endian:
//   8 bytes  magic "JDPPMAT\0"
//   u32      format version (1)
//   u64      dimension N
//   u64      number of positive nodes
//   f64[N]   nodes, f64[N] weights
//   f64[N*N] entries, row-major
constexpr std::uint32_t kMatrixFormatVersion = 1;

void write_matrix_binary(const std::string& path, const OperatorMatrix& M);
OperatorMatrix read_matrix_binary(const std::string& path);

// Dense CSV: header "x_i \ x_j" then node coordinates; one row per node.
void write_matrix_csv(const std::string& path, const OperatorMatrix& M);

}  // namespace jdpp

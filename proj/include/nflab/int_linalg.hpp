#pragma once

// Exact linear algebra over the integers for small dense matrices (ring
// multiplication tables, lattice index computations).  All routines either
// return exact int64 results or throw NumericError on overflow.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "nflab/errors.hpp"

namespace nflab {

using IntMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// Checked arithmetic helpers.
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t checked_add(std::int64_t a, std::int64_t b);

// Exact determinant (fraction-free Bareiss elimination).
std::int64_t det_exact(const IntMat& m);

// Adjugate matrix: adj(m) * m = det(m) * I.  Cofactor expansion with exact minors.
IntMat adjugate(const IntMat& m);

// Diagonal of the Smith normal form of an arbitrary integer matrix, as
// nonnegative invariant factors d_1 | d_2 | ... (trailing zeros for rank
// deficiency).  Works on a copy; rows*cols expected small.
std::vector<std::int64_t> smith_diagonal(IntMat m);

// Index of the column lattice of an integer matrix inside Z^rows: the product
// of the nonzero invariant factors when the rank is full, throws otherwise.
std::int64_t column_lattice_index(const IntMat& m);

} // namespace nflab

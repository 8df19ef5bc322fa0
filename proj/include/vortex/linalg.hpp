#pragma once

#include "vortex/types.hpp"

namespace vortex::linalg {

// Eigenvalues of a symmetric 3x3 matrix, sorted descending.
// Closed-form trigonometric solution; falls back to Jacobi rotations when the
// deviatoric part is too small for the trigonometric form to be reliable.
std::array<double, 3> symmetric_eigenvalues(const Mat3& a);

// Eigenvalues (descending) and matching unit eigenvectors (as columns of
// `vectors`) of a symmetric 3x3 matrix, by cyclic Jacobi rotations.
struct SymmetricEigen {
  std::array<double, 3> values{};
  Mat3 vectors{};
};
SymmetricEigen symmetric_eigen(const Mat3& a);

// Swirling strength: |Im| of the complex-conjugate eigenvalue pair of a real
// 3x3 matrix, 0 when all three eigenvalues are real.
double swirling_strength(const Mat3& j);

}  // namespace vortex::linalg

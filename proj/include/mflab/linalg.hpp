#pragma once

#include "mflab/types.hpp"

#include <vector>

namespace mflab {

struct Spectrum {
  RealVector eigenvalues;  // not globally sorted when parity blocking is used
  Matrix eigenvectors;     // columns, original basis
  std::vector<Eigen::Index> parity_perm;  // set when the solve was parity-blocked
};

// Fermion-parity grading of the computational basis (popcount of the basis
// index). Even operators are block diagonal in this ordering, which halves
// every dense kernel that respects it.
struct ParityBlocks {
  std::vector<Eigen::Index> perm;  // even-parity indices first
  Eigen::Index half = 0;
  bool usable = false;
};

ParityBlocks parity_blocks(Eigen::Index dim);
bool parity_block_diagonal(const ParityBlocks& pb, const Matrix& m, double rel_tol = 1e-13);
Matrix parity_gather(const ParityBlocks& pb, const Matrix& m, int block);
Matrix parity_assemble(const ParityBlocks& pb, const Matrix& even, const Matrix& odd);

// Hermitian eigendecomposition. When the matrix is block diagonal in the
// parity grading, the two half-size blocks are solved separately; all
// Hamiltonians built from even interactions take this path.
Spectrum eig_hermitian(const Matrix& h, bool with_vectors = true);

double hermiticity_residual(const Matrix& m);

void require_hermitian(const Matrix& m, double tol = 1e-10, const char* who = "operator");

// Largest singular value.
double operator_norm(const Matrix& m);

double trace_norm(const Matrix& m);

// f(H) = V f(E) V^* for Hermitian H given its spectrum.
Matrix apply_spectral_function(const Spectrum& s, const RealVector& f_of_eigenvalues);

}  // namespace mflab

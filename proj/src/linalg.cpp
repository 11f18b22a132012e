#include "mflab/linalg.hpp"

#include <bit>
#include <vector>

namespace mflab {

double hermiticity_residual(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void require_hermitian(const Matrix& m, double tol, const char* who) {
  double r = hermiticity_residual(m);
  if (!(r <= tol))
    throw Error(ErrorCode::NonHermitian,
                std::string(who) + " has hermiticity residual " + std::to_string(r));
}

ParityBlocks parity_blocks(Eigen::Index dim) {
  ParityBlocks pb;
  if (dim < 4 || (dim & (dim - 1)) != 0) return pb;
  pb.perm.reserve(static_cast<size_t>(dim));
  for (Eigen::Index s = 0; s < dim; ++s)
    if (std::popcount(static_cast<std::uint64_t>(s)) % 2 == 0) pb.perm.push_back(s);
  for (Eigen::Index s = 0; s < dim; ++s)
    if (std::popcount(static_cast<std::uint64_t>(s)) % 2 == 1) pb.perm.push_back(s);
  pb.half = dim / 2;
  pb.usable = true;
  return pb;
}

bool parity_block_diagonal(const ParityBlocks& pb, const Matrix& m, double rel_tol) {
  if (!pb.usable) return false;
  const double cutoff = rel_tol * std::max(m.cwiseAbs().maxCoeff(), 1.0);
  for (Eigen::Index j = 0; j < pb.half; ++j)
    for (Eigen::Index i = pb.half; i < 2 * pb.half; ++i) {
      if (std::abs(m(pb.perm[i], pb.perm[j])) > cutoff) return false;
      if (std::abs(m(pb.perm[j], pb.perm[i])) > cutoff) return false;
    }
  return true;
}

Matrix parity_gather(const ParityBlocks& pb, const Matrix& m, int block) {
  const Eigen::Index base = block == 0 ? 0 : pb.half;
  Matrix out(pb.half, pb.half);
  for (Eigen::Index j = 0; j < pb.half; ++j)
    for (Eigen::Index i = 0; i < pb.half; ++i) out(i, j) = m(pb.perm[base + i], pb.perm[base + j]);
  return out;
}

Matrix parity_assemble(const ParityBlocks& pb, const Matrix& even, const Matrix& odd) {
  Matrix out = Matrix::Zero(2 * pb.half, 2 * pb.half);
  for (Eigen::Index j = 0; j < pb.half; ++j)
    for (Eigen::Index i = 0; i < pb.half; ++i) {
      out(pb.perm[i], pb.perm[j]) = even(i, j);
      out(pb.perm[pb.half + i], pb.perm[pb.half + j]) = odd(i, j);
    }
  return out;
}

Spectrum eig_hermitian(const Matrix& h, bool with_vectors) {
  const Eigen::Index n = h.rows();
  Spectrum out;
  ParityBlocks pb = parity_blocks(n);
  if (pb.usable && parity_block_diagonal(pb, h)) {
    const Eigen::Index ne = pb.half;
    Eigen::SelfAdjointEigenSolver<Matrix> se(
        parity_gather(pb, h, 0),
        with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Matrix> so(
        parity_gather(pb, h, 1),
        with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    out.eigenvalues.resize(n);
    out.eigenvalues.head(ne) = se.eigenvalues();
    out.eigenvalues.tail(ne) = so.eigenvalues();
    out.parity_perm = pb.perm;
    if (with_vectors) {
      out.eigenvectors = Matrix::Zero(n, n);
      for (Eigen::Index j = 0; j < ne; ++j)
        for (Eigen::Index i = 0; i < ne; ++i) {
          out.eigenvectors(pb.perm[i], j) = se.eigenvectors()(i, j);
          out.eigenvectors(pb.perm[ne + i], ne + j) = so.eigenvectors()(i, j);
        }
    }
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      h, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  out.eigenvalues = es.eigenvalues();
  if (with_vectors) out.eigenvectors = es.eigenvectors();
  return out;
}

double operator_norm(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  if (m.rows() <= 64) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()[0];
  }
  Matrix gram = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double trace_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

Matrix apply_spectral_function(const Spectrum& s, const RealVector& f) {
  if (s.parity_perm.empty())
    return s.eigenvectors * f.asDiagonal() * s.eigenvectors.adjoint();
  // Blocked solve: f(H) lives in the two parity blocks; work per block.
  const Eigen::Index n = s.eigenvalues.size();
  const Eigen::Index ne = n / 2;
  Matrix out = Matrix::Zero(n, n);
  for (int block = 0; block < 2; ++block) {
    const Eigen::Index col0 = block == 0 ? 0 : ne;
    Matrix vb(ne, ne);
    for (Eigen::Index j = 0; j < ne; ++j)
      for (Eigen::Index i = 0; i < ne; ++i) vb(i, j) = s.eigenvectors(s.parity_perm[col0 + i], col0 + j);
    Matrix fb = vb * f.segment(col0, ne).asDiagonal() * vb.adjoint();
    for (Eigen::Index j = 0; j < ne; ++j)
      for (Eigen::Index i = 0; i < ne; ++i) out(s.parity_perm[col0 + i], s.parity_perm[col0 + j]) = fb(i, j);
  }
  return out;
}

}  // namespace mflab

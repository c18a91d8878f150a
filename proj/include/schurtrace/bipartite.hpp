#pragma once

#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "schurtrace/types.hpp"

namespace schurtrace {

inline std::pair<int, int> index_split(int k, const BipartiteShape& s) {
  if (k < 0 || k >= s.total())
    throw IndexError("global index " + std::to_string(k) + " outside shape " + s.str());
  return {k / s.d2(), k % s.d2()};
}

inline int index_compose(int i, int j, const BipartiteShape& s) {
  if (i < 0 || i >= s.d1() || j < 0 || j >= s.d2())
    throw IndexError("factor index (" + std::to_string(i) + "," + std::to_string(j) +
                     ") outside shape " + s.str());
  return i * s.d2() + j;
}

template <class Derived>
void require_square(const Eigen::MatrixBase<Derived>& C, const BipartiteShape& s, const char* what) {
  if (C.rows() != C.cols()) throw ShapeError(std::string(what) + ": matrix is not square");
  s.require_size(C.rows(), what);
}

// which = 1: sum of the d1 diagonal blocks (d2 x d2).
// which = 2: matrix of block traces (d1 x d1).
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> partial_trace(
    const Eigen::MatrixBase<Derived>& C, const BipartiteShape& s, int which) {
  using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  require_square(C, s, "partial_trace");
  const int d1 = s.d1(), d2 = s.d2();
  if (which == 1) {
    M r = M::Zero(d2, d2);
    for (int i = 0; i < d1; ++i) r += C.block(i * d2, i * d2, d2, d2);
    return r;
  }
  if (which == 2) {
    M r(d1, d1);
    for (int a = 0; a < d1; ++a)
      for (int b = 0; b < d1; ++b) r(a, b) = C.block(a * d2, b * d2, d2, d2).trace();
    return r;
  }
  throw IndexError("partial_trace: which must be 1 or 2");
}

// perm[i*d2 + j] = j*d1 + i
inline std::vector<int> flip_permutation(const BipartiteShape& s) {
  std::vector<int> perm(static_cast<std::size_t>(s.total()));
  for (int i = 0; i < s.d1(); ++i)
    for (int j = 0; j < s.d2(); ++j) perm[i * s.d2() + j] = j * s.d1() + i;
  return perm;
}

template <class Derived>
std::pair<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>, BipartiteShape>
flip_conjugate(const Eigen::MatrixBase<Derived>& C, const BipartiteShape& s) {
  using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  require_square(C, s, "flip_conjugate");
  const auto perm = flip_permutation(s);
  const int n = s.total();
  M out(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out(perm[a], perm[b]) = C(a, b);
  return {out, s.swapped()};
}

inline DiagonalArrangement flip_arrangement(const DiagonalArrangement& c) {
  const auto perm = flip_permutation(c.shape);
  RVector out(c.values.size());
  for (int k = 0; k < c.shape.total(); ++k) out[perm[k]] = c.values[k];
  return {out, c.shape.swapped()};
}

inline CMatrix kron(const CMatrix& A, const CMatrix& B) {
  CMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

inline double hermiticity_defect(const CMatrix& C) {
  return C.size() ? (C - C.adjoint()).cwiseAbs().maxCoeff() : 0.0;
}

inline double unitarity_defect(const CMatrix& U) {
  return (U * U.adjoint() - CMatrix::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff();
}

inline void require_hermitian(const CMatrix& C, const Tolerances& tol, const char* what) {
  if (C.rows() != C.cols()) throw ShapeError(std::string(what) + ": matrix is not square");
  const double scale = C.size() ? C.cwiseAbs().maxCoeff() : 0.0;
  if (hermiticity_defect(C) > tol.hermiticity * std::max(scale, 1e-300))
    throw DomainError(std::string(what) + ": matrix is not Hermitian");
}

struct HermitianEig {
  SortedSpectrum spectrum;
  CMatrix vectors;  // columns ordered like spectrum
};

inline HermitianEig eig_hermitian(const CMatrix& C, const Tolerances& tol = default_tolerances()) {
  require_hermitian(C, tol, "eig_hermitian");
  const CMatrix H = (C + C.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  if (es.info() != Eigen::Success)
    throw NumericalError("eig_hermitian: self-adjoint eigensolver did not converge (n=" +
                         std::to_string(C.rows()) + ")");
  const Eigen::Index n = H.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const RVector& ev = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return ev[a] > ev[b]; });
  RVector vals(n);
  CMatrix vecs(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    vals[k] = ev[order[k]];
    vecs.col(k) = es.eigenvectors().col(order[k]);
  }
  CMatrix D = vecs.adjoint() * H * vecs;
  D.diagonal().setZero();
  const double norm = n ? H.cwiseAbs().maxCoeff() : 0.0;
  if (n && D.cwiseAbs().maxCoeff() > tol.eig_residual * std::max(1.0, norm))
    throw NumericalError("eig_hermitian: residual above tolerance");
  return {SortedSpectrum::from_unsorted(vals), vecs};
}

inline SortedSpectrum eigenvalues_hermitian(const CMatrix& C) {
  const CMatrix H = (C + C.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigenvalues_hermitian: solver did not converge (n=" +
                         std::to_string(C.rows()) + ")");
  return SortedSpectrum::from_unsorted(es.eigenvalues());
}

inline SortedSpectrum singular_values(const CMatrix& C) {
  Eigen::JacobiSVD<CMatrix> svd(C);
  return SortedSpectrum::from_unsorted(RVector(svd.singularValues()));
}

template <class Engine>
CMatrix haar_unitary(int n, Engine& rng) {
  if (n < 1) throw ShapeError("haar_unitary: n must be positive");
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  CMatrix Z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      Z(i, j) = Complex(re, im);
    }
  Eigen::HouseholderQR<CMatrix> qr(Z);
  CMatrix Q = qr.householderQ();
  for (int j = 0; j < n; ++j) {
    const Complex r = qr.matrixQR()(j, j);
    const double m = std::abs(r);
    if (m > 0) Q.col(j) *= r / m;
  }
  return Q;
}

inline CMatrix haar_unitary(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return haar_unitary(n, rng);
}

// U diag(lambda) U* for a fresh Haar U.
template <class Engine>
CMatrix haar_conjugate(const RVector& lambda, Engine& rng) {
  const CMatrix U = haar_unitary(static_cast<int>(lambda.size()), rng);
  return U * lambda.cast<Complex>().asDiagonal() * U.adjoint();
}

inline JointMarginalSpectrum joint_spectrum(const CMatrix& C, const BipartiteShape& s) {
  return {eigenvalues_hermitian(partial_trace(C, s, 1)).values(),
          eigenvalues_hermitian(partial_trace(C, s, 2)).values()};
}

// Conjugate by a product unitary so both partial traces become diagonal
// with decreasing entries.
inline CMatrix local_diagonalize(const CMatrix& C, const BipartiteShape& s,
                                 const Tolerances& tol = default_tolerances()) {
  require_square(C, s, "local_diagonalize");
  require_hermitian(C, tol, "local_diagonalize");
  const CMatrix H = (C + C.adjoint()) / 2.0;
  const HermitianEig e1 = eig_hermitian(partial_trace(H, s, 1), tol);
  const HermitianEig e2 = eig_hermitian(partial_trace(H, s, 2), tol);
  const CMatrix W = kron(e2.vectors, e1.vectors);
  CMatrix out = W.adjoint() * H * W;
  return (out + out.adjoint()) / 2.0;
}

// Column n*d + m holds psi_nm = d^{-1/2} sum_j e^{2 pi i j n / d} |j> (x) |j+m mod d>.
inline CMatrix bell_basis_unitary(int d) {
  if (d < 2) throw ShapeError("bell_basis_unitary: d must be >= 2");
  CMatrix B = CMatrix::Zero(d * d, d * d);
  const double inv = 1.0 / std::sqrt(static_cast<double>(d));
  for (int n = 0; n < d; ++n)
    for (int m = 0; m < d; ++m)
      for (int j = 0; j < d; ++j) {
        const double ang = 2.0 * std::numbers::pi * j * n / d;
        B(j * d + (j + m) % d, n * d + m) = inv * Complex(std::cos(ang), std::sin(ang));
      }
  return B;
}

inline CMatrix bell_conjugate(const RVector& lambda, int d) {
  if (lambda.size() != static_cast<Eigen::Index>(d) * d)
    throw ShapeError("bell_conjugate: spectrum length must be d^2");
  const CMatrix B = bell_basis_unitary(d);
  return B * lambda.cast<Complex>().asDiagonal() * B.adjoint();
}

// Reduced 2x2 operator on qubit `keep` (0-based, qubit 0 is the most
// significant bit of the basis index).
inline CMatrix nqubit_partial_trace(const CMatrix& C, int n, int keep) {
  if (n < 1 || n > 20) throw ShapeError("nqubit_partial_trace: bad qubit count");
  const Eigen::Index N = Eigen::Index(1) << n;
  if (C.rows() != N || C.cols() != N) throw ShapeError("nqubit_partial_trace: matrix is not 2^n x 2^n");
  if (keep < 0 || keep >= n) throw IndexError("nqubit_partial_trace: qubit index out of range");
  const Eigen::Index mask = Eigen::Index(1) << (n - 1 - keep);
  CMatrix r = CMatrix::Zero(2, 2);
  for (Eigen::Index x = 0; x < N; ++x)
    for (Eigen::Index y = 0; y < N; ++y)
      if (((x ^ y) & ~mask) == 0) r((x & mask) ? 1 : 0, (y & mask) ? 1 : 0) += C(x, y);
  return r;
}

}  // namespace schurtrace

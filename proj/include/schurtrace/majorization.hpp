#pragma once

#include <numeric>
#include <vector>

#include "schurtrace/types.hpp"

namespace schurtrace {

struct MajorizationGap {
  double prefix_excess;  // max_k (sum_{i<=k} x_i - sum_{i<=k} y_i), sorted descending
  double total_gap;      // |sum x - sum y|
  int worst_k;           // 1-based prefix length attaining prefix_excess
};

inline void require_same_length(const RVector& y, const RVector& x, const char* what) {
  if (x.size() != y.size())
    throw ShapeError(std::string(what) + ": length mismatch " + std::to_string(y.size()) + " vs " +
                     std::to_string(x.size()));
}

inline MajorizationGap majorization_gap(const RVector& y, const RVector& x) {
  require_same_length(y, x, "majorization");
  const RVector xs = sorted_descending(x), ys = sorted_descending(y);
  double px = 0, py = 0;
  MajorizationGap g{-std::numeric_limits<double>::infinity(), 0.0, 0};
  for (Eigen::Index k = 0; k < xs.size(); ++k) {
    px += xs[k];
    py += ys[k];
    if (px - py > g.prefix_excess) {
      g.prefix_excess = px - py;
      g.worst_k = static_cast<int>(k + 1);
    }
  }
  if (xs.size() == 0) g.prefix_excess = 0;
  g.total_gap = std::abs(px - py);
  return g;
}

inline double majorization_scale(const RVector& y) { return std::max(1.0, y.cwiseAbs().sum()); }

// x is majorized by y.
inline bool majorizes(const RVector& y, const RVector& x,
                      double tol = default_tolerances().majorization) {
  const MajorizationGap g = majorization_gap(y, x);
  const double t = tol * majorization_scale(y);
  return g.prefix_excess <= t && g.total_gap <= t;
}

inline bool weakly_majorizes(const RVector& y, const RVector& x,
                             double tol = default_tolerances().majorization) {
  const MajorizationGap g = majorization_gap(y, x);
  return g.prefix_excess <= tol * majorization_scale(y);
}

struct Rotation2 {
  double c;
  double s;
};

// Rotation taking diag(a, b) to a matrix with diagonal (a - t, b + t),
// t = sign(a - b) * alpha.
inline Rotation2 rotation_2x2(double a, double b, double alpha) {
  const double delta = std::abs(a - b);
  if (!(alpha > 0.0) || !(alpha < delta))
    throw DomainError("two-index rotation needs 0 < alpha < |c_i - c_j| (alpha=" +
                      std::to_string(alpha) + ", gap=" + std::to_string(delta) + ")");
  const double s2 = alpha / delta;
  return {std::sqrt(1.0 - s2), std::sqrt(s2)};
}

// Real symmetric matrix V diag(c) V^T where V rotates coordinates i and j.
inline RMatrix two_index_rotation(const RVector& c, int i, int j, double alpha) {
  const int n = static_cast<int>(c.size());
  if (i < 0 || j < 0 || i >= n || j >= n || i == j)
    throw IndexError("two_index_rotation: bad index pair");
  const Rotation2 r = rotation_2x2(c[i], c[j], alpha);
  RMatrix M = c.asDiagonal();
  M(i, i) = r.c * r.c * c[i] + r.s * r.s * c[j];
  M(j, j) = r.s * r.s * c[i] + r.c * r.c * c[j];
  M(i, j) = M(j, i) = r.c * r.s * (c[i] - c[j]);
  return M;
}

inline RMatrix two_index_rotation(const DiagonalArrangement& c, int i, int j, double alpha) {
  return two_index_rotation(c.values, i, j, alpha);
}

namespace detail {

// Returns Q with Q diag(lambda) Q^T having diagonal c. c and lambda sorted
// descending, c majorized by lambda.
inline RMatrix horn_sorted(const RVector& c, const RVector& lambda, double eps) {
  const int n = static_cast<int>(c.size());
  if (n == 1) return RMatrix::Identity(1, 1);
  const double c1 = c[0];
  int j = n - 1;
  for (int k = 0; k < n; ++k)
    if (lambda[k] <= c1 + eps) {
      j = k;
      break;
    }
  const RVector rest = c.tail(n - 1);
  RMatrix Q = RMatrix::Zero(n, n);
  std::vector<int> sigma(static_cast<std::size_t>(n));
  RMatrix G = RMatrix::Identity(n, n);
  RVector sub(n - 1);

  if (j == 0 || std::abs(lambda[j] - c1) <= eps) {
    for (int k = 0, t = 0; k < n; ++k)
      if (k != j) sub[t++] = lambda[k];
    sigma[0] = j;
    for (int k = 0; k < n - 1; ++k) sigma[1 + k] = k < j ? k : k + 1;
  } else {
    const double a = lambda[j - 1], b = lambda[j];
    const double mu = a + b - c1;
    for (int k = 0; k < j - 1; ++k) sub[k] = lambda[k];
    sub[j - 1] = mu;
    for (int k = j; k < n - 1; ++k) sub[k] = lambda[k + 1];
    const double alpha = std::clamp(a - c1, 0.0, a - b);
    const double s2 = (a - b) > 0 ? alpha / (a - b) : 0.0;
    const double cs = std::sqrt(1.0 - s2), sn = std::sqrt(s2);
    const int p = j;  // 1 + position of mu in sub
    G(0, 0) = cs;
    G(0, p) = -sn;
    G(p, 0) = sn;
    G(p, p) = cs;
    sigma[0] = j - 1;
    for (int k = 0; k < n - 1; ++k) sigma[1 + k] = k < j - 1 ? k : k + 1;
  }

  const RMatrix Qsub = horn_sorted(rest, sub, eps);
  RMatrix B = RMatrix::Zero(n, n);
  B(0, 0) = 1.0;
  B.bottomRightCorner(n - 1, n - 1) = Qsub;
  RMatrix Pi = RMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) Pi(k, sigma[k]) = 1.0;
  Q = B * G * Pi;
  return Q;
}

}  // namespace detail

// Real symmetric matrix with diagonal c and spectrum lambda, assembled from
// a chain of two-index rotations.
inline RMatrix horn_matrix(const RVector& c, const SortedSpectrum& lambda,
                           double tol = default_tolerances().majorization) {
  require_same_length(lambda.values(), c, "horn_matrix");
  if (!majorizes(lambda.values(), c, tol))
    throw PreconditionError("horn_matrix: diagonal is not majorized by the spectrum");
  const int n = static_cast<int>(c.size());
  if (n == 0) return RMatrix(0, 0);
  std::vector<int> ord(static_cast<std::size_t>(n));
  std::iota(ord.begin(), ord.end(), 0);
  std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return c[a] > c[b]; });
  RVector cs(n);
  for (int k = 0; k < n; ++k) cs[k] = c[ord[k]];
  const double eps = 1e-13 * std::max(1.0, lambda.max_abs());
  const RMatrix Q = detail::horn_sorted(cs, lambda.values(), eps);
  const RMatrix Ms = Q * lambda.values().asDiagonal() * Q.transpose();
  RMatrix M(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) M(ord[a], ord[b]) = Ms(a, b);
  return (M + M.transpose()) / 2.0;
}

}  // namespace schurtrace

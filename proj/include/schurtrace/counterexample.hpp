#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "schurtrace/spectral_bounds.hpp"

namespace schurtrace {

inline constexpr std::size_t kDefaultClassLimit = 1000000;

// Unordered partitions of the multiset lambda into d1 blocks of size d2,
// each block sorted decreasing. Blocks are emitted in lexicographically
// non-increasing order of their group-count vectors, so every class
// appears exactly once.
class CanonicalClassEnumerator {
 public:
  CanonicalClassEnumerator(const SortedSpectrum& lambda, const BipartiteShape& shape,
                           double equal_tol = 1e-12)
      : lambda_(lambda), shape_(shape) {
    shape.require_size(lambda.size(), "canonical class enumeration");
    const double thr = equal_tol * std::max(1.0, lambda.max_abs());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      if (i == 0 || lambda[start_.back()] - lambda[i] > thr) {
        start_.push_back(static_cast<int>(i));
        mult_.push_back(0);
      }
      ++mult_.back();
    }
  }

  int group_count() const { return static_cast<int>(mult_.size()); }

  // Calls visit(counts) where counts[b][t] is the number of entries of
  // group t in block b. Throws once more than `limit` classes are seen.
  void for_each(const std::function<void(const std::vector<std::vector<int>>&)>& visit,
                std::size_t limit = kDefaultClassLimit) const {
    std::vector<std::vector<int>> blocks;
    blocks.reserve(static_cast<std::size_t>(shape_.d1()));  // prev pointers index into blocks
    std::vector<int> rem = mult_;
    std::size_t seen = 0;
    recurse_block(blocks, rem, visit, limit, seen);
  }

  // Block-sorted arrangement carrying the actual spectrum values.
  DiagonalArrangement arrangement(const std::vector<std::vector<int>>& counts) const {
    RVector v(shape_.total());
    std::vector<int> next = start_;
    int k = 0;
    for (const auto& block : counts)
      for (int t = 0; t < group_count(); ++t)
        for (int c = 0; c < block[t]; ++c) v[k++] = lambda_[next[t]++];
    return {v, shape_};
  }

  // Group id of every position of the arrangement above.
  std::vector<int> group_ids(const std::vector<std::vector<int>>& counts) const {
    std::vector<int> g;
    g.reserve(static_cast<std::size_t>(shape_.total()));
    for (const auto& block : counts)
      for (int t = 0; t < group_count(); ++t)
        for (int c = 0; c < block[t]; ++c) g.push_back(t);
    return g;
  }

  // Canonical count representation of the class of an arrangement given by
  // group ids on `shape` (d1 blocks of d2).
  static std::vector<std::vector<int>> canonical_counts(const std::vector<int>& g, const BipartiteShape& shape,
                                                        int groups) {
    std::vector<std::vector<int>> blocks(static_cast<std::size_t>(shape.d1()), std::vector<int>(groups, 0));
    for (int b = 0; b < shape.d1(); ++b)
      for (int p = 0; p < shape.d2(); ++p) ++blocks[b][g[b * shape.d2() + p]];
    std::sort(blocks.begin(), blocks.end(), std::greater<std::vector<int>>());
    return blocks;
  }

 private:
  void recurse_block(std::vector<std::vector<int>>& blocks, std::vector<int>& rem,
                     const std::function<void(const std::vector<std::vector<int>>&)>& visit,
                     std::size_t limit, std::size_t& seen) const {
    const int b = static_cast<int>(blocks.size());
    if (b == shape_.d1() - 1) {
      if (b > 0 && rem > blocks.back()) return;
      blocks.push_back(rem);
      if (++seen > limit)
        throw CombinatorialLimitError("canonical class enumeration exceeds " + std::to_string(limit) +
                                      " classes");
      visit(blocks);
      blocks.pop_back();
      return;
    }
    std::vector<int> a(mult_.size(), 0);
    const std::vector<int>* prev = b > 0 ? &blocks.back() : nullptr;
    recurse_counts(0, shape_.d2(), true, a, prev, blocks, rem, visit, limit, seen);
  }

  void recurse_counts(int t, int left, bool tight, std::vector<int>& a, const std::vector<int>* prev,
                      std::vector<std::vector<int>>& blocks, std::vector<int>& rem,
                      const std::function<void(const std::vector<std::vector<int>>&)>& visit,
                      std::size_t limit, std::size_t& seen) const {
    const int m = group_count();
    if (t == m) {
      if (left != 0) return;
      for (int s = 0; s < m; ++s) rem[s] -= a[s];
      blocks.push_back(a);
      recurse_block(blocks, rem, visit, limit, seen);
      blocks.pop_back();
      for (int s = 0; s < m; ++s) rem[s] += a[s];
      return;
    }
    int capacity_after = 0;
    for (int s = t + 1; s < m; ++s) capacity_after += rem[s];
    int hi = std::min(rem[t], left);
    if (tight && prev) hi = std::min(hi, (*prev)[t]);
    const int lo = std::max(0, left - capacity_after);
    for (int x = hi; x >= lo; --x) {
      a[t] = x;
      const bool still = tight && prev && x == (*prev)[t];
      recurse_counts(t + 1, left - x, still, a, still ? prev : nullptr, blocks, rem, visit, limit, seen);
    }
    a[t] = 0;
  }

  SortedSpectrum lambda_;
  BipartiteShape shape_;
  std::vector<int> start_;
  std::vector<int> mult_;
};

inline std::size_t count_canonical_classes(const SortedSpectrum& lambda, const BipartiteShape& shape,
                                           std::size_t limit = kDefaultClassLimit) {
  std::size_t n = 0;
  CanonicalClassEnumerator(lambda, shape).for_each([&](const auto&) { ++n; }, limit);
  return n;
}

struct ClassFailure {
  RVector class_diagonal;
  int k;       // prefix length (1-based) where the class fails
  int k1;      // entries of that prefix taken from lambda^(1) of the target
  int k2;      // entries taken from lambda^(2)
  double lhs;  // prefix sum of the target
  double rhs;  // prefix sum of the class joint spectrum
};

struct RefutationResult {
  bool refuted = false;
  std::size_t classes_total = 0;
  std::size_t classes_checked = 0;
  std::size_t classes_skipped_by_flip = 0;
  std::vector<ClassFailure> failures;
  std::optional<RVector> majorizing_class;
};

namespace detail {

inline ClassFailure failure_of(const JointMarginalSpectrum& x, const RVector& y, const RVector& class_diag) {
  const RVector xc = x.concatenated();
  const Eigen::Index n = xc.size();
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return xc[a] > xc[b]; });
  const RVector ys = sorted_descending(y);
  ClassFailure f{class_diag, 0, 0, 0, 0, 0};
  double best = -std::numeric_limits<double>::infinity();
  double px = 0, py = 0;
  int k1 = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    px += xc[idx[k]];
    py += ys[k];
    if (idx[k] < x.first.size()) ++k1;
    if (px - py > best) {
      best = px - py;
      f.k = static_cast<int>(k + 1);
      f.k1 = k1;
      f.k2 = static_cast<int>(k + 1) - k1;
      f.lhs = px;
      f.rhs = py;
    }
  }
  if (best <= 0) {  // prefixes fine; totals differ
    f.k = static_cast<int>(n);
    f.k1 = static_cast<int>(x.first.size());
    f.k2 = static_cast<int>(x.second.size());
    f.lhs = px;
    f.rhs = py;
  }
  return f;
}

}  // namespace detail

// Refuted iff no diagonal arrangement of lambda has a joint marginal
// spectrum majorizing x.
inline RefutationResult refute_diagonal_majorization(const JointMarginalSpectrum& x, const SortedSpectrum& lambda,
                                                     const BipartiteShape& shape,
                                                     double tol = default_tolerances().majorization,
                                                     std::size_t limit = kDefaultClassLimit,
                                                     bool flip_reduction = true) {
  shape.require_size(lambda.size(), "refute_diagonal_majorization");
  if (x.first.size() != shape.d2() || x.second.size() != shape.d1())
    throw ShapeError("refute_diagonal_majorization: joint spectrum does not match shape");
  const CanonicalClassEnumerator en(lambda, shape);
  const RVector xc = x.concatenated();
  RefutationResult res;
  bool found = false;
  const bool use_flip = flip_reduction && shape.square();
  en.for_each(
      [&](const std::vector<std::vector<int>>& counts) {
        ++res.classes_total;
        if (found) return;
        if (use_flip) {
          const std::vector<int> g = en.group_ids(counts);
          std::vector<int> gf(g.size());
          const auto perm = flip_permutation(shape);
          for (std::size_t k = 0; k < g.size(); ++k) gf[perm[k]] = g[k];
          if (CanonicalClassEnumerator::canonical_counts(gf, shape, en.group_count()) > counts) {
            ++res.classes_skipped_by_flip;
            return;
          }
        }
        ++res.classes_checked;
        const DiagonalArrangement arr = en.arrangement(counts);
        const RVector y = joint_marginals_of_diagonal(arr).concatenated();
        if (majorizes(y, xc, tol)) {
          found = true;
          res.majorizing_class = arr.values;
          return;
        }
        res.failures.push_back(detail::failure_of(x, y, arr.values));
      },
      limit);
  res.refuted = !found;
  if (found) res.failures.clear();
  return res;
}

// Smallest entry above the rank threshold over the joint spectra of all
// canonical classes.
inline double min_nonzero_class_entry(const SortedSpectrum& lambda, const BipartiteShape& shape,
                                      std::size_t limit = kDefaultClassLimit) {
  const CanonicalClassEnumerator en(lambda, shape);
  const double thr = default_tolerances().rank_relative * std::max(1e-300, lambda.max_abs());
  double m = std::numeric_limits<double>::infinity();
  en.for_each(
      [&](const std::vector<std::vector<int>>& counts) {
        const RVector y = joint_marginals_of_diagonal(en.arrangement(counts)).concatenated();
        for (Eigen::Index i = 0; i < y.size(); ++i)
          if (std::abs(y[i]) > thr) m = std::min(m, std::abs(y[i]));
      },
      limit);
  return m;
}

struct WitnessReport {
  std::string family;
  BipartiteShape shape;
  SortedSpectrum spectrum;
  DiagonalArrangement arrangement;  // before the rotation
  int rotation_i;                   // 0-based
  int rotation_j;
  double alpha;
  double alpha_lo;  // admissible window (alpha_lo, alpha_hi)
  double alpha_hi;
  DiagonalArrangement witness_diagonal;
  JointMarginalSpectrum joint;
  bool refuted;
  RefutationResult refutation;

  RMatrix witness_matrix() const {
    return two_index_rotation(arrangement, rotation_i, rotation_j, alpha);
  }
};

enum class AlphaRule { half_min_entry, midpoint };

namespace detail {

inline DiagonalArrangement rotated_diagonal(const DiagonalArrangement& a, int i, int j, double alpha) {
  DiagonalArrangement w = a;
  const double sgn = a.values[i] > a.values[j] ? 1.0 : -1.0;
  w.values[i] -= sgn * alpha;
  w.values[j] += sgn * alpha;
  return w;
}

inline WitnessReport finish_witness(const std::string& family, const SortedSpectrum& lambda,
                                    const DiagonalArrangement& arr, int i, int j, double lo, double hi,
                                    std::optional<double> alpha, AlphaRule rule) {
  if (!(hi > lo)) throw PreconditionError(family + ": empty alpha window");
  std::vector<double> trial;
  if (alpha) {
    if (!(*alpha > lo && *alpha < hi))
      throw DomainError(family + ": alpha " + std::to_string(*alpha) + " outside (" + std::to_string(lo) + ", " +
                        std::to_string(hi) + ")");
    trial.push_back(*alpha);
  } else {
    double a0 = lo + 0.5 * (hi - lo);
    if (rule == AlphaRule::half_min_entry) {
      const double m = min_nonzero_class_entry(lambda, arr.shape);
      a0 = std::min(m / 2.0, a0);
      if (!(a0 > lo)) a0 = lo + 0.5 * (hi - lo);
    }
    trial.push_back(a0);
    for (double t : {0.5, 0.25, 0.75, 0.1, 0.9, 0.01, 0.99}) trial.push_back(lo + t * (hi - lo));
  }
  std::optional<WitnessReport> last;
  for (double a : trial) {
    const DiagonalArrangement w = rotated_diagonal(arr, i, j, a);
    const JointMarginalSpectrum joint = joint_marginals_of_diagonal(w);
    RefutationResult ref = refute_diagonal_majorization(joint, lambda, arr.shape);
    const bool ok = ref.refuted;
    last = WitnessReport{family, arr.shape, lambda, arr, i, j, a, lo, hi, w, joint, ok, std::move(ref)};
    if (ok) break;
  }
  return *last;
}

inline void require_psd(const SortedSpectrum& lambda, const char* what) {
  const double neg = default_tolerances().negativity * std::max(1.0, lambda.max_abs());
  if (!lambda.nonnegative(neg)) throw PreconditionError(std::string(what) + ": spectrum must be nonnegative");
}

}  // namespace detail

// Spectrum of rank r with (k-1) d2 < r <= k (d2 - 1); k = 0 picks the band.
inline WitnessReport witness_rank_band(const SortedSpectrum& lambda, const BipartiteShape& shape, int k = 0,
                                       std::optional<double> alpha = std::nullopt) {
  shape.require_size(lambda.size(), "witness_rank_band");
  detail::require_psd(lambda, "witness_rank_band");
  const int d1 = shape.d1(), d2 = shape.d2();
  if (d1 > d2) throw ShapeError("witness_rank_band needs d1 <= d2");
  const int r = spectrum_rank(lambda);
  if (k == 0)
    for (int t = 2; t <= d1; ++t)
      if ((t - 1) * d2 < r && r <= t * (d2 - 1)) k = t;
  if (k < 2 || k > d1 || !((k - 1) * d2 < r && r <= k * (d2 - 1)))
    throw PreconditionError("witness_rank_band: rank " + std::to_string(r) + " is outside every band");
  RVector v = RVector::Zero(shape.total());
  int next = 0;
  for (int b = 0; b < k - 1; ++b)
    for (int p = 0; p < d2 - 1; ++p) v[b * d2 + p] = lambda[next++];
  for (int p = 0; next < r; ++p) v[(k - 1) * d2 + p] = lambda[next++];
  const DiagonalArrangement arr(v, shape);
  return detail::finish_witness("rank-band", lambda, arr, d2 - 1, d2, 0.0, lambda[d2 - 1], alpha,
                                AlphaRule::half_min_entry);
}

// d1 < d2 and 4 <= r <= d2.
inline WitnessReport witness_low_rank(const SortedSpectrum& lambda, const BipartiteShape& shape,
                                      std::optional<double> alpha = std::nullopt) {
  shape.require_size(lambda.size(), "witness_low_rank");
  detail::require_psd(lambda, "witness_low_rank");
  const int d2 = shape.d2();
  if (shape.d1() >= d2) throw ShapeError("witness_low_rank needs d1 < d2");
  const int r = spectrum_rank(lambda);
  if (r < 4 || r > d2) throw PreconditionError("witness_low_rank needs 4 <= rank <= d2, got " + std::to_string(r));
  RVector v = RVector::Zero(shape.total());
  for (int p = 0; p < r - 2; ++p) v[p] = lambda[p];
  v[d2] = lambda[r - 2];
  v[d2 + 1] = lambda[r - 1];
  const DiagonalArrangement arr(v, shape);
  return detail::finish_witness("low-rank", lambda, arr, d2 - 1, d2 + 1, 0.0, lambda[r - 1], alpha,
                                AlphaRule::half_min_entry);
}

// Square shape (d, d), d >= 3, rank r >= 4 in one of the three impossible
// rank families.
inline WitnessReport witness_impossible_rank(const SortedSpectrum& lambda, int d,
                                             std::optional<double> alpha = std::nullopt) {
  if (d < 3) throw ShapeError("witness_impossible_rank needs d >= 3");
  const BipartiteShape shape(d, d);
  shape.require_size(lambda.size(), "witness_impossible_rank");
  detail::require_psd(lambda, "witness_impossible_rank");
  const int r = spectrum_rank(lambda);
  if (r < 4) throw PreconditionError("witness_impossible_rank needs rank >= 4 (sufficiency case applies)");
  int u = static_cast<int>(std::floor(std::sqrt(static_cast<double>(r))));
  while ((u + 1) * (u + 1) <= r) ++u;
  while (u * u > r) --u;
  const double dd = d;
  int width = 0, nblocks = 0;
  std::string label;
  if (u * u == r && r < d * d) {
    width = u;
    nblocks = u;
    label = "impossible-rank-square";
  } else if (r < (dd - std::sqrt(dd)) * (dd - std::sqrt(dd)) && r - u * u <= u) {
    int kmax = -1;
    for (int k = 0; k < u; ++k)
      if (r <= (u - k) * (u + k + 1) && u + k + 1 <= d) kmax = k;
    if (kmax < 0) throw PreconditionError("witness_impossible_rank: no admissible configuration");
    width = u + kmax + 1;
    nblocks = u - kmax;
    label = "impossible-rank-near-square";
  } else if (r < (dd - std::sqrt(2 * dd)) * (dd - std::sqrt(2 * dd)) && r - u * u > u) {
    int kmax = -1;
    for (int k = 0; k < u; ++k)
      if (r <= (u - k) * (u + k + 2) && u + k + 2 <= d) kmax = k;
    if (kmax < 0) throw PreconditionError("witness_impossible_rank: no admissible configuration");
    width = u + kmax + 2;
    nblocks = u - kmax;
    label = "impossible-rank-far-square";
  } else {
    throw PreconditionError("witness_impossible_rank: rank " + std::to_string(r) + " fits no impossible-rank case");
  }
  if (width >= d || nblocks < 2)
    throw PreconditionError("witness_impossible_rank: configuration leaves no room for the rotation");
  RVector v = RVector::Zero(shape.total());
  int next = 0;
  for (int b = 0; b < nblocks && next < r; ++b)
    for (int p = 0; p < width && next < r; ++p) v[b * d + p] = lambda[next++];
  const DiagonalArrangement arr(v, shape);
  return detail::finish_witness(label, lambda, arr, width, d, 0.0, v[d], alpha, AlphaRule::half_min_entry);
}

// Shape (2, d): a spectrum outside every qubit-qudit sufficiency case.
inline WitnessReport witness_2xd(const SortedSpectrum& lambda, int d, std::optional<double> alpha = std::nullopt) {
  if (d < 3) throw ShapeError("witness_2xd needs d >= 3");
  const BipartiteShape shape(2, d);
  shape.require_size(lambda.size(), "witness_2xd");
  detail::require_psd(lambda, "witness_2xd");
  if (characterize_2xd(lambda, d).applicable())
    throw PreconditionError("no witness exists: a sufficiency case applies");
  const double thr = default_tolerances().eigen_equality * (1.0 + lambda.max_abs());
  const int N = 2 * d;
  // 1-based lambda_k is lambda[k - 1].
  auto L = [&](int k) { return lambda[k - 1]; };
  const DiagonalArrangement Lam(lambda.values(), shape);
  const int r = spectrum_rank(lambda);
  if (L(d) > L(N - 1) + thr) {
    double lq = L(N - 1);
    for (int k = d + 1; k <= N - 1; ++k)
      if (L(k) < L(d) - thr) {
        lq = L(k);
        break;
      }
    double tail = 0;
    for (int k = d + 1; k <= N - 1; ++k) tail += L(k);
    const double lo = std::max(0.0, L(d) - tail);
    const double hi = L(d) - lq;
    if (hi > lo + thr) return detail::finish_witness("2xd-tail", lambda, Lam, d - 1, N - 2, lo, hi, alpha, AlphaRule::midpoint);
    if (r == d + 1) return witness_rank_band(lambda, shape, 2, alpha);
    if (r >= 4 && r <= d) return witness_low_rank(lambda, shape, alpha);
    throw PreconditionError("witness_2xd: no construction applies");
  }
  const double lam = L(d);
  if (lam <= thr) {
    if (r >= 4 && r <= d) return witness_low_rank(lambda, shape, alpha);
    throw PreconditionError("witness_2xd: no construction applies");
  }
  int q = 0;
  for (int k = 1; k <= N; ++k)
    if (L(k) > lam + thr) q = k;
  if (q < 2 || q >= d) throw PreconditionError("witness_2xd: no construction applies");
  const double A = (L(q) - lam) - (d - 3) * lam - L(N);
  const double lo = std::max(A, 0.0);
  const double hi = q == 2 ? std::min(L(q) - lam, (d - 2) * lam) : L(q) - lam;
  return detail::finish_witness("2xd-flat-tail", lambda, Lam, q - 1, d, lo, hi, alpha, AlphaRule::midpoint);
}

struct DminusOneChain {
  RVector a;
  RVector b;
  RVector c;
};

// sigma is a 0-based permutation of 0..r-1.
inline DminusOneChain chain_d2_minus_1(const RVector& lambda, const std::vector<int>& sigma) {
  const int r = static_cast<int>(lambda.size());
  if (r < 1) throw ShapeError("chain_d2_minus_1: empty vector");
  if (lambda.minCoeff() < 0) throw DomainError("chain_d2_minus_1: entries must be nonnegative");
  if (static_cast<int>(sigma.size()) != r) throw ShapeError("chain_d2_minus_1: permutation length mismatch");
  std::vector<int> check = sigma;
  std::sort(check.begin(), check.end());
  for (int i = 0; i < r; ++i)
    if (check[i] != i) throw DomainError("chain_d2_minus_1: sigma is not a permutation");
  auto ls = [&](int t) { return lambda[sigma[t]]; };
  double S = 0;
  for (int t = 0; t < r - 1; ++t) S += ls(t);
  DminusOneChain out{RVector(r + 2), RVector(r + 2), RVector(r + 2)};
  out.a[0] = S;
  for (int t = 0; t < r; ++t) out.a[1 + t] = ls(t);
  out.a[r + 1] = ls(r - 1);
  if (r == 1) {
    out.b = out.a;
  } else {
    out.b[0] = S;
    out.b[1] = ls(0) + ls(r - 1);
    for (int t = 1; t < r; ++t) out.b[1 + t] = ls(t);
    out.b[r + 1] = 0;
  }
  out.c[0] = lambda.sum();
  for (int t = 0; t < r; ++t) out.c[1 + t] = lambda[t];
  out.c[r + 1] = 0;
  return out;
}

}  // namespace schurtrace

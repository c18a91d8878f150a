#pragma once

#include <string>
#include <vector>

#include "schurtrace/bipartite.hpp"
#include "schurtrace/majorization.hpp"

namespace schurtrace {

inline SortedSpectrum block_sum_spectrum(const SortedSpectrum& lambda, int num_blocks, int block_size) {
  if (num_blocks < 1 || block_size < 1 ||
      lambda.size() != static_cast<Eigen::Index>(num_blocks) * block_size)
    throw ShapeError("block_sum_spectrum: length " + std::to_string(lambda.size()) + " is not " +
                     std::to_string(num_blocks) + "*" + std::to_string(block_size));
  RVector out(num_blocks);
  for (int m = 0; m < num_blocks; ++m) out[m] = lambda.values().segment(m * block_size, block_size).sum();
  return SortedSpectrum::from_unsorted(out);
}

// Majorant of lambda(tr_which[U C U*]) over the unitary orbit.
inline SortedSpectrum single_trace_max(const SortedSpectrum& lambda, const BipartiteShape& s, int which) {
  s.require_size(lambda.size(), "single_trace_max");
  if (which == 2) return block_sum_spectrum(lambda, s.d1(), s.d2());
  if (which == 1) return block_sum_spectrum(lambda, s.d2(), s.d1());
  throw IndexError("single_trace_max: which must be 1 or 2");
}

// Weak majorant of sigma(tr_which[U C V]).
inline SortedSpectrum single_trace_max_sv(const SortedSpectrum& sigma, const BipartiteShape& s, int which) {
  if (!sigma.nonnegative()) throw DomainError("single_trace_max_sv: singular values must be nonnegative");
  return single_trace_max(sigma, s, which);
}

inline SortedSpectrum bell_min_marginal(double trace, int d) {
  if (d < 2) throw ShapeError("bell_min_marginal: d must be >= 2");
  return SortedSpectrum::from_unsorted(RVector::Constant(d, trace / d));
}

inline JointMarginalSpectrum joint_marginals_of_diagonal(const DiagonalArrangement& c) {
  const int d1 = c.shape.d1(), d2 = c.shape.d2();
  JointMarginalSpectrum j{RVector::Zero(d2), RVector::Zero(d1)};
  for (int s = 0; s < d1; ++s)
    for (int i = 0; i < d2; ++i) {
      j.first[i] += c.values[s * d2 + i];
      j.second[s] += c.values[s * d2 + i];
    }
  return j;
}

inline DiagonalArrangement canonical_block_sort(const DiagonalArrangement& c) {
  DiagonalArrangement out = c;
  const int d2 = c.shape.d2();
  for (int b = 0; b < c.shape.d1(); ++b) {
    double* p = out.values.data() + b * d2;
    std::stable_sort(p, p + d2, std::greater<double>());
  }
  return out;
}

// entry(k1, k2) bounds sum_{i<=k1} lambda^(1)_i + sum_{j<=k2} lambda^(2)_j.
inline RMatrix joint_envelope(const SortedSpectrum& lambda, const BipartiteShape& s) {
  s.require_size(lambda.size(), "joint_envelope");
  const int d1 = s.d1(), d2 = s.d2();
  RVector prefix(lambda.size() + 1);
  prefix[0] = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) prefix[i + 1] = prefix[i] + lambda[i];
  RMatrix E(d2 + 1, d1 + 1);
  for (int k1 = 0; k1 <= d2; ++k1)
    for (int k2 = 0; k2 <= d1; ++k2) E(k1, k2) = prefix[k1 * d1 + k2 * d2 - k1 * k2] + prefix[k1 * k2];
  return E;
}

inline int spectrum_rank(const SortedSpectrum& lambda, const Tolerances& tol = default_tolerances()) {
  const double thr = tol.rank_relative * lambda.max_abs();
  int r = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (std::abs(lambda[i]) > thr) ++r;
  return r;
}

struct SufficiencyVerdict {
  std::vector<std::string> cases;
  std::vector<DiagonalArrangement> candidates;

  bool applicable() const { return !cases.empty(); }
};

namespace detail {

// lambda[from..to] (0-based, inclusive) equal within tol * (1 + max|lambda|).
inline bool flat_range(const SortedSpectrum& lambda, int from, int to, double tol) {
  if (from >= to) return true;
  return lambda[from] - lambda[to] <= tol * (1.0 + lambda.max_abs());
}

inline void add_candidate(SufficiencyVerdict& v, const DiagonalArrangement& c) {
  for (const auto& e : v.candidates)
    if (e.shape == c.shape && e.values == c.values) return;
  v.candidates.push_back(c);
}

}  // namespace detail

// Flat window of length d^2 - 3 starting at 1-based position n in {1,..,4}.
inline SufficiencyVerdict check_sufficient_square(const SortedSpectrum& lambda, int d,
                                                  double tol = default_tolerances().eigen_equality) {
  const BipartiteShape s(d, d);
  s.require_size(lambda.size(), "check_sufficient_square");
  SufficiencyVerdict v;
  for (int n = 1; n <= 4; ++n)
    if (detail::flat_range(lambda, n - 1, d * d - 5 + n, tol)) v.cases.push_back("square-flat-window-n" + std::to_string(n));
  if (v.applicable()) v.candidates.emplace_back(lambda.values(), s);
  return v;
}

inline SufficiencyVerdict check_sufficient_general(const SortedSpectrum& lambda, const BipartiteShape& s,
                                                   double tol = default_tolerances().eigen_equality) {
  if (s.d1() >= s.d2()) throw ShapeError("check_sufficient_general needs d1 < d2");
  s.require_size(lambda.size(), "check_sufficient_general");
  SufficiencyVerdict v;
  const int N = s.total();
  if (detail::flat_range(lambda, 1, N - 2, tol)) v.cases.push_back("flat-interior");
  if (spectrum_rank(lambda) <= 3) v.cases.push_back("rank-at-most-3");
  if (v.applicable()) v.candidates.emplace_back(lambda.values(), s);
  return v;
}

// Shape (2, d), positive semidefinite spectrum.
inline SufficiencyVerdict characterize_2xd(const SortedSpectrum& lambda, int d,
                                           double tol = default_tolerances().eigen_equality) {
  if (d < 3) throw ShapeError("characterize_2xd needs d > 2");
  const BipartiteShape s(2, d);
  s.require_size(lambda.size(), "characterize_2xd");
  const double neg = default_tolerances().negativity * std::max(1.0, lambda.max_abs());
  if (!lambda.nonnegative(neg)) throw DomainError("characterize_2xd needs a nonnegative spectrum");
  const int r = spectrum_rank(lambda);
  const int N = 2 * d;
  const double thr = tol * (1.0 + lambda.max_abs());
  const DiagonalArrangement Lam(lambda.values(), s);
  SufficiencyVerdict v;
  if (r <= 3) {
    v.cases.push_back("case1-rank-at-most-3");
    detail::add_candidate(v, Lam);
  }
  const bool full = r >= N - 1;
  if (full && detail::flat_range(lambda, 1, N - 2, tol)) {
    v.cases.push_back("case2-flat-interior");
    detail::add_candidate(v, Lam);
  }
  if (full && detail::flat_range(lambda, 2, N - 2, tol) &&
      lambda[1] >= 2.0 * (d - 2) * lambda[2] + lambda[N - 1] - thr) {
    v.cases.push_back("case3-dominant-second");
    detail::add_candidate(v, Lam);
    RVector swapped = lambda.values();
    std::swap(swapped[1], swapped[d]);
    detail::add_candidate(v, DiagonalArrangement(swapped, s));
  }
  if (d == 3 && r == 5 && detail::flat_range(lambda, 2, 4, tol)) {
    v.cases.push_back("case4-d3-rank5");
    detail::add_candidate(v, Lam);
  }
  return v;
}

// Every applicable sufficiency result for the shape; candidates are given
// on the requested shape (flipped back when d1 > d2).
inline SufficiencyVerdict sufficiency_verdict(const SortedSpectrum& lambda, const BipartiteShape& s,
                                              double tol = default_tolerances().eigen_equality) {
  s.require_size(lambda.size(), "sufficiency_verdict");
  if (s.square()) return check_sufficient_square(lambda, s.d1(), tol);
  const bool flip = s.d1() > s.d2();
  const BipartiteShape w = flip ? s.swapped() : s;
  SufficiencyVerdict v = check_sufficient_general(lambda, w, tol);
  const double neg = default_tolerances().negativity * std::max(1.0, lambda.max_abs());
  if (w.d1() == 2 && lambda.nonnegative(neg)) {
    const SufficiencyVerdict q = characterize_2xd(lambda, w.d2(), tol);
    for (const auto& c : q.cases) v.cases.push_back(c);
    for (const auto& c : q.candidates) detail::add_candidate(v, c);
  }
  if (flip)
    for (auto& c : v.candidates) c = flip_arrangement(c);
  return v;
}

enum class RankVerdict { possible, impossible, unresolved };

inline const char* to_string(RankVerdict v) {
  switch (v) {
    case RankVerdict::possible: return "possible";
    case RankVerdict::impossible: return "impossible";
    default: return "unresolved";
  }
}

// Whether a flat nonzero spectrum of rank r on (d, d) always has a diagonal
// majorant on its orbit.
inline RankVerdict necessary_rank_filter(int d, int r) {
  if (d < 3) throw ShapeError("necessary_rank_filter needs d >= 3");
  if (r < 1 || r > d * d) throw IndexError("necessary_rank_filter: rank out of range");
  if (r <= 3 || r >= d * d - 3) return RankVerdict::possible;
  if (d >= 24) return RankVerdict::impossible;
  if (r % d == 0 && r / d >= 2 && r / d <= d - 2) return RankVerdict::unresolved;
  return RankVerdict::impossible;
}

// (Lambda^(1)_1, Lambda^(2)_1, ..., Lambda^(1)_n, Lambda^(2)_n); qubit 1 is
// the most significant bit of the spectrum index.
inline RVector nqubit_bound_vector(const SortedSpectrum& lambda, int n) {
  if (n < 1 || n > 20 || lambda.size() != (Eigen::Index(1) << n))
    throw ShapeError("nqubit_bound_vector: length must be 2^n");
  const double total = lambda.sum();
  RVector out(2 * n);
  for (int j = 0; j < n; ++j) {
    const Eigen::Index mask = Eigen::Index(1) << (n - 1 - j);
    double zero = 0;
    for (Eigen::Index x = 0; x < lambda.size(); ++x)
      if (!(x & mask)) zero += lambda[x];
    out[2 * j] = zero;
    out[2 * j + 1] = total - zero;
  }
  return out;
}

}  // namespace schurtrace

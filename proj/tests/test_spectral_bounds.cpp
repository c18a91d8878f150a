#include <gtest/gtest.h>

#include "oracles.hpp"
#include "schurtrace/functionals.hpp"
#include "schurtrace/spectral_bounds.hpp"

using namespace schurtrace;

namespace {

SortedSpectrum S(std::vector<double> x) { return SortedSpectrum::from_unsorted(x); }
RVector v(std::vector<double> x) { return to_rvector(x); }

bool has_case(const SufficiencyVerdict& v, const std::string& c) {
  return std::find(v.cases.begin(), v.cases.end(), c) != v.cases.end();
}

}  // namespace

TEST(BlockSum, Examples) {
  EXPECT_EQ(block_sum_spectrum(S({6, 5, 4, 3, 2, 1}), 2, 3).values(), v({15, 6}));
  EXPECT_EQ(block_sum_spectrum(S({6, 5, 4, 3, 2, 1}), 3, 2).values(), v({11, 7, 3}));
  EXPECT_EQ(block_sum_spectrum(S({2, 2, 2, 2}), 2, 2).values(), v({4, 4}));
  EXPECT_THROW(block_sum_spectrum(S({1, 2, 3}), 2, 2), ShapeError);
}

TEST(SingleTrace, Examples) {
  EXPECT_EQ(single_trace_max(S({4, 3, 2, 1}), BipartiteShape(2, 2), 2).values(), v({7, 3}));
  EXPECT_EQ(single_trace_max(S({6, 5, 4, 3, 2, 1}), BipartiteShape(2, 3), 1).values(), v({11, 7, 3}));
}

TEST(SingleTrace, SixFactorialBruteForce) {
  // Among all diagonal arrangements, the tr_1 spectrum that majorizes every
  // other one is (11, 7, 3).
  std::vector<double> lam{1, 2, 3, 4, 5, 6};
  std::vector<std::vector<double>> all;
  do {
    auto j = oracle::diagonal_joint(lam, 2, 3);
    all.emplace_back(j.begin(), j.begin() + 3);
  } while (std::next_permutation(lam.begin(), lam.end()));
  ASSERT_EQ(all.size(), 720u);
  std::vector<double> top;
  for (const auto& a : all) {
    bool dominates = true;
    for (const auto& b : all) dominates = dominates && oracle::majorized(b, a, 0);
    if (dominates) {
      top = a;
      break;
    }
  }
  std::sort(top.begin(), top.end(), std::greater<double>());
  EXPECT_EQ(top, (std::vector<double>{11, 7, 3}));
  EXPECT_EQ(to_std(single_trace_max(S({6, 5, 4, 3, 2, 1}), BipartiteShape(2, 3), 1).values()), top);
}

TEST(SingleTrace, HaarMonteCarlo) {
  std::mt19937_64 rng(41);
  for (auto [d1, d2] : {std::pair{2, 3}, {3, 2}, {3, 3}}) {
    const BipartiteShape s(d1, d2);
    for (int t = 0; t < 500; ++t) {
      const oracle::CMat H = oracle::random_hermitian(d1 * d2, rng);
      const auto lam = oracle::hermitian_eigs(H);
      for (int which : {1, 2}) {
        const RVector y = single_trace_max(S(lam), s, which).values();
        EXPECT_TRUE(oracle::majorized(oracle::hermitian_eigs(oracle::partial_trace(H, d1, d2, which)), to_std(y),
                                      1e-9 * std::max(1.0, y.cwiseAbs().sum())));
      }
    }
  }
}

TEST(SingleTraceSv, DirectSumExample) {
  oracle::CMat C = oracle::CMat::Zero(4, 4);
  C(0, 1) = 1;
  C(1, 0) = 1;
  C(1, 1) = 1;
  C(2, 3) = 1;
  C(3, 2) = 2;
  C(3, 3) = 1;
  const SortedSpectrum sig = singular_values(C);
  const std::vector<double> expect{std::sqrt(3 + std::sqrt(5.0)), (1 + std::sqrt(5.0)) / 2, std::sqrt(3 - std::sqrt(5.0)),
                                   (std::sqrt(5.0) - 1) / 2};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(sig[i], expect[i], 1e-12);
  const SortedSpectrum y = single_trace_max_sv(sig, BipartiteShape(2, 2), 2);
  EXPECT_NEAR(y[0], expect[0] + expect[1], 1e-12);
  EXPECT_NEAR(y[1], expect[2] + expect[3], 1e-12);
  EXPECT_NEAR(y[0], 3.9062, 1e-4);
  EXPECT_NEAR(y[1], 1.4920, 1e-4);
  EXPECT_EQ(single_trace_max_sv(S({0, 0, 0, 0}), BipartiteShape(2, 2), 1).values(), RVector::Zero(2));
  EXPECT_THROW(single_trace_max_sv(S({1, -1, 0, 0}), BipartiteShape(2, 2), 1), DomainError);
}

TEST(SingleTraceSv, WeakMajorizationMonteCarlo) {
  std::mt19937_64 rng(42);
  const BipartiteShape s(2, 3);
  for (int t = 0; t < 500; ++t) {
    oracle::CMat C = oracle::random_hermitian(6, rng) + oracle::C(0, 1) * oracle::random_hermitian(6, rng);
    const SortedSpectrum sig = S(oracle::svals(C));
    for (int which : {1, 2}) {
      const RVector y = single_trace_max_sv(sig, s, which).values();
      EXPECT_TRUE(oracle::majorized(oracle::svals(oracle::partial_trace(C, 2, 3, which)), to_std(y),
                                    1e-9 * y.sum(), true));
    }
  }
}

TEST(SingleTraceSv, DeterminantFailsInEvenDimension) {
  oracle::CMat C = oracle::CMat::Zero(4, 4);
  C(0, 1) = 1;
  C(1, 0) = 1;
  C(1, 1) = 1;
  C(2, 3) = 1;
  C(3, 2) = 2;
  C(3, 3) = 1;
  const oracle::CMat t2 = oracle::partial_trace(C, 2, 2, 2);
  const auto abs_t2 = oracle::svals(t2);  // spectrum of |tr_2 C|
  const double det_abs = abs_t2[0] * abs_t2[1];
  EXPECT_NEAR(det_abs, 1.0, 1e-12);
  const RVector y = single_trace_max_sv(singular_values(C), BipartiteShape(2, 2), 2).values();
  EXPECT_GT(evaluate(FunctionalId::determinant(), y), det_abs);
}

TEST(SingleTrace, NormImprovements) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.1, 1);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> s{u(rng), u(rng), u(rng), u(rng)};
    std::sort(s.begin(), s.end(), std::greater<double>());
    const RVector y = single_trace_max_sv(S(s), BipartiteShape(2, 2), 2).values();
    double tot = 0;
    for (double x : s) tot += x * x;
    EXPECT_LT(y.squaredNorm(), 2 * tot);
  }
  // Ky Fan: d2 k < r
  for (int t = 0; t < 200; ++t) {
    const int d1 = 3, d2 = 2, k = 1 + t % 2, r = d2 * k + 1 + t % 2;
    std::vector<double> lam(d1 * d2, 0.0);
    for (int i = 0; i < r; ++i) lam[i] = u(rng);
    const SortedSpectrum L = S(lam);
    const double lhs = evaluate(FunctionalId::ky_fan(k), single_trace_max(L, BipartiteShape(d1, d2), 2).values());
    EXPECT_LT(lhs, double(r) / k * evaluate(FunctionalId::ky_fan(k), L.values()));
  }
}

TEST(BellMinimum, Examples) {
  EXPECT_EQ(bell_min_marginal(1.0, 3).values(), RVector::Constant(3, 1.0 / 3));
  std::mt19937_64 rng(44);
  for (int d : {2, 3}) {
    for (int t = 0; t < 100; ++t) {
      const oracle::CMat P = oracle::random_psd(d * d, rng);
      const double tr = P.trace().real();
      const RVector lam = oracle::as_vec(oracle::hermitian_eigs(P));
      const auto bell = oracle::hermitian_eigs(oracle::partial_trace(bell_conjugate(lam, d), d, d, 2));
      for (double b : bell) EXPECT_NEAR(b, tr / d, 1e-10 * std::max(1.0, tr));
      EXPECT_TRUE(majorizes(oracle::as_vec(oracle::hermitian_eigs(oracle::partial_trace(P, d, d, 2))),
                            bell_min_marginal(tr, d).values(), 1e-9));
    }
  }
}

TEST(JointMarginals, Examples) {
  const auto j = joint_marginals_of_diagonal(DiagonalArrangement(v({4, 3, 2, 1}), BipartiteShape(2, 2)));
  EXPECT_EQ(j.first, v({6, 4}));
  EXPECT_EQ(j.second, v({7, 3}));
  const auto w = joint_marginals_of_diagonal(DiagonalArrangement(v({10, 1.75, 1, 1.75, 1, 1}), BipartiteShape(2, 3)));
  EXPECT_EQ(w.first, v({11.75, 2.75, 2}));
  EXPECT_EQ(w.second, v({12.75, 3.75}));
  std::mt19937_64 rng(45);
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    RVector c(12);
    for (int i = 0; i < 12; ++i) c[i] = g(rng);
    const auto jj = joint_marginals_of_diagonal(DiagonalArrangement(c, BipartiteShape(3, 4)));
    EXPECT_NEAR(jj.first.sum(), c.sum(), 1e-12);
    EXPECT_NEAR(jj.second.sum(), c.sum(), 1e-12);
    EXPECT_EQ(to_std(jj.concatenated()), oracle::diagonal_joint(to_std(c), 3, 4));
  }
}

TEST(JointMarginals, CanonicalBlockSort) {
  const BipartiteShape s(2, 3);
  const DiagonalArrangement a(v({6, 1, 4, 5, 3, 2}), s);
  const DiagonalArrangement b = canonical_block_sort(a);
  EXPECT_EQ(b.values, v({6, 4, 1, 5, 3, 2}));
  EXPECT_EQ(canonical_block_sort(b).values, b.values);
  EXPECT_EQ(joint_marginals_of_diagonal(a).second, joint_marginals_of_diagonal(b).second);
}

TEST(JointEnvelope, Examples) {
  const SortedSpectrum lam = S({6, 5, 4, 3, 2, 1});
  const BipartiteShape s(2, 3);
  const RMatrix E = joint_envelope(lam, s);
  EXPECT_EQ(E(1, 1), 24);
  EXPECT_EQ(E(0, 1), 15);
  EXPECT_EQ(E(0, 2), 21);
  // equals the best diagonal arrangement, by brute force over 6!
  std::vector<double> p{1, 2, 3, 4, 5, 6};
  RMatrix best = RMatrix::Constant(4, 3, -1e300);
  do {
    const auto j = oracle::diagonal_joint(p, 2, 3);
    std::vector<double> f(j.begin(), j.begin() + 3), g(j.begin() + 3, j.end());
    for (int k1 = 0; k1 <= 3; ++k1)
      for (int k2 = 0; k2 <= 2; ++k2) best(k1, k2) = std::max(best(k1, k2), oracle::top_k(f, k1) + oracle::top_k(g, k2));
  } while (std::next_permutation(p.begin(), p.end()));
  EXPECT_LT((best - E).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(JointEnvelope, HaarMonteCarlo) {
  std::mt19937_64 rng(46);
  const BipartiteShape s(2, 3);
  for (int t = 0; t < 300; ++t) {
    const oracle::CMat H = oracle::random_hermitian(6, rng);
    const RMatrix E = joint_envelope(S(oracle::hermitian_eigs(H)), s);
    const auto f = oracle::hermitian_eigs(oracle::partial_trace(H, 2, 3, 1));
    const auto g = oracle::hermitian_eigs(oracle::partial_trace(H, 2, 3, 2));
    for (int k1 = 0; k1 <= 3; ++k1)
      for (int k2 = 0; k2 <= 2; ++k2) EXPECT_LE(oracle::top_k(f, k1) + oracle::top_k(g, k2), E(k1, k2) + 1e-9);
  }
}

TEST(Sufficiency, SquareExamples) {
  const SufficiencyVerdict a = check_sufficient_square(S({5, 1, 1, 1, 1, 1, 1, 0, -1}), 3);
  EXPECT_TRUE(has_case(a, "square-flat-window-n2"));
  ASSERT_EQ(a.candidates.size(), 1u);
  EXPECT_EQ(a.candidates[0].values, v({5, 1, 1, 1, 1, 1, 1, 0, -1}));
  EXPECT_FALSE(check_sufficient_square(S({9, 8, 7, 6, 5, 4, 3, 2, 1}), 3).applicable());
  for (int d : {2, 3, 4}) {
    std::vector<double> lam(d * d, 0.0);
    lam[0] = 3;
    lam[1] = 2;
    lam[2] = 0.5;
    EXPECT_TRUE(has_case(check_sufficient_square(S(lam), d), "square-flat-window-n4")) << d;
  }
}

TEST(Sufficiency, GeneralExamples) {
  const BipartiteShape s(2, 3);
  EXPECT_TRUE(check_sufficient_general(S({7, 2, 2, 2, 2, 0}), s).applicable());
  EXPECT_TRUE(has_case(check_sufficient_general(S({5, 3, 1, 0, 0, 0}), s), "rank-at-most-3"));
  EXPECT_FALSE(check_sufficient_general(S({6, 5, 4, 3, 2, 1}), s).applicable());
  EXPECT_THROW(check_sufficient_general(S({6, 5, 4, 3, 2, 1}), BipartiteShape(3, 2)), ShapeError);
  // d1 > d2 goes through the flip
  const SufficiencyVerdict f = sufficiency_verdict(S({7, 2, 2, 2, 2, 0}), BipartiteShape(3, 2));
  ASSERT_TRUE(f.applicable());
  EXPECT_EQ(f.candidates[0].shape, BipartiteShape(3, 2));
}

TEST(Sufficiency, QubitQuditExamples) {
  const SufficiencyVerdict a = characterize_2xd(S({10, 5, 1, 1, 1, 0}), 3);
  EXPECT_TRUE(has_case(a, "case3-dominant-second"));
  EXPECT_TRUE(has_case(a, "case4-d3-rank5"));
  bool has_swap = false;
  for (const auto& c : a.candidates) has_swap = has_swap || c.values == v({10, 1, 1, 5, 1, 0});
  EXPECT_TRUE(has_swap);
  EXPECT_FALSE(characterize_2xd(S({10, 2.5, 1, 1, 1, 1}), 3).applicable());
  EXPECT_TRUE(has_case(characterize_2xd(S(std::vector<double>(8, 1.0 / 8)), 4), "case2-flat-interior"));
  EXPECT_THROW(characterize_2xd(S({1, 1, 1, 1, 1, -1}), 3), DomainError);
}

TEST(Sufficiency, CandidatesMajorizeOrbit) {
  std::mt19937_64 rng(47);
  struct Case {
    BipartiteShape s;
    std::vector<double> lam;
  };
  const std::vector<Case> cases{{{3, 3}, {5, 1, 1, 1, 1, 1, 1, 0, -1}},
                                {{2, 3}, {7, 2, 2, 2, 2, 0}},
                                {{2, 3}, {5, 3, 1, 0, 0, 0}},
                                {{2, 3}, {10, 5, 1, 1, 1, 0}},
                                {{3, 2}, {4, -1, -1, -1, -1, -2}}};
  for (const auto& c : cases) {
    const SufficiencyVerdict v = sufficiency_verdict(S(c.lam), c.s);
    ASSERT_TRUE(v.applicable());
    for (int t = 0; t < 200; ++t) {
      const oracle::CMat U = oracle::random_unitary(c.s.total(), rng);
      const oracle::CMat C = U * to_rvector(c.lam).cast<Complex>().asDiagonal() * U.adjoint();
      auto x = oracle::hermitian_eigs(oracle::partial_trace(C, c.s.d1(), c.s.d2(), 1));
      const auto x2 = oracle::hermitian_eigs(oracle::partial_trace(C, c.s.d1(), c.s.d2(), 2));
      x.insert(x.end(), x2.begin(), x2.end());
      bool ok = false;
      for (const auto& cand : v.candidates)
        ok = ok || oracle::majorized(x, oracle::diagonal_joint(to_std(cand.values), c.s.d1(), c.s.d2()), 1e-9 * 40);
      EXPECT_TRUE(ok);
    }
  }
}

TEST(RankFilter, Examples) {
  EXPECT_EQ(necessary_rank_filter(24, 5), RankVerdict::impossible);
  EXPECT_EQ(necessary_rank_filter(4, 8), RankVerdict::unresolved);
  EXPECT_EQ(necessary_rank_filter(5, 3), RankVerdict::possible);
  EXPECT_EQ(necessary_rank_filter(3, 4), RankVerdict::impossible);
  EXPECT_THROW(necessary_rank_filter(2, 3), ShapeError);
}

TEST(QubitBound, Examples) {
  const RVector y = nqubit_bound_vector(S({8 / 36.0, 7 / 36.0, 6 / 36.0, 5 / 36.0, 4 / 36.0, 3 / 36.0, 2 / 36.0, 1 / 36.0}), 3);
  const RVector expect = v({26, 10, 22, 14, 20, 16}) / 36.0;
  EXPECT_LT((y - expect).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(nqubit_bound_vector(S(std::vector<double>(16, 0.5)), 4), RVector::Constant(8, 4.0));
  const SortedSpectrum l4 = S({4, 3, 2, 1});
  const auto j = joint_marginals_of_diagonal(DiagonalArrangement(l4.values(), BipartiteShape(2, 2)));
  const RVector q = nqubit_bound_vector(l4, 2);
  EXPECT_EQ(q, v({j.second[0], j.second[1], j.first[0], j.first[1]}));
  EXPECT_THROW(nqubit_bound_vector(l4, 3), ShapeError);
}

#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "schurtrace/spectral_bounds.hpp"

namespace schurtrace {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of trial `trial` in stream `stream` derived from the master seed.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t trial) {
  return splitmix64(splitmix64(splitmix64(master) ^ stream) ^ trial);
}

inline std::uint64_t stream_id(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

struct TrialOutcome {
  double excess;  // largest normalized prefix excess; <= tol means satisfied
  bool violated;
};

struct ClaimResult {
  std::string claim;
  std::string instance;  // shape / family label
  std::size_t trials = 0;
  std::size_t violations = 0;
  double max_excess = -std::numeric_limits<double>::infinity();
};

// Runs trial(seed) for trial indices 0..n-1 on a thread pool. The
// aggregate does not depend on the thread count.
inline ClaimResult run_trials(const std::string& claim, const std::string& instance, std::size_t n,
                              std::uint64_t master, const std::function<TrialOutcome(std::uint64_t)>& trial,
                              unsigned threads = 0) {
  const std::uint64_t stream = stream_id(claim + "/" + instance);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::vector<ClaimResult> part(threads);
  std::vector<std::exception_ptr> err(threads);
  auto work = [&](unsigned tid) {
    try {
      for (std::size_t t = tid; t < n; t += threads) {
        const TrialOutcome o = trial(trial_seed(master, stream, t));
        ++part[tid].trials;
        if (o.violated) ++part[tid].violations;
        part[tid].max_excess = std::max(part[tid].max_excess, o.excess);
      }
    } catch (...) {
      err[tid] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned tid = 1; tid < threads; ++tid) pool.emplace_back(work, tid);
  work(0);
  for (auto& th : pool) th.join();
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
  ClaimResult out{claim, instance, 0, 0, -std::numeric_limits<double>::infinity()};
  for (const auto& p : part) {
    out.trials += p.trials;
    out.violations += p.violations;
    out.max_excess = std::max(out.max_excess, p.max_excess);
  }
  return out;
}

namespace detail {

inline TrialOutcome majorization_outcome(const RVector& y, const RVector& x, double tol, bool weak = false) {
  const MajorizationGap g = majorization_gap(y, x);
  const double scale = majorization_scale(y);
  const double ex = weak ? g.prefix_excess : std::max(g.prefix_excess, g.total_gap);
  const bool ok = weak ? weakly_majorizes(y, x, tol) : majorizes(y, x, tol);
  return {ex / scale, !ok};
}

inline TrialOutcome worst(TrialOutcome a, const TrialOutcome& b) {
  a.excess = std::max(a.excess, b.excess);
  a.violated = a.violated || b.violated;
  return a;
}

// Best (smallest excess) candidate: the orbit point only needs one
// majorant among the candidates.
inline TrialOutcome best_candidate(const SufficiencyVerdict& v, const RVector& x, double tol) {
  TrialOutcome best{std::numeric_limits<double>::infinity(), true};
  for (const auto& c : v.candidates) {
    const TrialOutcome o = majorization_outcome(joint_marginals_of_diagonal(c).concatenated(), x, tol);
    if (!o.violated && best.violated) best = o;
    else if (o.violated == best.violated && o.excess < best.excess) best = o;
  }
  return best;
}

inline RVector gaussian_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  RVector v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

inline RVector uniform_vector(int n, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  RVector v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline CMatrix random_complex(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix C(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      C(i, j) = Complex(re, im);
    }
  return C;
}

}  // namespace detail

// Spectrum generators for the sufficiency families. Every generated
// spectrum satisfies the family's hypothesis exactly.
namespace families {

// Flat window lambda_n = ... = lambda_{N-4+n} (1-based n in 1..4).
inline SortedSpectrum square_window(int d, int n, std::mt19937_64& rng) {
  const int N = d * d;
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  const double v = c(rng);
  RVector lam(N);
  for (int i = 0; i < N; ++i) lam[i] = v;
  double acc = v;
  for (int i = n - 2; i >= 0; --i) lam[i] = (acc += u(rng));
  acc = v;
  for (int i = N - 4 + n; i < N; ++i) lam[i] = (acc -= u(rng));
  return SortedSpectrum::from_unsorted(lam);
}

// At most three nonzero eigenvalues; signs (+,+,+), (+,+,-) or (+,-,-).
inline SortedSpectrum low_rank(int N, int negatives, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  RVector lam = RVector::Zero(N);
  for (int i = 0; i < 3; ++i) lam[i] = (i >= 3 - negatives ? -1.0 : 1.0) * u(rng);
  return SortedSpectrum::from_unsorted(lam);
}

// lambda_2 = ... = lambda_{N-1}.
inline SortedSpectrum flat_interior(int N, std::mt19937_64& rng, bool nonnegative) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::uniform_real_distribution<double> c(nonnegative ? 0.2 : -1.0, 1.0);
  const double v = c(rng);
  RVector lam = RVector::Constant(N, v);
  lam[0] = v + u(rng);
  lam[N - 1] = nonnegative ? v * std::uniform_real_distribution<double>(0.0, 1.0)(rng) : v - u(rng);
  return SortedSpectrum::from_unsorted(lam);
}

// Shape (2, d): lambda_3 = ... = lambda_{2d-1} = v and
// lambda_2 >= 2 (d - 2) v + lambda_{2d}.
inline SortedSpectrum dominant_second(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  const int N = 2 * d;
  const double v = u(rng);
  RVector lam = RVector::Constant(N, v);
  lam[N - 1] = v * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  lam[1] = 2.0 * (d - 2) * v + lam[N - 1] + u(rng);
  lam[0] = lam[1] + u(rng);
  return SortedSpectrum::from_unsorted(lam);
}

// d = 3, rank 5, lambda_3 = lambda_4 = lambda_5.
inline SortedSpectrum d3_rank5(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  const double v = u(rng);
  const double b = v + u(rng);
  const double a = b + u(rng);
  return SortedSpectrum::from_unsorted(std::vector<double>{a, b, v, v, v, 0.0});
}

}  // namespace families

inline const std::vector<std::string>& known_claims() {
  static const std::vector<std::string> c{"single-trace",      "singular-trace", "bell-min",
                                          "square-sufficient", "rect-sufficient", "qubit-qudit",
                                          "nqubit",            "operator-majorant"};
  return c;
}

struct CampaignConfig {
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::vector<BipartiteShape> shapes;  // empty: per-claim defaults
  std::vector<int> qubits;             // for nqubit; empty: {3, 4}
  double tolerance = 1e-9;
  std::vector<std::string> claims;     // empty: all
  unsigned threads = 0;
};

struct CampaignReport {
  std::vector<ClaimResult> results;

  std::size_t violations() const {
    std::size_t v = 0;
    for (const auto& r : results) v += r.violations;
    return v;
  }
};

namespace detail {

inline std::vector<BipartiteShape> default_shapes(const std::string& claim) {
  if (claim == "single-trace" || claim == "singular-trace") return {{2, 2}, {2, 3}, {3, 3}, {2, 4}};
  if (claim == "bell-min") return {{2, 2}, {3, 3}, {4, 4}};
  if (claim == "square-sufficient") return {{2, 2}, {3, 3}};
  if (claim == "rect-sufficient") return {{2, 3}, {2, 4}};
  if (claim == "qubit-qudit") return {{2, 3}, {2, 4}};
  if (claim == "operator-majorant") return {{2, 3}, {3, 3}};
  return {};
}

inline bool claim_accepts(const std::string& claim, const BipartiteShape& s) {
  if (claim == "bell-min" || claim == "square-sufficient") return s.square();
  if (claim == "rect-sufficient") return !s.square();
  if (claim == "qubit-qudit") return std::min(s.d1(), s.d2()) == 2 && std::max(s.d1(), s.d2()) >= 3;
  return true;
}

using Trial = std::function<TrialOutcome(std::uint64_t)>;

inline void add(CampaignReport& rep, const CampaignConfig& cfg, const std::string& claim, const std::string& inst,
                const Trial& t) {
  rep.results.push_back(run_trials(claim, inst, cfg.trials, cfg.seed, t, cfg.threads));
}

inline Trial sufficiency_trial(const BipartiteShape& s, std::function<SortedSpectrum(std::mt19937_64&)> gen,
                               double tol) {
  return [s, gen, tol](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const SortedSpectrum lam = gen(rng);
    const SufficiencyVerdict v = sufficiency_verdict(lam, s);
    if (!v.applicable()) throw std::logic_error("generated spectrum is outside its sufficiency family");
    const CMatrix C = haar_conjugate(lam.values(), rng);
    return best_candidate(v, joint_spectrum(C, s).concatenated(), tol);
  };
}

}  // namespace detail

inline void run_claim(CampaignReport& rep, const CampaignConfig& cfg, const std::string& claim) {
  const double tol = cfg.tolerance;
  if (std::find(known_claims().begin(), known_claims().end(), claim) == known_claims().end())
    throw PreconditionError("unknown claim '" + claim + "'");
  if (claim == "nqubit") {
    const std::vector<int> ns = cfg.qubits.empty() ? std::vector<int>{3, 4} : cfg.qubits;
    for (int n : ns) {
      if (n < 2 || n > 10) throw ShapeError("nqubit claim needs 2 <= n <= 10");
      detail::add(rep, cfg, claim, "n=" + std::to_string(n), [n, tol](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        const SortedSpectrum lam = SortedSpectrum::from_unsorted(detail::gaussian_vector(1 << n, rng));
        const CMatrix C = haar_conjugate(lam.values(), rng);
        RVector x(2 * n);
        for (int j = 0; j < n; ++j) x.segment(2 * j, 2) = eigenvalues_hermitian(nqubit_partial_trace(C, n, j)).values();
        return detail::majorization_outcome(nqubit_bound_vector(lam, n), x, tol);
      });
    }
    return;
  }
  std::vector<BipartiteShape> shapes;
  for (const auto& s : cfg.shapes.empty() ? detail::default_shapes(claim) : cfg.shapes)
    if (detail::claim_accepts(claim, s)) shapes.push_back(s);
  if (shapes.empty()) throw ShapeError("claim '" + claim + "' has no applicable shape");

  for (const BipartiteShape& s : shapes) {
    const int N = s.total();
    const std::string sh = s.str();
    if (claim == "single-trace") {
      detail::add(rep, cfg, claim, sh, [s, N, tol](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        const SortedSpectrum lam = SortedSpectrum::from_unsorted(detail::gaussian_vector(N, rng));
        const CMatrix C = haar_conjugate(lam.values(), rng);
        TrialOutcome o{-std::numeric_limits<double>::infinity(), false};
        for (int which : {1, 2})
          o = detail::worst(o, detail::majorization_outcome(single_trace_max(lam, s, which).values(),
                                                            eigenvalues_hermitian(partial_trace(C, s, which)).values(),
                                                            tol));
        return o;
      });
    } else if (claim == "singular-trace") {
      detail::add(rep, cfg, claim, sh, [s, N, tol](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        const CMatrix C = detail::random_complex(N, rng);
        const SortedSpectrum sig = singular_values(C);
        TrialOutcome o{-std::numeric_limits<double>::infinity(), false};
        for (int which : {1, 2})
          o = detail::worst(o, detail::majorization_outcome(single_trace_max_sv(sig, s, which).values(),
                                                            singular_values(partial_trace(C, s, which)).values(), tol,
                                                            true));
        return o;
      });
    } else if (claim == "bell-min") {
      const int d = s.d1();
      detail::add(rep, cfg, claim, sh, [s, d, N, tol](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        const RVector lam = detail::uniform_vector(N, rng);
        const double tr = lam.sum();
        const RVector flat = bell_min_marginal(tr, d).values();
        const RVector bell = eigenvalues_hermitian(partial_trace(bell_conjugate(lam, d), s, 2)).values();
        const double dev = (bell - flat).cwiseAbs().maxCoeff();
        const CMatrix C = haar_conjugate(lam, rng);
        TrialOutcome o = detail::majorization_outcome(eigenvalues_hermitian(partial_trace(C, s, 2)).values(), flat, tol);
        o.excess = std::max(o.excess, dev - 1e-10 * std::max(1.0, tr));
        o.violated = o.violated || dev > 1e-10 * std::max(1.0, tr);
        return o;
      });
    } else if (claim == "square-sufficient") {
      const int d = s.d1();
      for (int n = 1; n <= 4; ++n)
        detail::add(rep, cfg, claim, sh + "/flat-window-n" + std::to_string(n),
                    detail::sufficiency_trial(s, [d, n](std::mt19937_64& r) { return families::square_window(d, n, r); }, tol));
      for (int neg = 0; neg <= 1; ++neg)
        detail::add(rep, cfg, claim, sh + "/rank3-neg" + std::to_string(neg),
                    detail::sufficiency_trial(s, [N, neg](std::mt19937_64& r) { return families::low_rank(N, neg, r); }, tol));
    } else if (claim == "rect-sufficient") {
      detail::add(rep, cfg, claim, sh + "/flat-interior",
                  detail::sufficiency_trial(s, [N](std::mt19937_64& r) { return families::flat_interior(N, r, false); }, tol));
      for (int neg = 0; neg <= 2; ++neg)
        detail::add(rep, cfg, claim, sh + "/rank3-neg" + std::to_string(neg),
                    detail::sufficiency_trial(s, [N, neg](std::mt19937_64& r) { return families::low_rank(N, neg, r); }, tol));
    } else if (claim == "qubit-qudit") {
      const int d = std::max(s.d1(), s.d2());
      detail::add(rep, cfg, claim, sh + "/case1",
                  detail::sufficiency_trial(s, [N](std::mt19937_64& r) { return families::low_rank(N, 0, r); }, tol));
      detail::add(rep, cfg, claim, sh + "/case2",
                  detail::sufficiency_trial(s, [N](std::mt19937_64& r) { return families::flat_interior(N, r, true); }, tol));
      detail::add(rep, cfg, claim, sh + "/case3",
                  detail::sufficiency_trial(s, [d](std::mt19937_64& r) { return families::dominant_second(d, r); }, tol));
      if (d == 3)
        detail::add(rep, cfg, claim, sh + "/case4",
                    detail::sufficiency_trial(s, [](std::mt19937_64& r) { return families::d3_rank5(r); }, tol));
    } else if (claim == "operator-majorant") {
      const int d1 = s.d1(), d2 = s.d2();
      for (int k1 = 0; k1 <= d2; ++k1)
        for (int k2 = 0; k2 <= d1; ++k2) {
          if (k1 == 0 && k2 == 0) continue;
          const std::string inst = sh + "/k1=" + std::to_string(k1) + ",k2=" + std::to_string(k2);
          detail::add(rep, cfg, claim, inst, [=](std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            CMatrix S = CMatrix::Zero(N, N);
            for (int i = 0; i < k1; ++i) {
              CMatrix P = CMatrix::Zero(d2, d2);
              P(i, i) = 1;
              S += kron(haar_unitary(d1, rng), P);
            }
            for (int j = 0; j < k2; ++j) {
              CMatrix Q = CMatrix::Zero(d1, d1);
              Q(j, j) = 1;
              S += kron(Q, haar_unitary(d2, rng));
            }
            RVector v = RVector::Zero(N);
            const int twos = k1 * k2, ones = k1 * d1 + k2 * d2 - 2 * k1 * k2;
            v.head(twos).setConstant(2.0);
            v.segment(twos, ones).setConstant(1.0);
            return detail::majorization_outcome(v, singular_values(S).values(), tol, true);
          });
        }
    }
  }
}

inline CampaignReport run_campaign(const CampaignConfig& cfg) {
  if (cfg.trials < 1) throw PreconditionError("campaign needs at least one trial");
  CampaignReport rep;
  for (const auto& c : cfg.claims.empty() ? known_claims() : cfg.claims) run_claim(rep, cfg, c);
  return rep;
}

}  // namespace schurtrace

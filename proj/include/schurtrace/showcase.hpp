#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "schurtrace/qp.hpp"

namespace schurtrace {

// The 3x3 quantum state spectrum (15,10,5,4,3,3,2,2,1)/45.
inline SortedSpectrum showcase_spectrum() {
  std::vector<double> v{15, 10, 5, 4, 3, 3, 2, 2, 1};
  for (double& x : v) x /= 45.0;
  return SortedSpectrum::from_sorted(to_rvector(v));
}

struct PnormRow {
  double p, rastegin, audenaert, mu1, mu2, mu3;
};

struct RenyiRow {
  double alpha, weak_subadditivity, qp_bound;
};

struct ShowcaseTables {
  SortedSpectrum spectrum;
  // Types I..IV, without and with positivity.
  std::vector<QpTypeResult> free_types;
  std::vector<QpTypeResult> positive_types;
  std::vector<PnormRow> pnorms;
  std::vector<RenyiRow> renyi;
};

// 2 d^{p-1} ||rho||_p^p for both marginals of a (d, d) state.
inline double rastegin_baseline(const SortedSpectrum& lambda, int d, double p) {
  return 2.0 * std::pow(d, p - 1.0) * evaluate(FunctionalId::power_sum(p), lambda.values());
}

// External baseline 1 + ||rho||_p^p.
inline double audenaert_baseline(const SortedSpectrum& lambda, double p) {
  return 1.0 + evaluate(FunctionalId::power_sum(p), lambda.values());
}

namespace detail {

inline std::vector<QpTypeResult> solve_square_types(const SortedSpectrum& lambda, int d, bool positivity) {
  std::vector<QpTypeResult> out;
  for (QpType t : {QpType::I, QpType::II, QpType::III, QpType::IV}) {
    QpTypeResult r;
    r.model = build_qp_square(lambda, t, d, positivity);
    r.solution = solve_qp(r.model);
    if (r.solution.status == QpStatus::optimal) {
      r.mu = expand_mu(r.solution, r.model);
      r.verdict = sufficiency_verdict(*r.mu, r.model.shape);
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline double type_bound(const QpTypeResult& r, const FunctionalId& f) {
  if (!r.mu || !r.verdict.applicable()) throw NumericalError("QP type has no certified mu");
  return qp_bound(f, *r.mu, r.model.shape, r.verdict);
}

}  // namespace detail

inline ShowcaseTables reproduce_showcase() {
  ShowcaseTables t;
  t.spectrum = showcase_spectrum();
  const int d = 3;
  t.free_types = detail::solve_square_types(t.spectrum, d, false);
  t.positive_types = detail::solve_square_types(t.spectrum, d, true);
  for (int i = 0; i <= 90; ++i) {
    const double p = 1.0 + 0.1 * i;
    const FunctionalId f = FunctionalId::power_sum(p);
    t.pnorms.push_back({p, rastegin_baseline(t.spectrum, d, p), audenaert_baseline(t.spectrum, p),
                        detail::type_bound(t.free_types[0], f), detail::type_bound(t.free_types[1], f),
                        detail::type_bound(t.free_types[2], f)});
  }
  for (int i = 1; i <= 90; ++i) {
    const double a = 1.0 + 0.1 * i;
    const FunctionalId f = FunctionalId::renyi(a);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : t.positive_types)
      if (r.mu && r.verdict.applicable()) best = std::max(best, detail::type_bound(r, f));
    if (!std::isfinite(best)) throw NumericalError("no feasible QP type with positivity");
    t.renyi.push_back({a, evaluate(f, t.spectrum.values()) - std::log(3.0), best});
  }
  return t;
}

}  // namespace schurtrace

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "schurtrace/functionals.hpp"
#include "schurtrace/spectral_bounds.hpp"

namespace schurtrace {

enum class QpType { I, II, III, IV, rect };

inline std::string to_string(QpType t) {
  switch (t) {
    case QpType::I: return "I";
    case QpType::II: return "II";
    case QpType::III: return "III";
    case QpType::IV: return "IV";
    default: return "rect";
  }
}

// min x^T diag(objective_diag) x over
//   order_rows x <= 0, maj_rows x >= s, b_eq^T x = eq_rhs (>= in the
//   singular-value variant), optionally x >= 0.
struct QpModel {
  QpType qp_type = QpType::I;
  bool singular_variant = false;
  bool positivity = false;
  BipartiteShape shape{2, 2};
  std::vector<int> pattern;  // multiplicity of each variable in mu
  RVector objective_diag;
  RMatrix order_rows;
  RMatrix maj_rows;
  RVector s;
  RVector b_eq;
  double eq_rhs = 0;

  int variable_count() const { return static_cast<int>(pattern.size()); }

  // All inequalities as G x <= h in the order order, majorization,
  // singular-value total, positivity.
  void inequalities(RMatrix& G, RVector& h, std::vector<std::string>& labels) const {
    const int n = variable_count();
    const int m = static_cast<int>(order_rows.rows() + maj_rows.rows()) + (singular_variant ? 1 : 0) +
                  (positivity ? n : 0);
    G.resize(m, n);
    h.resize(m);
    labels.clear();
    int r = 0;
    for (Eigen::Index i = 0; i < order_rows.rows(); ++i, ++r) {
      G.row(r) = order_rows.row(i);
      h[r] = 0;
      labels.push_back("order:" + std::to_string(i + 1));
    }
    for (Eigen::Index i = 0; i < maj_rows.rows(); ++i, ++r) {
      G.row(r) = -maj_rows.row(i);
      h[r] = -s[i];
      labels.push_back("maj:" + std::to_string(i + 1));
    }
    if (singular_variant) {
      G.row(r) = -b_eq.transpose();
      h[r] = -eq_rhs;
      labels.push_back("total");
      ++r;
    }
    if (positivity)
      for (int i = 0; i < n; ++i, ++r) {
        G.row(r) = -RVector::Unit(n, i).transpose();
        h[r] = 0;
        labels.push_back("pos:" + std::to_string(i + 1));
      }
  }
};

namespace detail {

inline std::vector<int> qp_pattern(QpType t, int N) {
  switch (t) {
    case QpType::I: return {1, 1, 1, N - 3};
    case QpType::II: return {1, 1, N - 3, 1};
    case QpType::III: return {1, N - 3, 1, 1};
    case QpType::IV: return {N - 3, 1, 1, 1};
    default: return {1, N - 2, 1};
  }
}

inline QpModel assemble_qp(const SortedSpectrum& lambda, QpType t, const BipartiteShape& shape, bool positivity) {
  const int N = shape.total();
  shape.require_size(lambda.size(), "QP model");
  QpModel m;
  m.qp_type = t;
  m.shape = shape;
  m.positivity = positivity;
  m.pattern = qp_pattern(t, N);
  const int n = m.variable_count();
  m.objective_diag.resize(n);
  m.b_eq.resize(n);
  for (int i = 0; i < n; ++i) m.objective_diag[i] = m.b_eq[i] = m.pattern[i];
  m.order_rows = RMatrix::Zero(n - 1, n);
  for (int i = 0; i + 1 < n; ++i) {
    m.order_rows(i, i) = -1;
    m.order_rows(i, i + 1) = 1;
  }
  m.maj_rows = RMatrix::Zero(N - 1, n);
  m.s.resize(N - 1);
  double acc = 0;
  for (int k = 1; k <= N - 1; ++k) {
    int before = 0;
    for (int t2 = 0; t2 < n; ++t2) {
      m.maj_rows(k - 1, t2) = std::clamp(k - before, 0, m.pattern[t2]);
      before += m.pattern[t2];
    }
    acc += lambda[k - 1];
    m.s[k - 1] = acc;
  }
  m.eq_rhs = lambda.sum();
  return m;
}

}  // namespace detail

inline QpModel build_qp_square(const SortedSpectrum& lambda, QpType t, int d, bool positivity) {
  if (t == QpType::rect) throw PreconditionError("build_qp_square: use build_qp_rect for the rectangular model");
  return detail::assemble_qp(lambda, t, BipartiteShape(d, d), positivity);
}

inline QpModel build_qp_rect(const SortedSpectrum& lambda, const BipartiteShape& shape, bool positivity) {
  if (shape.d1() >= shape.d2()) throw ShapeError("build_qp_rect needs d1 < d2");
  return detail::assemble_qp(lambda, QpType::rect, shape, positivity);
}

// Weak-majorization variant for singular values: positivity is mandatory
// and the total becomes a lower bound.
inline QpModel build_qp_singular(const SortedSpectrum& sigma, const BipartiteShape& shape, QpType t) {
  if (!sigma.nonnegative()) throw DomainError("build_qp_singular: singular values must be nonnegative");
  if (t == QpType::rect ? shape.d1() >= shape.d2() : !shape.square())
    throw ShapeError("build_qp_singular: QP type does not match the shape");
  QpModel m = detail::assemble_qp(sigma, t, shape, true);
  m.singular_variant = true;
  return m;
}

enum class QpStatus { optimal, infeasible };

struct QpSolution {
  QpStatus status = QpStatus::infeasible;
  RVector x;
  double objective = 0;
  std::vector<int> active_set;  // indices into QpModel::inequalities
  RVector multipliers;          // equality first, then active inequalities
  double kkt_residual = 0;
  double conditioning = 0;      // condition number of the reduced KKT matrix
  bool perturbed = false;
};

namespace detail {

struct KktPoint {
  bool ok = false;
  RVector x;
  RVector nu;
  double cond = 0;
};

inline KktPoint solve_equality_qp(const RVector& Ainv, const RMatrix& K, const RVector& r) {
  KktPoint p;
  const Eigen::Index k = K.rows();
  const Eigen::Index n = Ainv.size();
  if (k == 0) {
    p.ok = true;
    p.x = RVector::Zero(n);
    p.nu = RVector(0);
    p.cond = 1;
    return p;
  }
  Eigen::FullPivLU<RMatrix> lu_k(K);
  lu_k.setThreshold(1e-10);
  if (lu_k.rank() < k) return p;
  const RMatrix M = K * Ainv.asDiagonal() * K.transpose();
  Eigen::JacobiSVD<RMatrix> svd(M);
  const RVector sv = svd.singularValues();
  if (!(sv[k - 1] > 1e-14 * sv[0])) return p;
  p.cond = sv[0] / sv[k - 1];
  p.nu = -2.0 * M.fullPivLu().solve(r);
  p.x = -0.5 * Ainv.asDiagonal() * (K.transpose() * p.nu);
  p.ok = p.x.allFinite();
  return p;
}

template <class F>
void for_each_subset(int m, int max_size, F&& f) {
  std::vector<int> idx;
  for (int size = 0; size <= max_size && size <= m; ++size) {
    idx.resize(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      f(idx);
      int i = size - 1;
      while (i >= 0 && idx[i] == m - size + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
}

// Drops rows that are positive multiples of an earlier row, keeping the
// tighter right-hand side. Returns the kept original indices.
inline std::vector<int> dedupe_rows(const RMatrix& G, const RVector& h) {
  std::vector<int> keep;
  for (int i = 0; i < G.rows(); ++i) {
    const double ni = G.row(i).norm();
    bool merged = false;
    for (int& j : keep) {
      const double nj = G.row(j).norm();
      if ((G.row(i) / ni - G.row(j) / nj).cwiseAbs().maxCoeff() < 1e-12) {
        if (h[i] / ni < h[j] / nj - 1e-15) j = i;
        merged = true;
        break;
      }
    }
    if (!merged) keep.push_back(i);
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

}  // namespace detail

// Exact solve by enumerating active sets; the objective is strictly convex
// so the best feasible face optimum is the global one.
inline QpSolution solve_qp(const QpModel& model, const Tolerances& tol = default_tolerances()) {
  RMatrix G0;
  RVector h0;
  std::vector<std::string> labels;
  model.inequalities(G0, h0, labels);
  const int n = model.variable_count();
  const RVector Ainv = model.objective_diag.cwiseInverse();
  const bool has_eq = !model.singular_variant;
  RMatrix E(has_eq ? 1 : 0, n);
  RVector f(has_eq ? 1 : 0);
  if (has_eq) {
    E.row(0) = model.b_eq.transpose();
    f[0] = model.eq_rhs;
  }
  const std::vector<int> rows = detail::dedupe_rows(G0, h0);
  const int m = static_cast<int>(rows.size());

  auto attempt = [&](double shift, QpSolution& out) -> bool {
    RVector h = h0.array() + shift;
    struct Cand {
      double obj;
      bool dual_ok;
      std::vector<int> set;
      detail::KktPoint p;
    };
    std::optional<Cand> best;
    const int max_size = n - static_cast<int>(E.rows());
    detail::for_each_subset(m, max_size, [&](const std::vector<int>& sub) {
      RMatrix K(E.rows() + static_cast<Eigen::Index>(sub.size()), n);
      RVector r(K.rows());
      if (has_eq) {
        K.row(0) = E.row(0);
        r[0] = f[0];
      }
      for (std::size_t i = 0; i < sub.size(); ++i) {
        K.row(E.rows() + i) = G0.row(rows[sub[i]]);
        r[E.rows() + i] = h[rows[sub[i]]];
      }
      detail::KktPoint p = detail::solve_equality_qp(Ainv, K, r);
      if (!p.ok) return;
      const RVector g = G0 * p.x - h;
      for (Eigen::Index i = 0; i < g.size(); ++i)
        if (g[i] > tol.qp_feasibility * (1.0 + std::abs(h[i]))) return;
      if (has_eq && std::abs((E * p.x - f)[0]) > tol.qp_feasibility * (1.0 + std::abs(f[0]))) return;
      const double obj = p.x.dot(model.objective_diag.asDiagonal() * p.x);
      bool dual_ok = true;
      for (Eigen::Index i = E.rows(); i < p.nu.size(); ++i)
        if (p.nu[i] < -tol.qp_dual * (1.0 + p.nu.cwiseAbs().maxCoeff())) dual_ok = false;
      const double tie = 1e-12 * (1.0 + std::abs(obj));
      if (!best || obj < best->obj - tie || (std::abs(obj - best->obj) <= tie && dual_ok && !best->dual_ok)) {
        std::vector<int> set;
        for (int i : sub) set.push_back(rows[i]);
        best = Cand{obj, dual_ok, set, p};
      }
    });
    if (!best) return false;
    out.status = QpStatus::optimal;
    out.x = best->p.x;
    out.objective = best->obj;
    out.active_set = best->set;
    out.multipliers = best->p.nu;
    out.conditioning = best->p.cond;
    // KKT residual: stationarity, primal, dual and complementarity.
    RMatrix K(E.rows() + static_cast<Eigen::Index>(best->set.size()), n);
    if (has_eq) K.row(0) = E.row(0);
    for (std::size_t i = 0; i < best->set.size(); ++i) K.row(E.rows() + i) = G0.row(best->set[i]);
    double res = (2.0 * model.objective_diag.asDiagonal() * out.x + K.transpose() * out.multipliers)
                     .cwiseAbs()
                     .maxCoeff();
    const RVector g = G0 * out.x - h0;
    res = std::max(res, g.cwiseMax(0.0).maxCoeff());
    if (has_eq) res = std::max(res, std::abs((E * out.x - f)[0]));
    for (std::size_t i = 0; i < best->set.size(); ++i) {
      const double nu = out.multipliers[E.rows() + i];
      res = std::max(res, std::max(0.0, -nu));
      res = std::max(res, std::abs(nu * g[best->set[i]]));
    }
    out.kkt_residual = res;
    return true;
  };

  // Phase 1: is there any vertex of the feasible polyhedron?
  auto has_vertex = [&]() {
    bool found = false;
    const int need = n - static_cast<int>(E.rows());
    detail::for_each_subset(m, need, [&](const std::vector<int>& sub) {
      if (found || static_cast<int>(sub.size()) != need) return;
      RMatrix K(n, n);
      RVector r(n);
      if (has_eq) {
        K.row(0) = E.row(0);
        r[0] = f[0];
      }
      for (std::size_t i = 0; i < sub.size(); ++i) {
        K.row(E.rows() + i) = G0.row(rows[sub[i]]);
        r[E.rows() + i] = h0[rows[sub[i]]];
      }
      Eigen::FullPivLU<RMatrix> lu(K);
      if (lu.rank() < n) return;
      const RVector x = lu.solve(r);
      const RVector g = G0 * x - h0;
      for (Eigen::Index i = 0; i < g.size(); ++i)
        if (g[i] > tol.qp_feasibility * (1.0 + std::abs(h0[i]))) return;
      found = true;
    });
    return found;
  };

  QpSolution sol;
  sol.x = RVector::Zero(n);
  if (attempt(0.0, sol)) return sol;
  if (!has_vertex()) return sol;
  sol.perturbed = true;
  if (attempt(1e-12, sol)) return sol;
  throw NumericalError("solve_qp: feasible polyhedron but no KKT point found");
}

inline SortedSpectrum expand_mu(const QpSolution& sol, const QpModel& model) {
  if (sol.status != QpStatus::optimal) throw PreconditionError("expand_mu: QP is infeasible");
  RVector mu(model.shape.total());
  int k = 0;
  for (int t = 0; t < model.variable_count(); ++t)
    for (int c = 0; c < model.pattern[t]; ++c) mu[k++] = sol.x[t];
  return SortedSpectrum::from_unsorted(mu);
}

// Uniform bound of f over lambda^(1,2) on the orbit of any C whose spectrum
// is majorized by mu: max over candidates for Schur-convex f, min for
// Schur-concave f. With weak = true (singular-value variant) only monotone
// Schur-convex f are accepted.
inline double qp_bound(const FunctionalId& f, const SortedSpectrum& mu, const BipartiteShape& shape,
                       const SufficiencyVerdict& cases, bool weak = false) {
  shape.require_size(mu.size(), "qp_bound");
  if (!cases.applicable()) throw PreconditionError("qp_bound: mu is not certified by any sufficiency case");
  if (weak && !f.monotone_schur_convex())
    throw PreconditionError("qp_bound: weak majorization certifies only monotone Schur-convex functionals");
  const bool convex = f.curvature() == Curvature::schur_convex;
  double best = convex ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  for (const auto& c : cases.candidates) {
    const double v = evaluate(f, joint_marginals_of_diagonal(c).concatenated());
    best = convex ? std::max(best, v) : std::min(best, v);
  }
  return best;
}

struct QpTypeResult {
  QpModel model;
  QpSolution solution;
  std::optional<SortedSpectrum> mu;
  SufficiencyVerdict verdict;
  std::optional<double> bound;
};

struct QpBoundReport {
  std::vector<QpTypeResult> per_type;
  std::optional<std::size_t> best;  // index into per_type
};

inline std::vector<QpType> applicable_qp_types(const BipartiteShape& shape) {
  if (shape.square()) return {QpType::I, QpType::II, QpType::III, QpType::IV};
  return {QpType::rect};
}

// Solves each requested QP type and keeps the tightest certified bound:
// smallest for Schur-convex f (upper bounds), largest for Schur-concave f.
inline QpBoundReport qp_best_bound(const FunctionalId& f, const SortedSpectrum& lambda, const BipartiteShape& shape,
                                   const std::vector<QpType>& types, bool positivity, bool singular = false) {
  const bool flip = shape.d1() > shape.d2();
  const BipartiteShape w = flip ? shape.swapped() : shape;
  const bool convex = f.curvature() == Curvature::schur_convex;
  QpBoundReport rep;
  for (QpType t : types) {
    QpTypeResult r;
    if (singular)
      r.model = build_qp_singular(lambda, w, t);
    else
      r.model = t == QpType::rect ? build_qp_rect(lambda, w, positivity) : build_qp_square(lambda, t, w.d1(), positivity);
    r.solution = solve_qp(r.model);
    if (r.solution.status == QpStatus::optimal) {
      r.mu = expand_mu(r.solution, r.model);
      r.verdict = sufficiency_verdict(*r.mu, w);
      if (r.verdict.applicable()) r.bound = qp_bound(f, *r.mu, w, r.verdict, singular);
    }
    rep.per_type.push_back(std::move(r));
    const auto& last = rep.per_type.back();
    if (last.bound) {
      if (!rep.best) {
        rep.best = rep.per_type.size() - 1;
      } else {
        const double b = *rep.per_type[*rep.best].bound;
        if (convex ? *last.bound < b : *last.bound > b) rep.best = rep.per_type.size() - 1;
      }
    }
  }
  return rep;
}

}  // namespace schurtrace

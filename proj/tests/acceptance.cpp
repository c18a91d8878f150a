// Acceptance run: one [PASS]/[FAIL] line per criterion, exit status 1 if any fail.
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "schurtrace/schurtrace.hpp"

using namespace schurtrace;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* what, double time_limit, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream d;
  d << o.detail << (o.detail.empty() ? "" : "; ") << secs << " s";
  if (time_limit > 0 && secs >= time_limit) {
    o.pass = false;
    d << " exceeds " << time_limit << " s";
  }
  if (!o.pass) ++failures;
  std::printf("[%s] criterion %d: %s (%s)\n", o.pass ? "PASS" : "FAIL", id, what, d.str().c_str());
  std::fflush(stdout);
}

Outcome campaign(CampaignConfig cfg) {
  const CampaignReport rep = run_campaign(cfg);
  std::size_t trials = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& r : rep.results) {
    trials += r.trials;
    worst = std::max(worst, r.max_excess);
  }
  std::ostringstream s;
  s << rep.results.size() << " instances, " << trials << " trials, " << rep.violations() << " violations, max excess "
    << worst;
  return {rep.violations() == 0, s.str()};
}

CampaignConfig config(std::vector<std::string> claims, std::size_t trials, std::vector<BipartiteShape> shapes) {
  CampaignConfig c;
  c.claims = std::move(claims);
  c.trials = trials;
  c.shapes = std::move(shapes);
  c.seed = 20261015;
  c.tolerance = 1e-9;
  return c;
}

const std::vector<BipartiteShape> kSingleShapes{{2, 2}, {2, 3}, {3, 3}, {2, 4}};

}  // namespace

int main() {
  criterion(1, "single partial trace majorized by the block-sum majorant", 30, [] {
    // additive tolerance, checked with the oracle
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    int violations = 0, trials = 0;
    for (const auto& s : kSingleShapes)
      for (int t = 0; t < 1000; ++t, ++trials) {
        RVector l(s.total());
        for (auto& x : l) x = g(rng);
        const SortedSpectrum lam = SortedSpectrum::from_unsorted(l);
        const CMatrix C = haar_conjugate(lam.values(), rng);
        for (int which : {1, 2}) {
          const auto y = to_std(single_trace_max(lam, s, which).values());
          const auto x = oracle::hermitian_eigs(oracle::partial_trace(C, s.d1(), s.d2(), which));
          if (!oracle::majorized(x, y, 1e-9)) ++violations;
        }
      }
    return Outcome{violations == 0, std::to_string(trials) + " trials, " + std::to_string(violations) + " violations"};
  });

  criterion(2, "singular values of a partial trace weakly majorized", 0, [] {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    int violations = 0, trials = 0;
    for (const auto& s : kSingleShapes)
      for (int t = 0; t < 1000; ++t, ++trials) {
        CMatrix C(s.total(), s.total());
        for (int i = 0; i < C.rows(); ++i)
          for (int j = 0; j < C.cols(); ++j) C(i, j) = Complex(g(rng), g(rng));
        const SortedSpectrum sig = singular_values(C);
        for (int which : {1, 2}) {
          const auto y = to_std(single_trace_max_sv(sig, s, which).values());
          const auto x = oracle::svals(oracle::partial_trace(C, s.d1(), s.d2(), which));
          if (!oracle::majorized(x, y, 1e-9, true)) ++violations;
        }
      }
    return Outcome{violations == 0, std::to_string(trials) + " trials, " + std::to_string(violations) + " violations"};
  });

  criterion(3, "Bell conjugate flattens the marginal and is majorized by every orbit marginal", 0, [] {
    return campaign(config({"bell-min"}, 100, {{2, 2}, {3, 3}, {4, 4}}));
  });

  criterion(4, "square and rectangular sufficiency families", 0, [] {
    Outcome a = campaign(config({"square-sufficient"}, 500, {{2, 2}, {3, 3}, {4, 4}}));
    Outcome b = campaign(config({"rect-sufficient"}, 500, {{2, 3}, {2, 4}, {3, 4}}));
    return Outcome{a.pass && b.pass, "square: " + a.detail + "; rect: " + b.detail};
  });

  criterion(5, "qubit-qudit characterization in both directions at d = 3, 4", 0, [] {
    Outcome a = campaign(config({"qubit-qudit"}, 500, {{2, 3}, {2, 4}}));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    int refuted = 0, tried = 0, drawn = 0;
    std::string bad;
    for (int d : {3, 4})
      for (int got = 0; got < 50; ++drawn) {
        RVector l(2 * d);
        for (auto& x : l) x = u(rng) * u(rng);
        const SortedSpectrum lam = SortedSpectrum::from_unsorted(l);
        if (sufficiency_verdict(lam, BipartiteShape(2, d)).applicable()) continue;
        ++got;
        ++tried;
        try {
          if (witness_2xd(lam, d).refuted) ++refuted;
          else bad += " not-refuted";
        } catch (const std::exception& e) {
          bad = std::string(" ") + e.what();
        }
      }
    std::ostringstream s;
    s << "sufficiency: " << a.detail << "; necessity: " << refuted << "/" << tried << " refuted (" << drawn
      << " spectra drawn)" << bad;
    return Outcome{a.pass && refuted == tried, s.str()};
  });

  auto witness_check = [](const std::function<WitnessReport()>& make) {
    return [make] {
      const WitnessReport w = make();
      std::ostringstream s;
      s << w.family << ", " << w.refutation.classes_total << " classes, refuted=" << (w.refuted ? "true" : "false");
      return Outcome{w.refuted, s.str()};
    };
  };
  auto S = [](std::vector<double> v) { return SortedSpectrum::from_unsorted(v); };
  criterion(6, "witness: flat rank 4 on 3x3", 5,
            witness_check([&] { return witness_impossible_rank(S({1, 1, 1, 1, 0, 0, 0, 0, 0}), 3); }));
  criterion(6, "witness: rank 5 band on 2x4", 5,
            witness_check([&] { return witness_rank_band(S({5, 4, 3, 2, 1, 0, 0, 0}), BipartiteShape(2, 4)); }));
  criterion(6, "witness: rank 4 low-rank on 2x4", 5,
            witness_check([&] { return witness_low_rank(S({4, 3, 2, 1, 0, 0, 0, 0}), BipartiteShape(2, 4)); }));

  criterion(7, "operator majorant of sums of local unitaries", 0,
            [] { return campaign(config({"operator-majorant"}, 500, {{2, 3}, {3, 3}})); });

  criterion(8, "n-qubit joint majorization and brute-force marginals", 0, [] {
    CampaignConfig c = config({"nqubit"}, 500, {});
    c.qubits = {3, 4};
    Outcome a = campaign(c);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1, 1);
    double worst = 0;
    for (int n : {3, 4})
      for (int t = 0; t < 50; ++t) {
        RVector l(1 << n);
        for (auto& x : l) x = u(rng);
        const SortedSpectrum lam = SortedSpectrum::from_unsorted(l);
        const oracle::CMat D = lam.values().cast<Complex>().asDiagonal();
        const RVector y = nqubit_bound_vector(lam, n);
        for (int j = 0; j < n; ++j) {
          const oracle::CMat M = oracle::qubit_marginal(D, n, j);
          worst = std::max(worst, std::abs(M(0, 0).real() - y[2 * j]));
          worst = std::max(worst, std::abs(M(1, 1).real() - y[2 * j + 1]));
          const oracle::CMat L = nqubit_partial_trace(D, n, j);
          worst = std::max(worst, (L - M).cwiseAbs().maxCoeff());
        }
      }
    std::ostringstream s;
    s << a.detail << "; diagonal brute force max deviation " << worst;
    return Outcome{a.pass && worst <= 1e-12, s.str()};
  });

  criterion(9, "QP solver optimality and Type II grid oracle", 0, [] {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 1);
    std::normal_distribution<double> g;
    int models = 0, beaten = 0, samples = 0;
    double kkt = 0;
    while (models < 200) {
      const int d = 2 + models % 3;
      std::vector<double> l(d * d);
      for (double& x : l) x = u(rng) * u(rng) - (models % 5 == 0 ? 0.3 : 0.0);
      const SortedSpectrum lam = SortedSpectrum::from_unsorted(l);
      const QpModel m = build_qp_square(lam, static_cast<QpType>(models % 4), d, models % 3 == 0 && lam.nonnegative());
      const QpSolution s = solve_qp(m);
      if (s.status != QpStatus::optimal) continue;
      ++models;
      kkt = std::max(kkt, s.kkt_residual);
      RMatrix G;
      RVector h;
      std::vector<std::string> labels;
      m.inequalities(G, h, labels);
      const RVector b = m.b_eq / m.b_eq.norm();
      for (int got = 0, tries = 0; got < 10000 && tries < 1000000; ++tries) {
        RVector dx(m.variable_count());
        for (auto& x : dx) x = g(rng);
        dx -= b * b.dot(dx);
        dx *= std::pow(10.0, -5 * u(rng)) * (1 + lam.max_abs());
        const RVector y = s.x + dx;
        if (((G * y - h).array() > 1e-12).any()) continue;
        ++samples;
        ++got;
        if (y.dot(m.objective_diag.cwiseProduct(y)) < s.objective - 1e-12) ++beaten;
      }
    }
    // zoom grid on Type II for the 3x3 example spectrum
    const QpModel m = build_qp_square(showcase_spectrum(), QpType::II, 3, false);
    const QpSolution s = solve_qp(m);
    RMatrix G;
    RVector h;
    std::vector<std::string> labels;
    m.inequalities(G, h, labels);
    double best = std::numeric_limits<double>::infinity();
    Eigen::Vector3d centre(0.5, 0.25, 0.05), width(1, 1, 0.4);
    const int K = 40;
    for (int level = 0; level < 18; ++level) {
      Eigen::Vector3d arg = centre;
      for (int i = 0; i <= K; ++i)
        for (int j = 0; j <= K; ++j)
          for (int k = 0; k <= K; ++k) {
            const Eigen::Vector3d p = centre + width.cwiseProduct(Eigen::Vector3d(i, j, k) / K - Eigen::Vector3d::Constant(0.5));
            RVector x(4);
            x << p[0], p[1], p[2], 1 - p[0] - p[1] - 6 * p[2];
            if (((G * x - h).array() > 1e-15).any()) continue;
            const double f = x.dot(m.objective_diag.cwiseProduct(x));
            if (f < best) {
              best = f;
              arg = p;
            }
          }
      centre = arg;
      width *= 0.3;
    }
    std::ostringstream o;
    o << models << " models, " << samples << " feasible samples, " << beaten << " better than the solver, max KKT "
      << kkt << "; Type II objective " << s.objective << " vs grid " << best;
    return Outcome{beaten == 0 && kkt < 1e-8 && samples == 200 * 10000 && std::abs(best - s.objective) <= 1e-6,
                   o.str()};
  });

  criterion(10, "3x3 example reproduction", 10, [] {
    const ShowcaseTables t = reproduce_showcase();
    bool free_ok = true, mu2 = true, renyi = true;
    for (int k = 0; k < 3; ++k) free_ok = free_ok && t.free_types[k].solution.status == QpStatus::optimal;
    const bool iv_infeasible = t.positive_types[3].solution.status == QpStatus::infeasible;
    auto le = [](double a, double b) { return a <= b + 1e-12 * std::max(1.0, std::abs(b)); };
    for (const auto& r : t.pnorms) mu2 = mu2 && le(r.mu2, r.mu1) && le(r.mu2, r.mu3);
    int sampled = 0;
    for (const auto& r : t.renyi)
      if (r.alpha >= 5 - 1e-12) {
        ++sampled;
        renyi = renyi && r.qp_bound > r.weak_subadditivity;
      }
    std::ostringstream o;
    o << "types I-III feasible " << free_ok << ", mu2 best on " << t.pnorms.size() << " p values " << mu2
      << ", renyi beats weak subadditivity on " << sampled << " alphas " << renyi << ", type IV infeasible with positivity "
      << iv_infeasible;
    return Outcome{free_ok && mu2 && renyi && iv_infeasible && sampled == 51 && t.pnorms.size() == 91, o.str()};
  });

  criterion(11, "determinant fails for the singular-value majorant", 0, [] {
    CMatrix C = CMatrix::Zero(4, 4);
    C(0, 1) = 1;
    C(1, 0) = 1;
    C(1, 1) = 1;
    C(2, 3) = 1;
    C(3, 2) = 2;
    C(3, 3) = 1;
    const BipartiteShape s(2, 2);
    const SortedSpectrum sig = singular_values(C);
    const RVector maj = single_trace_max_sv(sig, s, 2).values();
    const double det_maj = maj.prod();
    const double det_tr = oracle::svals(oracle::partial_trace(C, 2, 2, 2)).front() *
                          oracle::svals(oracle::partial_trace(C, 2, 2, 2)).back();
    std::ostringstream o;
    o << "det of majorant " << det_maj << ", det |tr2 C| " << det_tr;
    return Outcome{det_maj > det_tr && std::abs(det_tr - 1) < 1e-12, o.str()};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

// Small tour: majorants for one spectrum, a QP bound and a counterexample.
#include <cstdio>

#include "schurtrace/schurtrace.hpp"

using namespace schurtrace;

int main() {
  const SortedSpectrum lam = SortedSpectrum::from_unsorted(std::vector<double>{4, 3, 2, 1});
  const BipartiteShape s(2, 2);
  const SortedSpectrum y = single_trace_max(lam, s, 2);
  std::printf("block-sum majorant of tr2 on 2x2: (%g, %g)\n", y[0], y[1]);
  std::printf("opnorm bound: %g\n", evaluate(FunctionalId::op_norm(), y.values()));

  const SortedSpectrum rho = showcase_spectrum();
  const QpBoundReport rep = qp_best_bound(FunctionalId::schatten(2), rho, BipartiteShape(3, 3),
                                          applicable_qp_types(BipartiteShape(3, 3)), false);
  if (rep.best) {
    const auto& r = rep.per_type[*rep.best];
    std::printf("best QP type %s, (||tr1||_2^2 + ||tr2||_2^2)^(1/2) <= %.6f\n", to_string(r.model.qp_type).c_str(), *r.bound);
  }

  // rank 4, flat, on 3x3: no diagonal arrangement majorizes every orbit point
  const SortedSpectrum flat4 = SortedSpectrum::from_unsorted(std::vector<double>{1, 1, 1, 1, 0, 0, 0, 0, 0});
  const WitnessReport w = witness_impossible_rank(flat4, 3);
  std::printf("witness %s: alpha=%g refuted=%s (%zu classes checked)\n", w.family.c_str(), w.alpha,
              w.refuted ? "yes" : "no", w.refutation.classes_checked);
  std::printf("%s\n", to_json(w)["joint"].dump().c_str());
  return 0;
}

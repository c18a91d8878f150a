#pragma once

namespace schurtrace {

// Every numerical threshold used by the library. Relative ones are scaled
// by the quantity named in the comment.
struct Tolerances {
  double hermiticity = 1e-10;     // times max|A|
  double unitarity = 1e-10;
  double eig_residual = 1e-9;     // times max(1, ||C||)
  double majorization = 1e-10;    // times max(1, ||y||_1)
  double spectrum_order = 1e-12;  // times max(1, |v|_max)
  double eigen_equality = 1e-9;   // times (1 + |lambda_1|)
  double rank_relative = 1e-9;    // times max|lambda|
  double negativity = 1e-12;      // times max(1, |v|_max); clamp to zero below
  double state_trace = 1e-8;
  double qp_feasibility = 1e-9;
  double qp_dual = 1e-10;
  double qp_kkt = 1e-8;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

}  // namespace schurtrace

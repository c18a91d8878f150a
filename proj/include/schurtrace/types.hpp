#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "schurtrace/errors.hpp"
#include "schurtrace/tolerances.hpp"

namespace schurtrace {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline RVector to_rvector(const std::vector<double>& v) {
  return Eigen::Map<const RVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const RVector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline void require_finite(const RVector& v, const char* what) {
  if (!v.allFinite()) throw DomainError(std::string(what) + ": non-finite entry");
}

inline RVector sorted_descending(RVector v) {
  std::stable_sort(v.data(), v.data() + v.size(), std::greater<double>());
  return v;
}

// Dimensions (d1, d2) of C^{d1} (x) C^{d2}. Global index k = i*d2 + j
// (0-based), factor 1 major.
class BipartiteShape {
 public:
  BipartiteShape(int d1, int d2) : d1_(d1), d2_(d2) {
    if (d1 < 2 || d2 < 2)
      throw ShapeError("bipartite shape needs d1, d2 >= 2, got (" + std::to_string(d1) + "," +
                       std::to_string(d2) + ")");
  }

  int d1() const { return d1_; }
  int d2() const { return d2_; }
  int total() const { return d1_ * d2_; }
  BipartiteShape swapped() const { return {d2_, d1_}; }
  bool square() const { return d1_ == d2_; }
  std::string str() const { return std::to_string(d1_) + "x" + std::to_string(d2_); }

  void require_size(Eigen::Index n, const char* what) const {
    if (n != total())
      throw ShapeError(std::string(what) + ": size " + std::to_string(n) + " does not match shape " +
                       str());
  }

  friend bool operator==(const BipartiteShape&, const BipartiteShape&) = default;

 private:
  int d1_;
  int d2_;
};

// Real vector kept in decreasing order.
class SortedSpectrum {
 public:
  SortedSpectrum() = default;

  static SortedSpectrum from_unsorted(RVector v) {
    require_finite(v, "spectrum");
    SortedSpectrum s;
    s.v_ = sorted_descending(std::move(v));
    return s;
  }

  static SortedSpectrum from_unsorted(const std::vector<double>& v) {
    return from_unsorted(to_rvector(v));
  }

  // Validates the order instead of sorting.
  static SortedSpectrum from_sorted(RVector v, double tol = default_tolerances().spectrum_order) {
    require_finite(v, "spectrum");
    const double scale = std::max(1.0, v.size() ? v.cwiseAbs().maxCoeff() : 0.0);
    for (Eigen::Index i = 0; i + 1 < v.size(); ++i)
      if (v[i + 1] > v[i] + tol * scale)
        throw PreconditionError("spectrum is not in decreasing order at position " +
                                std::to_string(i + 1));
    SortedSpectrum s;
    s.v_ = std::move(v);
    return s;
  }

  const RVector& values() const { return v_; }
  Eigen::Index size() const { return v_.size(); }
  double operator[](Eigen::Index i) const { return v_[i]; }
  double sum() const { return v_.sum(); }
  double max_abs() const { return v_.size() ? v_.cwiseAbs().maxCoeff() : 0.0; }
  bool nonnegative(double tol = 0.0) const { return v_.size() == 0 || v_.minCoeff() >= -tol; }

 private:
  RVector v_;
};

// Diagonal of a d1*d2 operator in the global index order.
struct DiagonalArrangement {
  RVector values;
  BipartiteShape shape;

  DiagonalArrangement(RVector v, BipartiteShape s) : values(std::move(v)), shape(s) {
    shape.require_size(values.size(), "diagonal arrangement");
  }

  double block_entry(int block, int pos) const { return values[block * shape.d2() + pos]; }
};

// lambda^(1) (length d2, spectrum of tr_1) followed by lambda^(2)
// (length d1, spectrum of tr_2).
struct JointMarginalSpectrum {
  RVector first;
  RVector second;

  RVector concatenated() const {
    RVector out(first.size() + second.size());
    out << first, second;
    return out;
  }
};

}  // namespace schurtrace

#pragma once

#include <cstdio>
#include <string>

#include "schurtrace/bipartite.hpp"

namespace schurtrace {

enum class FunctionalKind { schatten, power_sum, ky_fan, op_norm, min_value, vn_entropy, renyi, determinant };

enum class Curvature { schur_convex, schur_concave };

// A spectral functional with a canonical string form:
//   schatten:p  powsum:p  kyfan:k  opnorm  min  vn  renyi:a  det  neg:<inner>
// powsum:p is sum |x_i|^p (the p-th power of schatten:p).
class FunctionalId {
 public:
  static FunctionalId schatten(double p) { return make(FunctionalKind::schatten, p); }
  static FunctionalId power_sum(double p) { return make(FunctionalKind::power_sum, p); }
  static FunctionalId ky_fan(int k) { return make(FunctionalKind::ky_fan, k); }
  static FunctionalId op_norm() { return make(FunctionalKind::op_norm, 0); }
  static FunctionalId min_value() { return make(FunctionalKind::min_value, 0); }
  static FunctionalId vn_entropy() { return make(FunctionalKind::vn_entropy, 0); }
  static FunctionalId renyi(double a) { return make(FunctionalKind::renyi, a); }
  static FunctionalId determinant() { return make(FunctionalKind::determinant, 0); }

  FunctionalId negated() const {
    FunctionalId f = *this;
    f.negated_ = !negated_;
    return f;
  }

  static FunctionalId parse(const std::string& text) {
    if (text.rfind("neg:", 0) == 0) return parse(text.substr(4)).negated();
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const bool has_arg = colon != std::string::npos;
    auto arg = [&]() -> double {
      if (!has_arg) throw DomainError("functional '" + head + "' needs a parameter");
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(text.substr(colon + 1), &used);
      } catch (const std::exception&) {
        throw DomainError("bad functional parameter in '" + text + "'");
      }
      if (used != text.size() - colon - 1) throw DomainError("bad functional parameter in '" + text + "'");
      return v;
    };
    auto no_arg = [&] {
      if (has_arg) throw DomainError("functional '" + head + "' takes no parameter");
    };
    if (head == "schatten") return schatten(arg());
    if (head == "powsum") return power_sum(arg());
    if (head == "kyfan") {
      const double k = arg();
      if (k != std::floor(k)) throw DomainError("kyfan needs an integer k");
      return ky_fan(static_cast<int>(k));
    }
    if (head == "opnorm") return no_arg(), op_norm();
    if (head == "min") return no_arg(), min_value();
    if (head == "vn") return no_arg(), vn_entropy();
    if (head == "renyi") return renyi(arg());
    if (head == "det") return no_arg(), determinant();
    throw DomainError("unknown functional '" + text + "'");
  }

  std::string str() const {
    std::string base;
    switch (kind_) {
      case FunctionalKind::schatten: base = "schatten:" + fmt(param_); break;
      case FunctionalKind::power_sum: base = "powsum:" + fmt(param_); break;
      case FunctionalKind::ky_fan: base = "kyfan:" + std::to_string(static_cast<int>(param_)); break;
      case FunctionalKind::op_norm: base = "opnorm"; break;
      case FunctionalKind::min_value: base = "min"; break;
      case FunctionalKind::vn_entropy: base = "vn"; break;
      case FunctionalKind::renyi: base = "renyi:" + fmt(param_); break;
      case FunctionalKind::determinant: base = "det"; break;
    }
    return negated_ ? "neg:" + base : base;
  }

  FunctionalKind kind() const { return kind_; }
  double param() const { return param_; }
  bool is_negated() const { return negated_; }

  Curvature curvature() const {
    bool convex = false;
    switch (kind_) {
      case FunctionalKind::schatten:
      case FunctionalKind::power_sum: convex = param_ >= 1.0; break;
      case FunctionalKind::ky_fan:
      case FunctionalKind::op_norm: convex = true; break;
      default: convex = false;
    }
    if (negated_) convex = !convex;
    return convex ? Curvature::schur_convex : Curvature::schur_concave;
  }

  // Increasing in each coordinate on nonnegative vectors and Schur-convex;
  // the functionals that respect weak majorization.
  bool monotone_schur_convex() const {
    if (negated_) return false;
    switch (kind_) {
      case FunctionalKind::schatten:
      case FunctionalKind::power_sum: return param_ >= 1.0;
      case FunctionalKind::ky_fan:
      case FunctionalKind::op_norm: return true;
      default: return false;
    }
  }

  bool requires_nonnegative() const {
    switch (kind_) {
      case FunctionalKind::vn_entropy:
      case FunctionalKind::renyi:
      case FunctionalKind::determinant: return true;
      case FunctionalKind::schatten:
      case FunctionalKind::power_sum: return param_ < 1.0;
      default: return false;
    }
  }

  friend bool operator==(const FunctionalId&, const FunctionalId&) = default;

 private:
  static FunctionalId make(FunctionalKind k, double p) {
    if ((k == FunctionalKind::schatten || k == FunctionalKind::power_sum) && !(p > 0))
      throw DomainError("schatten/powsum needs p > 0");
    if (k == FunctionalKind::ky_fan && p < 1) throw DomainError("kyfan needs k >= 1");
    if (k == FunctionalKind::renyi && (!(p > 0) || p == 1.0))
      throw DomainError("renyi needs alpha in (0,1) or (1,inf)");
    FunctionalId f;
    f.kind_ = k;
    f.param_ = p;
    return f;
  }

  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  FunctionalKind kind_ = FunctionalKind::op_norm;
  double param_ = 0;
  bool negated_ = false;
};

inline double evaluate(const FunctionalId& f, RVector v, const Tolerances& tol = default_tolerances()) {
  require_finite(v, "functional argument");
  const Eigen::Index n = v.size();
  if (n == 0) throw ShapeError("functional argument is empty");
  if (f.requires_nonnegative()) {
    const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    if (v.minCoeff() < -tol.negativity * scale)
      throw DomainError(f.str() + " needs a nonnegative vector");
    v = v.cwiseMax(0.0);
  }
  const double p = f.param();
  double r = 0;
  switch (f.kind()) {
    case FunctionalKind::schatten: r = std::pow(v.cwiseAbs().array().pow(p).sum(), 1.0 / p); break;
    case FunctionalKind::power_sum: r = v.cwiseAbs().array().pow(p).sum(); break;
    case FunctionalKind::ky_fan: {
      const int k = static_cast<int>(p);
      if (k > n) throw DomainError("kyfan:k with k larger than the vector");
      r = sorted_descending(v.cwiseAbs()).head(k).sum();
      break;
    }
    case FunctionalKind::op_norm: r = v.cwiseAbs().maxCoeff(); break;
    case FunctionalKind::min_value: r = v.minCoeff(); break;
    case FunctionalKind::vn_entropy:
      for (Eigen::Index i = 0; i < n; ++i)
        if (v[i] > 0) r -= v[i] * std::log(v[i]);
      break;
    case FunctionalKind::renyi: {
      double s = 0;
      for (Eigen::Index i = 0; i < n; ++i)
        if (v[i] > 0) s += std::pow(v[i], p);
      if (!(s > 0)) throw DomainError("renyi entropy of the zero vector");
      r = std::log(s) / (1.0 - p);
      break;
    }
    case FunctionalKind::determinant: r = v.prod(); break;
  }
  return f.is_negated() ? -r : r;
}

inline double mutual_information(const CMatrix& rho, const BipartiteShape& s,
                                 const Tolerances& tol = default_tolerances()) {
  require_square(rho, s, "mutual_information");
  require_hermitian(rho, tol, "mutual_information");
  const RVector lam = eigenvalues_hermitian(rho).values();
  if (lam.minCoeff() < -tol.state_trace || std::abs(lam.sum() - 1.0) > tol.state_trace)
    throw DomainError("mutual_information needs a density matrix");
  const FunctionalId S = FunctionalId::vn_entropy();
  auto entropy = [&](const CMatrix& m) {
    return evaluate(S, eigenvalues_hermitian(m).values().cwiseMax(0.0), tol);
  };
  return entropy(partial_trace(rho, s, 2)) + entropy(partial_trace(rho, s, 1)) -
         evaluate(S, lam.cwiseMax(0.0), tol);
}

}  // namespace schurtrace

#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "schurtrace/campaign.hpp"
#include "schurtrace/counterexample.hpp"
#include "schurtrace/showcase.hpp"

namespace schurtrace {

using Json = nlohmann::ordered_json;

enum class SpectrumKind { eigenvalues, singular_values };

inline const char* to_string(SpectrumKind k) {
  return k == SpectrumKind::eigenvalues ? "eigenvalues" : "singular_values";
}

struct SpectrumDocument {
  std::optional<BipartiteShape> shape;
  std::optional<int> n_qubits;
  SortedSpectrum spectrum;
  SpectrumKind kind = SpectrumKind::eigenvalues;

  // Shape for bipartite commands; an n-qubit document is read as (2, 2^{n-1}).
  BipartiteShape bipartite() const {
    if (shape) return *shape;
    return {2, 1 << (*n_qubits - 1)};
  }
};

// Parses "3x4".
inline BipartiteShape parse_shape(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw ShapeError("shape must look like d1xd2, got '" + text + "'");
  try {
    std::size_t u1 = 0, u2 = 0;
    const int d1 = std::stoi(text.substr(0, x), &u1);
    const int d2 = std::stoi(text.substr(x + 1), &u2);
    if (u1 != x || u2 != text.size() - x - 1) throw ShapeError("");
    return {d1, d2};
  } catch (const ShapeError&) {
    throw ShapeError("shape must look like d1xd2, got '" + text + "'");
  } catch (const std::exception&) {
    throw ShapeError("shape must look like d1xd2, got '" + text + "'");
  }
}

inline SpectrumDocument parse_spectrum_document(const Json& j) {
  if (!j.is_object()) throw DomainError("spectrum document must be a JSON object");
  SpectrumDocument doc;
  if (!j.contains("spectrum") || !j["spectrum"].is_array()) throw DomainError("spectrum document needs a 'spectrum' array");
  std::vector<double> v;
  for (const auto& e : j["spectrum"]) {
    if (!e.is_number()) throw DomainError("spectrum entries must be numbers");
    v.push_back(e.get<double>());
  }
  if (j.contains("kind")) {
    const std::string k = j["kind"].get<std::string>();
    if (k == "eigenvalues") doc.kind = SpectrumKind::eigenvalues;
    else if (k == "singular_values") doc.kind = SpectrumKind::singular_values;
    else throw DomainError("kind must be eigenvalues or singular_values");
  }
  if (!j.contains("shape") || !j["shape"].is_object()) throw ShapeError("spectrum document needs a 'shape' object");
  const Json& s = j["shape"];
  auto get_int = [&](const char* key) {
    if (!s[key].is_number_integer()) throw ShapeError(std::string("shape field '") + key + "' must be an integer");
    return s[key].get<int>();
  };
  if (s.contains("n_qubits")) {
    if (s.contains("d1") || s.contains("d2")) throw ShapeError("shape has both n_qubits and d1/d2");
    const int n = get_int("n_qubits");
    if (n < 2 || n > 12) throw ShapeError("n_qubits must be in 2..12");
    doc.n_qubits = n;
    if (v.size() != (std::size_t(1) << n)) throw ShapeError("spectrum length must be 2^n_qubits");
  } else {
    if (!s.contains("d1") || !s.contains("d2")) throw ShapeError("shape needs d1 and d2 or n_qubits");
    doc.shape = BipartiteShape(get_int("d1"), get_int("d2"));
    doc.shape->require_size(static_cast<Eigen::Index>(v.size()), "spectrum document");
  }
  doc.spectrum = SortedSpectrum::from_unsorted(v);
  if (doc.kind == SpectrumKind::singular_values && !doc.spectrum.nonnegative())
    throw DomainError("singular values must be nonnegative");
  return doc;
}

inline SpectrumDocument read_spectrum_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError("invalid JSON in '" + path + "': " + e.what());
  }
  return parse_spectrum_document(j);
}

inline Json to_json(const RVector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Json to_json(const BipartiteShape& s) { return Json{{"d1", s.d1()}, {"d2", s.d2()}}; }

inline Json to_json(const SpectrumDocument& d) {
  Json j;
  j["shape"] = d.shape ? to_json(*d.shape) : Json{{"n_qubits", *d.n_qubits}};
  j["spectrum"] = to_json(d.spectrum.values());
  j["kind"] = to_string(d.kind);
  return j;
}

inline Json to_json(const JointMarginalSpectrum& j) {
  return Json{{"tr1", to_json(j.first)}, {"tr2", to_json(j.second)}};
}

inline Json to_json(const SufficiencyVerdict& v) {
  Json c = Json::array();
  for (const auto& a : v.candidates) c.push_back(to_json(a.values));
  return Json{{"cases", v.cases}, {"candidates", c}};
}

// Indices in the JSON are 1-based.
inline Json to_json(const WitnessReport& w) {
  Json j;
  j["family"] = w.family;
  j["shape"] = to_json(w.shape);
  j["spectrum"] = to_json(w.spectrum.values());
  j["arrangement"] = to_json(w.arrangement.values);
  j["rotation"] = Json{{"i", w.rotation_i + 1}, {"j", w.rotation_j + 1}};
  j["alpha"] = w.alpha;
  j["alpha_window"] = Json::array({w.alpha_lo, w.alpha_hi});
  j["witness_diagonal"] = to_json(w.witness_diagonal.values);
  j["joint"] = to_json(w.joint);
  j["refuted"] = w.refuted;
  Json cert;
  cert["classes_total"] = w.refutation.classes_total;
  cert["classes_checked"] = w.refutation.classes_checked;
  cert["classes_skipped_by_flip"] = w.refutation.classes_skipped_by_flip;
  Json fails = Json::array();
  for (const auto& f : w.refutation.failures)
    fails.push_back(Json{{"class_diagonal", to_json(f.class_diagonal)},
                         {"k", f.k},
                         {"k1", f.k1},
                         {"k2", f.k2},
                         {"target_prefix", f.lhs},
                         {"class_prefix", f.rhs}});
  cert["failures"] = fails;
  if (w.refutation.majorizing_class) cert["majorizing_class"] = to_json(*w.refutation.majorizing_class);
  j["certificate"] = cert;
  return j;
}

inline Json to_json(const RMatrix& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(RVector(m.row(i).transpose())));
  return a;
}

inline Json to_json(const QpModel& m) {
  Json j;
  j["type"] = to_string(m.qp_type);
  j["singular_variant"] = m.singular_variant;
  j["positivity"] = m.positivity;
  j["shape"] = to_json(m.shape);
  j["pattern"] = m.pattern;
  j["objective_diag"] = to_json(m.objective_diag);
  j["order_rows"] = to_json(m.order_rows);
  j["majorization_rows"] = to_json(m.maj_rows);
  j["majorization_rhs"] = to_json(m.s);
  j["total_row"] = to_json(m.b_eq);
  j["total_rhs"] = m.eq_rhs;
  return j;
}

inline Json to_json(const QpSolution& s) {
  Json j;
  j["status"] = s.status == QpStatus::optimal ? "optimal" : "infeasible";
  if (s.status == QpStatus::optimal) {
    j["x"] = to_json(s.x);
    j["objective"] = s.objective;
    Json act = Json::array();
    for (int a : s.active_set) act.push_back(a + 1);
    j["active_set"] = act;
    j["multipliers"] = to_json(s.multipliers);
    j["kkt_residual"] = s.kkt_residual;
    j["conditioning"] = s.conditioning;
    j["perturbed"] = s.perturbed;
  }
  return j;
}

inline Json to_json(const QpTypeResult& r) {
  Json j;
  j["model"] = to_json(r.model);
  j["solution"] = to_json(r.solution);
  if (r.mu) j["mu"] = to_json(r.mu->values());
  j["sufficiency"] = to_json(r.verdict);
  if (r.bound) j["bound"] = *r.bound;
  return j;
}

inline Json to_json(const CampaignReport& rep) {
  Json arr = Json::array();
  for (const auto& r : rep.results)
    arr.push_back(Json{{"claim", r.claim},
                       {"instance", r.instance},
                       {"trials", r.trials},
                       {"violations", r.violations},
                       {"max_excess", r.max_excess}});
  return Json{{"violations", rep.violations()}, {"results", arr}};
}

// RFC 4180 CSV with one leading '#' provenance line.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::string& provenance) : out_(out) {
    out_ << "# " << provenance << "\r\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << quote(cells[i]);
    }
    out_ << "\r\n";
  }

  void row(const std::vector<double>& cells) {
    std::vector<std::string> s;
    for (double v : cells) s.push_back(number(v));
    row(s);
  }

  static std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  }

 private:
  std::ostream& out_;
};

inline void write_pnorms_csv(std::ostream& out, const ShowcaseTables& t) {
  CsvWriter w(out,
              "schurtrace reproduce: sums of p-th powers of both marginal p-norms for spectrum "
              "(15,10,5,4,3,3,2,2,1)/45 on 3x3; mu1..mu3 from QP types I-III without positivity; "
              "audenaert column is an external-source baseline 1 + ||rho||_p^p");
  w.row(std::vector<std::string>{"p", "rastegin", "audenaert", "mu1", "mu2", "mu3"});
  for (const auto& r : t.pnorms) w.row(std::vector<double>{r.p, r.rastegin, r.audenaert, r.mu1, r.mu2, r.mu3});
}

inline void write_renyi_csv(std::ostream& out, const ShowcaseTables& t) {
  CsvWriter w(out,
              "schurtrace reproduce: lower bounds on S_alpha(rho_A) + S_alpha(rho_B) for spectrum "
              "(15,10,5,4,3,3,2,2,1)/45 on 3x3; weak_subadditivity = S_alpha(rho) - ln 3; "
              "qp_bound = best QP type with positivity, evaluated on the unnormalized joint vector");
  w.row(std::vector<std::string>{"alpha", "weak_subadditivity", "qp_bound"});
  for (const auto& r : t.renyi) w.row(std::vector<double>{r.alpha, r.weak_subadditivity, r.qp_bound});
}

}  // namespace schurtrace

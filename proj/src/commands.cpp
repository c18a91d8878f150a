#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "CLI11.hpp"

namespace schurtrace::cli {

namespace {

struct Certified {
  double bound;
  std::string certificate;
  RVector majorant;
};

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

bool is_convex(const FunctionalId& f) { return f.curvature() == Curvature::schur_convex; }

// f on the candidate joint vector that attains qp_bound.
RVector attaining_joint(const FunctionalId& f, const SufficiencyVerdict& v, double bound) {
  for (const auto& c : v.candidates) {
    const RVector j = joint_marginals_of_diagonal(c).concatenated();
    if (evaluate(f, j) == bound) return j;
  }
  return joint_marginals_of_diagonal(v.candidates.front()).concatenated();
}

Certified qp_certified(const SortedSpectrum& lam, const BipartiteShape& shape, const FunctionalId& f,
                       const BoundOptions& opt, bool singular) {
  const bool positivity = opt.positivity || f.requires_nonnegative();
  const QpBoundReport rep = qp_best_bound(f, lam, shape, parse_qp_types(opt.qp_type, shape), positivity, singular);
  if (!rep.best) throw PreconditionError("no QP type yields a certified bound for " + f.str());
  const QpTypeResult& r = rep.per_type[*rep.best];
  RVector maj = attaining_joint(f, r.verdict, *r.bound);
  if (shape.d1() > shape.d2()) {
    // qp_best_bound works on the swapped shape; report tr1 then tr2 of the requested shape.
    const JointMarginalSpectrum j{maj.tail(shape.d2()), maj.head(shape.d1())};
    maj = j.concatenated();
  }
  return {*r.bound, std::string(singular ? "singular-value-" : "") + "qp-type-" + to_string(r.model.qp_type) + " (" +
                        join(r.verdict.cases, ", ") + ")",
          maj};
}

RVector concat_qubit_spectra(const CMatrix& C, int n) {
  RVector x(2 * n);
  for (int j = 0; j < n; ++j) x.segment(2 * j, 2) = eigenvalues_hermitian(nqubit_partial_trace(C, n, j)).values();
  return x;
}

void write_report(const std::optional<std::string>& dir, const std::string& name, const Json& j) {
  if (!dir) return;
  std::filesystem::create_directories(*dir);
  std::ofstream f(std::filesystem::path(*dir) / name);
  if (!f) throw std::runtime_error("cannot write " + name);
  f << j.dump(2) << '\n';
}

}  // namespace

double default_tolerance() {
  if (const char* e = std::getenv("SCHURTRACE_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(e, &end);
    if (end != e && *end == '\0' && v > 0 && std::isfinite(v)) return v;
  }
  return 1e-9;
}

std::vector<QpType> parse_qp_types(const std::string& text, const BipartiteShape& shape) {
  const bool square = shape.square();
  if (text == "auto") return applicable_qp_types(shape);
  if (text == "rect") {
    if (square) throw ShapeError("qp type rect needs d1 != d2");
    return {QpType::rect};
  }
  static const std::vector<std::pair<std::string, QpType>> names{
      {"1", QpType::I}, {"2", QpType::II}, {"3", QpType::III}, {"4", QpType::IV}};
  for (const auto& [k, t] : names)
    if (text == k) {
      if (!square) throw ShapeError("qp types 1-4 need a square shape");
      return {t};
    }
  throw DomainError("qp type must be 1, 2, 3, 4, rect or auto");
}

CommandResult cmd_bound(const SpectrumDocument& doc, const FunctionalId& f, const BoundOptions& opt) {
  const SortedSpectrum& lam = doc.spectrum;
  const bool sv = doc.kind == SpectrumKind::singular_values;
  const BipartiteShape shape = doc.bipartite();
  const bool convex = is_convex(f);
  std::mt19937_64 rng(opt.seed);
  Certified c;
  RVector sample;

  if (opt.mode == "single1" || opt.mode == "single2") {
    const int which = opt.mode == "single1" ? 1 : 2;
    if (sv) {
      if (!f.monotone_schur_convex())
        throw PreconditionError("singular values certify only monotone Schur-convex functionals");
      const SortedSpectrum y = single_trace_max_sv(lam, shape, which);
      c = {evaluate(f, y.values()), "block-sum weak majorant of singular values", y.values()};
      const CMatrix C = haar_unitary(shape.total(), rng) * lam.values().cast<Complex>().asDiagonal() *
                        haar_unitary(shape.total(), rng);
      sample = singular_values(partial_trace(C, shape, which)).values();
    } else {
      const SortedSpectrum y = single_trace_max(lam, shape, which);
      c = {evaluate(f, y.values()), "block-sum majorant", y.values()};
      sample = eigenvalues_hermitian(partial_trace(haar_conjugate(lam.values(), rng), shape, which)).values();
    }
  } else if (opt.mode == "joint" || opt.mode == "qp") {
    if (sv) {
      if (!f.monotone_schur_convex())
        throw PreconditionError("singular-value QP certifies only monotone Schur-convex functionals");
      c = qp_certified(lam, shape, f, opt, true);
      const CMatrix C = haar_unitary(shape.total(), rng) * lam.values().cast<Complex>().asDiagonal() *
                        haar_unitary(shape.total(), rng);
      sample = JointMarginalSpectrum{singular_values(partial_trace(C, shape, 1)).values(),
                                     singular_values(partial_trace(C, shape, 2)).values()}
                   .concatenated();
    } else {
      const SufficiencyVerdict v = sufficiency_verdict(lam, shape);
      if (opt.mode == "joint" && v.applicable()) {
        const double b = qp_bound(f, lam, shape, v);
        c = {b, "sufficiency (" + join(v.cases, ", ") + ")", attaining_joint(f, v, b)};
      } else {
        c = qp_certified(lam, shape, f, opt, false);
      }
      sample = joint_spectrum(haar_conjugate(lam.values(), rng), shape).concatenated();
    }
  } else if (opt.mode == "nqubit") {
    if (sv) throw PreconditionError("nqubit mode needs eigenvalues");
    int n = doc.n_qubits.value_or(0);
    if (!doc.n_qubits) {
      if (shape.d1() != 2 || shape.d2() != 2) throw ShapeError("nqubit mode needs an n_qubits document");
      n = 2;
    }
    const RVector y = nqubit_bound_vector(lam, n);
    c = {evaluate(f, y), "qubit block-sum majorant", y};
    sample = concat_qubit_spectra(haar_conjugate(lam.values(), rng), n);
  } else {
    throw DomainError("mode must be single1, single2, joint, qp or nqubit");
  }

  const double value = evaluate(f, sample);
  const double slack = opt.tolerance * std::max(1.0, std::abs(c.bound));
  const bool ok = convex ? value <= c.bound + slack : value >= c.bound - slack;

  Json j;
  j["command"] = "bound";
  j["functional"] = f.str();
  j["mode"] = opt.mode;
  j["document"] = to_json(doc);
  j["direction"] = convex ? "upper" : "lower";
  j["bound"] = c.bound;
  j["certificate"] = c.certificate;
  j["majorant"] = to_json(c.majorant);
  j["revalidation"] = Json{{"seed", opt.seed}, {"sample_value", value}, {"ok", ok}};
  return {j, ok ? kOk : kViolation};
}

CommandResult cmd_verify(const CampaignConfig& cfg) {
  const CampaignReport rep = run_campaign(cfg);
  Json j;
  j["command"] = "verify";
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  j["tolerance"] = cfg.tolerance;
  const Json r = to_json(rep);
  j["violations"] = r["violations"];
  j["results"] = r["results"];
  return {j, rep.violations() == 0 ? kOk : kViolation};
}

CommandResult cmd_witness(const SpectrumDocument& doc, const std::string& family, std::optional<double> alpha,
                          int band) {
  if (doc.kind != SpectrumKind::eigenvalues) throw PreconditionError("witnesses need eigenvalues");
  const BipartiteShape shape = doc.bipartite();
  const SortedSpectrum& lam = doc.spectrum;
  if (sufficiency_verdict(lam, shape).applicable()) throw PreconditionError("sufficiency case applies");
  WitnessReport w = [&] {
    if (family == "rank-band") return witness_rank_band(lam, shape, band, alpha);
    if (family == "low-rank") return witness_low_rank(lam, shape, alpha);
    if (family == "impossible-rank") {
      if (!shape.square()) throw ShapeError("impossible-rank needs a square shape");
      return witness_impossible_rank(lam, shape.d1(), alpha);
    }
    if (family == "2xd") {
      if (shape.d1() != 2) throw ShapeError("2xd needs shape 2xd");
      return witness_2xd(lam, shape.d2(), alpha);
    }
    throw DomainError("family must be rank-band, low-rank, impossible-rank or 2xd");
  }();
  Json j = to_json(w);
  j["command"] = "witness";
  return {j, w.refuted ? kOk : kViolation};
}

CommandResult cmd_reproduce(const std::string& dir) {
  const ShowcaseTables t = reproduce_showcase();
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir);
  {
    std::ofstream f(base / "pnorms.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write pnorms.csv");
    write_pnorms_csv(f, t);
  }
  {
    std::ofstream f(base / "renyi.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write renyi.csv");
    write_renyi_csv(f, t);
  }
  Json feas_free = Json::object(), feas_pos = Json::object();
  for (const auto& r : t.free_types) feas_free[to_string(r.model.qp_type)] = r.solution.status == QpStatus::optimal;
  for (const auto& r : t.positive_types) feas_pos[to_string(r.model.qp_type)] = r.solution.status == QpStatus::optimal;
  bool mu2_best = true;
  // at p = 1 every column is the trace sum; allow rounding
  auto le = [](double a, double b) { return a <= b + 1e-12 * std::max(1.0, std::abs(b)); };
  for (const auto& r : t.pnorms) mu2_best = mu2_best && le(r.mu2, r.mu1) && le(r.mu2, r.mu3);
  bool renyi_wins = true;
  for (const auto& r : t.renyi)
    if (r.alpha >= 5.0 - 1e-12) renyi_wins = renyi_wins && r.qp_bound > r.weak_subadditivity;
  Json j;
  j["command"] = "reproduce";
  j["files"] = Json::array({(base / "pnorms.csv").string(), (base / "renyi.csv").string()});
  j["feasible_without_positivity"] = feas_free;
  j["feasible_with_positivity"] = feas_pos;
  j["mu2_best_on_pnorms"] = mu2_best;
  j["renyi_qp_beats_weak_subadditivity_from_alpha_5"] = renyi_wins;
  return {j, kOk};
}

CommandResult cmd_qp(const SpectrumDocument& doc, const std::string& qp_type, bool positivity,
                     const std::optional<FunctionalId>& f) {
  const BipartiteShape shape = doc.bipartite();
  const bool sv = doc.kind == SpectrumKind::singular_values;
  const FunctionalId g = f.value_or(FunctionalId::power_sum(2));
  const QpBoundReport rep =
      qp_best_bound(g, doc.spectrum, shape, parse_qp_types(qp_type, shape), positivity, sv);
  Json j;
  j["command"] = "qp";
  j["document"] = to_json(doc);
  Json types = Json::array();
  for (const auto& r : rep.per_type) {
    Json t = to_json(r);
    if (!f) t.erase("bound");
    types.push_back(t);
  }
  j["types"] = types;
  if (f) {
    j["functional"] = f->str();
    if (rep.best) {
      j["best_type"] = to_string(rep.per_type[*rep.best].model.qp_type);
      j["best_bound"] = *rep.per_type[*rep.best].bound;
    }
  }
  return {j, kOk};
}

namespace {

struct DocArgs {
  std::string input;
  std::string spectrum;
  std::string shape;
  int qubits = 0;
  std::string kind = "eigenvalues";
};

void add_doc_options(CLI::App* app, DocArgs& a) {
  app->add_option("input", a.input, "SpectrumDocument JSON file");
  app->add_option("--spectrum", a.spectrum, "inline spectrum, comma separated");
  app->add_option("--shape", a.shape, "d1xd2 for --spectrum");
  app->add_option("--qubits", a.qubits, "qubit count for --spectrum");
  app->add_option("--kind", a.kind, "eigenvalues or singular_values")->check(CLI::IsMember({"eigenvalues", "singular_values"}));
}

SpectrumDocument load_doc(const DocArgs& a) {
  if (!a.input.empty()) {
    if (!a.spectrum.empty()) throw DomainError("give either an input file or --spectrum");
    return read_spectrum_document(a.input);
  }
  if (a.spectrum.empty()) throw DomainError("no spectrum: give an input file or --spectrum");
  Json j;
  j["spectrum"] = Json::array();
  std::stringstream ss(a.spectrum);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw DomainError("bad spectrum entry '" + tok + "'");
    }
    if (used != tok.size()) throw DomainError("bad spectrum entry '" + tok + "'");
    j["spectrum"].push_back(v);
  }
  if (!a.shape.empty() && a.qubits) throw ShapeError("give either --shape or --qubits");
  if (a.qubits) {
    j["shape"] = Json{{"n_qubits", a.qubits}};
  } else if (!a.shape.empty()) {
    j["shape"] = to_json(parse_shape(a.shape));
  } else {
    throw ShapeError("--spectrum needs --shape or --qubits");
  }
  j["kind"] = a.kind;
  return parse_spectrum_document(j);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"schurtrace: spectral bounds for partial traces over unitary orbits"};
  app.require_subcommand(1);
  double tol = default_tolerance();
  std::optional<std::string> out_dir;
  app.add_option("--tol", tol, "tolerance (default 1e-9 or SCHURTRACE_TOL)")->check(CLI::PositiveNumber);

  DocArgs bound_doc, witness_doc, qp_doc;
  BoundOptions bopt;
  std::string functional, qp_functional;
  auto* bound = app.add_subcommand("bound", "certified bound of a spectral functional");
  add_doc_options(bound, bound_doc);
  bound->add_option("--functional", functional, "functional id, e.g. schatten:2, vn, renyi:2")->required();
  bound->add_option("--mode", bopt.mode, "single1, single2, joint, qp or nqubit")
      ->check(CLI::IsMember({"single1", "single2", "joint", "qp", "nqubit"}));
  bound->add_option("--qp-type", bopt.qp_type, "1, 2, 3, 4, rect or auto");
  bound->add_flag("--positivity", bopt.positivity, "add x >= 0 to the QP");
  bound->add_option("--seed", bopt.seed, "seed of the revalidation sample");
  bound->add_option("--out", out_dir, "also write bound.json into DIR");

  CampaignConfig cfg;
  std::vector<std::string> shapes;
  std::string claims;
  auto* verify = app.add_subcommand("verify", "Monte Carlo verification of the majorization claims");
  verify->add_option("--claims", claims, "comma separated claim ids (default all)");
  verify->add_option("--trials", cfg.trials, "trials per claim instance")->check(CLI::PositiveNumber);
  verify->add_option("--seed", cfg.seed, "master seed");
  verify->add_option("--shape", shapes, "d1xd2, repeatable");
  verify->add_option("--qubits", cfg.qubits, "qubit counts for the nqubit claim, repeatable");
  verify->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
  verify->add_option("--out", out_dir, "also write verify.json into DIR");

  std::string family;
  std::optional<double> alpha;
  int band = 0;
  auto* witness = app.add_subcommand("witness", "counterexample to diagonal joint majorization");
  add_doc_options(witness, witness_doc);
  witness->add_option("--family", family, "rank-band, low-rank, impossible-rank or 2xd")->required();
  witness->add_option("--alpha", alpha, "rotation amount (default: automatic)");
  witness->add_option("--band", band, "block count k for rank-band (default: automatic)");
  witness->add_option("--out", out_dir, "also write witness.json into DIR");

  std::string reproduce_dir = ".";
  auto* reproduce = app.add_subcommand("reproduce", "write pnorms.csv and renyi.csv for the 3x3 example");
  reproduce->add_option("--out", reproduce_dir, "output directory");

  std::string qp_type = "auto";
  bool qp_pos = false;
  auto* qp = app.add_subcommand("qp", "solve the majorant QPs");
  add_doc_options(qp, qp_doc);
  qp->add_option("--qp-type", qp_type, "1, 2, 3, 4, rect or auto");
  qp->add_flag("--positivity", qp_pos, "add x >= 0");
  qp->add_option("--functional", qp_functional, "also report bounds for this functional");
  qp->add_option("--out", out_dir, "also write qp.json into DIR");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    CommandResult r;
    std::string name;
    if (*bound) {
      bopt.tolerance = tol;
      r = cmd_bound(load_doc(bound_doc), FunctionalId::parse(functional), bopt);
      name = "bound.json";
    } else if (*verify) {
      cfg.tolerance = tol;
      for (const auto& s : shapes) cfg.shapes.push_back(parse_shape(s));
      std::stringstream ss(claims);
      std::string c;
      while (std::getline(ss, c, ','))
        if (!c.empty()) cfg.claims.push_back(c);
      r = cmd_verify(cfg);
      name = "verify.json";
    } else if (*witness) {
      r = cmd_witness(load_doc(witness_doc), family, alpha, band);
      name = "witness.json";
    } else if (*reproduce) {
      r = cmd_reproduce(reproduce_dir);
    } else if (*qp) {
      std::optional<FunctionalId> f;
      if (!qp_functional.empty()) f = FunctionalId::parse(qp_functional);
      r = cmd_qp(load_doc(qp_doc), qp_type, qp_pos, f);
      name = "qp.json";
    }
    if (!name.empty()) write_report(out_dir, name, r.report);
    out << r.report.dump(2) << '\n';
    return r.exit_code;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::logic_error& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const nlohmann::json::exception& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
}

}  // namespace schurtrace::cli

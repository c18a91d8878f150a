#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "schurtrace/io.hpp"

namespace schurtrace::cli {

enum ExitCode { kOk = 0, kViolation = 1, kInvalidInput = 2, kNumericalFailure = 3 };

struct CommandResult {
  Json report;
  int exit_code = kOk;
};

// 1e-9 unless SCHURTRACE_TOL holds a positive number.
double default_tolerance();

struct BoundOptions {
  std::string mode = "joint";  // single1 single2 joint qp nqubit
  std::string qp_type = "auto";
  bool positivity = false;
  std::uint64_t seed = 1;
  double tolerance = 1e-9;
};

std::vector<QpType> parse_qp_types(const std::string& text, const BipartiteShape& shape);

CommandResult cmd_bound(const SpectrumDocument& doc, const FunctionalId& f, const BoundOptions& opt);
CommandResult cmd_verify(const CampaignConfig& cfg);
CommandResult cmd_witness(const SpectrumDocument& doc, const std::string& family, std::optional<double> alpha,
                          int band = 0);
CommandResult cmd_reproduce(const std::string& dir);
CommandResult cmd_qp(const SpectrumDocument& doc, const std::string& qp_type, bool positivity,
                     const std::optional<FunctionalId>& f);

// Parses argv, runs one subcommand, prints the JSON report and returns the
// exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace schurtrace::cli

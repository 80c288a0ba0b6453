#pragma once

#include "cusplab/config.hpp"
#include "cusplab/jastrow.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cusplab {

enum ExitCode : int {
  exit_ok = 0,
  exit_violation = 1,
  exit_config_error = 2,
  exit_integration_failure = 3,
  exit_internal_error = 4,
};

/// Embedded in every output.
struct RunMeta {
  std::string command;
  std::string version = CUSPLAB_VERSION;
  std::string config_hash;
  std::uint64_t seed = 1;
};

RunMeta make_meta(const std::string& command, const RunConfig& cfg);

/// One CSV record "quantity,r,value,error,method,flag"; empty optionals stay
/// empty and fields with commas or quotes are quoted.
std::string csv_record(const std::string& quantity, std::optional<double> r,
                       std::optional<double> value, std::optional<double> error,
                       const std::string& method, const std::string& flag);
inline constexpr const char* csv_header = "quantity,r,value,error,method,flag\n";

// ---------------------------------------------------------------------------

void write_report(std::ostream& os, const CuspReport& rep, const RunMeta& meta, OutputFormat f);

/// 0, 1 on a non-diagnostic violation, 4 when the report was cut short.
int report_exit_code(const CuspReport& rep);

struct SphereCheckResult {
  std::vector<SphereMomentResiduals> rows;
  /// Every residual ≤ 1e-12 (antisymmetric ≤ 1e-13).
  bool pass = true;
};
SphereCheckResult sphere_check(const SphereCheckConfig& cfg, std::uint64_t seed);
void write_sphere_check(std::ostream& os, const SphereCheckResult& r, const RunMeta& meta,
                        OutputFormat f);

struct JastrowRow {
  Configuration config;
  IdentitySides two_body;
  IdentitySides log_part;
  /// max over entries of |analytic - fd| / max(|analytic|, 1e-3).
  double fd_hessian = 0.0;
};
struct JastrowCheckResult {
  std::string model;
  std::vector<JastrowRow> rows;
  double worst_two_body = 0.0;
  double worst_log_part = 0.0;
  double worst_fd = 0.0;
  std::optional<AprioriResult> apriori;
  std::optional<SmoothnessProbe> probe;
  /// Identities ≤ 1e-9 and finite differences ≤ 1e-5.
  bool pass = true;
};
JastrowCheckResult jastrow_check(const RunConfig& cfg);
void write_jastrow_check(std::ostream& os, const JastrowCheckResult& r, const RunMeta& meta,
                         OutputFormat f);

struct ConvergeRow {
  std::int64_t size = 0;  ///< samples, or grid order
  IntegralEstimate estimate;
  /// |value - value at the largest size| (grid studies).
  std::optional<double> deviation;
};
struct ConvergeResult {
  std::string quantity = "density_at_nucleus";
  std::string method;
  std::vector<ConvergeRow> rows;
  /// Least-squares slope of log(error) (MC) or log(deviation) (grid) against
  /// log(size); absent with fewer than two usable points.
  std::optional<double> slope;
};
/// ρ(0) under each sample count or grid order.
ConvergeResult converge(const RunConfig& cfg);
void write_converge(std::ostream& os, const ConvergeResult& r, const RunMeta& meta,
                    OutputFormat f);

// ---------------------------------------------------------------------------

/// Runs build_report and writes it; returns the exit code.
int cmd_report(const RunConfig& cfg, std::ostream& out);
int cmd_sphere_check(const RunConfig& cfg, std::ostream& out);
int cmd_jastrow_check(const RunConfig& cfg, std::ostream& out);
int cmd_converge(const RunConfig& cfg, std::ostream& out);

/// Runs `body`, mapping library errors onto exit codes and printing a one-line
/// message to `err`: ConfigError and invalid-input errors → 2,
/// IntegrationFailure → 3 (naming the term), anything else → 4.
int run_guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace cusplab

#pragma once

#include "cusplab/hfunction.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace cusplab {

/// (ρ̃'/ρ̃, ρ̃''/ρ̃, ρ̃'''/ρ̃) at 0 for the hydrogenic s-state n of charge Z.
/// Throws DomainError for n < 1 and UnsupportedModel for l ≠ 0.
std::array<double, 3> golden_hydrogenic(int n, double charge, int l = 0);

/// ρ̃'''(0) by h̃'(0) - (Z/3)[h̃(0) + Z²ρ̃(0)] (main) and by the expansion in
/// the nucleus ingredients (alt).
struct Rho3Closed {
  ClosedValue main;
  ClosedValue alt;
};
/// Throws InternalConsistency when the routes differ by more than
/// max(1e-10·scale, combined error).
Rho3Closed rho3_closed(const NucleusIngredients& in, double charge);
Rho3Closed rho3_closed(const WavefunctionModel& model, const AtomSpec& spec,
                       const EvalOptions& opts = {});

/// (2/3)(h̃(0) + Z²ρ̃(0)).
ClosedValue rho2_closed(const NucleusIngredients& in, double charge);

/// ρ̃''(0) ≥ (2/3)(Z² + ε)ρ̃(0) and ρ̃''(0) ≥ (2/3)(5Z²/4 + ε)ρ̃(0).
std::vector<BoundRow> rho2_bound_check(Measured rho2, Measured rho0, double charge, double eps,
                                       const std::string& source);
/// ρ̃'''(0) ≤ -(Z/12)(7Z² + 20ε)ρ̃(0), and ρ̃'''(0) ≤ -(7/12)Z³ρ̃(0) when the
/// summed ionized-Hamiltonian expectation is nonnegative.
std::vector<BoundRow> rho3_bound_check(Measured rho3, Measured rho0, double charge, double eps,
                                       Measured expectation_sum, const std::string& source);

/// Closed-input bound rows for a model.
std::vector<BoundRow> rho2_bound_check(const WavefunctionModel& model, const AtomSpec& spec,
                                       const EvalOptions& opts = {});
std::vector<BoundRow> rho3_bound_check(const WavefunctionModel& model, const AtomSpec& spec,
                                       const EvalOptions& opts = {});

// ---------------------------------------------------------------------------

/// One quantity computed by independent routes.
struct QuantityRow {
  std::string name;
  std::optional<Measured> direct;  ///< quadrature, extrapolated where needed
  std::string direct_method;
  /// r → 0 extrapolation of samples at r > 0 (values at the nucleus only).
  std::optional<Measured> extrapolated;
  std::optional<Measured> recursion;  ///< radial formulas fed with quadrature h̃
  std::optional<ClosedValue> closed;
  std::optional<ClosedValue> closed_alt;
  std::optional<double> golden;
  std::string notice;
};

struct ReportConfig {
  EvalOptions eval;
  FdOptions fd;
  /// Points where h(x) ≥ ερ(x) is checked.
  std::vector<Vec3> ion_points{Vec3(0.05, 0.0, 0.0), Vec3(0.0, 0.5, 0.5), Vec3(1.0, -1.0, 0.5)};
  /// Extrapolate the first-derivative formula to r → 0 (one-electron models
  /// only; the nested radial integrals are too costly otherwise).
  bool kato_limit = true;
};

struct CuspReport {
  std::string model;
  AtomSpec spec;
  bool eigenfunction = false;
  std::optional<std::array<double, 3>> golden_ratios;
  /// rho0..rho3.
  std::vector<QuantityRow> derivatives;
  /// h, t, v, w values and slopes at 0.
  std::vector<QuantityRow> auxiliary;
  /// Equalities that must hold (cusp relations, identities, route agreement).
  std::vector<BoundRow> checks;
  std::vector<BoundRow> bounds;
  std::vector<std::string> notices;
  TermSamples samples;
  /// Set when an internal-consistency error cut the report short.
  std::optional<std::string> aborted;

  /// A non-diagnostic row is violated beyond its error.
  bool has_violation() const;
};

/// Everything above for one model. IntegrationFailure propagates.
CuspReport build_report(const WavefunctionModel& model, const AtomSpec& spec,
                        const ReportConfig& config = {});

}  // namespace cusplab

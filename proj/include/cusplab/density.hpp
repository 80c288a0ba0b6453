#pragma once

#include "cusplab/quadrature.hpp"
#include "cusplab/wavefunction.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace cusplab {

/// Quadrature controls shared by every marginal / spherical-average quantity.
struct EvalOptions {
  int sphere_degree = 17;
  HatMethod hat = HatGrid{};
  RadialOptions radial{1e-12, 1e-15, 1, 4000};
};

/// The grid's coarser companion (samplers unchanged); used for companion passes.
HatMethod coarse_hat(const HatMethod& m);

/// Values of some radial quantity on ascending radii (0 allowed).
struct RadialSamples {
  std::string quantity;
  std::vector<double> radii;
  std::vector<IntegralEstimate> values;

  /// Throws ContractViolation if radii are not strictly ascending and >= 0.
  void validate() const;
  /// Value at an exact radius; throws ContractViolation if absent.
  const IntegralEstimate& at(double r) const;
};

/// Rows "quantity,r,value,error,method,flag" (no header).
void write_csv_rows(std::ostream& os, const RadialSamples& s, const std::string& flag = "");

/// ρ(x) = Σ_j ∫ |ψ(x, x̂_j)|² dx̂_j.
IntegralEstimate density_at(const WavefunctionModel& model, const AtomSpec& spec, const Vec3& x,
                            const EvalOptions& opts = {});

/// ∫_{S²} ρ(rω) dω (no 1/4π), so rho_tilde(0) = 4πρ(0).
IntegralEstimate rho_tilde(const WavefunctionModel& model, const AtomSpec& spec, double r,
                           const EvalOptions& opts = {});

/// A radial function returning (ρ̃(r), h̃(r)) with errors.
struct RhoH {
  Measured rho;
  Measured h;
};
using RhoHFn = std::function<RhoH(double)>;

/// ρ̃'(r) = (2/r²) ∫_0^r [-Z ρ̃(s) s + h̃(s) s²] ds, r > 0.
IntegralEstimate rho_tilde_prime(const RhoHFn& f, double charge, double r,
                                 const RadialOptions& opts = {});

/// ρ̃''(r) = 2[h̃(r) - ∫_0^1 (Z ρ̃'(rσ) + 2 h̃(rσ)) σ² dσ], with the inner ρ̃'
/// itself taken from rho_tilde_prime. At r = 0 this is (2/3)(h̃(0) + Z²ρ̃(0)).
IntegralEstimate rho_tilde_second(const RhoHFn& f, double charge, double r,
                                  const RadialOptions& opts = {});

/// Model-driven forms: ρ̃ by rho_tilde, h̃ supplied by the caller.
using HTildeFn = std::function<Measured(double)>;
RhoHFn rho_h_source(const WavefunctionModel& model, const AtomSpec& spec, HTildeFn h_tilde,
                    const EvalOptions& opts = {});
IntegralEstimate rho_tilde_prime(const WavefunctionModel& model, const AtomSpec& spec, double r,
                                 HTildeFn h_tilde, const EvalOptions& opts = {});
IntegralEstimate rho_tilde_second(const WavefunctionModel& model, const AtomSpec& spec, double r,
                                  HTildeFn h_tilde, const EvalOptions& opts = {});

/// -½(ρ̃'' + 2ρ̃'/r) - Zρ̃/r + h̃ at r > 0, with ρ̃' and ρ̃'' from the two
/// formulas above; zero for eigenfunctions.
Measured radial_equation_residual(const RhoHFn& f, double charge, double r,
                                  const RadialOptions& opts = {});

/// ρ̃^{(k+2)}(0) = 2/(k+3) [(k+1) h̃^{(k)}(0) - Z ρ̃^{(k+1)}(0)]. k < 0 → DomainError.
double rho_tilde_kth_at_zero(int k, double h_deriv_at_zero, double rho_next_deriv_at_zero,
                             double charge);

// ---------------------------------------------------------------------------
// Derivatives at the origin from radial samples

/// One-sided 5-point stencils on radii {0,1,2,3,4}·h_m, h_m = r0·2^{-m},
/// m = 0..halvings, Richardson-extrapolated over m.
struct FdOptions {
  double r0 = 0.1;
  int halvings = 6;
};

/// Every radius the stencils touch, ascending, including 0.
std::vector<double> fd_radii(const FdOptions& opts);

struct ZeroLimit {
  double value = 0.0;
  double error = 0.0;
  double truncation = 0.0;
  double quadrature = 0.0;
  double roundoff = 0.0;
};

/// k-th derivative (k = 1, 2, 3) at 0.
ZeroLimit derivative_at_zero(const RadialSamples& s, int k, const FdOptions& opts);

/// Value at 0 extrapolated from the samples at h_m only (r = 0 is not used).
ZeroLimit limit_at_zero(const RadialSamples& s, const FdOptions& opts);

/// Richardson limit of a sequence taken at h_m = h0·2^{-m}, leading error
/// powers first_power, first_power + 1, ...
ZeroLimit richardson(const std::vector<Measured>& seq, int first_power);

}  // namespace cusplab

#pragma once

#include "cusplab/density.hpp"
#include "cusplab/verdict.hpp"

#include <string>
#include <vector>

namespace cusplab {

/// h = t - v + w - Eρ with the kinetic part split into the fixed electron's
/// gradient (t_self) and the remaining electrons' gradients (t_hat).
struct HBreakdown {
  IntegralEstimate t;
  IntegralEstimate v;
  IntegralEstimate w;
  IntegralEstimate e_rho;
  /// total.value = t.value - v.value + w.value - e_rho.value.
  IntegralEstimate total;
  IntegralEstimate rho;
  IntegralEstimate t_self;
  IntegralEstimate t_hat;
};

/// Marginal integrals for electron j held at x. At x = 0 the fixed
/// electron's gradient is the limit along each direction of the degree-3
/// sphere rule, averaged.
HBreakdown h_terms_at(const WavefunctionModel& model, const AtomSpec& spec, int j, const Vec3& x,
                      const EvalOptions& opts = {});

/// Σ_j h_terms_at.
HBreakdown h_at(const WavefunctionModel& model, const AtomSpec& spec, const Vec3& x,
                const EvalOptions& opts = {});

/// Sphere integrals of every term of Σ_j h_j at radius r (no 1/4π). At r = 0
/// the directional limits are used node by node.
HBreakdown h_tilde_terms(const WavefunctionModel& model, const AtomSpec& spec, double r,
                         const EvalOptions& opts = {});

IntegralEstimate h_tilde(const WavefunctionModel& model, const AtomSpec& spec, double r,
                         const EvalOptions& opts = {});

/// (ρ̃(r), h̃(r)) both from one h_tilde_terms call.
RhoHFn rho_h_quadrature(const WavefunctionModel& model, const AtomSpec& spec,
                        const EvalOptions& opts = {});

// ---------------------------------------------------------------------------
// Closed forms at the nucleus

/// Integrals over the other electrons with electron j at the nucleus.
struct NucleusIngredients {
  IntegralEstimate rho;   ///< ∫ψ(0,·)²
  IntegralEstimate grad;  ///< ∫|∇_j φ_j(0,·)|²
  IntegralEstimate kin;   ///< ∫Σ_{k≠j}|∇_k ψ(0,·)|²
  IntegralEstimate pot;   ///< ∫(V_{N-1,Z-1} - E)ψ(0,·)²
};

/// Throws UnsupportedModel when ∇_j φ_j has no limit at the nucleus.
NucleusIngredients nucleus_ingredients(const WavefunctionModel& model, const AtomSpec& spec,
                                       int j, const EvalOptions& opts = {});
/// Sum over electrons.
NucleusIngredients nucleus_ingredients(const WavefunctionModel& model, const AtomSpec& spec,
                                       const EvalOptions& opts = {});

/// ⟨ψ(0,·), [H_{N-1}(Z-1) - E] ψ(0,·)⟩ for electron j; -E|ψ(0)|² when N = 1.
IntegralEstimate expectation_prev_hamiltonian(const WavefunctionModel& model,
                                              const AtomSpec& spec, int j,
                                              const EvalOptions& opts = {});

struct ClosedValue {
  double value = 0.0;
  double error = 0.0;
  /// The formula assumes Hψ = Eψ.
  bool eigen_only = false;
};

ClosedValue h0_closed(const NucleusIngredients& in, double charge);
ClosedValue hprime0_closed(const NucleusIngredients& in, double charge);
ClosedValue t0_closed(const NucleusIngredients& in, double charge);
ClosedValue tprime0_closed(const NucleusIngredients& in, double charge);

ClosedValue h0_closed(const WavefunctionModel& model, const AtomSpec& spec,
                      const EvalOptions& opts = {});
ClosedValue hprime0_closed(const WavefunctionModel& model, const AtomSpec& spec,
                           const EvalOptions& opts = {});
ClosedValue t0_closed(const WavefunctionModel& model, const AtomSpec& spec,
                      const EvalOptions& opts = {});
ClosedValue tprime0_closed(const WavefunctionModel& model, const AtomSpec& spec,
                           const EvalOptions& opts = {});

// ---------------------------------------------------------------------------
// Radial samples of the terms and checks built on them

struct TermSamples {
  RadialSamples rho, t, v, w, h;
};

/// One h_tilde_terms call per radius.
TermSamples sample_terms(const WavefunctionModel& model, const AtomSpec& spec,
                         const std::vector<double>& radii, const EvalOptions& opts = {});

/// (ṽ'(0) + Zṽ(0), w̃'(0) + Zw̃(0)) by finite differences.
struct VwCusp {
  Measured v;
  Measured w;
};
VwCusp vw_cusp_check(const TermSamples& s, double charge, const FdOptions& fd);
VwCusp vw_cusp_check(const WavefunctionModel& model, const AtomSpec& spec,
                     const FdOptions& fd = {}, const EvalOptions& opts = {});

/// h(x) ≥ ερ(x) at each point and h̃(0) ≥ (Z²/4 + ε)ρ̃(0); skipped when ε < 0.
std::vector<BoundRow> ion_bound_check(const WavefunctionModel& model, const AtomSpec& spec,
                                      const std::vector<Vec3>& points,
                                      const EvalOptions& opts = {});
/// Same, with h̃(0) and ρ̃(0) supplied.
std::vector<BoundRow> ion_bound_check(const WavefunctionModel& model, const AtomSpec& spec,
                                      const std::vector<Vec3>& points, Measured h_tilde0,
                                      Measured rho_tilde0, const EvalOptions& opts = {});

}  // namespace cusplab

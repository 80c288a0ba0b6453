#pragma once

#include "cusplab/atom.hpp"
#include "cusplab/common.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cusplab {

enum class Method { tensor_grid, adaptive, monte_carlo };

std::string_view method_name(Method m);

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;
  Method method = Method::tensor_grid;
  std::int64_t n_evals = 0;
  /// Same quantity from the coarser companion rule, when one exists.
  std::optional<double> companion;
  std::vector<std::string> warnings;
};

/// a + b and a - b with errors added. Companions combine when both exist.
IntegralEstimate operator+(const IntegralEstimate& a, const IntegralEstimate& b);
IntegralEstimate operator-(const IntegralEstimate& a, const IntegralEstimate& b);
IntegralEstimate operator*(double s, const IntegralEstimate& a);

// ---------------------------------------------------------------------------
// Sphere

struct SphericalRule {
  int degree = 0;
  std::vector<Vec3> nodes;
  std::vector<double> weights;
};

/// Shipped degrees: 3, 7, 17, 29.
std::span<const int> shipped_sphere_degrees();
/// Throws ContractViolation for an unknown degree.
const SphericalRule& sphere_rule(int degree);
/// Rule used for the error estimate of `degree` (next higher, or 17 for 29).
int companion_degree(int degree);

/// Σ w_i f(ω_i); error from the companion rule plus a roundoff floor.
/// Throws DomainError naming the node if f is non-finite there.
IntegralEstimate sphere_integrate(const std::function<double(const Vec3&)>& f,
                                  const SphericalRule& rule);

/// Several components at once. Each node returns per-component estimates,
/// which may carry their own errors and companions; the companion-rule pass
/// uses the node companions so the resulting difference covers both levels.
using SphereNodeFn =
    std::function<std::vector<IntegralEstimate>(const Vec3& omega, bool companion_pass)>;
std::vector<IntegralEstimate> sphere_integrate(const SphereNodeFn& f, std::size_t n_components,
                                               const SphericalRule& rule);

/// Quadrature of ω·(Aω).
double sphere_moment_matrix(const Mat3& a, const SphericalRule& rule);

/// Worst absolute residuals of the second-moment identities on one rule.
struct SphereMomentResiduals {
  int degree = 0;
  double pair_moments = 0.0;   ///< ∫ω_iω_j - (4π/3)δ_ij
  double dot_product = 0.0;    ///< ∫(ω·a)(ω·b) - (4π/3)a·b, random unit-scale a, b
  double matrix_trace = 0.0;   ///< ∫ω·(Aω) - (4π/3)Tr A, random A
  double antisymmetric = 0.0;  ///< ∫ω·(Aω), random antisymmetric A
  double worst() const;
};
SphereMomentResiduals sphere_moment_check(int degree, int trials = 100, std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// One-dimensional

/// Gauss–Legendre nodes/weights on [-1, 1], cached per order.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

struct RadialOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-15;
  int initial_panels = 4;
  int max_panels = 4000;
};

/// Adaptive composite Gauss (12/24 nested pair per panel) on [a, b].
/// Throws IntegrationFailure(term) when the panel budget is exhausted.
IntegralEstimate integrate_interval(const std::function<double(double)>& f, double a, double b,
                                    const RadialOptions& opts = {},
                                    const std::string& term = "radial");
/// Integrand values that carry their own error; Σ w·error is added.
IntegralEstimate integrate_interval(const std::function<Measured(double)>& f, double a,
                                    double b, const RadialOptions& opts = {},
                                    const std::string& term = "radial");

/// ∫_0^r f(s) ds.
IntegralEstimate integrate_radial(const std::function<double(double)>& f, double r,
                                  const RadialOptions& opts = {});

/// Radius beyond which r^power e^{-rate r} stays below 1e-16 of its peak.
double truncation_radius(double rate, double power);

/// ∫_0^∞ f for f bounded by r^power e^{-rate r}, truncated per truncation_radius.
IntegralEstimate integrate_half_line(const std::function<double(double)>& f, double rate,
                                     double power, const RadialOptions& opts = {},
                                     const std::string& term = "radial");

// ---------------------------------------------------------------------------
// Marginal (hat-space) integrals

/// Deterministic product grid for N = 2, in coordinates centred on both the
/// nucleus and the fixed electron: r2 = |x2|, u = |x - x2|, azimuth about x.
struct HatGrid {
  int radial_order = 16;   // Gauss points per r2 panel
  int angular_order = 16;  // Gauss points in the u direction
  int azimuth_points = 4;
  /// Amplitude decay rate of the integrand's electron (0 → Z/2).
  double decay_rate = 0.0;
};

/// Importance-sampled Monte Carlo. Each hat electron is drawn from the density
/// λ³ e^{-λ|y|}/(8π).
struct McSampler {
  std::uint64_t seed = 1;
  std::int64_t n_samples = 100000;
  /// λ; 0 → Z/2.
  double envelope_rate = 0.0;
};

using HatMethod = std::variant<HatGrid, McSampler>;

/// The grid used for error estimates: every order scaled by 3/4.
HatGrid coarser(const HatGrid& g);

/// f(hat, out): out has n_components slots, zero-initialized.
using HatIntegrand = std::function<void(std::span<const Vec3> hat, std::span<double> out)>;

/// ∫ f(x̂) dx̂ over R^{3N-3} for the electron fixed at x. N = 1 is a point
/// evaluation; N = 2 uses the grid unless a sampler is given; N >= 3 needs a
/// sampler (ContractViolation otherwise).
std::vector<IntegralEstimate> integrate_hat(const HatIntegrand& f, std::size_t n_components,
                                            const AtomSpec& spec, const Vec3& x,
                                            const HatMethod& method);

/// Counter-based uniform draw in (0, 1) for (seed, sample, stream).
double counter_uniform(std::uint64_t seed, std::uint64_t sample, std::uint64_t stream);

}  // namespace cusplab

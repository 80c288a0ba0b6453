#pragma once

#include "cusplab/atom.hpp"
#include "cusplab/common.hpp"

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace cusplab {

/// Electron positions x_1..x_N.
using Configuration = std::vector<Vec3>;

/// Hydrogenic eigenstate (n, l, m) of -Δ - Z/|x|. Real solid harmonics,
/// n <= 4.
struct Hydrogenic {
  int n = 1;
  int l = 0;
  int m = 0;
  double charge = 1.0;
};

/// Radial orbital (Σ_k poly[k] r^k) e^{-exponent r}.
struct SlaterOrbital {
  double exponent = 1.0;
  std::vector<double> poly{1.0};
};

/// Π_j orbital_j(|x_j|). `charge` is the nuclear charge the model is meant for.
struct OrbitalProduct {
  double charge = 1.0;
  std::vector<SlaterOrbital> orbitals;
};

/// One term coeff · s^s_pow t^t_pow u^u_pow with s = r1 + r2, t = r1 - r2,
/// u = |x1 - x2|.
struct HylleraasTerm {
  int s_pow = 0;
  int t_pow = 0;
  int u_pow = 0;
  double coeff = 1.0;
};

/// e^{-alpha s} Σ terms, two electrons.
struct HylleraasHelium {
  double charge = 2.0;
  double alpha = 1.0;
  std::vector<HylleraasTerm> terms;
};

class WavefunctionModel {
 public:
  using Variant = std::variant<Hydrogenic, OrbitalProduct, HylleraasHelium>;

  /// Throws ContractViolation / DomainError on invalid parameters.
  explicit WavefunctionModel(Variant variant, double norm_constant = 1.0);

  const Variant& variant() const { return variant_; }
  double norm_constant() const { return norm_; }
  int n_electrons() const;
  double charge() const;
  /// True only for the hydrogenic family (exact eigenfunctions).
  bool is_eigenfunction() const;
  /// Every electron slot is an s-type factor.
  bool is_s_type() const;
  /// Slowest exponential decay rate of |ψ| in any single electron coordinate.
  double decay_rate() const;
  std::string describe() const;

  /// Same model, norm constant multiplied by `factor` (0 allowed).
  WavefunctionModel scaled(double factor) const;
  WavefunctionModel with_norm(double norm_constant) const;

  double psi(std::span<const Vec3> c) const;
  /// ∇_j ψ. Throws SingularPoint when x_j sits on the nucleus or (Hylleraas)
  /// on the other electron.
  Vec3 grad_electron(std::span<const Vec3> c, int j) const;
  /// Full gradient, length 3N.
  Eigen::VectorXd grad(std::span<const Vec3> c) const;
  /// lim_{s↓0} ∇_j ψ at x_j = s·omega, others fixed (c[j] ignored).
  Vec3 grad_limit(std::span<const Vec3> c, int j, const Vec3& omega) const;
  /// 3N × 3N Hessian at a regular configuration.
  Eigen::MatrixXd hessian(std::span<const Vec3> c) const;

  struct Detail;

 private:
  Variant variant_;
  double norm_ = 1.0;
  std::shared_ptr<const Detail> detail_;
};

/// Throws ContractViolation if c.size() != N.
double eval_psi(const WavefunctionModel& model, std::span<const Vec3> c);
Eigen::VectorXd eval_grad_psi(const WavefunctionModel& model, std::span<const Vec3> c);

/// Configuration with `x` in slot j and `hat` filling the other slots in order.
Configuration assemble(int j, const Vec3& x, std::span<const Vec3> hat);

/// e^{(Z/2)|x|} ψ(x, hat) with x in slot j.
double eval_phi(const WavefunctionModel& model, int j, const Vec3& x,
                std::span<const Vec3> hat);

/// ∇_x of the regularized factor. At x = 0 the value is the analytic limit;
/// throws UnsupportedModel when that limit depends on the direction.
Vec3 eval_grad_phi(const WavefunctionModel& model, int j, const Vec3& x,
                   std::span<const Vec3> hat);

/// Returns the model rescaled to unit L² norm.
WavefunctionModel normalize(const WavefunctionModel& model);

/// ∫|ψ|² over R^{3N} with error.
Measured norm_squared(const WavefunctionModel& model);

}  // namespace cusplab

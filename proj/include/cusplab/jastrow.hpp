#pragma once

#include "cusplab/wavefunction.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cusplab {

/// Coefficient of the (x_i·x_j) ln(|x_i|² + |x_j|²) pair term, (2 - π)/(12π).
inline constexpr double log_pair_coefficient = (2.0 - pi) / (12.0 * pi);

/// Smooth plateau: 1 on |t| ≤ 1, 0 on |t| ≥ 2, built from s ↦ e^{-1/s}.
struct CutoffValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};
CutoffValue cutoff(double t);

/// Σ -(Z/2)|x_i| + Σ_{i<j} |x_i - x_j|/4.
double f2(const Configuration& c, double charge);
/// C Σ_{i<j} Z (x_i·x_j) ln(|x_i|² + |x_j|²); a pair with both electrons on
/// the nucleus contributes its limit 0.
double f3(const Configuration& c, double charge);

struct JastrowParts {
  double f2 = 0.0;
  double f3 = 0.0;
  double f2_cut = 0.0;
  double f3_cut = 0.0;
  /// ∇(f2_cut + f3_cut), length 3N.
  Eigen::VectorXd grad;
  /// ∂²(f2_cut + f3_cut), 3N × 3N.
  Eigen::MatrixXd hessian;

  /// ∂²F_cut / ∂x_{i,k} ∂x_{j,m}.
  double hessian_entry(int i, int k, int j, int m) const { return hessian(3 * i + k, 3 * j + m); }
};

/// No electron on the nucleus and no two electrons coincide.
bool is_regular(const Configuration& c);

/// Values everywhere; grad and hessian are left empty off regular
/// configurations.
JastrowParts f_cut(const Configuration& c, double charge);

/// Single entry of the F_cut Hessian. Throws SingularPoint off regular
/// configurations.
double second_partial_fcut(const Configuration& c, double charge, int i, int k, int j, int m);

/// Central-difference Hessian of the F_cut value with one Richardson step.
/// The step shrinks to a twentieth of the closest electron-nucleus or
/// electron-electron distance.
Eigen::MatrixXd fcut_hessian_fd(const Configuration& c, double charge, double step = 1e-3);

/// Gradient and Hessian of the un-cut F2 and F3.
Eigen::VectorXd grad_f2(const Configuration& c, double charge);
Eigen::MatrixXd hessian_f2(const Configuration& c, double charge);
Eigen::VectorXd grad_f3(const Configuration& c, double charge);
Eigen::MatrixXd hessian_f3(const Configuration& c, double charge);
/// Hessian of the cut two-body-distance factor alone.
Eigen::MatrixXd hessian_f2_cut(const Configuration& c, double charge);
/// Log-leading part of ∂²F3_cut: C Z Σ_{i<j} χ(|x_i|)χ(|x_j|) ln(|x_i|²+|x_j|²) ∂²(x_i·x_j).
Eigen::MatrixXd hessian_f3_log_part(const Configuration& c, double charge);

struct IdentitySides {
  double lhs = 0.0;
  double rhs = 0.0;
  /// |lhs - rhs| / max(|lhs|, 1).
  double residual() const;
};

/// Σ_{ℓ,k,m} 2 (x_{1,k}/|x_1|) ∂_{ℓ,m}ψ ψ ∂²F2/∂x_{1,k}∂x_{ℓ,m} against its
/// pair-sum closed form. Throws SingularPoint off regular configurations.
IdentitySides contracted_f2_identity(const WavefunctionModel& model, const Configuration& c);
/// Same contraction with the log-leading part of ∂²F3_cut.
IdentitySides f3_log_contraction(const WavefunctionModel& model, const Configuration& c);

/// Uniform point in the 3N-ball of radius `scale` about the origin, redrawn
/// until regular.
Configuration random_configuration(int n_electrons, double scale, std::uint64_t seed,
                                   std::uint64_t index);

struct AprioriResult {
  double ratio = 0.0;
  double numerator = 0.0;    ///< sup over R-ball samples of max |∂²ψ - ψ∂²F_cut|
  double denominator = 0.0;  ///< sup over R'-ball samples of |ψ|
  /// Same ratio with four times the samples.
  double refined_ratio = 0.0;
  /// sup of max |∂²ψ| without the subtraction, at both sample counts.
  double raw_sup = 0.0;
  double refined_raw_sup = 0.0;
  bool unstable = false;
  std::string notice;
};

/// Sampled form of ‖∂²ψ - ψ∂²F_cut‖_{L∞(B_R)} / ‖ψ‖_{L∞(B_R')}. Samples on
/// the singular set are redrawn.
AprioriResult apriori_residual(const WavefunctionModel& model, const Configuration& center,
                               double inner_radius, double outer_radius, int sample_count,
                               std::uint64_t seed = 1);

struct SmoothnessRow {
  double radius = 0.0;
  double quotient = 0.0;  ///< sup |∇φ(a) - ∇φ(b)| / |a - b|
};

struct SmoothnessProbe {
  std::vector<SmoothnessRow> rows;
  /// Quotient at the smallest radius above 10× the quotient at the largest.
  bool unbounded = false;
};

/// ∇ of ψ e^{-(F2 + F3)} at a regular configuration.
Eigen::VectorXd grad_regular_part(const WavefunctionModel& model, const Configuration& c);

/// Pairs a, b = center ± δu for u over the 3N coordinate axes and the two
/// diagonals (1, ..., 1)/√(3N), (1, -1, ...)/√(3N).
SmoothnessProbe phi3_smoothness_probe(const WavefunctionModel& model, const Configuration& center,
                                      const std::vector<double>& radii);

}  // namespace cusplab

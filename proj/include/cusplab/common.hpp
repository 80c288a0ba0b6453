#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cusplab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double pi = std::numbers::pi;
inline constexpr double four_pi = 4.0 * std::numbers::pi;
inline constexpr double machine_eps = 2.220446049250313e-16;

// ---------------------------------------------------------------------------
// Error hierarchy. Every failure the library can report derives from Error so
// the CLI can map categories onto exit codes.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a documented precondition (wrong dimension, bad index, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Evaluation requested exactly on the nucleus or on a particle coincidence
/// where the quantity is not defined.
class SingularPoint : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// The model cannot provide the requested quantity (e.g. a regularized factor
/// that is not differentiable at the nucleus).
class UnsupportedModel : public Error {
 public:
  using Error::Error;
};

class IntegrationFailure : public Error {
 public:
  IntegrationFailure(std::string term, const std::string& what)
      : Error(term + ": " + what), term_(std::move(term)) {}
  const std::string& term() const { return term_; }

 private:
  std::string term_;
};

/// Two algebraically equivalent routes disagreed beyond their error budget.
class InternalConsistency : public Error {
 public:
  using Error::Error;
};

/// A value together with an absolute error bar.
struct Measured {
  double value = 0.0;
  double error = 0.0;
};

/// Pairwise (cascade) summation; the result depends only on the order of
/// `values`, never on how they were produced.
double pairwise_sum(std::span<const double> values);

/// Orthonormal pair (e1, e2) completing `axis` (unit) to a right-handed basis.
std::pair<Vec3, Vec3> orthonormal_complement(const Vec3& axis);

}  // namespace cusplab

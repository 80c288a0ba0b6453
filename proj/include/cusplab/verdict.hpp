#pragma once

#include "cusplab/common.hpp"

#include <string>
#include <string_view>

namespace cusplab {

enum class Verdict { holds, holds_at_equality, violated_beyond_error, skipped };
std::string_view verdict_name(Verdict v);

/// lhs ≥ rhs, lhs ≤ rhs, or lhs = rhs.
enum class Sense { at_least, at_most, equal };
std::string_view sense_symbol(Sense s);

/// |margin| ≤ max(1e-10, 3·error) counts as equality.
double equality_tolerance(double error);
Verdict classify(double margin, double error, Sense sense);

struct BoundRow {
  std::string name;
  Sense sense = Sense::at_least;
  Measured lhs;
  Measured rhs;
  double margin = 0.0;  ///< lhs.value - rhs.value
  double error = 0.0;   ///< lhs.error + rhs.error
  Verdict verdict = Verdict::skipped;
  /// Derived from Hψ = Eψ; on trial functions the row is diagnostic only.
  bool eigen_only = false;
  /// The row's hypotheses are not guaranteed for this model, so a violation
  /// is informative rather than a failure.
  bool diagnostic = false;
  std::string notice;
};

BoundRow make_bound(std::string name, Sense sense, Measured lhs, Measured rhs, bool eigen_only);
BoundRow skipped_bound(std::string name, Sense sense, bool eigen_only, std::string notice);

}  // namespace cusplab

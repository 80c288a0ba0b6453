#include "cusplab/verdict.hpp"

#include <algorithm>
#include <cmath>

namespace cusplab {

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::holds_at_equality: return "holds-at-equality";
    case Verdict::violated_beyond_error: return "violated-beyond-error";
    case Verdict::skipped: return "skipped";
  }
  return "?";
}

std::string_view sense_symbol(Sense s) {
  switch (s) {
    case Sense::at_least: return ">=";
    case Sense::at_most: return "<=";
    case Sense::equal: return "==";
  }
  return "?";
}

double equality_tolerance(double error) { return std::max(1e-10, 3.0 * error); }

Verdict classify(double margin, double error, Sense sense) {
  if (!std::isfinite(margin)) return Verdict::violated_beyond_error;
  if (std::abs(margin) <= equality_tolerance(error)) return Verdict::holds_at_equality;
  switch (sense) {
    case Sense::at_least: return margin > 0.0 ? Verdict::holds : Verdict::violated_beyond_error;
    case Sense::at_most: return margin < 0.0 ? Verdict::holds : Verdict::violated_beyond_error;
    case Sense::equal: return Verdict::violated_beyond_error;
  }
  return Verdict::violated_beyond_error;
}

BoundRow make_bound(std::string name, Sense sense, Measured lhs, Measured rhs, bool eigen_only) {
  BoundRow b;
  b.name = std::move(name);
  b.sense = sense;
  b.lhs = lhs;
  b.rhs = rhs;
  b.margin = lhs.value - rhs.value;
  b.error = lhs.error + rhs.error;
  b.verdict = classify(b.margin, b.error, sense);
  b.eigen_only = eigen_only;
  return b;
}

BoundRow skipped_bound(std::string name, Sense sense, bool eigen_only, std::string notice) {
  BoundRow b;
  b.name = std::move(name);
  b.sense = sense;
  b.eigen_only = eigen_only;
  b.verdict = Verdict::skipped;
  b.notice = std::move(notice);
  return b;
}

}  // namespace cusplab

#include "cusplab/common.hpp"

namespace cusplab {

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t block = 16;
  if (values.size() <= block) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::pair<Vec3, Vec3> orthonormal_complement(const Vec3& axis) {
  // Pick the coordinate axis least aligned with `axis` to seed Gram-Schmidt.
  Eigen::Index k = 0;
  axis.cwiseAbs().minCoeff(&k);
  const Vec3 seed = Vec3::Unit(k);
  Vec3 e1 = (seed - axis.dot(seed) * axis).normalized();
  Vec3 e2 = axis.cross(e1);
  return {e1, e2};
}

}  // namespace cusplab

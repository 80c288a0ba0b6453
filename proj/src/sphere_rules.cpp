// Octahedrally symmetric (Lebedev) rules on S².

#include "cusplab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <map>

namespace cusplab {

namespace {

// Orbit generators, in the usual Lebedev–Laikov numbering:
//   1: (1,0,0)            6 points
//   2: (0,a,a), a=√½      12 points
//   3: (a,a,a), a=1/√3    8 points
//   4: (a,a,b)            24 points
//   5: (a,b,0)            24 points
//   6: (a,b,c)            48 points
struct Orbit {
  int kind;
  double a;
  double b;
  double v;
};

void push_signed_perms(double x, double y, double z, double w, std::vector<Vec3>& nodes,
                       std::vector<double>& weights) {
  std::array<double, 3> base{x, y, z};
  std::sort(base.begin(), base.end());
  std::vector<Vec3> seen;
  do {
    for (int s = 0; s < 8; ++s) {
      Vec3 p(base[0] * ((s & 1) ? -1.0 : 1.0), base[1] * ((s & 2) ? -1.0 : 1.0),
             base[2] * ((s & 4) ? -1.0 : 1.0));
      bool dup = false;
      for (const auto& q : seen) {
        if ((p - q).lpNorm<Eigen::Infinity>() == 0.0) {
          dup = true;
          break;
        }
      }
      if (!dup) seen.push_back(p);
    }
  } while (std::next_permutation(base.begin(), base.end()));
  for (const auto& p : seen) {
    nodes.push_back(p);
    weights.push_back(four_pi * w);
  }
}

SphericalRule build(int degree, std::initializer_list<Orbit> orbits) {
  SphericalRule rule;
  rule.degree = degree;
  for (const auto& o : orbits) {
    switch (o.kind) {
      case 1:
        push_signed_perms(1.0, 0.0, 0.0, o.v, rule.nodes, rule.weights);
        break;
      case 2: {
        const double a = std::sqrt(0.5);
        push_signed_perms(0.0, a, a, o.v, rule.nodes, rule.weights);
        break;
      }
      case 3: {
        const double a = 1.0 / std::sqrt(3.0);
        push_signed_perms(a, a, a, o.v, rule.nodes, rule.weights);
        break;
      }
      case 4:
        push_signed_perms(o.a, o.a, std::sqrt(1.0 - 2.0 * o.a * o.a), o.v, rule.nodes,
                          rule.weights);
        break;
      case 5:
        push_signed_perms(o.a, std::sqrt(1.0 - o.a * o.a), 0.0, o.v, rule.nodes, rule.weights);
        break;
      case 6:
        push_signed_perms(o.a, o.b, std::sqrt(1.0 - o.a * o.a - o.b * o.b), o.v, rule.nodes,
                          rule.weights);
        break;
      default:
        throw InternalConsistency("bad orbit kind");
    }
  }
  return rule;
}

const std::map<int, SphericalRule>& rules() {
  static const std::map<int, SphericalRule> table = [] {
    std::map<int, SphericalRule> t;
    t.emplace(3, build(3, {{1, 0, 0, 1.0 / 6.0}}));
    t.emplace(7, build(7, {{1, 0, 0, 1.0 / 21.0}, {2, 0, 0, 4.0 / 105.0}, {3, 0, 0, 9.0 / 280.0}}));
    t.emplace(17, build(17, {
                                {1, 0, 0, 0.3828270494937162E-2},
                                {3, 0, 0, 0.9793737512487512E-2},
                                {4, 0.1851156353447362, 0, 0.8211737283191111E-2},
                                {4, 0.6904210483822922, 0, 0.9942814891178103E-2},
                                {4, 0.3956894730559419, 0, 0.9595471336070963E-2},
                                {5, 0.4783690288121502, 0, 0.9694996361663028E-2},
                            }));
    t.emplace(29, build(29, {
                                {1, 0, 0, 0.8545911725128148E-3},
                                {3, 0, 0, 0.3599119285025571E-2},
                                {4, 0.3515640345570105, 0, 0.3449788424305883E-2},
                                {4, 0.6566329410219612, 0, 0.3604822601419882E-2},
                                {4, 0.4729054132581005, 0, 0.3576729661743367E-2},
                                {4, 0.9618308522614784E-1, 0, 0.2352101413689164E-2},
                                {4, 0.2219645236294178, 0, 0.3108953122413675E-2},
                                {4, 0.7011766416089545, 0, 0.3650045807677255E-2},
                                {5, 0.2644152887060663, 0, 0.2982344963171804E-2},
                                {5, 0.5718955891878961, 0, 0.3600820932216460E-2},
                                {6, 0.2510034751770465, 0.8000727494073952, 0.3571540554273387E-2},
                                {6, 0.1233548532583327, 0.4127724083168531, 0.3392312205006170E-2},
                            }));
    return t;
  }();
  return table;
}

constexpr std::array<int, 4> kDegrees{3, 7, 17, 29};

}  // namespace

std::span<const int> shipped_sphere_degrees() { return kDegrees; }

const SphericalRule& sphere_rule(int degree) {
  const auto& t = rules();
  auto it = t.find(degree);
  if (it == t.end())
    throw ContractViolation("no spherical rule of degree " + std::to_string(degree) +
                            " (shipped: 3, 7, 17, 29)");
  return it->second;
}

int companion_degree(int degree) {
  switch (degree) {
    case 3: return 7;
    case 7: return 17;
    case 17: return 29;
    case 29: return 17;
    default:
      throw ContractViolation("no spherical rule of degree " + std::to_string(degree));
  }
}

}  // namespace cusplab

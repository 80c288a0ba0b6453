#include "cusplab/jastrow.hpp"

#include "cusplab/parallel.hpp"
#include "cusplab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cusplab {

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Value, gradient and Hessian of a function of one electron pair.
struct PairJet {
  double v = 1.0;
  Vec6 g = Vec6::Zero();
  Mat6 h = Mat6::Zero();
};

PairJet operator*(const PairJet& a, const PairJet& b) {
  PairJet p;
  p.v = a.v * b.v;
  p.g = a.g * b.v + a.v * b.g;
  p.h = a.h * b.v + a.v * b.h + a.g * b.g.transpose() + b.g * a.g.transpose();
  return p;
}

/// Hessian of f(|x|) given f' and f'' at r = |x| > 0.
Mat3 radial_hessian(const Vec3& x, double r, double d1, double d2) {
  const Vec3 u = x / r;
  const Mat3 P = u * u.transpose();
  return d2 * P + (d1 / r) * (Mat3::Identity() - P);
}

/// χ(|x_slot|) as a pair function.
PairJet cutoff_jet(const Vec3& x, int slot) {
  PairJet p;
  const double r = x.norm();
  const CutoffValue cv = cutoff(r);
  p.v = cv.value;
  if (cv.d1 != 0.0 || cv.d2 != 0.0) {
    p.g.segment<3>(3 * slot) = cv.d1 * x / r;
    p.h.block<3, 3>(3 * slot, 3 * slot) = radial_hessian(x, r, cv.d1, cv.d2);
  }
  return p;
}

PairJet dot_jet(const Vec3& x, const Vec3& y) {
  PairJet p;
  p.v = x.dot(y);
  p.g << y, x;
  p.h.block<3, 3>(0, 3) = Mat3::Identity();
  p.h.block<3, 3>(3, 0) = Mat3::Identity();
  return p;
}

PairJet log_jet(const Vec3& x, const Vec3& y) {
  PairJet p;
  const double s = x.squaredNorm() + y.squaredNorm();
  Vec6 z;
  z << x, y;
  p.v = std::log(s);
  p.g = 2.0 * z / s;
  p.h = 2.0 * Mat6::Identity() / s - 4.0 * z * z.transpose() / (s * s);
  return p;
}

PairJet f3_pair(const Vec3& x, const Vec3& y, double charge, bool cut) {
  PairJet p = dot_jet(x, y) * log_jet(x, y);
  if (cut) p = cutoff_jet(x, 0) * cutoff_jet(y, 1) * p;
  p.v *= log_pair_coefficient * charge;
  p.g *= log_pair_coefficient * charge;
  p.h *= log_pair_coefficient * charge;
  return p;
}

double f3_pair_value(const Vec3& x, const Vec3& y, double charge) {
  const double s = x.squaredNorm() + y.squaredNorm();
  if (s == 0.0) return 0.0;
  return log_pair_coefficient * charge * x.dot(y) * std::log(s);
}

void add_pair(Eigen::VectorXd& g, Eigen::MatrixXd& h, int i, int j, const PairJet& p) {
  g.segment<3>(3 * i) += p.g.head<3>();
  g.segment<3>(3 * j) += p.g.tail<3>();
  h.block<3, 3>(3 * i, 3 * i) += p.h.block<3, 3>(0, 0);
  h.block<3, 3>(3 * i, 3 * j) += p.h.block<3, 3>(0, 3);
  h.block<3, 3>(3 * j, 3 * i) += p.h.block<3, 3>(3, 0);
  h.block<3, 3>(3 * j, 3 * j) += p.h.block<3, 3>(3, 3);
}

/// -(Z/2)|x|·χ and |d|·χ/4 share the radial profile f(r) = (χ(r) or 1)·r.
struct RadialJet {
  double f, d1, d2;
};
RadialJet distance_jet(double r, bool cut) {
  if (!cut) return {r, 1.0, 0.0};
  const CutoffValue c = cutoff(r);
  return {c.value * r, c.d1 * r + c.value, c.d2 * r + 2.0 * c.d1};
}

void require_regular(const Configuration& c, const char* what) {
  if (!is_regular(c)) throw SingularPoint(std::string(what) + " requested at a singular configuration");
}

/// Gradient and Hessian of the two-body-distance part (cut or not).
void f2_derivatives(const Configuration& c, double charge, bool cut, Eigen::VectorXd& g,
                    Eigen::MatrixXd& h) {
  const int n = static_cast<int>(c.size());
  for (int i = 0; i < n; ++i) {
    const double r = c[i].norm();
    const RadialJet d = distance_jet(r, cut);
    g.segment<3>(3 * i) += -0.5 * charge * d.d1 * c[i] / r;
    h.block<3, 3>(3 * i, 3 * i) += -0.5 * charge * radial_hessian(c[i], r, d.d1, d.d2);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Vec3 diff = c[i] - c[j];
      const double r = diff.norm();
      const RadialJet d = distance_jet(r, cut);
      const Vec3 gd = 0.25 * d.d1 * diff / r;
      const Mat3 hd = 0.25 * radial_hessian(diff, r, d.d1, d.d2);
      g.segment<3>(3 * i) += gd;
      g.segment<3>(3 * j) -= gd;
      h.block<3, 3>(3 * i, 3 * i) += hd;
      h.block<3, 3>(3 * j, 3 * j) += hd;
      h.block<3, 3>(3 * i, 3 * j) -= hd;
      h.block<3, 3>(3 * j, 3 * i) -= hd;
    }
}

void f3_derivatives(const Configuration& c, double charge, bool cut, Eigen::VectorXd& g,
                    Eigen::MatrixXd& h) {
  const int n = static_cast<int>(c.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) add_pair(g, h, i, j, f3_pair(c[i], c[j], charge, cut));
}

Vec3 normal_vec3(std::uint64_t seed, std::uint64_t sample, std::uint64_t stream) {
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    // Box-Muller on two counter draws.
    const double u1 = counter_uniform(seed, sample, stream + 2 * k);
    const double u2 = counter_uniform(seed, sample, stream + 2 * k + 1);
    v[k] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
  }
  return v;
}

/// Uniform offset in the 3N-ball of radius `radius`.
Configuration ball_offset(int n, double radius, std::uint64_t seed, std::uint64_t sample,
                          std::uint64_t stream) {
  Configuration c(n);
  double norm2 = 0.0;
  for (int i = 0; i < n; ++i) {
    c[i] = normal_vec3(seed, sample, stream + 6 * i);
    norm2 += c[i].squaredNorm();
  }
  const double u = counter_uniform(seed, sample, stream + 6 * n);
  const double scale = radius * std::pow(u, 1.0 / (3.0 * n)) / std::sqrt(norm2);
  for (auto& x : c) x *= scale;
  return c;
}

Configuration regular_ball_point(const Configuration& center, double radius, std::uint64_t seed,
                                 std::uint64_t sample, std::uint64_t stream) {
  const int n = static_cast<int>(center.size());
  for (std::uint64_t attempt = 0;; ++attempt) {
    Configuration c = ball_offset(n, radius, seed, sample, stream + attempt * (6 * n + 1));
    for (int i = 0; i < n; ++i) c[i] += center[i];
    if (is_regular(c)) return c;
  }
}

}  // namespace

CutoffValue cutoff(double t) {
  const double a = std::abs(t);
  if (a <= 1.0) return {1.0, 0.0, 0.0};
  if (a >= 2.0) return {0.0, 0.0, 0.0};
  // χ = 1/(1 + e^L) with L = 1/(2-a) - 1/(a-1).
  const double p = 2.0 - a, q = a - 1.0;
  const double L = 1.0 / p - 1.0 / q;
  const double dL = 1.0 / (p * p) + 1.0 / (q * q);
  const double d2L = 2.0 / (p * p * p) - 2.0 / (q * q * q);
  const double e = std::exp(-std::abs(L));
  const double chi = L > 0.0 ? e / (1.0 + e) : 1.0 / (1.0 + e);
  const double s = e / ((1.0 + e) * (1.0 + e));  // χ(1 - χ)
  const double d1 = -s * dL;
  const double d2 = -(1.0 - 2.0 * chi) * d1 * dL - s * d2L;
  const double sign = t < 0.0 ? -1.0 : 1.0;
  return {chi, sign * d1, d2};
}

double f2(const Configuration& c, double charge) {
  double v = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) v -= 0.5 * charge * c[i].norm();
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) v += 0.25 * (c[i] - c[j]).norm();
  return v;
}

double f3(const Configuration& c, double charge) {
  double v = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) v += f3_pair_value(c[i], c[j], charge);
  return v;
}

bool is_regular(const Configuration& c) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i].squaredNorm() == 0.0) return false;
    for (std::size_t j = i + 1; j < c.size(); ++j)
      if (c[i] == c[j]) return false;
  }
  return true;
}

JastrowParts f_cut(const Configuration& c, double charge) {
  JastrowParts p;
  p.f2 = f2(c, charge);
  p.f3 = f3(c, charge);
  const int n = static_cast<int>(c.size());
  for (int i = 0; i < n; ++i) {
    const double r = c[i].norm();
    p.f2_cut -= 0.5 * charge * cutoff(r).value * r;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double r = (c[i] - c[j]).norm();
      p.f2_cut += 0.25 * cutoff(r).value * r;
      p.f3_cut += cutoff(c[i].norm()).value * cutoff(c[j].norm()).value *
                  f3_pair_value(c[i], c[j], charge);
    }
  if (!is_regular(c)) return p;
  p.grad = Eigen::VectorXd::Zero(3 * n);
  p.hessian = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  f2_derivatives(c, charge, true, p.grad, p.hessian);
  f3_derivatives(c, charge, true, p.grad, p.hessian);
  return p;
}

double second_partial_fcut(const Configuration& c, double charge, int i, int k, int j, int m) {
  const int n = static_cast<int>(c.size());
  if (i < 0 || j < 0 || i >= n || j >= n || k < 0 || m < 0 || k > 2 || m > 2)
    throw ContractViolation("second_partial_fcut: index out of range");
  require_regular(c, "F_cut second partial");
  return f_cut(c, charge).hessian_entry(i, k, j, m);
}

Eigen::MatrixXd fcut_hessian_fd(const Configuration& c, double charge, double step) {
  require_regular(c, "F_cut finite-difference Hessian");
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.size(); ++i) {
    closest = std::min(closest, c[i].norm());
    for (std::size_t j = i + 1; j < c.size(); ++j) closest = std::min(closest, (c[i] - c[j]).norm());
  }
  const double h = std::min(step, closest / 20.0);
  auto value = [&](const Configuration& y) {
    const JastrowParts p = f_cut(y, charge);
    return p.f2_cut + p.f3_cut;
  };
  auto moved = [](Configuration y, int a, double t) {
    y[a / 3][a % 3] += t;
    return y;
  };
  const int dim = static_cast<int>(3 * c.size());
  const double f0 = value(c);
  Eigen::MatrixXd out(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b) {
      auto stencil = [&](double s) {
        if (a == b) return (value(moved(c, a, s)) - 2.0 * f0 + value(moved(c, a, -s))) / (s * s);
        return (value(moved(moved(c, a, s), b, s)) - value(moved(moved(c, a, s), b, -s)) -
                value(moved(moved(c, a, -s), b, s)) + value(moved(moved(c, a, -s), b, -s))) /
               (4.0 * s * s);
      };
      out(a, b) = out(b, a) = (4.0 * stencil(h / 2.0) - stencil(h)) / 3.0;
    }
  return out;
}

Eigen::VectorXd grad_f2(const Configuration& c, double charge) {
  require_regular(c, "F2 gradient");
  const auto n = static_cast<Eigen::Index>(3 * c.size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  f2_derivatives(c, charge, false, g, h);
  return g;
}

Eigen::MatrixXd hessian_f2(const Configuration& c, double charge) {
  require_regular(c, "F2 Hessian");
  const auto n = static_cast<Eigen::Index>(3 * c.size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  f2_derivatives(c, charge, false, g, h);
  return h;
}

Eigen::MatrixXd hessian_f2_cut(const Configuration& c, double charge) {
  require_regular(c, "F2_cut Hessian");
  const auto n = static_cast<Eigen::Index>(3 * c.size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  f2_derivatives(c, charge, true, g, h);
  return h;
}

Eigen::VectorXd grad_f3(const Configuration& c, double charge) {
  require_regular(c, "F3 gradient");
  const auto n = static_cast<Eigen::Index>(3 * c.size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  f3_derivatives(c, charge, false, g, h);
  return g;
}

Eigen::MatrixXd hessian_f3(const Configuration& c, double charge) {
  require_regular(c, "F3 Hessian");
  const auto n = static_cast<Eigen::Index>(3 * c.size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  f3_derivatives(c, charge, false, g, h);
  return h;
}

Eigen::MatrixXd hessian_f3_log_part(const Configuration& c, double charge) {
  require_regular(c, "F3 log-part Hessian");
  const int n = static_cast<int>(c.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double coef = log_pair_coefficient * charge * cutoff(c[i].norm()).value *
                          cutoff(c[j].norm()).value *
                          std::log(c[i].squaredNorm() + c[j].squaredNorm());
      h.block<3, 3>(3 * i, 3 * j) += coef * Mat3::Identity();
      h.block<3, 3>(3 * j, 3 * i) += coef * Mat3::Identity();
    }
  return h;
}

double IdentitySides::residual() const {
  return std::abs(lhs - rhs) / std::max(std::abs(lhs), 1.0);
}

namespace {

/// Σ_{ℓ,k,m} 2 ω_k ∂_{ℓ,m}ψ ψ H(1k, ℓm).
double contract(const Eigen::MatrixXd& h, const Vec3& omega, const Eigen::VectorXd& grad,
                double psi) {
  const Eigen::RowVectorXd row = omega.transpose() * h.topRows(3);
  return 2.0 * psi * row.dot(grad);
}

}  // namespace

IdentitySides contracted_f2_identity(const WavefunctionModel& model, const Configuration& c) {
  require_regular(c, "F2 contraction");
  const double charge = model.charge();
  const double psi = eval_psi(model, c);
  const Eigen::VectorXd g = eval_grad_psi(model, c);
  const Vec3 omega = c[0] / c[0].norm();
  IdentitySides s;
  s.lhs = contract(hessian_f2(c, charge), omega, g, psi);
  const Vec3 g1 = g.head<3>();
  double sum = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    const Vec3 d = c[0] - c[i];
    const double u = d.norm();
    const Vec3 dg = g1 - g.segment<3>(3 * static_cast<Eigen::Index>(i));
    sum += omega.dot(dg) / u - omega.dot(d) / (u * u * u) * dg.dot(d);
  }
  s.rhs = 0.5 * psi * sum;
  return s;
}

IdentitySides f3_log_contraction(const WavefunctionModel& model, const Configuration& c) {
  require_regular(c, "F3 contraction");
  const double charge = model.charge();
  const double psi = eval_psi(model, c);
  const Eigen::VectorXd g = eval_grad_psi(model, c);
  const Vec3 omega = c[0] / c[0].norm();
  IdentitySides s;
  s.lhs = contract(hessian_f3_log_part(c, charge), omega, g, psi);
  const double chi1 = cutoff(c[0].norm()).value;
  double sum = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i)
    sum += chi1 * cutoff(c[i].norm()).value * std::log(c[0].squaredNorm() + c[i].squaredNorm()) *
           omega.dot(g.segment<3>(3 * static_cast<Eigen::Index>(i)));
  s.rhs = 2.0 * log_pair_coefficient * charge * psi * sum;
  return s;
}

Configuration random_configuration(int n_electrons, double scale, std::uint64_t seed,
                                   std::uint64_t index) {
  if (n_electrons < 1) throw ContractViolation("random_configuration: need at least one electron");
  return regular_ball_point(Configuration(n_electrons, Vec3::Zero()), scale, seed, index, 0);
}

AprioriResult apriori_residual(const WavefunctionModel& model, const Configuration& center,
                               double inner_radius, double outer_radius, int sample_count,
                               std::uint64_t seed) {
  if (static_cast<int>(center.size()) != model.n_electrons())
    throw ContractViolation("apriori_residual: center has the wrong number of electrons");
  if (!(inner_radius > 0.0 && inner_radius < outer_radius))
    throw DomainError("apriori_residual: need 0 < R < R'");
  if (sample_count < 1) throw DomainError("apriori_residual: sample_count must be positive");
  const double charge = model.charge();
  const std::size_t total = 4 * static_cast<std::size_t>(sample_count);

  struct Sample {
    double num = 0.0;
    double raw = 0.0;
    double inner_psi = 0.0;
    double outer_psi = 0.0;
  };
  const auto samples = parallel_map<Sample>(total, [&](std::size_t s) {
    Sample out;
    const Configuration x = regular_ball_point(center, inner_radius, seed, s, 0);
    const double psi = eval_psi(model, x);
    const Eigen::MatrixXd hpsi = model.hessian(x);
    out.raw = hpsi.cwiseAbs().maxCoeff();
    out.num = (hpsi - psi * f_cut(x, charge).hessian).cwiseAbs().maxCoeff();
    out.inner_psi = std::abs(psi);
    const Configuration y = regular_ball_point(center, outer_radius, seed, s, 1u << 20);
    out.outer_psi = std::abs(eval_psi(model, y));
    return out;
  });

  const double psi_center = std::abs(eval_psi(model, center));
  auto ratio_over = [&](std::size_t count, double& num, double& den, double& raw) {
    num = 0.0;
    raw = 0.0;
    den = psi_center;
    for (std::size_t s = 0; s < count; ++s) {
      num = std::max(num, samples[s].num);
      raw = std::max(raw, samples[s].raw);
      den = std::max({den, samples[s].inner_psi, samples[s].outer_psi});
    }
    return den > 0.0 ? num / den : 0.0;
  };

  AprioriResult r;
  r.ratio = ratio_over(static_cast<std::size_t>(sample_count), r.numerator, r.denominator,
                       r.raw_sup);
  double num4 = 0.0, den4 = 0.0;
  r.refined_ratio = ratio_over(total, num4, den4, r.refined_raw_sup);
  if (den4 == 0.0) r.notice = "sampled sup of |psi| is zero; ratio reported as 0";
  r.unstable = r.refined_ratio > 10.0 * r.ratio && r.refined_ratio > 0.0;
  if (r.unstable) r.notice = "ratio grew more than tenfold under fourfold sampling";
  return r;
}

namespace {

/// ∇ of the regular part and a magnitude for its rounding error.
Eigen::VectorXd regular_grad(const WavefunctionModel& model, const Configuration& c,
                             double* scale) {
  require_regular(c, "regular-part gradient");
  const double charge = model.charge();
  const double w = std::exp(-(f2(c, charge) + f3(c, charge)));
  const Eigen::VectorXd gF = grad_f2(c, charge) + grad_f3(c, charge);
  const Eigen::VectorXd gpsi = eval_grad_psi(model, c);
  const double psi = eval_psi(model, c);
  if (scale) *scale = w * (gpsi.norm() + std::abs(psi) * gF.norm());
  return w * (gpsi - psi * gF);
}

}  // namespace

Eigen::VectorXd grad_regular_part(const WavefunctionModel& model, const Configuration& c) {
  return regular_grad(model, c, nullptr);
}

SmoothnessProbe phi3_smoothness_probe(const WavefunctionModel& model, const Configuration& center,
                                      const std::vector<double>& radii) {
  if (static_cast<int>(center.size()) != model.n_electrons())
    throw ContractViolation("phi3_smoothness_probe: center has the wrong number of electrons");
  const auto dim = static_cast<Eigen::Index>(3 * center.size());
  std::vector<Eigen::VectorXd> dirs;
  for (Eigen::Index a = 0; a < dim; ++a) dirs.push_back(Eigen::VectorXd::Unit(dim, a));
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(dim), alt(dim);
  for (Eigen::Index a = 0; a < dim; ++a) alt[a] = a % 2 == 0 ? 1.0 : -1.0;
  dirs.push_back(diag.normalized());
  dirs.push_back(alt.normalized());

  auto shifted = [&](const Eigen::VectorXd& u, double t) {
    Configuration c = center;
    for (std::size_t i = 0; i < c.size(); ++i)
      c[i] += t * u.segment<3>(3 * static_cast<Eigen::Index>(i));
    return c;
  };

  SmoothnessProbe probe;
  std::vector<double> noise_by_row;
  for (double delta : radii) {
    if (!(delta > 0.0)) throw DomainError("phi3_smoothness_probe: radii must be positive");
    SmoothnessRow row{delta, 0.0};
    double noise = 0.0;
    for (const auto& u : dirs) {
      const Configuration a = shifted(u, delta), b = shifted(u, -delta);
      if (!is_regular(a) || !is_regular(b)) continue;
      double sa = 0.0, sb = 0.0;
      const double q =
          (regular_grad(model, a, &sa) - regular_grad(model, b, &sb)).norm() / (2.0 * delta);
      row.quotient = std::max(row.quotient, q);
      noise = std::max(noise, 64.0 * machine_eps * (sa + sb) / (2.0 * delta));
    }
    probe.rows.push_back(row);
    noise_by_row.push_back(noise);
  }
  if (probe.rows.size() >= 2) {
    std::size_t lo = 0, hi = 0;
    for (std::size_t k = 1; k < probe.rows.size(); ++k) {
      if (probe.rows[k].radius < probe.rows[lo].radius) lo = k;
      if (probe.rows[k].radius > probe.rows[hi].radius) hi = k;
    }
    // Growth that rounding alone could produce does not count.
    probe.unbounded = probe.rows[lo].quotient > 10.0 * probe.rows[hi].quotient + noise_by_row[lo];
  }
  return probe;
}

}  // namespace cusplab

#include "cusplab/density.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <ostream>

namespace cusplab {

HatMethod coarse_hat(const HatMethod& m) {
  if (const auto* g = std::get_if<HatGrid>(&m)) return coarser(*g);
  return m;
}

void RadialSamples::validate() const {
  if (radii.size() != values.size())
    throw ContractViolation("radial samples: radii and values differ in length");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] >= 0.0)) throw ContractViolation("radial samples: negative radius");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw ContractViolation("radial samples: radii not strictly ascending");
  }
}

const IntegralEstimate& RadialSamples::at(double r) const {
  const auto it = std::lower_bound(radii.begin(), radii.end(), r);
  if (it == radii.end() || *it != r)
    throw ContractViolation(fmt::format("radial samples of {} have no radius {}", quantity, r));
  return values[static_cast<std::size_t>(it - radii.begin())];
}

void write_csv_rows(std::ostream& os, const RadialSamples& s, const std::string& flag) {
  for (std::size_t i = 0; i < s.radii.size(); ++i) {
    const auto& e = s.values[i];
    os << fmt::format("{},{},{},{},{},{}\n", s.quantity, s.radii[i], e.value,
                      e.error, method_name(e.method), flag);
  }
}

// ---------------------------------------------------------------------------

namespace {

IntegralEstimate sum_over_electrons(const WavefunctionModel& model, const AtomSpec& spec,
                                    const Vec3& x, const HatMethod& hat) {
  IntegralEstimate total;
  for (int j = 0; j < spec.n_electrons; ++j) {
    const auto e = integrate_hat(
        [&](std::span<const Vec3> h, std::span<double> out) {
          const Configuration c = assemble(j, x, h);
          const double p = model.psi(c);
          out[0] = p * p;
        },
        1, spec, x, hat)[0];
    total = j == 0 ? e : total + e;
  }
  return total;
}

void check_model(const WavefunctionModel& model, const AtomSpec& spec) {
  if (model.n_electrons() != spec.n_electrons)
    throw ContractViolation(fmt::format("model has {} electrons, system has {}",
                                        model.n_electrons(), spec.n_electrons));
}

}  // namespace

IntegralEstimate density_at(const WavefunctionModel& model, const AtomSpec& spec, const Vec3& x,
                            const EvalOptions& opts) {
  check_model(model, spec);
  return sum_over_electrons(model, spec, x, opts.hat);
}

IntegralEstimate rho_tilde(const WavefunctionModel& model, const AtomSpec& spec, double r,
                           const EvalOptions& opts) {
  check_model(model, spec);
  if (!(r >= 0.0)) throw ContractViolation("rho_tilde: r must be >= 0");
  const HatMethod coarse = coarse_hat(opts.hat);
  return sphere_integrate(
      [&](const Vec3& w, bool companion_pass) {
        return std::vector<IntegralEstimate>{
            sum_over_electrons(model, spec, r * w, companion_pass ? coarse : opts.hat)};
      },
      1, sphere_rule(opts.sphere_degree))[0];
}

// ---------------------------------------------------------------------------

IntegralEstimate rho_tilde_prime(const RhoHFn& f, double charge, double r,
                                 const RadialOptions& opts) {
  if (!(r > 0.0)) throw ContractViolation("rho_tilde_prime needs r > 0");
  const auto integral = integrate_interval(
      [&](double s) -> Measured {
        const RhoH v = f(s);
        return {-charge * v.rho.value * s + v.h.value * s * s,
                charge * v.rho.error * s + v.h.error * s * s};
      },
      0.0, r, opts, "rho_tilde_prime");
  const double scale = 2.0 / (r * r);
  IntegralEstimate out = scale * integral;
  out.error += 4.0 * machine_eps * std::abs(out.value);
  return out;
}

IntegralEstimate rho_tilde_second(const RhoHFn& f, double charge, double r,
                                  const RadialOptions& opts) {
  if (!(r >= 0.0)) throw ContractViolation("rho_tilde_second needs r >= 0");
  const RhoH at_r = f(r);
  IntegralEstimate out;
  out.method = Method::adaptive;
  if (r == 0.0) {
    // ρ̃'(0) = -Zρ̃(0) in the inner integrand, ∫σ² = 1/3.
    out.value = 2.0 / 3.0 * (at_r.h.value + charge * charge * at_r.rho.value);
    out.error = 2.0 / 3.0 * (at_r.h.error + charge * charge * at_r.rho.error) +
                4.0 * machine_eps * std::abs(out.value);
    return out;
  }
  const auto inner = integrate_interval(
      [&](double sigma) -> Measured {
        const double s = r * sigma;
        const auto d1 = rho_tilde_prime(f, charge, s, opts);
        const RhoH v = f(s);
        return {(charge * d1.value + 2.0 * v.h.value) * sigma * sigma,
                (charge * d1.error + 2.0 * v.h.error) * sigma * sigma};
      },
      0.0, 1.0, opts, "rho_tilde_second");
  out.value = 2.0 * (at_r.h.value - inner.value);
  out.error = 2.0 * (at_r.h.error + inner.error) +
              4.0 * machine_eps * (std::abs(at_r.h.value) + std::abs(inner.value));
  out.n_evals = inner.n_evals;
  return out;
}

RhoHFn rho_h_source(const WavefunctionModel& model, const AtomSpec& spec, HTildeFn h_tilde,
                    const EvalOptions& opts) {
  return [model, spec, h_tilde = std::move(h_tilde), opts](double s) {
    const auto e = rho_tilde(model, spec, s, opts);
    return RhoH{{e.value, e.error}, h_tilde(s)};
  };
}

IntegralEstimate rho_tilde_prime(const WavefunctionModel& model, const AtomSpec& spec, double r,
                                 HTildeFn h_tilde, const EvalOptions& opts) {
  return rho_tilde_prime(rho_h_source(model, spec, std::move(h_tilde), opts), spec.charge, r,
                         opts.radial);
}

IntegralEstimate rho_tilde_second(const WavefunctionModel& model, const AtomSpec& spec, double r,
                                  HTildeFn h_tilde, const EvalOptions& opts) {
  return rho_tilde_second(rho_h_source(model, spec, std::move(h_tilde), opts), spec.charge, r,
                          opts.radial);
}

Measured radial_equation_residual(const RhoHFn& f, double charge, double r,
                                  const RadialOptions& opts) {
  if (!(r > 0.0)) throw ContractViolation("radial_equation_residual needs r > 0");
  const auto d1 = rho_tilde_prime(f, charge, r, opts);
  const auto d2 = rho_tilde_second(f, charge, r, opts);
  const RhoH v = f(r);
  const double terms[] = {-0.5 * d2.value, -d1.value / r, -charge * v.rho.value / r, v.h.value};
  double value = 0.0, mag = 0.0;
  for (double t : terms) {
    value += t;
    mag += std::abs(t);
  }
  const double error = 0.5 * d2.error + d1.error / r + charge * v.rho.error / r + v.h.error +
                       4.0 * machine_eps * mag;
  return {value, error};
}

double rho_tilde_kth_at_zero(int k, double h_deriv_at_zero, double rho_next_deriv_at_zero,
                             double charge) {
  if (k < 0) throw DomainError("derivative order k must be >= 0");
  return 2.0 / (k + 3.0) * ((k + 1.0) * h_deriv_at_zero - charge * rho_next_deriv_at_zero);
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::array<double, 5>, 3> kStencil{{
    {-25.0 / 12.0, 48.0 / 12.0, -36.0 / 12.0, 16.0 / 12.0, -3.0 / 12.0},
    {35.0 / 12.0, -104.0 / 12.0, 114.0 / 12.0, -56.0 / 12.0, 11.0 / 12.0},
    {-5.0 / 2.0, 18.0 / 2.0, -24.0 / 2.0, 14.0 / 2.0, -3.0 / 2.0},
}};

double step(const FdOptions& o, int m) { return std::ldexp(o.r0, -m); }

using Sparse = std::vector<std::pair<std::size_t, double>>;

/// Richardson tableau over linear functionals of the sample vector; the
/// coefficients of the final entry give an exact error propagation.
ZeroLimit extrapolate(const std::vector<Measured>& values,
                      const std::vector<std::optional<double>>& companions,
                      const std::vector<Sparse>& levels, int first_power) {
  const std::size_t n = values.size();
  const std::size_t levels_n = levels.size();
  if (levels_n < 2) throw ContractViolation("extrapolation needs at least two levels");
  using Vec = Eigen::VectorXd;
  std::vector<std::vector<Vec>> t(levels_n);
  for (std::size_t m = 0; m < levels_n; ++m) {
    Vec c = Vec::Zero(static_cast<Eigen::Index>(n));
    for (const auto& [i, w] : levels[m]) c[static_cast<Eigen::Index>(i)] += w;
    t[m].push_back(c);
    for (std::size_t j = 1; j <= m; ++j) {
      const double factor = std::ldexp(1.0, first_power + static_cast<int>(j) - 1) - 1.0;
      t[m].push_back(t[m][j - 1] + (t[m][j - 1] - t[m - 1][j - 1]) / factor);
    }
  }
  Vec v(static_cast<Eigen::Index>(n)), diff(static_cast<Eigen::Index>(n)),
      resid(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    v[ii] = values[i].value;
    if (companions[i]) {
      diff[ii] = values[i].value - *companions[i];
      resid[ii] = std::max(0.0, values[i].error - std::abs(diff[ii]));
    } else {
      diff[ii] = 0.0;
      resid[ii] = values[i].error;
    }
  }
  const Vec& a = t[levels_n - 1][levels_n - 1];
  const Vec& prev = t[levels_n - 2][levels_n - 2];
  ZeroLimit z;
  z.value = a.dot(v);
  z.truncation = std::abs(z.value - prev.dot(v));
  z.quadrature = std::abs(a.dot(diff)) + a.cwiseAbs().dot(resid);
  z.roundoff = 8.0 * machine_eps * a.cwiseAbs().dot(v.cwiseAbs());
  z.error = z.truncation + z.quadrature + z.roundoff;
  return z;
}

void unpack(const RadialSamples& s, std::vector<Measured>& values,
            std::vector<std::optional<double>>& companions) {
  values.clear();
  companions.clear();
  for (const auto& e : s.values) {
    values.push_back({e.value, e.error});
    companions.push_back(e.companion);
  }
}

std::size_t index_of(const RadialSamples& s, double r) {
  const auto it = std::lower_bound(s.radii.begin(), s.radii.end(), r);
  if (it == s.radii.end() || *it != r)
    throw ContractViolation(fmt::format("radial samples of {} lack radius {}", s.quantity, r));
  return static_cast<std::size_t>(it - s.radii.begin());
}

}  // namespace

std::vector<double> fd_radii(const FdOptions& opts) {
  if (!(opts.r0 > 0.0) || opts.halvings < 1)
    throw ContractViolation("finite-difference grid needs r0 > 0 and at least one halving");
  std::vector<double> r{0.0};
  for (int m = 0; m <= opts.halvings; ++m)
    for (int i = 1; i <= 4; ++i) r.push_back(i * step(opts, m));
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

ZeroLimit derivative_at_zero(const RadialSamples& s, int k, const FdOptions& opts) {
  if (k < 1 || k > 3) throw ContractViolation("derivative_at_zero supports k = 1, 2, 3");
  s.validate();
  std::vector<Sparse> levels;
  for (int m = 0; m <= opts.halvings; ++m) {
    const double h = step(opts, m);
    Sparse st;
    for (int i = 0; i < 5; ++i)
      st.emplace_back(index_of(s, i * h), kStencil[k - 1][i] / std::pow(h, k));
    levels.push_back(std::move(st));
  }
  std::vector<Measured> values;
  std::vector<std::optional<double>> companions;
  unpack(s, values, companions);
  return extrapolate(values, companions, levels, 5 - k);
}

ZeroLimit limit_at_zero(const RadialSamples& s, const FdOptions& opts) {
  s.validate();
  std::vector<Sparse> levels;
  for (int m = 0; m <= opts.halvings; ++m) levels.push_back({{index_of(s, step(opts, m)), 1.0}});
  std::vector<Measured> values;
  std::vector<std::optional<double>> companions;
  unpack(s, values, companions);
  return extrapolate(values, companions, levels, 1);
}

ZeroLimit richardson(const std::vector<Measured>& seq, int first_power) {
  std::vector<Sparse> levels;
  for (std::size_t m = 0; m < seq.size(); ++m) levels.push_back({{m, 1.0}});
  return extrapolate(seq, std::vector<std::optional<double>>(seq.size()), levels, first_power);
}

}  // namespace cusplab

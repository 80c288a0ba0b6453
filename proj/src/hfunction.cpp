#include "cusplab/hfunction.hpp"

#include <fmt/format.h>

#include <cmath>

namespace cusplab {

namespace {

enum : std::size_t { kRho, kTSelf, kTHat, kV, kW, kTotal, kTerms };

/// Integrand of every term of h_j at x. When x = 0 the gradient in slot j is
/// the directional limit along `omega`, or the degree-3 average if omega = 0.
HatIntegrand term_integrand(const WavefunctionModel& model, const AtomSpec& spec, int j,
                            const Vec3& x, const Vec3& omega) {
  const bool at_nucleus = x.isZero(0.0);
  return [&model, &spec, j, x, omega, at_nucleus](std::span<const Vec3> hat,
                                                  std::span<double> out) {
    const Configuration c = assemble(j, x, hat);
    const double p = model.psi(c);
    const double p2 = p * p;
    const int n = spec.n_electrons;

    double t_self = 0.0;
    if (!at_nucleus) {
      t_self = model.grad_electron(c, j).squaredNorm();
    } else if (!omega.isZero(0.0)) {
      t_self = model.grad_limit(c, j, omega).squaredNorm();
    } else {
      const auto& rule = sphere_rule(3);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        t_self += rule.weights[i] * model.grad_limit(c, j, rule.nodes[i]).squaredNorm();
      t_self /= four_pi;
    }

    double t_hat = 0.0, nuc = 0.0, rep = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      t_hat += model.grad_electron(c, k).squaredNorm();
      nuc += 1.0 / c[k].norm();
      rep += 1.0 / (c[k] - x).norm();
      for (int l = k + 1; l < n; ++l)
        if (l != j) rep += 1.0 / (c[k] - c[l]).norm();
    }
    const double v = spec.charge * nuc * p2;
    const double w = rep * p2;
    out[kRho] = p2;
    out[kTSelf] = t_self;
    out[kTHat] = t_hat;
    out[kV] = v;
    out[kW] = w;
    out[kTotal] = t_self + t_hat - v + w - spec.energy * p2;
  };
}

std::vector<IntegralEstimate> electron_terms(const WavefunctionModel& model, const AtomSpec& spec,
                                             int j, const Vec3& x, const Vec3& omega,
                                             const HatMethod& hat) {
  return integrate_hat(term_integrand(model, spec, j, x, omega), kTerms, spec, x, hat);
}

std::vector<IntegralEstimate> all_electron_terms(const WavefunctionModel& model,
                                                 const AtomSpec& spec, const Vec3& x,
                                                 const Vec3& omega, const HatMethod& hat) {
  std::vector<IntegralEstimate> sum;
  for (int j = 0; j < spec.n_electrons; ++j) {
    auto e = electron_terms(model, spec, j, x, omega, hat);
    if (j == 0) {
      sum = std::move(e);
    } else {
      for (std::size_t i = 0; i < kTerms; ++i) sum[i] = sum[i] + e[i];
    }
  }
  return sum;
}

HBreakdown to_breakdown(const std::vector<IntegralEstimate>& c, double energy) {
  HBreakdown b;
  b.rho = c[kRho];
  b.t_self = c[kTSelf];
  b.t_hat = c[kTHat];
  b.t = c[kTSelf] + c[kTHat];
  b.v = c[kV];
  b.w = c[kW];
  b.e_rho = energy * c[kRho];
  b.e_rho.error = std::abs(energy) * c[kRho].error;
  b.total = c[kTotal];
  b.total.value = b.t.value - b.v.value + b.w.value - b.e_rho.value;
  // The separately integrated total carries the tighter error; the gap to
  // the assembled value is added on top.
  const double gap = b.total.value - c[kTotal].value;
  b.total.error = c[kTotal].error + std::abs(gap);
  if (c[kTotal].companion) b.total.companion = *c[kTotal].companion + gap;
  return b;
}

void check_model(const WavefunctionModel& model, const AtomSpec& spec) {
  if (model.n_electrons() != spec.n_electrons)
    throw ContractViolation(fmt::format("model has {} electrons, system has {}",
                                        model.n_electrons(), spec.n_electrons));
}

void check_electron(const AtomSpec& spec, int j) {
  if (j < 0 || j >= spec.n_electrons)
    throw ContractViolation(fmt::format("electron index {} out of range", j));
}

}  // namespace

HBreakdown h_terms_at(const WavefunctionModel& model, const AtomSpec& spec, int j, const Vec3& x,
                      const EvalOptions& opts) {
  check_model(model, spec);
  check_electron(spec, j);
  return to_breakdown(electron_terms(model, spec, j, x, Vec3::Zero(), opts.hat), spec.energy);
}

HBreakdown h_at(const WavefunctionModel& model, const AtomSpec& spec, const Vec3& x,
                const EvalOptions& opts) {
  check_model(model, spec);
  return to_breakdown(all_electron_terms(model, spec, x, Vec3::Zero(), opts.hat), spec.energy);
}

HBreakdown h_tilde_terms(const WavefunctionModel& model, const AtomSpec& spec, double r,
                         const EvalOptions& opts) {
  check_model(model, spec);
  if (!(r >= 0.0)) throw ContractViolation("h_tilde: r must be >= 0");
  const HatMethod coarse = coarse_hat(opts.hat);
  const auto c = sphere_integrate(
      [&](const Vec3& w, bool companion_pass) {
        return all_electron_terms(model, spec, r * w, w, companion_pass ? coarse : opts.hat);
      },
      kTerms, sphere_rule(opts.sphere_degree));
  return to_breakdown(c, spec.energy);
}

IntegralEstimate h_tilde(const WavefunctionModel& model, const AtomSpec& spec, double r,
                         const EvalOptions& opts) {
  return h_tilde_terms(model, spec, r, opts).total;
}

RhoHFn rho_h_quadrature(const WavefunctionModel& model, const AtomSpec& spec,
                        const EvalOptions& opts) {
  check_model(model, spec);
  return [model, spec, opts](double r) {
    const auto b = h_tilde_terms(model, spec, r, opts);
    return RhoH{{b.rho.value, b.rho.error}, {b.total.value, b.total.error}};
  };
}

// ---------------------------------------------------------------------------

NucleusIngredients nucleus_ingredients(const WavefunctionModel& model, const AtomSpec& spec,
                                       int j, const EvalOptions& opts) {
  check_model(model, spec);
  check_electron(spec, j);
  const int n = spec.n_electrons;
  const Vec3 origin = Vec3::Zero();
  // Fails early (UnsupportedModel) when the limit is direction dependent.
  {
    std::vector<Vec3> probe;
    for (int k = 1; k < n; ++k) probe.push_back(Vec3(0.7 * k, -0.4, 0.3 + 0.1 * k));
    eval_grad_phi(model, j, origin, probe);
  }
  const auto e = integrate_hat(
      [&](std::span<const Vec3> hat, std::span<double> out) {
        const Configuration c = assemble(j, origin, hat);
        const double p = model.psi(c);
        const double p2 = p * p;
        double kin = 0.0, pot = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k == j) continue;
          kin += model.grad_electron(c, k).squaredNorm();
          pot -= (spec.charge - 1.0) / c[k].norm();
          for (int l = k + 1; l < n; ++l)
            if (l != j) pot += 1.0 / (c[k] - c[l]).norm();
        }
        out[0] = p2;
        out[1] = eval_grad_phi(model, j, origin, hat).squaredNorm();
        out[2] = kin;
        out[3] = (pot - spec.energy) * p2;
      },
      4, spec, origin, opts.hat);
  return {e[0], e[1], e[2], e[3]};
}

NucleusIngredients nucleus_ingredients(const WavefunctionModel& model, const AtomSpec& spec,
                                       const EvalOptions& opts) {
  NucleusIngredients sum;
  for (int j = 0; j < spec.n_electrons; ++j) {
    const auto e = nucleus_ingredients(model, spec, j, opts);
    if (j == 0) {
      sum = e;
    } else {
      sum.rho = sum.rho + e.rho;
      sum.grad = sum.grad + e.grad;
      sum.kin = sum.kin + e.kin;
      sum.pot = sum.pot + e.pot;
    }
  }
  return sum;
}

IntegralEstimate expectation_prev_hamiltonian(const WavefunctionModel& model,
                                              const AtomSpec& spec, int j,
                                              const EvalOptions& opts) {
  check_model(model, spec);
  check_electron(spec, j);
  const int n = spec.n_electrons;
  const Vec3 origin = Vec3::Zero();
  const auto e = integrate_hat(
      [&](std::span<const Vec3> hat, std::span<double> out) {
        const Configuration c = assemble(j, origin, hat);
        const double p = model.psi(c);
        double kin = 0.0, pot = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k == j) continue;
          kin += model.grad_electron(c, k).squaredNorm();
          pot -= (spec.charge - 1.0) / c[k].norm();
          for (int l = k + 1; l < n; ++l)
            if (l != j) pot += 1.0 / (c[k] - c[l]).norm();
        }
        out[0] = kin + (pot - spec.energy) * p * p;
      },
      1, spec, origin, opts.hat);
  return e[0];
}

namespace {

/// Σ coeff·term with errors propagated by |coeff|.
ClosedValue combine(std::initializer_list<std::pair<double, const IntegralEstimate*>> terms,
                    bool eigen_only) {
  ClosedValue out;
  double mag = 0.0;
  for (const auto& [a, e] : terms) {
    out.value += a * e->value;
    out.error += std::abs(a) * e->error;
    mag += std::abs(a * e->value);
  }
  out.error += 4.0 * machine_eps * mag;
  out.eigen_only = eigen_only;
  return out;
}

}  // namespace

ClosedValue h0_closed(const NucleusIngredients& in, double z) {
  return combine({{four_pi * z * z / 4.0, &in.rho},
                  {four_pi, &in.grad},
                  {four_pi, &in.kin},
                  {four_pi, &in.pot}},
                 true);
}

// -Z h̃(0) + Z³/12 ρ̃(0) + (4π/3) Z [G - X] expanded in the ingredients.
ClosedValue hprime0_closed(const NucleusIngredients& in, double z) {
  return combine({{-four_pi * z * z * z / 6.0, &in.rho},
                  {-2.0 * four_pi * z / 3.0, &in.grad},
                  {-4.0 * four_pi * z / 3.0, &in.kin},
                  {-4.0 * four_pi * z / 3.0, &in.pot}},
                 true);
}

ClosedValue t0_closed(const NucleusIngredients& in, double z) {
  return combine({{four_pi * z * z / 4.0, &in.rho}, {four_pi, &in.grad}, {four_pi, &in.kin}},
                 false);
}

// -Z t̃(0) + Z³/12 ρ̃(0) + (4π/3) Z [G - K - P] expanded.
ClosedValue tprime0_closed(const NucleusIngredients& in, double z) {
  return combine({{-four_pi * z * z * z / 6.0, &in.rho},
                  {-2.0 * four_pi * z / 3.0, &in.grad},
                  {-4.0 * four_pi * z / 3.0, &in.kin},
                  {-four_pi * z / 3.0, &in.pot}},
                 true);
}

ClosedValue h0_closed(const WavefunctionModel& model, const AtomSpec& spec,
                      const EvalOptions& opts) {
  return h0_closed(nucleus_ingredients(model, spec, opts), spec.charge);
}
ClosedValue hprime0_closed(const WavefunctionModel& model, const AtomSpec& spec,
                           const EvalOptions& opts) {
  return hprime0_closed(nucleus_ingredients(model, spec, opts), spec.charge);
}
ClosedValue t0_closed(const WavefunctionModel& model, const AtomSpec& spec,
                      const EvalOptions& opts) {
  return t0_closed(nucleus_ingredients(model, spec, opts), spec.charge);
}
ClosedValue tprime0_closed(const WavefunctionModel& model, const AtomSpec& spec,
                           const EvalOptions& opts) {
  return tprime0_closed(nucleus_ingredients(model, spec, opts), spec.charge);
}

// ---------------------------------------------------------------------------

TermSamples sample_terms(const WavefunctionModel& model, const AtomSpec& spec,
                         const std::vector<double>& radii, const EvalOptions& opts) {
  TermSamples s{{"rho_tilde", radii, {}},
                {"t_tilde", radii, {}},
                {"v_tilde", radii, {}},
                {"w_tilde", radii, {}},
                {"h_tilde", radii, {}}};
  RadialSamples{"", radii, std::vector<IntegralEstimate>(radii.size())}.validate();
  for (double r : radii) {
    const auto b = h_tilde_terms(model, spec, r, opts);
    s.rho.values.push_back(b.rho);
    s.t.values.push_back(b.t);
    s.v.values.push_back(b.v);
    s.w.values.push_back(b.w);
    s.h.values.push_back(b.total);
  }
  return s;
}

VwCusp vw_cusp_check(const TermSamples& s, double charge, const FdOptions& fd) {
  auto residual = [&](const RadialSamples& q) {
    const auto d = derivative_at_zero(q, 1, fd);
    const auto& at0 = q.at(0.0);
    return Measured{d.value + charge * at0.value, d.error + charge * at0.error};
  };
  return {residual(s.v), residual(s.w)};
}

VwCusp vw_cusp_check(const WavefunctionModel& model, const AtomSpec& spec, const FdOptions& fd,
                     const EvalOptions& opts) {
  if (spec.n_electrons == 1) return {};
  return vw_cusp_check(sample_terms(model, spec, fd_radii(fd), opts), spec.charge, fd);
}

// ---------------------------------------------------------------------------

std::vector<BoundRow> ion_bound_check(const WavefunctionModel& model, const AtomSpec& spec,
                                      const std::vector<Vec3>& points, Measured h_tilde0,
                                      Measured rho_tilde0, const EvalOptions& opts) {
  const double eps = spec.ion_gap;
  const std::string origin_name = "h_tilde(0) >= (Z^2/4 + eps) rho_tilde(0)";
  std::vector<BoundRow> rows;
  if (eps < 0.0) {
    const std::string notice =
        fmt::format("ionization gap eps = {} is negative; bound not applicable", eps);
    for (const auto& x : points)
      rows.push_back(skipped_bound(
          fmt::format("h(x) >= eps rho(x) at ({}, {}, {})", x.x(), x.y(), x.z()),
          Sense::at_least, true, notice));
    rows.push_back(skipped_bound(origin_name, Sense::at_least, true, notice));
    return rows;
  }
  for (const auto& x : points) {
    const auto b = h_at(model, spec, x, opts);
    rows.push_back(make_bound(fmt::format("h(x) >= eps rho(x) at ({}, {}, {})", x.x(), x.y(), x.z()),
                              Sense::at_least, {b.total.value, b.total.error},
                              {eps * b.rho.value, eps * b.rho.error}, true));
  }
  const double coef = spec.charge * spec.charge / 4.0 + eps;
  rows.push_back(make_bound(origin_name, Sense::at_least, h_tilde0,
                            {coef * rho_tilde0.value, coef * rho_tilde0.error}, true));
  return rows;
}

std::vector<BoundRow> ion_bound_check(const WavefunctionModel& model, const AtomSpec& spec,
                                      const std::vector<Vec3>& points, const EvalOptions& opts) {
  check_model(model, spec);
  if (spec.ion_gap < 0.0) return ion_bound_check(model, spec, points, {}, {}, opts);
  const auto b = h_tilde_terms(model, spec, 0.0, opts);
  return ion_bound_check(model, spec, points, {b.total.value, b.total.error},
                         {b.rho.value, b.rho.error}, opts);
}

}  // namespace cusplab

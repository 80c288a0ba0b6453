#include "cusplab/cusp_report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace cusplab {

std::array<double, 3> golden_hydrogenic(int n, double z, int l) {
  if (n < 1) throw DomainError("principal quantum number must be >= 1");
  if (l != 0)
    throw UnsupportedModel("reference ratios are only available for s-states (l = 0)");
  const double inv_n2 = 1.0 / (static_cast<double>(n) * n);
  return {-z, z * z / 6.0 * (5.0 + inv_n2), -z * z * z / 12.0 * (7.0 + 5.0 * inv_n2)};
}

ClosedValue rho2_closed(const NucleusIngredients& in, double z) {
  const ClosedValue h0 = h0_closed(in, z);
  ClosedValue out;
  out.value = 2.0 / 3.0 * (h0.value + z * z * four_pi * in.rho.value);
  out.error = 2.0 / 3.0 * (h0.error + z * z * four_pi * in.rho.error) +
              4.0 * machine_eps * std::abs(out.value);
  out.eigen_only = true;
  return out;
}

Rho3Closed rho3_closed(const NucleusIngredients& in, double z) {
  const ClosedValue h0 = h0_closed(in, z);
  const ClosedValue h1 = hprime0_closed(in, z);
  const double rho0 = four_pi * in.rho.value;
  const double rho0_err = four_pi * in.rho.error;

  Rho3Closed r;
  r.main.value = h1.value - z / 3.0 * (h0.value + z * z * rho0);
  r.main.error = h1.error + z / 3.0 * (h0.error + z * z * rho0_err) +
                 4.0 * machine_eps * (std::abs(h1.value) + z / 3.0 * (std::abs(h0.value) + z * z * rho0));
  r.main.eigen_only = true;

  // -(7/12)Z³ρ̃(0) - 4πZ Σ[G + (5/3)X], X = K + P.
  const double terms[] = {-7.0 / 12.0 * z * z * z * rho0, -four_pi * z * in.grad.value,
                          -four_pi * z * 5.0 / 3.0 * in.kin.value,
                          -four_pi * z * 5.0 / 3.0 * in.pot.value};
  double mag = 0.0;
  for (double t : terms) {
    r.alt.value += t;
    mag += std::abs(t);
  }
  r.alt.error = 7.0 / 12.0 * z * z * z * rho0_err +
                four_pi * z * (in.grad.error + 5.0 / 3.0 * (in.kin.error + in.pot.error)) +
                4.0 * machine_eps * mag;
  r.alt.eigen_only = true;

  const double gap = std::abs(r.main.value - r.alt.value);
  const double tol =
      1e-10 * std::max(std::abs(r.main.value), std::abs(r.alt.value)) + r.main.error + r.alt.error;
  if (gap > tol)
    throw InternalConsistency(fmt::format(
        "third-derivative routes disagree: {} vs {} (tolerance {})", r.main.value, r.alt.value, tol));
  return r;
}

Rho3Closed rho3_closed(const WavefunctionModel& model, const AtomSpec& spec,
                       const EvalOptions& opts) {
  return rho3_closed(nucleus_ingredients(model, spec, opts), spec.charge);
}

namespace {

std::string negative_gap_notice(double eps) {
  return fmt::format("ionization gap eps = {} is negative; bound not applicable", eps);
}

Measured scaled(double a, Measured m) { return {a * m.value, std::abs(a) * m.error}; }

}  // namespace

std::vector<BoundRow> rho2_bound_check(Measured rho2, Measured rho0, double z, double eps,
                                       const std::string& source) {
  const std::string original = fmt::format("rho''(0) >= (2/3)(Z^2 + eps) rho(0) [{}]", source);
  const std::string improved = fmt::format("rho''(0) >= (2/3)(5Z^2/4 + eps) rho(0) [{}]", source);
  if (eps < 0.0)
    return {skipped_bound(original, Sense::at_least, true, negative_gap_notice(eps)),
            skipped_bound(improved, Sense::at_least, true, negative_gap_notice(eps))};
  return {make_bound(original, Sense::at_least, rho2, scaled(2.0 / 3.0 * (z * z + eps), rho0), true),
          make_bound(improved, Sense::at_least, rho2,
                     scaled(2.0 / 3.0 * (1.25 * z * z + eps), rho0), true)};
}

std::vector<BoundRow> rho3_bound_check(Measured rho3, Measured rho0, double z, double eps,
                                       Measured expectation_sum, const std::string& source) {
  std::vector<BoundRow> rows;
  const std::string gap_name =
      fmt::format("rho'''(0) <= -(Z/12)(7Z^2 + 20 eps) rho(0) [{}]", source);
  if (eps < 0.0) {
    rows.push_back(skipped_bound(gap_name, Sense::at_most, true, negative_gap_notice(eps)));
  } else {
    rows.push_back(make_bound(gap_name, Sense::at_most, rho3,
                              scaled(-z / 12.0 * (7.0 * z * z + 20.0 * eps), rho0), true));
  }
  const std::string plain_name = fmt::format("rho'''(0) <= -(7/12)Z^3 rho(0) [{}]", source);
  const double x = expectation_sum.value, xe = expectation_sum.error;
  if (x + equality_tolerance(xe) < 0.0) {
    rows.push_back(skipped_bound(
        plain_name, Sense::at_most, true,
        fmt::format("requires a nonnegative ionized-Hamiltonian expectation; found {} +/- {}", x,
                    xe)));
  } else {
    auto row = make_bound(plain_name, Sense::at_most, rho3, scaled(-7.0 / 12.0 * z * z * z, rho0),
                          true);
    if (x < 0.0)
      row.notice = fmt::format(
          "ionized-Hamiltonian expectation {} +/- {} is nonnegative only within error", x, xe);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<BoundRow> rho2_bound_check(const WavefunctionModel& model, const AtomSpec& spec,
                                       const EvalOptions& opts) {
  const auto in = nucleus_ingredients(model, spec, opts);
  const auto r2 = rho2_closed(in, spec.charge);
  return rho2_bound_check({r2.value, r2.error}, scaled(four_pi, {in.rho.value, in.rho.error}),
                          spec.charge, spec.ion_gap, "closed");
}

std::vector<BoundRow> rho3_bound_check(const WavefunctionModel& model, const AtomSpec& spec,
                                       const EvalOptions& opts) {
  const auto in = nucleus_ingredients(model, spec, opts);
  const auto r3 = rho3_closed(in, spec.charge);
  return rho3_bound_check({r3.main.value, r3.main.error},
                          scaled(four_pi, {in.rho.value, in.rho.error}), spec.charge,
                          spec.ion_gap,
                          {in.kin.value + in.pot.value, in.kin.error + in.pot.error}, "closed");
}

// ---------------------------------------------------------------------------

bool CuspReport::has_violation() const {
  auto bad = [](const BoundRow& r) {
    return !r.diagnostic && r.verdict == Verdict::violated_beyond_error;
  };
  return std::any_of(checks.begin(), checks.end(), bad) ||
         std::any_of(bounds.begin(), bounds.end(), bad);
}

namespace {

Measured measured(const IntegralEstimate& e) { return {e.value, e.error}; }
Measured measured(const ZeroLimit& z) { return {z.value, z.error}; }
Measured measured(const ClosedValue& c) { return {c.value, c.error}; }

}  // namespace

CuspReport build_report(const WavefunctionModel& model, const AtomSpec& spec,
                        const ReportConfig& config) {
  CuspReport rep;
  rep.model = model.describe();
  rep.spec = spec;
  rep.eigenfunction = model.is_eigenfunction();
  const double z = spec.charge;
  const double eps = spec.ion_gap;
  const bool eigen = rep.eigenfunction;

  if (!eigen)
    rep.notices.push_back(
        "model is not an eigenfunction: rows derived from the eigenvalue equation are "
        "diagnostics");
  if (eps < 0.0) rep.notices.push_back(negative_gap_notice(eps));

  if (const auto* h = std::get_if<Hydrogenic>(&model.variant()); h && h->l == 0)
    rep.golden_ratios = golden_hydrogenic(h->n, h->charge, h->l);

  // Direct quadrature on the finite-difference radii.
  rep.samples = sample_terms(model, spec, fd_radii(config.fd), config.eval);
  const auto& s = rep.samples;
  const Measured rho0 = measured(s.rho.at(0.0));
  const Measured rho1 = measured(derivative_at_zero(s.rho, 1, config.fd));
  const Measured rho2 = measured(derivative_at_zero(s.rho, 2, config.fd));
  const Measured rho3 = measured(derivative_at_zero(s.rho, 3, config.fd));
  const Measured h0 = measured(s.h.at(0.0));
  const Measured h0_lim = measured(limit_at_zero(s.h, config.fd));
  const Measured h1 = measured(derivative_at_zero(s.h, 1, config.fd));
  const Measured t0 = measured(s.t.at(0.0));
  const Measured t0_lim = measured(limit_at_zero(s.t, config.fd));
  const Measured t1 = measured(derivative_at_zero(s.t, 1, config.fd));
  const Measured v0 = measured(s.v.at(0.0));
  const Measured v1 = measured(derivative_at_zero(s.v, 1, config.fd));
  const Measured w0 = measured(s.w.at(0.0));
  const Measured w1 = measured(derivative_at_zero(s.w, 1, config.fd));

  // Recursion fed with quadrature h̃.
  const double rec2 = rho_tilde_kth_at_zero(0, h0.value, rho1.value, z);
  const Measured rho2_rec{rec2, 2.0 / 3.0 * (h0.error + z * rho1.error) +
                                    4.0 * machine_eps * std::abs(rec2)};
  const double rec3 = rho_tilde_kth_at_zero(1, h1.value, rho2_rec.value, z);
  const Measured rho3_rec{rec3, 0.5 * (2.0 * h1.error + z * rho2_rec.error) +
                                    4.0 * machine_eps * std::abs(rec3)};
  std::optional<Measured> rho1_kato;
  if (config.kato_limit && spec.n_electrons == 1) {
    const auto f = rho_h_quadrature(model, spec, config.eval);
    std::vector<Measured> seq;
    for (int m = 0; m <= config.fd.halvings; ++m)
      seq.push_back(measured(
          rho_tilde_prime(f, z, std::ldexp(config.fd.r0, -m), config.eval.radial)));
    rho1_kato = measured(richardson(seq, 1));
  }

  // Closed forms need a regular factor with a limit at the nucleus.
  std::optional<NucleusIngredients> in;
  try {
    in = nucleus_ingredients(model, spec, config.eval);
  } catch (const UnsupportedModel& e) {
    rep.notices.push_back(fmt::format("closed forms unavailable: {}", e.what()));
  }
  const bool regular = in.has_value();

  std::optional<ClosedValue> c_rho0, c_rho1, c_rho2, c_h0, c_h1, c_t0, c_t1;
  std::optional<Rho3Closed> c_rho3;
  Measured x_sum;
  if (in) {
    c_rho0 = ClosedValue{four_pi * in->rho.value, four_pi * in->rho.error, false};
    c_rho1 = ClosedValue{-z * c_rho0->value, z * c_rho0->error, false};
    c_rho2 = rho2_closed(*in, z);
    c_h0 = h0_closed(*in, z);
    c_h1 = hprime0_closed(*in, z);
    c_t0 = t0_closed(*in, z);
    c_t1 = tprime0_closed(*in, z);
    x_sum = {in->kin.value + in->pot.value, in->kin.error + in->pot.error};
  }

  auto golden = [&](int k) -> std::optional<double> {
    if (!rep.golden_ratios) return std::nullopt;
    const double base = c_rho0 ? c_rho0->value : rho0.value;
    return k == 0 ? base : (*rep.golden_ratios)[k - 1] * base;
  };

  auto row = [](std::string name, std::optional<Measured> direct, std::string method) {
    QuantityRow r;
    r.name = std::move(name);
    r.direct = direct;
    r.direct_method = std::move(method);
    return r;
  };

  {
    auto r = row("rho_tilde(0)", rho0, "sphere quadrature at r = 0");
    r.extrapolated = measured(limit_at_zero(s.rho, config.fd));
    r.closed = c_rho0;
    r.golden = golden(0);
    rep.derivatives.push_back(r);
  }
  {
    auto r = row("rho_tilde'(0)", rho1, "finite differences");
    r.recursion = rho1_kato;
    r.closed = c_rho1;
    r.golden = golden(1);
    rep.derivatives.push_back(r);
  }
  {
    auto r = row("rho_tilde''(0)", rho2, "finite differences");
    r.recursion = rho2_rec;
    r.closed = c_rho2;
    r.golden = golden(2);
    rep.derivatives.push_back(r);
  }
  auto r3 = row("rho_tilde'''(0)", rho3, "finite differences");
  r3.recursion = rho3_rec;
  r3.golden = golden(3);

  {
    auto r = row("h_tilde(0)", h0, "sphere quadrature at r = 0");
    r.extrapolated = h0_lim;
    r.closed = c_h0;
    rep.auxiliary.push_back(r);
  }
  {
    auto r = row("h_tilde'(0)", h1, "finite differences");
    r.closed = c_h1;
    rep.auxiliary.push_back(r);
  }
  {
    auto r = row("t_tilde(0)", t0, "sphere quadrature at r = 0");
    r.extrapolated = t0_lim;
    r.closed = c_t0;
    rep.auxiliary.push_back(r);
  }
  {
    auto r = row("t_tilde'(0)", t1, "finite differences");
    r.closed = c_t1;
    rep.auxiliary.push_back(r);
  }
  rep.auxiliary.push_back(row("v_tilde(0)", v0, "sphere quadrature at r = 0"));
  rep.auxiliary.push_back(row("v_tilde'(0)", v1, "finite differences"));
  rep.auxiliary.push_back(row("w_tilde(0)", w0, "sphere quadrature at r = 0"));
  rep.auxiliary.push_back(row("w_tilde'(0)", w1, "finite differences"));

  // Equalities.
  auto check = [&](std::string name, Measured lhs, Measured rhs, bool eigen_only) {
    auto b = make_bound(std::move(name), Sense::equal, lhs, rhs, eigen_only);
    b.diagnostic = eigen_only ? !eigen : !regular;
    rep.checks.push_back(std::move(b));
  };
  check("rho_tilde'(0) = -Z rho_tilde(0)", rho1, scaled(-z, rho0), false);
  if (spec.n_electrons > 1) {
    check("v_tilde'(0) = -Z v_tilde(0)", v1, scaled(-z, v0), false);
    check("w_tilde'(0) = -Z w_tilde(0)", w1, scaled(-z, w0), false);
  }
  if (rho1_kato) check("first-derivative formula as r -> 0 = -Z rho_tilde(0)", *rho1_kato,
                       scaled(-z, rho0), false);
  if (c_t0) check("t_tilde(0): extrapolated = closed", t0_lim, measured(*c_t0), false);
  if (c_h0) {
    check("h_tilde(0): direct = closed", h0, measured(*c_h0), true);
    check("h_tilde'(0): direct = closed", h1, measured(*c_h1), true);
    check("t_tilde'(0): direct = closed", t1, measured(*c_t1), true);
    check("rho_tilde''(0): direct = closed", rho2, measured(*c_rho2), true);
  }
  check("rho_tilde''(0): direct = recursion", rho2, rho2_rec, true);
  check("rho_tilde'''(0): direct = recursion", rho3, rho3_rec, true);

  if (in) {
    try {
      c_rho3 = rho3_closed(*in, z);
    } catch (const InternalConsistency& e) {
      rep.aborted = e.what();
      rep.derivatives.push_back(r3);
      return rep;
    }
    r3.closed = c_rho3->main;
    r3.closed_alt = c_rho3->alt;
    check("rho_tilde'''(0): direct = closed", rho3, measured(c_rho3->main), true);
  }
  rep.derivatives.push_back(r3);

  if (rep.golden_ratios) {
    for (int k = 1; k <= 3; ++k) {
      const auto& d = rep.derivatives[k];
      const Measured g{*golden(k), 0.0};
      check(fmt::format("{}: direct = reference", d.name), *d.direct, g, true);
      if (d.closed) check(fmt::format("{}: closed = reference", d.name), measured(*d.closed), g, true);
    }
  }

  // Bounds.
  auto add_bounds = [&](std::vector<BoundRow> rows) {
    for (auto& b : rows) {
      b.diagnostic = b.eigen_only ? !eigen : !regular;
      rep.bounds.push_back(std::move(b));
    }
  };
  if (c_rho2) add_bounds(rho2_bound_check(measured(*c_rho2), measured(*c_rho0), z, eps, "closed"));
  add_bounds(rho2_bound_check(rho2, rho0, z, eps, "direct"));
  if (c_rho3) {
    add_bounds(rho3_bound_check(measured(c_rho3->main), measured(*c_rho0), z, eps, x_sum, "closed"));
    add_bounds(rho3_bound_check(rho3, rho0, z, eps, x_sum, "direct"));
  }
  add_bounds(ion_bound_check(model, spec, config.ion_points, h0, rho0, config.eval));
  if (c_h0) {
    const std::string name = "h_tilde(0) >= (Z^2/4 + eps) rho_tilde(0) [closed]";
    add_bounds({eps < 0.0 ? skipped_bound(name, Sense::at_least, true, negative_gap_notice(eps))
                          : make_bound(name, Sense::at_least, measured(*c_h0),
                                       scaled(z * z / 4.0 + eps, measured(*c_rho0)), true)});
  }
  return rep;
}

}  // namespace cusplab

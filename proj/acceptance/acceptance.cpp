// One PASS/FAIL line per acceptance criterion.

#include "cusplab/commands.hpp"

#include <fmt/format.h>

#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace cusplab;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, fmt::format("exception: {}", e.what())};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (!o.pass) ++failures;
  fmt::print("{} criterion {:>2}: {} [{:.2f} s]\n", o.pass ? "PASS" : "FAIL", id, o.detail, secs);
  std::fflush(stdout);
}

const BoundRow* find_row(const CuspReport& rep, const std::string& name) {
  for (const auto* rows : {&rep.checks, &rep.bounds})
    for (const auto& r : *rows)
      if (r.name == name) return &r;
  return nullptr;
}

WavefunctionModel hydrogen(int n, double z) {
  return normalize(WavefunctionModel(Hydrogenic{n, 0, 0, z}));
}

struct GoldenCheck {
  double worst_closed = 0.0;   // max |ratio - reference|
  double worst_direct = 0.0;   // max |ratio - reference| / |reference|
  bool complete = true;
};

GoldenCheck check_golden(const CuspReport& rep, const std::array<double, 3>& reference) {
  GoldenCheck g;
  if (rep.derivatives.size() != 4 || !rep.derivatives[0].closed || !rep.derivatives[0].direct) {
    g.complete = false;
    return g;
  }
  const double closed0 = rep.derivatives[0].closed->value;
  const double direct0 = rep.derivatives[0].direct->value;
  for (int k = 1; k <= 3; ++k) {
    const auto& d = rep.derivatives[k];
    if (!d.closed || !d.direct) {
      g.complete = false;
      continue;
    }
    const double ref = reference[k - 1];
    g.worst_closed = std::max(g.worst_closed, std::abs(d.closed->value / closed0 - ref));
    g.worst_direct =
        std::max(g.worst_direct, std::abs(d.direct->value / direct0 - ref) / std::abs(ref));
  }
  return g;
}

Outcome hydrogenic_ratios(int n, double z, const std::array<double, 3>& reference,
                          double time_limit, bool bounds) {
  const auto start = Clock::now();
  const auto rep = build_report(hydrogen(n, z), hydrogenic_spec(n, z));
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const auto g = check_golden(rep, reference);
  bool pass = g.complete && g.worst_closed <= 1e-10 && g.worst_direct <= 1e-4 &&
              !rep.has_violation() && secs < time_limit;
  std::string detail =
      fmt::format("n={} Z={}: closed ratio error {:.2e}, extrapolated ratio rel. error {:.2e}", n,
                  z, g.worst_closed, g.worst_direct);
  if (bounds) {
    for (const char* name : {"rho''(0) >= (2/3)(5Z^2/4 + eps) rho(0) [closed]",
                             "rho'''(0) <= -(Z/12)(7Z^2 + 20 eps) rho(0) [closed]"}) {
      const auto* row = find_row(rep, name);
      const bool ok = row && row->verdict == Verdict::holds_at_equality &&
                      std::abs(row->margin) <= 1e-10;
      pass &= ok;
      detail += fmt::format(", bound margin {:.2e}", row ? row->margin : NAN);
    }
  }
  detail += fmt::format(", eps {}", rep.spec.ion_gap);
  return {pass, detail};
}

Outcome combine(const std::vector<Outcome>& parts) {
  Outcome o{true, ""};
  for (const auto& p : parts) {
    o.pass &= p.pass;
    o.detail += (o.detail.empty() ? "" : "; ") + p.detail;
  }
  return o;
}

RunConfig shipped(const std::string& name) {
  return load_config(std::string(CUSPLAB_CONFIG_DIR) + "/" + name);
}

}  // namespace

int main() {
  // 1. Hydrogen ground state.
  run(1, [] { return hydrogenic_ratios(1, 1.0, {-1.0, 1.0, -1.0}, 10.0, false); });

  // 2. Hydrogen 2s, with both bounds saturated on closed inputs.
  run(2, [] { return hydrogenic_ratios(2, 1.0, {-1.0, 0.875, -0.6875}, 1e9, true); });

  // 3. The same at Z = 2.
  run(3, [] {
    return combine({hydrogenic_ratios(1, 2.0, {-2.0, 4.0, -8.0}, 10.0, false),
                    hydrogenic_ratios(2, 2.0, {-2.0, 3.5, -5.5}, 1e9, true)});
  });

  // 4. Sphere moments on every shipped rule.
  run(4, [] {
    const auto start = Clock::now();
    double worst = 0.0, worst_anti = 0.0;
    for (int d : shipped_sphere_degrees()) {
      const auto r = sphere_moment_check(d, 100, 1);
      worst = std::max({worst, r.pair_moments, r.dot_product, r.matrix_trace});
      worst_anti = std::max(worst_anti, r.antisymmetric);
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    return Outcome{worst <= 1e-12 && worst_anti <= 1e-13 && secs < 1.0,
                   fmt::format("worst moment residual {:.2e}, antisymmetric {:.2e}", worst,
                               worst_anti)};
  });

  // 5. Recursion steps k = 0, 1 against the closed second and third derivatives.
  run(5, [] {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(-10.0, 10.0), zdist(0.1, 10.0);
    double worst2 = 0.0, worst3 = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double rho = std::abs(u(gen)), h0 = u(gen), h1 = u(gen), z = zdist(gen);
      const double second = 2.0 / 3.0 * (h0 + z * z * rho);
      const double third = h1 - z / 3.0 * (h0 + z * z * rho);
      const double rec2 = rho_tilde_kth_at_zero(0, h0, -z * rho, z);
      const double rec3 = rho_tilde_kth_at_zero(1, h1, rec2, z);
      const double scale2 = std::abs(h0) + z * z * rho;
      const double scale3 = std::abs(h1) + z / 3.0 * scale2;
      worst2 = std::max(worst2, std::abs(rec2 - second) / scale2);
      worst3 = std::max(worst3, std::abs(rec3 - third) / scale3);
    }
    return Outcome{worst2 <= 1e-14 && worst3 <= 1e-14,
                   fmt::format("10^4 triples: k=0 rel. {:.2e}, k=1 rel. {:.2e}", worst2, worst3)};
  });

  // 6. Radial equation residual for hydrogenic s-states.
  run(6, [] {
    double worst = 0.0;
    int bad = 0;
    for (int n = 1; n <= 3; ++n) {
      const auto spec = hydrogenic_spec(n, 1.0);
      const auto f = rho_h_quadrature(hydrogen(n, 1.0), spec);
      for (int i = 0; i < 20; ++i) {
        const double r = 1e-3 * std::pow(1e4, i / 19.0);
        const Measured res = radial_equation_residual(f, 1.0, r);
        const double q = std::abs(res.value) / res.error;
        worst = std::max(worst, q);
        if (!(std::abs(res.value) <= 3.0 * res.error)) ++bad;
      }
    }
    return Outcome{bad == 0, fmt::format("60 radii, worst |residual|/error {:.3f}, {} above 3x",
                                         worst, bad)};
  });

  // 7. Cutoff Jastrow identities for N = 2 and N = 3.
  run(7, [] {
    std::vector<Outcome> parts;
    for (const char* name : {"jastrow_helium.json", "lithium_product.json"}) {
      auto cfg = shipped(name);
      cfg.jastrow.configurations = 20;
      cfg.jastrow.apriori = cfg.jastrow.probe = false;
      const auto r = jastrow_check(cfg);
      parts.push_back({r.pass && r.rows.size() == 20,
                       fmt::format("N={}: two-body {:.1e}, log part {:.1e}, fd {:.1e}",
                                   cfg.model.n_electrons(), r.worst_two_body, r.worst_log_part,
                                   r.worst_fd)});
    }
    return combine(parts);
  });

  // 8. A priori ratio is refinement-stable while the raw second derivatives are not.
  run(8, [] {
    const auto model = hydrogen(1, 1.0);
    const Configuration center{Vec3::Zero()};
    const auto a = apriori_residual(model, center, 1.0, 2.0, 10000, 1);
    const double change = std::abs(a.refined_ratio - a.ratio) / a.ratio;
    const double growth = a.refined_raw_sup / a.raw_sup;
    const auto coarse = apriori_residual(model, center, 1.0, 2.0, 1000, 1);
    const auto fine = apriori_residual(model, center, 1.0, 2.0, 64000, 1);
    const double long_growth = fine.refined_raw_sup / coarse.raw_sup;
    return Outcome{std::isfinite(a.ratio) && change < 0.1 && growth > 1.1 && long_growth > 2.0,
                   fmt::format("ratio {:.5f} -> {:.5f} ({:.2f}%), raw sup {:.4g} -> {:.4g} "
                               "(x{:.3f}), 10^3 -> 2.56*10^5 samples x{:.2f}",
                               a.ratio, a.refined_ratio, 100 * change, a.raw_sup,
                               a.refined_raw_sup, growth, long_growth)};
  });

  // 9. Helium product trial at default sampling.
  run(9, [] {
    const auto start = Clock::now();
    const auto cfg = shipped("helium_product.json");
    const auto rep = build_report(cfg.model, cfg.system, cfg.report);
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    bool pass = !rep.aborted && !rep.has_violation() && secs < 300.0;
    std::string detail;
    for (const char* name : {"rho_tilde'(0) = -Z rho_tilde(0)", "v_tilde'(0) = -Z v_tilde(0)",
                             "w_tilde'(0) = -Z w_tilde(0)", "t_tilde(0): extrapolated = closed"}) {
      const auto* row = find_row(rep, name);
      const bool ok = row && !row->diagnostic && std::abs(row->margin) <= 3.0 * row->error;
      pass &= ok;
      detail += fmt::format("{}|margin|/err {:.2f}", detail.empty() ? "" : ", ",
                            row ? std::abs(row->margin) / row->error : NAN);
    }
    int eigen_rows = 0, eigen_discrepant = 0;
    for (const auto* rows : {&rep.checks, &rep.bounds})
      for (const auto& r : *rows)
        if (r.eigen_only) {
          ++eigen_rows;
          pass &= r.diagnostic;
          if (r.verdict == Verdict::violated_beyond_error) ++eigen_discrepant;
        }
    pass &= eigen_rows > 0 && eigen_discrepant > 0;
    detail += fmt::format("; {} eigen-only rows flagged, {} with discrepancies", eigen_rows,
                          eigen_discrepant);
    return Outcome{pass, detail};
  });

  // 10. Identical config and seed give byte-identical JSON.
  run(10, [] {
    std::vector<Outcome> parts;
    for (const char* name : {"lithium_product.json", "hydrogen_2s.json"}) {
      const auto cfg = shipped(name);
      std::ostringstream a, b;
      cmd_report(cfg, a);
      cmd_report(cfg, b);
      parts.push_back({a.str() == b.str() && !a.str().empty(),
                       fmt::format("{}: {} bytes {}", name, a.str().size(),
                                   a.str() == b.str() ? "identical" : "DIFFER")});
    }
    return combine(parts);
  });

  fmt::print("{} of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

#include "cusplab/quadrature.hpp"

#include "cusplab/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace cusplab {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::tensor_grid: return "tensor-grid";
    case Method::adaptive: return "adaptive";
    case Method::monte_carlo: return "monte-carlo";
  }
  return "unknown";
}

namespace {

IntegralEstimate combine(const IntegralEstimate& a, const IntegralEstimate& b, double sign) {
  IntegralEstimate r;
  r.value = a.value + sign * b.value;
  r.error = a.error + b.error;
  r.method = (a.method == Method::monte_carlo || b.method == Method::monte_carlo)
                 ? Method::monte_carlo
                 : a.method;
  r.n_evals = a.n_evals + b.n_evals;
  if (a.companion && b.companion) r.companion = *a.companion + sign * *b.companion;
  r.warnings = a.warnings;
  r.warnings.insert(r.warnings.end(), b.warnings.begin(), b.warnings.end());
  return r;
}

}  // namespace

IntegralEstimate operator+(const IntegralEstimate& a, const IntegralEstimate& b) {
  return combine(a, b, 1.0);
}
IntegralEstimate operator-(const IntegralEstimate& a, const IntegralEstimate& b) {
  return combine(a, b, -1.0);
}
IntegralEstimate operator*(double s, const IntegralEstimate& a) {
  IntegralEstimate r = a;
  r.value = s * a.value;
  r.error = std::abs(s) * a.error;
  if (a.companion) r.companion = s * *a.companion;
  return r;
}

// ---------------------------------------------------------------------------

IntegralEstimate sphere_integrate(const std::function<double(const Vec3&)>& f,
                                  const SphericalRule& rule) {
  auto pass = [&](const SphericalRule& r, double& abs_sum) {
    std::vector<double> terms(r.nodes.size());
    abs_sum = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const double v = f(r.nodes[i]);
      if (!std::isfinite(v)) {
        const auto& n = r.nodes[i];
        throw DomainError("non-finite integrand at sphere node " + std::to_string(i) + " (" +
                          std::to_string(n.x()) + ", " + std::to_string(n.y()) + ", " +
                          std::to_string(n.z()) + ")");
      }
      terms[i] = r.weights[i] * v;
      abs_sum += std::abs(terms[i]);
    }
    return pairwise_sum(terms);
  };
  const SphericalRule& other = sphere_rule(companion_degree(rule.degree));
  double abs_main = 0.0, abs_other = 0.0;
  IntegralEstimate est;
  est.value = pass(rule, abs_main);
  const double comp = pass(other, abs_other);
  est.companion = comp;
  est.error = std::abs(est.value - comp) + 4.0 * machine_eps * (abs_main + abs_other);
  est.method = Method::tensor_grid;
  est.n_evals = static_cast<std::int64_t>(rule.nodes.size() + other.nodes.size());
  return est;
}

std::vector<IntegralEstimate> sphere_integrate(const SphereNodeFn& f, std::size_t n_components,
                                               const SphericalRule& rule) {
  const SphericalRule& other = sphere_rule(companion_degree(rule.degree));

  auto eval_nodes = [&](const SphericalRule& r, bool companion_pass) {
    std::vector<std::vector<IntegralEstimate>> out(r.nodes.size());
    parallel_for(r.nodes.size(), [&](std::size_t i) {
      out[i] = f(r.nodes[i], companion_pass);
      if (out[i].size() != n_components)
        throw ContractViolation("sphere integrand returned wrong component count");
      for (const auto& e : out[i]) {
        if (!std::isfinite(e.value)) {
          const auto& n = r.nodes[i];
          throw DomainError("non-finite integrand at sphere node " + std::to_string(i) + " (" +
                            std::to_string(n.x()) + ", " + std::to_string(n.y()) + ", " +
                            std::to_string(n.z()) + ")");
        }
      }
    });
    return out;
  };

  const auto main_vals = eval_nodes(rule, false);
  const auto comp_vals = eval_nodes(other, true);

  std::vector<IntegralEstimate> result(n_components);
  std::vector<double> terms(rule.nodes.size()), cterms(other.nodes.size());
  for (std::size_t c = 0; c < n_components; ++c) {
    double abs_sum = 0.0, resid = 0.0;
    std::int64_t evals = 0;
    Method method = Method::tensor_grid;
    std::vector<std::string> warnings;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const auto& e = main_vals[i][c];
      terms[i] = rule.weights[i] * e.value;
      abs_sum += std::abs(terms[i]);
      const double r = e.companion ? std::max(0.0, e.error - std::abs(e.value - *e.companion))
                                   : e.error;
      resid += rule.weights[i] * r;
      evals += e.n_evals;
      if (e.method == Method::monte_carlo) method = Method::monte_carlo;
      for (const auto& w : e.warnings)
        if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
    }
    for (std::size_t i = 0; i < other.nodes.size(); ++i) {
      const auto& e = comp_vals[i][c];
      cterms[i] = other.weights[i] * e.companion.value_or(e.value);
      abs_sum += std::abs(cterms[i]);
      evals += e.n_evals;
    }
    IntegralEstimate& est = result[c];
    est.value = pairwise_sum(terms);
    est.companion = pairwise_sum(cterms);
    est.error = std::abs(est.value - *est.companion) + resid + 4.0 * machine_eps * abs_sum;
    est.method = method;
    est.n_evals = evals;
    est.warnings = std::move(warnings);
  }
  return result;
}

double sphere_moment_matrix(const Mat3& a, const SphericalRule& rule) {
  std::vector<double> terms(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    terms[i] = rule.weights[i] * rule.nodes[i].dot(a * rule.nodes[i]);
  return pairwise_sum(terms);
}

double SphereMomentResiduals::worst() const {
  return std::max({pair_moments, dot_product, matrix_trace, antisymmetric});
}

SphereMomentResiduals sphere_moment_check(int degree, int trials, std::uint64_t seed) {
  const SphericalRule& rule = sphere_rule(degree);
  SphereMomentResiduals r;
  r.degree = degree;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Mat3 e = Mat3::Zero();
      e(i, j) = 1.0;
      const double q = sphere_moment_matrix(e, rule);
      r.pair_moments = std::max(r.pair_moments, std::abs(q - (i == j ? four_pi / 3.0 : 0.0)));
    }
  auto draw = [&](int t, int k) { return 2.0 * counter_uniform(seed, t, k) - 1.0; };
  for (int t = 0; t < trials; ++t) {
    const Vec3 a(draw(t, 0), draw(t, 1), draw(t, 2)), b(draw(t, 3), draw(t, 4), draw(t, 5));
    std::vector<double> terms(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      terms[i] = rule.weights[i] * rule.nodes[i].dot(a) * rule.nodes[i].dot(b);
    r.dot_product =
        std::max(r.dot_product, std::abs(pairwise_sum(terms) - four_pi / 3.0 * a.dot(b)));
    Mat3 m;
    for (int k = 0; k < 9; ++k) m(k / 3, k % 3) = draw(t, 6 + k);
    r.matrix_trace = std::max(
        r.matrix_trace, std::abs(sphere_moment_matrix(m, rule) - four_pi / 3.0 * m.trace()));
    r.antisymmetric =
        std::max(r.antisymmetric, std::abs(sphere_moment_matrix(m - m.transpose(), rule)));
  }
  return r;
}

// ---------------------------------------------------------------------------

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw ContractViolation("Gauss-Legendre order must be >= 1");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return cache.emplace(order, std::move(rule)).first->second;
}

namespace {

struct Panel {
  double a, b;
  double g_hi, g_lo;
  double abs_sum;
  double node_error;
};

template <typename Eval>
Panel make_panel(double a, double b, const Eval& eval) {
  const GaussRule& lo = gauss_legendre(12);
  const GaussRule& hi = gauss_legendre(24);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  Panel p{a, b, 0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < hi.nodes.size(); ++i) {
    const Measured v = eval(mid + half * hi.nodes[i]);
    const double w = half * hi.weights[i];
    p.g_hi += w * v.value;
    p.abs_sum += std::abs(w * v.value);
    p.node_error += w * v.error;
  }
  for (std::size_t i = 0; i < lo.nodes.size(); ++i) {
    const Measured v = eval(mid + half * lo.nodes[i]);
    p.g_lo += half * lo.weights[i] * v.value;
  }
  return p;
}

template <typename Eval>
IntegralEstimate adaptive(const Eval& eval, double a, double b, const RadialOptions& opts,
                          const std::string& term) {
  IntegralEstimate est;
  est.method = Method::adaptive;
  if (a == b) return est;
  if (!(b > a)) throw ContractViolation(term + ": integration interval reversed");
  auto checked = [&](double s) {
    const Measured v = eval(s);
    if (!std::isfinite(v.value) || !std::isfinite(v.error))
      throw IntegrationFailure(term, "non-finite integrand at s = " + std::to_string(s));
    return v;
  };

  std::vector<Panel> panels;
  const int n0 = std::max(1, opts.initial_panels);
  for (int i = 0; i < n0; ++i)
    panels.push_back(make_panel(a + (b - a) * i / n0, a + (b - a) * (i + 1) / n0, checked));

  for (;;) {
    std::vector<double> vals(panels.size()), errs(panels.size());
    double floor = 0.0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      vals[i] = panels[i].g_hi;
      errs[i] = std::abs(panels[i].g_hi - panels[i].g_lo);
      floor += panels[i].abs_sum;
    }
    floor *= 4.0 * machine_eps;
    std::vector<double> node_errs(panels.size());
    for (std::size_t i = 0; i < panels.size(); ++i) node_errs[i] = panels[i].node_error;
    const double total = pairwise_sum(vals);
    const double disc = pairwise_sum(errs);
    // No point resolving below the integrand's own error.
    const double noise = 2.0 * pairwise_sum(node_errs);
    const double tol =
        std::max({opts.abs_tol, opts.rel_tol * std::abs(total), 8.0 * floor, noise});
    if (disc <= tol) {
      std::vector<double> lo(panels.size());
      for (std::size_t i = 0; i < panels.size(); ++i) lo[i] = panels[i].g_lo;
      est.value = total;
      est.companion = pairwise_sum(lo);
      est.error = disc + floor + pairwise_sum(node_errs);
      est.n_evals = static_cast<std::int64_t>(panels.size()) * 36;
      return est;
    }
    if (static_cast<int>(panels.size()) >= opts.max_panels)
      throw IntegrationFailure(term, fmt::format("adaptive quadrature did not converge (error {:.3g} vs tolerance {:.3g})",
                                         disc, tol));
    const auto worst = static_cast<std::size_t>(
        std::max_element(errs.begin(), errs.end()) - errs.begin());
    const Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    panels[worst] = make_panel(p.a, mid, checked);
    panels.insert(panels.begin() + static_cast<std::ptrdiff_t>(worst) + 1,
                  make_panel(mid, p.b, checked));
  }
}

}  // namespace

IntegralEstimate integrate_interval(const std::function<double(double)>& f, double a, double b,
                                    const RadialOptions& opts, const std::string& term) {
  return adaptive([&](double s) { return Measured{f(s), 0.0}; }, a, b, opts, term);
}

IntegralEstimate integrate_interval(const std::function<Measured(double)>& f, double a,
                                    double b, const RadialOptions& opts,
                                    const std::string& term) {
  return adaptive(f, a, b, opts, term);
}

IntegralEstimate integrate_radial(const std::function<double(double)>& f, double r,
                                  const RadialOptions& opts) {
  if (r < 0.0) throw ContractViolation("integrate_radial: r must be >= 0");
  return integrate_interval(f, 0.0, r, opts);
}

double truncation_radius(double rate, double power) {
  if (!(rate > 0.0)) throw ContractViolation("truncation_radius: rate must be > 0");
  power = std::max(0.0, power);
  const double peak = power / rate;
  auto log_env = [&](double r) {
    return (power > 0.0 ? power * std::log(r) : 0.0) - rate * r;
  };
  const double log_peak = power > 0.0 ? log_env(peak) : 0.0;
  const double target = std::log(1e-16);
  double r = std::max(peak, 1.0 / rate);
  while (log_env(r) - log_peak > target) r += 1.0 / rate;
  return r;
}

IntegralEstimate integrate_half_line(const std::function<double(double)>& f, double rate,
                                     double power, const RadialOptions& opts,
                                     const std::string& term) {
  RadialOptions o = opts;
  o.initial_panels = std::max(o.initial_panels, 8);
  return integrate_interval(f, 0.0, truncation_radius(rate, power), o, term);
}

// ---------------------------------------------------------------------------

HatGrid coarser(const HatGrid& g) {
  HatGrid c = g;
  c.radial_order = std::max(2, (3 * g.radial_order) / 4);
  c.angular_order = std::max(2, (3 * g.angular_order) / 4);
  c.azimuth_points = std::max(1, (3 * g.azimuth_points) / 4);
  return c;
}

double counter_uniform(std::uint64_t seed, std::uint64_t sample, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(seed ^ mix(sample));
  h = mix(h ^ (stream * 0xD1B54A32D192ED03ULL + 1));
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

namespace {

struct GridSums {
  std::vector<double> sum;
  std::vector<double> abs_sum;
  std::int64_t evals = 0;
};

GridSums grid_pass(const HatIntegrand& f, std::size_t nc, const Vec3& x, double gamma,
                   int n_r, int n_xi, int n_phi) {
  const double r = x.norm();
  const Vec3 axis = r > 0.0 ? Vec3(x / r) : Vec3::UnitZ();
  const auto [e1, e2] = orthonormal_complement(axis);

  // r2 panels: [0, r] then geometric panels outward.
  std::vector<std::pair<double, double>> panels;
  if (r > 0.0) panels.emplace_back(0.0, r);
  const double r_end = r + truncation_radius(2.0 * gamma, 6.0);
  double lo = r, width = 0.25 / gamma;
  while (lo < r_end) {
    const double hi = std::min(lo + width, r_end);
    panels.emplace_back(lo, hi);
    lo = hi;
    width *= 2.0;
  }

  const GaussRule& gr = gauss_legendre(n_r);
  const GaussRule& gx = gauss_legendre(n_xi);
  const std::size_t n_nodes = panels.size() * static_cast<std::size_t>(n_r);

  std::vector<std::vector<double>> part(n_nodes), part_abs(n_nodes);
  parallel_for(n_nodes, [&](std::size_t idx) {
    const auto& [a, b] = panels[idx / n_r];
    const int k = static_cast<int>(idx % n_r);
    const bool inner = b <= r;
    const double half = 0.5 * (b - a);
    const double r2 = 0.5 * (a + b) + half * gr.nodes[k];
    const double wr = half * gr.weights[k];
    std::vector<double> acc(nc, 0.0), acc_abs(nc, 0.0), buf(nc);
    std::vector<double> xi_terms(nc);
    Vec3 hat[1];
    for (int i = 0; i < n_xi; ++i) {
      const double xi = gx.nodes[i];
      double u, c, jac;
      if (inner) {
        u = r + r2 * xi;
        c = -xi + r2 * (1.0 - xi * xi) / (2.0 * r);
        jac = r2 * r2 * u / r;
      } else {
        u = r2 + r * xi;
        c = -xi + r * (1.0 - xi * xi) / (2.0 * r2);
        jac = r2 * u;
      }
      c = std::clamp(c, -1.0, 1.0);
      const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int p = 0; p < n_phi; ++p) {
        const double ph = 2.0 * pi * (p + 0.5) / n_phi;
        hat[0] = r2 * (c * axis + s * (std::cos(ph) * e1 + std::sin(ph) * e2));
        std::fill(buf.begin(), buf.end(), 0.0);
        f(std::span<const Vec3>(hat, 1), buf);
        const double w = wr * gx.weights[i] * (2.0 * pi / n_phi) * jac;
        for (std::size_t q = 0; q < nc; ++q) {
          acc[q] += w * buf[q];
          acc_abs[q] += std::abs(w * buf[q]);
        }
      }
    }
    part[idx] = std::move(acc);
    part_abs[idx] = std::move(acc_abs);
  });

  GridSums out;
  out.sum.assign(nc, 0.0);
  out.abs_sum.assign(nc, 0.0);
  std::vector<double> col(n_nodes);
  for (std::size_t q = 0; q < nc; ++q) {
    for (std::size_t i = 0; i < n_nodes; ++i) col[i] = part[i][q];
    out.sum[q] = pairwise_sum(col);
    for (std::size_t i = 0; i < n_nodes; ++i) col[i] = part_abs[i][q];
    out.abs_sum[q] = pairwise_sum(col);
  }
  out.evals = static_cast<std::int64_t>(n_nodes) * n_xi * n_phi;
  return out;
}

struct BlockStats {
  std::vector<double> n_mean;  // running mean
  std::vector<double> m2;
  std::vector<double> abs_sum;
  std::vector<double> max_abs;
  double count = 0.0;
  std::int64_t rejected = 0;
};

void merge(BlockStats& a, const BlockStats& b) {
  if (b.count == 0.0) {
    a.rejected += b.rejected;
    return;
  }
  if (a.count == 0.0) {
    const auto rej = a.rejected;
    a = b;
    a.rejected += rej;
    return;
  }
  const double n = a.count + b.count;
  for (std::size_t q = 0; q < a.n_mean.size(); ++q) {
    const double delta = b.n_mean[q] - a.n_mean[q];
    a.n_mean[q] += delta * b.count / n;
    a.m2[q] += b.m2[q] + delta * delta * a.count * b.count / n;
    a.abs_sum[q] += b.abs_sum[q];
    a.max_abs[q] = std::max(a.max_abs[q], b.max_abs[q]);
  }
  a.count = n;
  a.rejected += b.rejected;
}

std::vector<IntegralEstimate> monte_carlo(const HatIntegrand& f, std::size_t nc,
                                          const AtomSpec& spec, const Vec3& x,
                                          const McSampler& s) {
  if (s.n_samples <= 0) throw IntegrationFailure("monte-carlo", "zero samples requested");
  const double lambda = s.envelope_rate > 0.0 ? s.envelope_rate : 0.5 * spec.charge;
  const int m = spec.n_electrons - 1;
  const std::int64_t block = 1024;
  const std::int64_t n_blocks = (s.n_samples + block - 1) / block;
  const double log_q0 = 3.0 * std::log(lambda) - std::log(8.0 * pi);

  std::vector<BlockStats> blocks(static_cast<std::size_t>(n_blocks));
  parallel_for(static_cast<std::size_t>(n_blocks), [&](std::size_t bi) {
    BlockStats st;
    st.n_mean.assign(nc, 0.0);
    st.m2.assign(nc, 0.0);
    st.abs_sum.assign(nc, 0.0);
    st.max_abs.assign(nc, 0.0);
    std::vector<Vec3> hat(m);
    std::vector<double> buf(nc);
    const std::int64_t first = static_cast<std::int64_t>(bi) * block;
    const std::int64_t last = std::min(first + block, s.n_samples);
    for (std::int64_t i = first; i < last; ++i) {
      double log_q = 0.0;
      bool reject = false;
      for (int k = 0; k < m; ++k) {
        const auto base = static_cast<std::uint64_t>(5 * k);
        const auto si = static_cast<std::uint64_t>(i);
        const double rad = -(std::log(counter_uniform(s.seed, si, base)) +
                             std::log(counter_uniform(s.seed, si, base + 1)) +
                             std::log(counter_uniform(s.seed, si, base + 2))) /
                           lambda;
        const double z = 2.0 * counter_uniform(s.seed, si, base + 3) - 1.0;
        const double ph = 2.0 * pi * counter_uniform(s.seed, si, base + 4);
        const double sz = std::sqrt(std::max(0.0, 1.0 - z * z));
        hat[k] = rad * Vec3(sz * std::cos(ph), sz * std::sin(ph), z);
        log_q += log_q0 - lambda * rad;
        if (rad == 0.0 || hat[k] == x) reject = true;
        for (int l = 0; l < k; ++l)
          if (hat[l] == hat[k]) reject = true;
      }
      double w_scale = 0.0;
      std::fill(buf.begin(), buf.end(), 0.0);
      if (reject) {
        ++st.rejected;
      } else {
        f(hat, buf);
        w_scale = std::exp(-log_q);
      }
      st.count += 1.0;
      for (std::size_t q = 0; q < nc; ++q) {
        const double w = buf[q] * w_scale;
        const double delta = w - st.n_mean[q];
        st.n_mean[q] += delta / st.count;
        st.m2[q] += delta * (w - st.n_mean[q]);
        st.abs_sum[q] += std::abs(w);
        st.max_abs[q] = std::max(st.max_abs[q], std::abs(w));
      }
    }
    blocks[bi] = std::move(st);
  });

  // Pairwise merge in block order.
  std::function<BlockStats(std::size_t, std::size_t)> reduce = [&](std::size_t lo,
                                                                   std::size_t hi) {
    if (hi - lo == 1) return blocks[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    BlockStats a = reduce(lo, mid);
    merge(a, reduce(mid, hi));
    return a;
  };
  const BlockStats total = reduce(0, blocks.size());

  std::vector<IntegralEstimate> out(nc);
  for (std::size_t q = 0; q < nc; ++q) {
    IntegralEstimate& e = out[q];
    e.method = Method::monte_carlo;
    e.n_evals = s.n_samples;
    e.value = total.n_mean[q];
    if (total.count >= 2.0) {
      e.error = std::sqrt(total.m2[q] / (total.count - 1.0) / total.count);
    } else {
      e.error = std::abs(e.value);
      e.warnings.push_back("fewer than two samples; error bar is |value|");
    }
    const double mean_abs = total.abs_sum[q] / total.count;
    int misfits = 0;
    for (const auto& b : blocks)
      if (mean_abs > 0.0 && b.max_abs[q] > 1e3 * mean_abs) ++misfits;
    if (misfits >= 2)
      e.warnings.push_back("envelope misfit: sample weights exceeded 1e3 x mean in " +
                           std::to_string(misfits) + " blocks");
    if (total.rejected > 0)
      e.warnings.push_back(std::to_string(total.rejected) +
                           " samples on the singular set were rejected");
  }
  return out;
}

}  // namespace

std::vector<IntegralEstimate> integrate_hat(const HatIntegrand& f, std::size_t nc,
                                            const AtomSpec& spec, const Vec3& x,
                                            const HatMethod& method) {
  if (spec.n_electrons == 1) {
    std::vector<double> buf(nc, 0.0);
    f(std::span<const Vec3>(), buf);
    std::vector<IntegralEstimate> out(nc);
    for (std::size_t q = 0; q < nc; ++q) {
      out[q].value = buf[q];
      out[q].companion = buf[q];
      out[q].n_evals = 1;
      out[q].method = Method::tensor_grid;
    }
    return out;
  }
  if (const auto* mc = std::get_if<McSampler>(&method)) return monte_carlo(f, nc, spec, x, *mc);
  if (spec.n_electrons > 2)
    throw ContractViolation("marginal integrals with N >= 3 need a Monte-Carlo sampler");

  const auto& g = std::get<HatGrid>(method);
  const double gamma = g.decay_rate > 0.0 ? g.decay_rate : 0.5 * spec.charge;
  const GridSums fine = grid_pass(f, nc, x, gamma, g.radial_order, g.angular_order,
                                  g.azimuth_points);
  const HatGrid c = coarser(g);
  const GridSums coarse =
      grid_pass(f, nc, x, gamma, c.radial_order, c.angular_order, c.azimuth_points);
  std::vector<IntegralEstimate> out(nc);
  for (std::size_t q = 0; q < nc; ++q) {
    auto& e = out[q];
    e.value = fine.sum[q];
    e.companion = coarse.sum[q];
    e.error = std::abs(fine.sum[q] - coarse.sum[q]) +
              4.0 * machine_eps * (fine.abs_sum[q] + coarse.abs_sum[q]);
    e.method = Method::tensor_grid;
    e.n_evals = fine.evals + coarse.evals;
  }
  return out;
}

}  // namespace cusplab

#include "cusplab/commands.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <ostream>

namespace cusplab {

namespace {

using json = nlohmann::ordered_json;

json meta_json(const RunMeta& m) {
  json j;
  j["tool"] = "cusplab";
  j["version"] = m.version;
  j["command"] = m.command;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  return j;
}

void write_meta_csv(std::ostream& os, const RunMeta& m) {
  os << csv_header;
  os << csv_record("version", {}, {}, {}, "meta", m.version);
  os << csv_record("command", {}, {}, {}, "meta", m.command);
  os << csv_record("config_hash", {}, {}, {}, "meta", m.config_hash);
  os << csv_record("seed", {}, {}, {}, "meta", std::to_string(m.seed));
}

void write_meta_table(std::ostream& os, const RunMeta& m) {
  os << fmt::format("cusplab {} {}  config {}  seed {}\n", m.version, m.command, m.config_hash,
                    m.seed);
}

json measured_json(const Measured& m) { return json{{"value", m.value}, {"error", m.error}}; }

json estimate_json(const IntegralEstimate& e) {
  json j{{"value", e.value}, {"error", e.error}, {"method", method_name(e.method)},
         {"n_evals", e.n_evals}};
  if (!e.warnings.empty()) j["warnings"] = e.warnings;
  return j;
}

template <typename T, typename F>
json optional_json(const std::optional<T>& v, F&& f) {
  return v ? f(*v) : json(nullptr);
}

json quantity_json(const QuantityRow& q) {
  auto closed = [](const ClosedValue& c) {
    return json{{"value", c.value}, {"error", c.error}, {"eigen_only", c.eigen_only}};
  };
  json j;
  j["name"] = q.name;
  j["direct"] = optional_json(q.direct, measured_json);
  j["direct_method"] = q.direct_method;
  j["extrapolated"] = optional_json(q.extrapolated, measured_json);
  j["recursion"] = optional_json(q.recursion, measured_json);
  j["closed"] = optional_json(q.closed, closed);
  j["closed_alt"] = optional_json(q.closed_alt, closed);
  j["golden"] = optional_json(q.golden, [](double g) { return json(g); });
  j["notice"] = q.notice;
  return j;
}

json bound_json(const BoundRow& b) {
  json j;
  j["name"] = b.name;
  j["sense"] = sense_symbol(b.sense);
  j["lhs"] = measured_json(b.lhs);
  j["rhs"] = measured_json(b.rhs);
  j["margin"] = b.margin;
  j["error"] = b.error;
  j["verdict"] = verdict_name(b.verdict);
  j["eigen_only"] = b.eigen_only;
  j["diagnostic"] = b.diagnostic;
  j["notice"] = b.notice;
  return j;
}

json samples_json(const RadialSamples& s) {
  json pts = json::array();
  for (std::size_t i = 0; i < s.radii.size() && i < s.values.size(); ++i) {
    json p{{"r", s.radii[i]}};
    p.update(estimate_json(s.values[i]));
    pts.push_back(std::move(p));
  }
  return json{{"quantity", s.quantity}, {"points", std::move(pts)}};
}

std::string row_flag(const BoundRow& b) {
  std::string f(verdict_name(b.verdict));
  if (b.eigen_only) f += ";eigen-only";
  if (b.diagnostic) f += ";diagnostic";
  return f;
}

void quantity_csv(std::ostream& os, const QuantityRow& q) {
  auto closed_flag = [](const ClosedValue& c) { return c.eigen_only ? "eigen-only" : ""; };
  if (q.direct)
    os << csv_record(q.name, 0.0, q.direct->value, q.direct->error, q.direct_method, "");
  if (q.extrapolated)
    os << csv_record(q.name, 0.0, q.extrapolated->value, q.extrapolated->error, "extrapolated",
                     "");
  if (q.recursion)
    os << csv_record(q.name, 0.0, q.recursion->value, q.recursion->error, "recursion",
                     "eigen-only");
  if (q.closed)
    os << csv_record(q.name, 0.0, q.closed->value, q.closed->error, "closed",
                     closed_flag(*q.closed));
  if (q.closed_alt)
    os << csv_record(q.name, 0.0, q.closed_alt->value, q.closed_alt->error, "closed-alt",
                     closed_flag(*q.closed_alt));
  if (q.golden) os << csv_record(q.name, 0.0, *q.golden, 0.0, "reference", "");
}

std::string opt_cell(const std::optional<Measured>& m) {
  return m ? fmt::format("{:.12g} ± {:.2g}", m->value, m->error) : "-";
}
std::string opt_cell(const std::optional<ClosedValue>& m) {
  return m ? fmt::format("{:.12g} ± {:.2g}{}", m->value, m->error, m->eigen_only ? " *" : "")
           : "-";
}

void quantity_table(std::ostream& os, const std::vector<QuantityRow>& rows) {
  os << fmt::format("  {:<10} {:>32} {:>32} {:>32} {:>32} {:>14}\n", "quantity", "direct",
                    "recursion", "closed", "closed (alt)", "reference");
  for (const auto& q : rows) {
    os << fmt::format("  {:<10} {:>32} {:>32} {:>32} {:>32} {:>14}\n", q.name,
                      opt_cell(q.direct), opt_cell(q.recursion), opt_cell(q.closed),
                      opt_cell(q.closed_alt), q.golden ? fmt::format("{:.10g}", *q.golden) : "-");
    if (!q.notice.empty()) os << "    note: " << q.notice << "\n";
  }
}

void bound_table(std::ostream& os, const std::vector<BoundRow>& rows) {
  for (const auto& b : rows) {
    os << fmt::format("  {:<58} {:>22} {:>10} {:<22}{}{}\n", b.name,
                      fmt::format("{:.6g}", b.margin), fmt::format("{:.2g}", b.error),
                      verdict_name(b.verdict), b.eigen_only ? " eigen-only" : "",
                      b.diagnostic ? " diagnostic" : "");
    if (!b.notice.empty()) os << "    note: " << b.notice << "\n";
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string configuration_string(const Configuration& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i)
    s += fmt::format("{}({}, {}, {})", i ? " " : "", c[i].x(), c[i].y(), c[i].z());
  return s;
}

json configuration_json(const Configuration& c) {
  json a = json::array();
  for (const auto& x : c) a.push_back(json::array({x.x(), x.y(), x.z()}));
  return a;
}

}  // namespace

RunMeta make_meta(const std::string& command, const RunConfig& cfg) {
  RunMeta m;
  m.command = command;
  m.config_hash = cfg.hash;
  m.seed = cfg.seed;
  return m;
}

std::string csv_record(const std::string& quantity, std::optional<double> r,
                       std::optional<double> value, std::optional<double> error,
                       const std::string& method, const std::string& flag) {
  auto num = [](std::optional<double> v) { return v ? fmt::format("{}", *v) : std::string(); };
  return fmt::format("{},{},{},{},{},{}\n", csv_field(quantity), num(r), num(value), num(error),
                     csv_field(method), csv_field(flag));
}

// ---------------------------------------------------------------------------

void write_report(std::ostream& os, const CuspReport& rep, const RunMeta& meta, OutputFormat f) {
  if (f == OutputFormat::json) {
    json j = meta_json(meta);
    j["model"] = rep.model;
    j["system"] = json{{"n_electrons", rep.spec.n_electrons},
                       {"charge", rep.spec.charge},
                       {"energy", rep.spec.energy},
                       {"prev_ground_energy", rep.spec.prev_ground_energy},
                       {"ion_gap", rep.spec.ion_gap}};
    j["eigenfunction"] = rep.eigenfunction;
    j["golden_ratios"] = optional_json(rep.golden_ratios, [](const std::array<double, 3>& g) {
      return json::array({g[0], g[1], g[2]});
    });
    for (const char* key : {"derivatives", "auxiliary", "checks", "bounds"}) j[key] = json::array();
    for (const auto& q : rep.derivatives) j["derivatives"].push_back(quantity_json(q));
    for (const auto& q : rep.auxiliary) j["auxiliary"].push_back(quantity_json(q));
    for (const auto& b : rep.checks) j["checks"].push_back(bound_json(b));
    for (const auto& b : rep.bounds) j["bounds"].push_back(bound_json(b));
    j["notices"] = rep.notices;
    j["samples"] = json::array();
    for (const auto* s : {&rep.samples.rho, &rep.samples.t, &rep.samples.v, &rep.samples.w,
                          &rep.samples.h})
      if (!s->radii.empty()) j["samples"].push_back(samples_json(*s));
    j["aborted"] = optional_json(rep.aborted, [](const std::string& s) { return json(s); });
    j["has_violation"] = rep.has_violation();
    os << j.dump(2) << "\n";
    return;
  }
  if (f == OutputFormat::csv) {
    write_meta_csv(os, meta);
    for (const auto& q : rep.derivatives) quantity_csv(os, q);
    for (const auto& q : rep.auxiliary) quantity_csv(os, q);
    for (const auto* rows : {&rep.checks, &rep.bounds})
      for (const auto& b : *rows)
        os << csv_record(b.name, 0.0, b.margin, b.error, rows == &rep.checks ? "check" : "bound",
                         row_flag(b));
    for (const auto* s : {&rep.samples.rho, &rep.samples.t, &rep.samples.v, &rep.samples.w,
                          &rep.samples.h})
      for (std::size_t i = 0; i < s->radii.size() && i < s->values.size(); ++i)
        os << csv_record(s->quantity, s->radii[i], s->values[i].value, s->values[i].error,
                         std::string(method_name(s->values[i].method)), "");
    return;
  }
  write_meta_table(os, meta);
  os << fmt::format("model: {}\nN = {}, Z = {}, E = {}, previous ground energy = {}, eps = {}\n",
                    rep.model, rep.spec.n_electrons, rep.spec.charge, rep.spec.energy,
                    rep.spec.prev_ground_energy, rep.spec.ion_gap);
  os << (rep.eigenfunction ? "exact eigenfunction\n"
                           : "trial function: eigen-only rows are diagnostics\n");
  if (rep.golden_ratios)
    os << fmt::format("reference ratios rho'/rho, rho''/rho, rho'''/rho: {}, {}, {}\n",
                      (*rep.golden_ratios)[0], (*rep.golden_ratios)[1], (*rep.golden_ratios)[2]);
  os << "\nderivatives of the spherical average at 0 (* = assumes an eigenfunction)\n";
  quantity_table(os, rep.derivatives);
  os << "\nauxiliary values at 0\n";
  quantity_table(os, rep.auxiliary);
  os << fmt::format("\nchecks\n  {:<58} {:>22} {:>10} {:<22}\n", "relation", "margin", "error",
                    "verdict");
  bound_table(os, rep.checks);
  os << "\nbounds\n";
  bound_table(os, rep.bounds);
  if (!rep.notices.empty()) {
    os << "\nnotices\n";
    for (const auto& n : rep.notices) os << "  " << n << "\n";
  }
  if (rep.aborted) os << "\nABORTED: " << *rep.aborted << "\n";
  os << fmt::format("\nviolations beyond error: {}\n", rep.has_violation() ? "yes" : "none");
}

int report_exit_code(const CuspReport& rep) {
  if (rep.aborted) return exit_internal_error;
  return rep.has_violation() ? exit_violation : exit_ok;
}

// ---------------------------------------------------------------------------

SphereCheckResult sphere_check(const SphereCheckConfig& cfg, std::uint64_t seed) {
  SphereCheckResult r;
  for (int d : cfg.degrees) {
    r.rows.push_back(sphere_moment_check(d, cfg.trials, seed));
    const auto& x = r.rows.back();
    r.pass &= x.pair_moments <= 1e-12 && x.dot_product <= 1e-12 && x.matrix_trace <= 1e-12 &&
              x.antisymmetric <= 1e-13;
  }
  return r;
}

void write_sphere_check(std::ostream& os, const SphereCheckResult& r, const RunMeta& meta,
                        OutputFormat f) {
  if (f == OutputFormat::json) {
    json j = meta_json(meta);
    j["rules"] = json::array();
    for (const auto& x : r.rows)
      j["rules"].push_back(json{{"degree", x.degree},
                                {"pair_moments", x.pair_moments},
                                {"dot_product", x.dot_product},
                                {"matrix_trace", x.matrix_trace},
                                {"antisymmetric", x.antisymmetric}});
    j["pass"] = r.pass;
    os << j.dump(2) << "\n";
    return;
  }
  if (f == OutputFormat::csv) {
    write_meta_csv(os, meta);
    for (const auto& x : r.rows) {
      const std::string m = fmt::format("degree-{}", x.degree);
      os << csv_record("pair_moments", {}, x.pair_moments, {}, m, "");
      os << csv_record("dot_product", {}, x.dot_product, {}, m, "");
      os << csv_record("matrix_trace", {}, x.matrix_trace, {}, m, "");
      os << csv_record("antisymmetric", {}, x.antisymmetric, {}, m, "");
    }
    return;
  }
  write_meta_table(os, meta);
  os << fmt::format("{:>6} {:>14} {:>14} {:>14} {:>14}\n", "degree", "w_ij moments", "(w.a)(w.b)",
                    "w.(Aw)", "antisym A");
  for (const auto& x : r.rows)
    os << fmt::format("{:>6} {:>14.3e} {:>14.3e} {:>14.3e} {:>14.3e}\n", x.degree, x.pair_moments,
                      x.dot_product, x.matrix_trace, x.antisymmetric);
  os << (r.pass ? "all residuals within tolerance\n" : "RESIDUAL ABOVE TOLERANCE\n");
}

// ---------------------------------------------------------------------------

JastrowCheckResult jastrow_check(const RunConfig& cfg) {
  const auto& jc = cfg.jastrow;
  const WavefunctionModel& model = cfg.model;
  const double charge = model.charge();
  JastrowCheckResult r;
  r.model = model.describe();
  for (int k = 0; k < jc.configurations; ++k) {
    JastrowRow row;
    row.config = random_configuration(model.n_electrons(), jc.scale, cfg.seed,
                                      static_cast<std::uint64_t>(k));
    row.two_body = contracted_f2_identity(model, row.config);
    row.log_part = f3_log_contraction(model, row.config);
    const Eigen::MatrixXd an = f_cut(row.config, charge).hessian;
    const Eigen::MatrixXd fd = fcut_hessian_fd(row.config, charge, jc.fd_step);
    for (Eigen::Index a = 0; a < an.rows(); ++a)
      for (Eigen::Index b = 0; b < an.cols(); ++b)
        row.fd_hessian = std::max(row.fd_hessian, std::abs(an(a, b) - fd(a, b)) /
                                                      std::max(std::abs(an(a, b)), 1e-3));
    r.worst_two_body = std::max(r.worst_two_body, row.two_body.residual());
    r.worst_log_part = std::max(r.worst_log_part, row.log_part.residual());
    r.worst_fd = std::max(r.worst_fd, row.fd_hessian);
    r.rows.push_back(std::move(row));
  }
  r.pass = r.worst_two_body <= 1e-9 && r.worst_log_part <= 1e-9 && r.worst_fd <= 1e-5;
  if (jc.apriori)
    r.apriori = apriori_residual(model, jc.apriori_center, jc.inner_radius, jc.outer_radius,
                                 jc.apriori_samples, cfg.seed);
  if (jc.probe) r.probe = phi3_smoothness_probe(model, jc.probe_center, jc.probe_radii);
  return r;
}

void write_jastrow_check(std::ostream& os, const JastrowCheckResult& r, const RunMeta& meta,
                         OutputFormat f) {
  if (f == OutputFormat::json) {
    json j = meta_json(meta);
    j["model"] = r.model;
    j["configurations"] = json::array();
    for (const auto& row : r.rows)
      j["configurations"].push_back(json{
          {"positions", configuration_json(row.config)},
          {"two_body", {{"lhs", row.two_body.lhs}, {"rhs", row.two_body.rhs},
                        {"residual", row.two_body.residual()}}},
          {"log_part", {{"lhs", row.log_part.lhs}, {"rhs", row.log_part.rhs},
                        {"residual", row.log_part.residual()}}},
          {"fd_hessian_rel_error", row.fd_hessian}});
    j["worst"] = json{{"two_body", r.worst_two_body},
                      {"log_part", r.worst_log_part},
                      {"fd_hessian", r.worst_fd}};
    j["apriori"] = optional_json(r.apriori, [](const AprioriResult& a) {
      return json{{"ratio", a.ratio},
                  {"refined_ratio", a.refined_ratio},
                  {"numerator", a.numerator},
                  {"denominator", a.denominator},
                  {"raw_sup", a.raw_sup},
                  {"refined_raw_sup", a.refined_raw_sup},
                  {"unstable", a.unstable},
                  {"notice", a.notice}};
    });
    j["probe"] = optional_json(r.probe, [](const SmoothnessProbe& p) {
      json rows = json::array();
      for (const auto& x : p.rows) rows.push_back(json{{"radius", x.radius}, {"quotient", x.quotient}});
      return json{{"rows", rows}, {"unbounded", p.unbounded}};
    });
    j["pass"] = r.pass;
    os << j.dump(2) << "\n";
    return;
  }
  if (f == OutputFormat::csv) {
    write_meta_csv(os, meta);
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
      const auto& row = r.rows[k];
      const std::string cfgs = configuration_string(row.config);
      os << csv_record(fmt::format("two_body_lhs[{}]", k), {}, row.two_body.lhs, {}, "identity", cfgs);
      os << csv_record(fmt::format("two_body_rhs[{}]", k), {}, row.two_body.rhs, {}, "identity", cfgs);
      os << csv_record(fmt::format("two_body_residual[{}]", k), {}, row.two_body.residual(), {},
                       "identity", "");
      os << csv_record(fmt::format("log_part_lhs[{}]", k), {}, row.log_part.lhs, {}, "identity", cfgs);
      os << csv_record(fmt::format("log_part_rhs[{}]", k), {}, row.log_part.rhs, {}, "identity", cfgs);
      os << csv_record(fmt::format("log_part_residual[{}]", k), {}, row.log_part.residual(), {},
                       "identity", "");
      os << csv_record(fmt::format("fd_hessian_rel_error[{}]", k), {}, row.fd_hessian, {},
                       "finite-difference", "");
    }
    if (r.apriori) {
      os << csv_record("apriori_ratio", {}, r.apriori->ratio, {}, "sampled",
                       r.apriori->unstable ? "unstable" : "");
      os << csv_record("apriori_refined_ratio", {}, r.apriori->refined_ratio, {}, "sampled", "");
      os << csv_record("apriori_raw_sup", {}, r.apriori->raw_sup, {}, "sampled", "");
      os << csv_record("apriori_refined_raw_sup", {}, r.apriori->refined_raw_sup, {}, "sampled", "");
    }
    if (r.probe)
      for (const auto& x : r.probe->rows)
        os << csv_record("regular_part_quotient", x.radius, x.quotient, {}, "pair-difference",
                         r.probe->unbounded ? "unbounded" : "");
    return;
  }
  write_meta_table(os, meta);
  os << "model: " << r.model << "\n";
  os << fmt::format("{:>4} {:>24} {:>24} {:>10} {:>24} {:>24} {:>10} {:>10}\n", "k",
                    "two-body lhs", "two-body rhs", "resid", "log-part lhs", "log-part rhs",
                    "resid", "fd rel");
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    const auto& row = r.rows[k];
    os << fmt::format("{:>4} {:>24.16g} {:>24.16g} {:>10.2e} {:>24.16g} {:>24.16g} {:>10.2e} {:>10.2e}\n",
                      k, row.two_body.lhs, row.two_body.rhs, row.two_body.residual(),
                      row.log_part.lhs, row.log_part.rhs, row.log_part.residual(), row.fd_hessian);
  }
  os << fmt::format("worst: two-body {:.2e}, log-part {:.2e}, finite differences {:.2e}\n",
                    r.worst_two_body, r.worst_log_part, r.worst_fd);
  if (r.apriori)
    os << fmt::format("a priori ratio {:.6g} -> {:.6g} (4x samples); unsubtracted sup {:.6g} -> "
                      "{:.6g}{}\n",
                      r.apriori->ratio, r.apriori->refined_ratio, r.apriori->raw_sup,
                      r.apriori->refined_raw_sup, r.apriori->unstable ? "  UNSTABLE" : "");
  if (r.probe) {
    os << "regular-part gradient quotients\n";
    for (const auto& x : r.probe->rows)
      os << fmt::format("  {:>10.3g} {:>14.6g}\n", x.radius, x.quotient);
    if (r.probe->unbounded) os << "  quotients grow as the pairs shrink\n";
  }
  os << (r.pass ? "identities hold\n" : "IDENTITY RESIDUAL ABOVE TOLERANCE\n");
}

// ---------------------------------------------------------------------------

ConvergeResult converge(const RunConfig& cfg) {
  ConvergeResult r;
  const auto& cc = cfg.converge;
  EvalOptions eval = cfg.report.eval;
  std::vector<double> xs, ys;
  if (cc.monte_carlo) {
    r.method = "monte_carlo";
    McSampler base;
    if (const auto* mc = std::get_if<McSampler>(&eval.hat)) base = *mc;
    base.seed = cfg.seed;
    for (auto n : cc.sample_counts) {
      McSampler s = base;
      s.n_samples = n;
      eval.hat = s;
      ConvergeRow row;
      row.size = n;
      row.estimate = density_at(cfg.model, cfg.system, Vec3::Zero(), eval);
      if (row.estimate.error > 0.0 && n >= 2) {
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(std::log(row.estimate.error));
      }
      r.rows.push_back(std::move(row));
    }
  } else {
    r.method = "grid";
    HatGrid base;
    if (const auto* g = std::get_if<HatGrid>(&eval.hat)) base = *g;
    for (int k : cc.grid_orders) {
      HatGrid g = base;
      g.radial_order = g.angular_order = k;
      eval.hat = g;
      ConvergeRow row;
      row.size = k;
      row.estimate = density_at(cfg.model, cfg.system, Vec3::Zero(), eval);
      r.rows.push_back(std::move(row));
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < r.rows.size(); ++i)
      if (r.rows[i].size > r.rows[best].size) best = i;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      if (i == best) continue;
      const double d = std::abs(r.rows[i].estimate.value - r.rows[best].estimate.value);
      r.rows[i].deviation = d;
      if (d > 0.0) {
        xs.push_back(std::log(static_cast<double>(r.rows[i].size)));
        ys.push_back(std::log(d));
      }
    }
  }
  if (xs.size() >= 2) {
    Eigen::MatrixXd a(xs.size(), 2);
    Eigen::VectorXd b(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      a(static_cast<Eigen::Index>(i), 0) = xs[i];
      a(static_cast<Eigen::Index>(i), 1) = 1.0;
      b[static_cast<Eigen::Index>(i)] = ys[i];
    }
    const Eigen::VectorXd fit = a.colPivHouseholderQr().solve(b);
    r.slope = fit[0];
  }
  return r;
}

void write_converge(std::ostream& os, const ConvergeResult& r, const RunMeta& meta,
                    OutputFormat f) {
  if (f == OutputFormat::json) {
    json j = meta_json(meta);
    j["quantity"] = r.quantity;
    j["method"] = r.method;
    j["rows"] = json::array();
    for (const auto& row : r.rows) {
      json x{{"size", row.size}};
      x.update(estimate_json(row.estimate));
      x["deviation"] = optional_json(row.deviation, [](double d) { return json(d); });
      j["rows"].push_back(std::move(x));
    }
    j["slope"] = optional_json(r.slope, [](double s) { return json(s); });
    os << j.dump(2) << "\n";
    return;
  }
  if (f == OutputFormat::csv) {
    write_meta_csv(os, meta);
    for (const auto& row : r.rows)
      os << csv_record(r.quantity, 0.0, row.estimate.value, row.estimate.error,
                       fmt::format("{}-{}", r.method, row.size),
                       row.estimate.warnings.empty() ? "" : row.estimate.warnings.front());
    if (r.slope) os << csv_record("slope", {}, *r.slope, {}, r.method, "fit");
    return;
  }
  write_meta_table(os, meta);
  os << fmt::format("{} by {}\n{:>10} {:>24} {:>12} {:>12}\n", r.quantity, r.method, "size",
                    "value", "error", "deviation");
  for (const auto& row : r.rows)
    os << fmt::format("{:>10} {:>24.16g} {:>12.3e} {:>12}\n", row.size, row.estimate.value,
                      row.estimate.error,
                      row.deviation ? fmt::format("{:.3e}", *row.deviation) : std::string("-"));
  if (r.slope)
    os << fmt::format("fitted slope of log({}) against log(size): {:.4f}\n",
                      r.method == "grid" ? "deviation" : "error", *r.slope);
  else
    os << "too few usable points for a slope\n";
}

// ---------------------------------------------------------------------------

int cmd_report(const RunConfig& cfg, std::ostream& out) {
  const CuspReport rep = build_report(cfg.model, cfg.system, cfg.report);
  write_report(out, rep, make_meta("report", cfg), cfg.format);
  return report_exit_code(rep);
}

int cmd_sphere_check(const RunConfig& cfg, std::ostream& out) {
  const auto r = sphere_check(cfg.sphere_check, cfg.seed);
  write_sphere_check(out, r, make_meta("sphere-check", cfg), cfg.format);
  return r.pass ? exit_ok : exit_violation;
}

int cmd_jastrow_check(const RunConfig& cfg, std::ostream& out) {
  const auto r = jastrow_check(cfg);
  write_jastrow_check(out, r, make_meta("jastrow-check", cfg), cfg.format);
  return r.pass ? exit_ok : exit_violation;
}

int cmd_converge(const RunConfig& cfg, std::ostream& out) {
  write_converge(out, converge(cfg), make_meta("converge", cfg), cfg.format);
  return exit_ok;
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "configuration error at " << e.what() << "\n";
    return exit_config_error;
  } catch (const IntegrationFailure& e) {
    err << "integration failure in term " << e.term() << ": " << e.what() << "\n";
    return exit_integration_failure;
  } catch (const InternalConsistency& e) {
    err << "internal consistency error: " << e.what() << "\n";
    return exit_internal_error;
  } catch (const ContractViolation& e) {
    err << "invalid input: " << e.what() << "\n";
    return exit_config_error;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << "\n";
    return exit_config_error;
  } catch (const UnsupportedModel& e) {
    err << "unsupported model: " << e.what() << "\n";
    return exit_config_error;
  } catch (const SingularPoint& e) {
    err << "singular point: " << e.what() << "\n";
    return exit_config_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_internal_error;
  }
}

}  // namespace cusplab

#include "cusplab/config.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace cusplab {

namespace {

using json = nlohmann::ordered_json;

/// A JSON value together with its pointer, for located errors.
class Node {
 public:
  Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const json& raw() const { return *j_; }
  const std::string& path() const { return path_; }
  std::string where() const { return path_.empty() ? "/" : path_; }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(where(), what); }

  void require_object() const {
    if (!j_->is_object()) fail("expected an object");
  }
  void allow_keys(std::initializer_list<const char*> keys) const {
    require_object();
    for (const auto& [k, v] : j_->items()) {
      bool known = false;
      for (const char* a : keys) known |= k == a;
      if (!known) Node(v, path_ + "/" + k).fail("unknown key");
    }
  }
  bool has(const char* key) const { return j_->is_object() && j_->contains(key); }
  Node at(const char* key) const {
    require_object();
    if (!j_->contains(key)) fail(fmt::format("missing required key \"{}\"", key));
    return Node((*j_)[key], path_ + "/" + key);
  }
  std::optional<Node> get(const char* key) const {
    if (!has(key)) return std::nullopt;
    return Node((*j_)[key], path_ + "/" + key);
  }
  std::vector<Node> elements() const {
    if (!j_->is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < j_->size(); ++i)
      out.emplace_back((*j_)[i], fmt::format("{}/{}", path_, i));
    return out;
  }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be positive");
    return v;
  }
  double nonnegative() const {
    const double v = number();
    if (v < 0.0) fail("must be nonnegative");
    return v;
  }
  std::int64_t integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<std::int64_t>();
  }
  int positive_int() const {
    const std::int64_t v = integer();
    if (v <= 0 || v > 1'000'000'000) fail("must be a positive integer");
    return static_cast<int>(v);
  }
  std::uint64_t seed() const {
    if (!j_->is_number_integer()) fail("expected a nonnegative integer seed");
    if (j_->is_number_unsigned()) return j_->get<std::uint64_t>();
    const std::int64_t v = j_->get<std::int64_t>();
    if (v < 0) fail("expected a nonnegative integer seed");
    return static_cast<std::uint64_t>(v);
  }
  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }
  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }
  Vec3 vec3() const {
    const auto e = elements();
    if (e.size() != 3) fail("expected three coordinates");
    return Vec3(e[0].number(), e[1].number(), e[2].number());
  }
  Configuration configuration() const {
    Configuration c;
    for (const auto& e : elements()) c.push_back(e.vec3());
    return c;
  }

 private:
  const json* j_;
  std::string path_;
};

SlaterOrbital parse_orbital(const Node& n) {
  n.allow_keys({"exponent", "poly"});
  SlaterOrbital o;
  o.exponent = n.at("exponent").positive();
  if (auto p = n.get("poly")) {
    o.poly.clear();
    for (const auto& e : p->elements()) o.poly.push_back(e.number());
    if (o.poly.empty()) p->fail("polynomial needs at least one coefficient");
  }
  return o;
}

WavefunctionModel parse_model(const Node& n) {
  const std::string type = n.at("type").string();
  bool normalize_it = true;
  if (auto nn = n.get("normalize")) normalize_it = nn->boolean();
  WavefunctionModel::Variant v;
  if (type == "hydrogenic") {
    n.allow_keys({"type", "normalize", "n", "l", "m", "charge"});
    Hydrogenic h;
    h.n = n.at("n").positive_int();
    if (auto l = n.get("l")) h.l = static_cast<int>(l->integer());
    if (auto m = n.get("m")) h.m = static_cast<int>(m->integer());
    h.charge = n.at("charge").positive();
    v = h;
  } else if (type == "orbital_product") {
    n.allow_keys({"type", "normalize", "charge", "orbitals"});
    OrbitalProduct p;
    p.charge = n.at("charge").positive();
    for (const auto& o : n.at("orbitals").elements()) p.orbitals.push_back(parse_orbital(o));
    if (p.orbitals.empty()) n.at("orbitals").fail("need at least one orbital");
    v = p;
  } else if (type == "hylleraas") {
    n.allow_keys({"type", "normalize", "charge", "alpha", "terms"});
    HylleraasHelium hy;
    hy.charge = n.at("charge").positive();
    hy.alpha = n.at("alpha").positive();
    for (const auto& t : n.at("terms").elements()) {
      t.allow_keys({"s", "t", "u", "coeff"});
      HylleraasTerm term;
      if (auto s = t.get("s")) term.s_pow = static_cast<int>(s->integer());
      if (auto s = t.get("t")) term.t_pow = static_cast<int>(s->integer());
      if (auto s = t.get("u")) term.u_pow = static_cast<int>(s->integer());
      term.coeff = t.at("coeff").number();
      if (term.s_pow < 0 || term.t_pow < 0 || term.u_pow < 0) t.fail("powers must be nonnegative");
      hy.terms.push_back(term);
    }
    v = hy;
  } else {
    n.at("type").fail("unknown model type \"" + type + "\"");
  }
  try {
    WavefunctionModel m(v);
    return normalize_it ? normalize(m) : m;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    n.fail(e.what());
  }
}

AtomSpec parse_system(const Node& n) {
  n.allow_keys({"n_electrons", "charge", "energy", "prev_ground_energy"});
  const int ne = n.at("n_electrons").positive_int();
  const double z = n.at("charge").positive();
  const double e = n.at("energy").number();
  double prev = 0.0;
  if (auto p = n.get("prev_ground_energy")) prev = p->number();
  return AtomSpec::make(ne, z, e, prev);
}

struct QuadratureDoc {
  EvalOptions eval;
  std::optional<std::uint64_t> seed;
  bool monte_carlo = false;
};

QuadratureDoc parse_quadrature(const Node& n) {
  n.allow_keys({"sphere_degree", "hat", "grid", "mc_samples", "envelope_rate", "seed",
                "radial_panels", "radial_rel_tol"});
  QuadratureDoc q;
  if (auto d = n.get("sphere_degree")) {
    q.eval.sphere_degree = d->positive_int();
    try {
      (void)sphere_rule(q.eval.sphere_degree);
    } catch (const ContractViolation&) {
      d->fail("no shipped sphere rule of this degree (3, 7, 17, 29)");
    }
  }
  if (auto s = n.get("seed")) q.seed = s->seed();
  if (auto p = n.get("radial_panels")) q.eval.radial.max_panels = p->positive_int();
  if (auto t = n.get("radial_rel_tol")) q.eval.radial.rel_tol = t->positive();
  std::string hat = "grid";
  if (auto h = n.get("hat")) {
    hat = h->string();
    if (hat != "grid" && hat != "monte_carlo") h->fail("expected \"grid\" or \"monte_carlo\"");
  }
  if (hat == "grid") {
    HatGrid g;
    if (auto gn = n.get("grid")) {
      gn->allow_keys({"radial_order", "angular_order", "azimuth_points", "decay_rate"});
      if (auto x = gn->get("radial_order")) g.radial_order = x->positive_int();
      if (auto x = gn->get("angular_order")) g.angular_order = x->positive_int();
      if (auto x = gn->get("azimuth_points")) g.azimuth_points = x->positive_int();
      if (auto x = gn->get("decay_rate")) g.decay_rate = x->nonnegative();
    }
    q.eval.hat = g;
  } else {
    q.monte_carlo = true;
    McSampler s;
    s.n_samples = n.at("mc_samples").positive_int();
    if (auto e = n.get("envelope_rate")) s.envelope_rate = e->positive();
    q.eval.hat = s;
  }
  return q;
}

void parse_report(const Node& n, ReportConfig& r) {
  n.allow_keys({"ion_points", "kato_limit"});
  if (auto p = n.get("ion_points")) {
    r.ion_points.clear();
    for (const auto& e : p->elements()) r.ion_points.push_back(e.vec3());
  }
  if (auto k = n.get("kato_limit")) r.kato_limit = k->boolean();
}

void parse_radii(const Node& n, FdOptions& fd) {
  n.allow_keys({"r0", "halvings"});
  if (auto r = n.get("r0")) fd.r0 = r->positive();
  if (auto h = n.get("halvings")) fd.halvings = h->positive_int();
}

void parse_jastrow(const Node& n, JastrowCheckConfig& j, int n_electrons) {
  n.allow_keys({"configurations", "scale", "fd_step", "apriori", "probe"});
  if (auto x = n.get("configurations")) j.configurations = x->positive_int();
  if (auto x = n.get("scale")) j.scale = x->positive();
  if (auto x = n.get("fd_step")) j.fd_step = x->positive();
  auto center = [&](const Node& c) {
    Configuration cfg = c.configuration();
    if (static_cast<int>(cfg.size()) != n_electrons)
      c.fail(fmt::format("expected {} electron positions", n_electrons));
    return cfg;
  };
  if (auto a = n.get("apriori")) {
    a->allow_keys({"center", "inner_radius", "outer_radius", "samples"});
    j.apriori = true;
    j.apriori_center = Configuration(n_electrons, Vec3::Zero());
    if (auto c = a->get("center")) j.apriori_center = center(*c);
    if (auto x = a->get("inner_radius")) j.inner_radius = x->positive();
    if (auto x = a->get("outer_radius")) j.outer_radius = x->positive();
    if (j.inner_radius >= j.outer_radius)
      a->fail("inner_radius must be smaller than outer_radius");
    if (auto x = a->get("samples")) j.apriori_samples = x->positive_int();
  }
  if (auto p = n.get("probe")) {
    p->allow_keys({"center", "radii"});
    j.probe = true;
    j.probe_center = center(p->at("center"));
    if (auto r = p->get("radii")) {
      j.probe_radii.clear();
      for (const auto& e : r->elements()) j.probe_radii.push_back(e.positive());
      if (j.probe_radii.empty()) r->fail("need at least one radius");
    }
  }
}

void parse_converge(const Node& n, ConvergeConfig& c) {
  n.allow_keys({"method", "sample_counts", "grid_orders"});
  if (auto m = n.get("method")) {
    const std::string s = m->string();
    if (s != "monte_carlo" && s != "grid") m->fail("expected \"monte_carlo\" or \"grid\"");
    c.monte_carlo = s == "monte_carlo";
  }
  if (auto s = n.get("sample_counts")) {
    c.sample_counts.clear();
    for (const auto& e : s->elements()) c.sample_counts.push_back(e.positive_int());
    if (c.sample_counts.empty()) s->fail("need at least one sample count");
  }
  if (auto g = n.get("grid_orders")) {
    c.grid_orders.clear();
    for (const auto& e : g->elements()) c.grid_orders.push_back(e.positive_int());
    if (c.grid_orders.empty()) g->fail("need at least one grid order");
  }
}

void parse_sphere_check(const Node& n, SphereCheckConfig& s) {
  n.allow_keys({"degrees", "trials"});
  if (auto d = n.get("degrees")) {
    s.degrees.clear();
    for (const auto& e : d->elements()) {
      const int deg = e.positive_int();
      try {
        (void)sphere_rule(deg);
      } catch (const ContractViolation&) {
        e.fail("no shipped sphere rule of this degree (3, 7, 17, 29)");
      }
      s.degrees.push_back(deg);
    }
  }
  if (auto t = n.get("trials")) s.trials = t->positive_int();
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return fmt::format("{}:{}", line, col);
}

}  // namespace

OutputFormat parse_format(const std::string& s) {
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  if (s == "table") return OutputFormat::table;
  throw ConfigError("format", "expected json, csv or table, got \"" + s + "\"");
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig parse_config(const std::string& text, std::optional<std::uint64_t> seed_override) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(line_column(text, e.byte > 0 ? e.byte - 1 : 0), "JSON syntax error");
  }
  const Node root(doc, "");
  root.allow_keys({"system", "model", "quadrature", "radii", "report", "output", "jastrow",
                   "converge", "sphere_check"});

  RunConfig cfg;
  cfg.hash = fmt::format("{:016x}", fnv1a64(nlohmann::json::parse(doc.dump()).dump()));
  cfg.model = parse_model(root.at("model"));

  if (auto s = root.get("system")) {
    cfg.system = parse_system(*s);
  } else if (const auto* h = std::get_if<Hydrogenic>(&cfg.model.variant())) {
    cfg.system = hydrogenic_spec(h->n, h->charge);
  } else {
    root.fail("missing required key \"system\" (only hydrogenic models imply one)");
  }
  if (cfg.system.n_electrons != cfg.model.n_electrons())
    root.at("system").at("n_electrons").fail(
        fmt::format("model has {} electrons", cfg.model.n_electrons()));
  if (cfg.system.charge != cfg.model.charge())
    root.at("system").at("charge").fail(fmt::format("model is built for Z = {}", cfg.model.charge()));

  QuadratureDoc q;
  if (auto qn = root.get("quadrature")) q = parse_quadrature(*qn);
  cfg.report.eval = q.eval;
  if (seed_override) {
    cfg.seed = *seed_override;
  } else if (q.seed) {
    cfg.seed = *q.seed;
  } else if (q.monte_carlo) {
    root.at("quadrature").fail("a seed is required when hat = \"monte_carlo\"");
  }
  if (auto* mc = std::get_if<McSampler>(&cfg.report.eval.hat)) mc->seed = cfg.seed;
  if (cfg.system.n_electrons >= 3 && !q.monte_carlo)
    root.fail("systems with three or more electrons need quadrature.hat = \"monte_carlo\"");

  if (auto r = root.get("radii")) parse_radii(*r, cfg.report.fd);
  if (auto r = root.get("report")) parse_report(*r, cfg.report);
  if (auto o = root.get("output")) {
    o->allow_keys({"format", "path"});
    if (auto f = o->get("format")) {
      try {
        cfg.format = parse_format(f->string());
      } catch (const ConfigError& e) {
        f->fail(e.what());
      }
    }
    if (auto p = o->get("path")) cfg.out_path = p->string();
  }
  if (auto j = root.get("jastrow")) parse_jastrow(*j, cfg.jastrow, cfg.system.n_electrons);
  if (auto c = root.get("converge")) parse_converge(*c, cfg.converge);
  if (auto s = root.get("sphere_check")) parse_sphere_check(*s, cfg.sphere_check);
  return cfg;
}

RunConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open configuration file");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), seed_override);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ":" + e.location(), std::string(e.what()).substr(e.location().size() + 2));
  }
}

}  // namespace cusplab

#include "cusplab/wavefunction.hpp"

#include "cusplab/quadrature.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>

namespace cusplab {

AtomSpec AtomSpec::make(int n_electrons, double charge, double energy,
                        double prev_ground_energy) {
  if (n_electrons < 1) throw ContractViolation("n_electrons must be >= 1");
  if (!(charge > 0.0)) throw ContractViolation("nuclear charge must be > 0");
  AtomSpec s;
  s.n_electrons = n_electrons;
  s.charge = charge;
  s.energy = energy;
  s.prev_ground_energy = prev_ground_energy;
  s.ion_gap = prev_ground_energy - energy;
  return s;
}

double hydrogenic_energy(int n, double charge) {
  if (n < 1) throw DomainError("principal quantum number must be >= 1");
  return -charge * charge / (4.0 * n * n);
}

AtomSpec hydrogenic_spec(int n, double charge) {
  return AtomSpec::make(1, charge, hydrogenic_energy(n, charge), 0.0);
}

// ---------------------------------------------------------------------------

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

struct Monomial {
  double c;
  std::array<int, 3> p;
};

/// Cartesian polynomial with value, gradient and Hessian.
struct Poly3 {
  std::vector<Monomial> terms;

  double value(const Vec3& x) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.c * ipow(x[0], t.p[0]) * ipow(x[1], t.p[1]) * ipow(x[2], t.p[2]);
    return s;
  }
  Vec3 grad(const Vec3& x) const {
    Vec3 g = Vec3::Zero();
    for (const auto& t : terms) {
      for (int a = 0; a < 3; ++a) {
        if (t.p[a] == 0) continue;
        double v = t.c * t.p[a];
        for (int b = 0; b < 3; ++b) v *= ipow(x[b], b == a ? t.p[b] - 1 : t.p[b]);
        g[a] += v;
      }
    }
    return g;
  }
  Mat3 hess(const Vec3& x) const {
    Mat3 h = Mat3::Zero();
    for (const auto& t : terms) {
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          std::array<int, 3> q = t.p;
          double v = t.c;
          v *= q[a];
          q[a] -= 1;
          if (v == 0.0) continue;
          v *= q[b];
          q[b] -= 1;
          if (v == 0.0) continue;
          for (int k = 0; k < 3; ++k) v *= ipow(x[k], q[k]);
          h(a, b) += v;
        }
      }
    }
    return h;
  }
};

/// Unnormalized real solid harmonics r^l Y_lm, l <= 3.
Poly3 solid_harmonic(int l, int m) {
  using P = Poly3;
  auto mono = [](double c, int a, int b, int d) { return Monomial{c, {a, b, d}}; };
  switch (l) {
    case 0: return P{{mono(1, 0, 0, 0)}};
    case 1:
      if (m == -1) return P{{mono(1, 0, 1, 0)}};
      if (m == 0) return P{{mono(1, 0, 0, 1)}};
      return P{{mono(1, 1, 0, 0)}};
    case 2:
      switch (m) {
        case -2: return P{{mono(1, 1, 1, 0)}};
        case -1: return P{{mono(1, 0, 1, 1)}};
        case 0: return P{{mono(2, 0, 0, 2), mono(-1, 2, 0, 0), mono(-1, 0, 2, 0)}};
        case 1: return P{{mono(1, 1, 0, 1)}};
        default: return P{{mono(1, 2, 0, 0), mono(-1, 0, 2, 0)}};
      }
    default:
      switch (m) {
        case -3: return P{{mono(3, 2, 1, 0), mono(-1, 0, 3, 0)}};
        case -2: return P{{mono(1, 1, 1, 1)}};
        case -1: return P{{mono(4, 0, 1, 2), mono(-1, 2, 1, 0), mono(-1, 0, 3, 0)}};
        case 0: return P{{mono(2, 0, 0, 3), mono(-3, 2, 0, 1), mono(-3, 0, 2, 1)}};
        case 1: return P{{mono(4, 1, 0, 2), mono(-1, 3, 0, 0), mono(-1, 1, 2, 0)}};
        case 2: return P{{mono(1, 2, 0, 1), mono(-1, 0, 2, 1)}};
        default: return P{{mono(1, 3, 0, 0), mono(-3, 1, 2, 0)}};
      }
  }
}

struct RadialValues {
  double f, d1, d2;
};

/// Q(r) e^{-kappa r}.
struct Radial {
  std::vector<double> q;
  double kappa = 1.0;

  RadialValues eval(double r) const {
    double p = 0.0, p1 = 0.0, p2 = 0.0;
    for (std::size_t k = q.size(); k-- > 0;) {
      p2 = p2 * r + 2.0 * p1;
      p1 = p1 * r + p;
      p = p * r + q[k];
    }
    const double e = std::exp(-kappa * r);
    return {p * e, (p1 - kappa * p) * e, (p2 - 2.0 * kappa * p1 + kappa * kappa * p) * e};
  }
  int degree() const { return static_cast<int>(q.size()) - 1; }
};

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// L_k^{alpha}(Z r / n) as a polynomial in r.
std::vector<double> laguerre_in_r(int k, int alpha, double scale) {
  std::vector<double> c(k + 1);
  double fact = 1.0;
  for (int i = 0; i <= k; ++i) {
    if (i > 0) fact *= i;
    c[i] = ((i % 2) ? -1.0 : 1.0) * binomial(k + alpha, k - i) / fact * ipow(scale, i);
  }
  return c;
}

/// P(s,t,u) and its partial derivatives up to second order.
struct DistPoly {
  double p = 0;
  std::array<double, 3> d{};      // s, t, u
  std::array<double, 6> dd{};     // ss, tt, uu, st, su, tu
};

DistPoly eval_hylleraas_poly(const std::vector<HylleraasTerm>& terms, double s, double t,
                             double u) {
  DistPoly out;
  for (const auto& term : terms) {
    const int a = term.s_pow, b = term.t_pow, c = term.u_pow;
    const double c0 = term.coeff;
    auto pw = [](double x, int k) { return k < 0 ? 0.0 : ipow(x, k); };
    const double S0 = pw(s, a), S1 = a * pw(s, a - 1), S2 = a * (a - 1) * pw(s, a - 2);
    const double T0 = pw(t, b), T1 = b * pw(t, b - 1), T2 = b * (b - 1) * pw(t, b - 2);
    const double U0 = pw(u, c), U1 = c * pw(u, c - 1), U2 = c * (c - 1) * pw(u, c - 2);
    out.p += c0 * S0 * T0 * U0;
    out.d[0] += c0 * S1 * T0 * U0;
    out.d[1] += c0 * S0 * T1 * U0;
    out.d[2] += c0 * S0 * T0 * U1;
    out.dd[0] += c0 * S2 * T0 * U0;
    out.dd[1] += c0 * S0 * T2 * U0;
    out.dd[2] += c0 * S0 * T0 * U2;
    out.dd[3] += c0 * S1 * T1 * U0;
    out.dd[4] += c0 * S1 * T0 * U1;
    out.dd[5] += c0 * S0 * T1 * U1;
  }
  return out;
}

/// G = e^{-alpha(r1+r2)} P with derivatives in (r1, r2, u).
struct DistValues {
  double g;
  Eigen::Vector3d d;
  Eigen::Matrix3d dd;
};

DistValues hylleraas_dist(const HylleraasHelium& h, double r1, double r2, double u) {
  const DistPoly P = eval_hylleraas_poly(h.terms, r1 + r2, r1 - r2, u);
  // Derivatives of P with respect to (r1, r2, u).
  Eigen::Vector3d pd(P.d[0] + P.d[1], P.d[0] - P.d[1], P.d[2]);
  Eigen::Matrix3d pdd;
  const double ss = P.dd[0], tt = P.dd[1], uu = P.dd[2], st = P.dd[3], su = P.dd[4],
               tu = P.dd[5];
  pdd(0, 0) = ss + 2 * st + tt;
  pdd(1, 1) = ss - 2 * st + tt;
  pdd(0, 1) = pdd(1, 0) = ss - tt;
  pdd(2, 2) = uu;
  pdd(0, 2) = pdd(2, 0) = su + tu;
  pdd(1, 2) = pdd(2, 1) = su - tu;
  const Eigen::Vector3d al(h.alpha, h.alpha, 0.0);
  const double e = std::exp(-h.alpha * (r1 + r2));
  DistValues out;
  out.g = e * P.p;
  out.d = e * (pd - al * P.p);
  out.dd = e * (pdd - al * pd.transpose() - pd * al.transpose() + al * al.transpose() * P.p);
  return out;
}

void check_dim(const WavefunctionModel& m, std::span<const Vec3> c) {
  if (static_cast<int>(c.size()) != m.n_electrons())
    throw ContractViolation(fmt::format("configuration has {} electrons, model expects {}",
                                        c.size(), m.n_electrons()));
}

}  // namespace

struct WavefunctionModel::Detail {
  Radial radial;
  Poly3 harmonic;
  std::vector<Radial> orbitals;
};

WavefunctionModel::WavefunctionModel(Variant variant, double norm_constant)
    : variant_(std::move(variant)), norm_(norm_constant) {
  if (!std::isfinite(norm_constant)) throw ContractViolation("norm constant must be finite");
  auto d = std::make_shared<Detail>();
  if (const auto* h = std::get_if<Hydrogenic>(&variant_)) {
    if (h->n < 1 || h->n > 4) throw DomainError("hydrogenic states are available for n = 1..4");
    if (h->l < 0 || h->l >= h->n) throw DomainError("hydrogenic state needs 0 <= l < n");
    if (h->m < -h->l || h->m > h->l) throw DomainError("hydrogenic state needs |m| <= l");
    if (!(h->charge > 0.0)) throw ContractViolation("nuclear charge must be > 0");
    d->radial.q = laguerre_in_r(h->n - h->l - 1, 2 * h->l + 1, h->charge / h->n);
    d->radial.kappa = h->charge / (2.0 * h->n);
    d->harmonic = solid_harmonic(h->l, h->m);
  } else if (const auto* p = std::get_if<OrbitalProduct>(&variant_)) {
    if (p->orbitals.empty()) throw ContractViolation("orbital product needs at least one orbital");
    if (!(p->charge > 0.0)) throw ContractViolation("nuclear charge must be > 0");
    for (const auto& o : p->orbitals) {
      if (!(o.exponent > 0.0)) throw ContractViolation("orbital exponents must be > 0");
      if (o.poly.empty()) throw ContractViolation("orbital polynomial prefactor is empty");
      d->orbitals.push_back(Radial{o.poly, o.exponent});
    }
  } else {
    const auto& hy = std::get<HylleraasHelium>(variant_);
    if (!(hy.alpha > 0.0)) throw ContractViolation("Hylleraas exponent must be > 0");
    if (!(hy.charge > 0.0)) throw ContractViolation("nuclear charge must be > 0");
    if (hy.terms.empty()) throw ContractViolation("Hylleraas expansion is empty");
    for (const auto& t : hy.terms)
      if (t.s_pow < 0 || t.t_pow < 0 || t.u_pow < 0)
        throw ContractViolation("Hylleraas powers must be >= 0");
  }
  detail_ = std::move(d);
}

int WavefunctionModel::n_electrons() const {
  if (const auto* p = std::get_if<OrbitalProduct>(&variant_))
    return static_cast<int>(p->orbitals.size());
  if (std::holds_alternative<HylleraasHelium>(variant_)) return 2;
  return 1;
}

double WavefunctionModel::charge() const {
  return std::visit([](const auto& v) { return v.charge; }, variant_);
}

bool WavefunctionModel::is_eigenfunction() const {
  return std::holds_alternative<Hydrogenic>(variant_);
}

bool WavefunctionModel::is_s_type() const {
  if (const auto* h = std::get_if<Hydrogenic>(&variant_)) return h->l == 0;
  return true;
}

double WavefunctionModel::decay_rate() const {
  if (std::holds_alternative<Hydrogenic>(variant_)) return detail_->radial.kappa;
  if (const auto* p = std::get_if<OrbitalProduct>(&variant_)) {
    double m = p->orbitals.front().exponent;
    for (const auto& o : p->orbitals) m = std::min(m, o.exponent);
    return m;
  }
  return std::get<HylleraasHelium>(variant_).alpha;
}

std::string WavefunctionModel::describe() const {
  if (const auto* h = std::get_if<Hydrogenic>(&variant_))
    return fmt::format("hydrogenic(n={}, l={}, m={}, Z={})", h->n, h->l, h->m, h->charge);
  if (const auto* p = std::get_if<OrbitalProduct>(&variant_)) {
    std::string s = fmt::format("orbital-product(Z={}; exponents", p->charge);
    for (const auto& o : p->orbitals) s += fmt::format(" {}", o.exponent);
    return s + ")";
  }
  const auto& hy = std::get<HylleraasHelium>(variant_);
  return fmt::format("hylleraas(Z={}, alpha={}, {} terms)", hy.charge, hy.alpha, hy.terms.size());
}

WavefunctionModel WavefunctionModel::scaled(double factor) const {
  return with_norm(norm_ * factor);
}

WavefunctionModel WavefunctionModel::with_norm(double norm_constant) const {
  WavefunctionModel m = *this;
  if (!std::isfinite(norm_constant)) throw ContractViolation("norm constant must be finite");
  m.norm_ = norm_constant;
  return m;
}

double WavefunctionModel::psi(std::span<const Vec3> c) const {
  check_dim(*this, c);
  if (std::holds_alternative<Hydrogenic>(variant_)) {
    return norm_ * detail_->radial.eval(c[0].norm()).f * detail_->harmonic.value(c[0]);
  }
  if (std::holds_alternative<OrbitalProduct>(variant_)) {
    double v = norm_;
    for (std::size_t j = 0; j < c.size(); ++j) v *= detail_->orbitals[j].eval(c[j].norm()).f;
    return v;
  }
  const auto& hy = std::get<HylleraasHelium>(variant_);
  const double r1 = c[0].norm(), r2 = c[1].norm(), u = (c[0] - c[1]).norm();
  const double e = std::exp(-hy.alpha * (r1 + r2));
  return norm_ * e * eval_hylleraas_poly(hy.terms, r1 + r2, r1 - r2, u).p;
}

Vec3 WavefunctionModel::grad_electron(std::span<const Vec3> c, int j) const {
  check_dim(*this, c);
  if (j < 0 || j >= n_electrons()) throw ContractViolation("electron index out of range");
  const double r = c[j].norm();
  if (r == 0.0) throw SingularPoint("gradient requested with an electron on the nucleus");
  const Vec3 xh = c[j] / r;
  if (std::holds_alternative<Hydrogenic>(variant_)) {
    const auto rv = detail_->radial.eval(r);
    return norm_ * (rv.d1 * detail_->harmonic.value(c[0]) * xh + rv.f * detail_->harmonic.grad(c[0]));
  }
  if (std::holds_alternative<OrbitalProduct>(variant_)) {
    double others = norm_;
    for (std::size_t k = 0; k < c.size(); ++k)
      if (static_cast<int>(k) != j) others *= detail_->orbitals[k].eval(c[k].norm()).f;
    return others * detail_->orbitals[j].eval(r).d1 * xh;
  }
  const auto& hy = std::get<HylleraasHelium>(variant_);
  const Vec3 diff = c[0] - c[1];
  const double u = diff.norm();
  if (u == 0.0) throw SingularPoint("gradient requested at an electron coincidence");
  const DistValues dv = hylleraas_dist(hy, c[0].norm(), c[1].norm(), u);
  const Vec3 uh = diff / u;
  return j == 0 ? Vec3(norm_ * (dv.d[0] * xh + dv.d[2] * uh))
                : Vec3(norm_ * (dv.d[1] * xh - dv.d[2] * uh));
}

Eigen::VectorXd WavefunctionModel::grad(std::span<const Vec3> c) const {
  const int n = n_electrons();
  check_dim(*this, c);
  Eigen::VectorXd g(3 * n);
  for (int j = 0; j < n; ++j) g.segment<3>(3 * j) = grad_electron(c, j);
  return g;
}

Vec3 WavefunctionModel::grad_limit(std::span<const Vec3> c, int j, const Vec3& omega) const {
  check_dim(*this, c);
  if (j < 0 || j >= n_electrons()) throw ContractViolation("electron index out of range");
  if (std::holds_alternative<Hydrogenic>(variant_)) {
    const auto rv = detail_->radial.eval(0.0);
    const Vec3 zero = Vec3::Zero();
    return norm_ * (rv.d1 * detail_->harmonic.value(zero) * omega +
                    rv.f * detail_->harmonic.grad(zero));
  }
  if (std::holds_alternative<OrbitalProduct>(variant_)) {
    double others = norm_;
    for (std::size_t k = 0; k < c.size(); ++k)
      if (static_cast<int>(k) != j) others *= detail_->orbitals[k].eval(c[k].norm()).f;
    return others * detail_->orbitals[j].eval(0.0).d1 * omega;
  }
  const auto& hy = std::get<HylleraasHelium>(variant_);
  const Vec3& other = c[1 - j];
  const double ro = other.norm();
  if (ro == 0.0) throw SingularPoint("both electrons on the nucleus");
  const DistValues dv = j == 0 ? hylleraas_dist(hy, 0.0, ro, ro) : hylleraas_dist(hy, ro, 0.0, ro);
  // ∇_j u at x_j = 0 is -x_other/|x_other|.
  return norm_ * (dv.d[j] * omega - dv.d[2] * other / ro);
}

Eigen::MatrixXd WavefunctionModel::hessian(std::span<const Vec3> c) const {
  check_dim(*this, c);
  const int n = n_electrons();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  for (int j = 0; j < n; ++j)
    if (c[j].norm() == 0.0) throw SingularPoint("Hessian requested with an electron on the nucleus");
  const Mat3 I = Mat3::Identity();

  if (std::holds_alternative<Hydrogenic>(variant_)) {
    const double r = c[0].norm();
    const Vec3 xh = c[0] / r;
    const auto rv = detail_->radial.eval(r);
    const double S = detail_->harmonic.value(c[0]);
    const Vec3 gS = detail_->harmonic.grad(c[0]);
    const Mat3 hS = detail_->harmonic.hess(c[0]);
    const Mat3 P = xh * xh.transpose();
    h = norm_ * (rv.d2 * S * P + rv.d1 / r * S * (I - P) +
                 rv.d1 * (xh * gS.transpose() + gS * xh.transpose()) + rv.f * hS);
    return h;
  }
  if (std::holds_alternative<OrbitalProduct>(variant_)) {
    std::vector<RadialValues> rv(n);
    std::vector<Vec3> xh(n);
    for (int j = 0; j < n; ++j) {
      const double r = c[j].norm();
      rv[j] = detail_->orbitals[j].eval(r);
      xh[j] = c[j] / r;
    }
    auto others = [&](int a, int b) {
      double v = norm_;
      for (int k = 0; k < n; ++k)
        if (k != a && k != b) v *= rv[k].f;
      return v;
    };
    for (int a = 0; a < n; ++a) {
      const double r = c[a].norm();
      const Mat3 P = xh[a] * xh[a].transpose();
      h.block<3, 3>(3 * a, 3 * a) = others(a, a) * (rv[a].d2 * P + rv[a].d1 / r * (I - P));
      for (int b = 0; b < n; ++b) {
        if (b == a) continue;
        h.block<3, 3>(3 * a, 3 * b) =
            others(a, b) * rv[a].d1 * rv[b].d1 * (xh[a] * xh[b].transpose());
      }
    }
    return h;
  }
  const auto& hy = std::get<HylleraasHelium>(variant_);
  const double r1 = c[0].norm(), r2 = c[1].norm();
  const Vec3 diff = c[0] - c[1];
  const double u = diff.norm();
  if (u == 0.0) throw SingularPoint("Hessian requested at an electron coincidence");
  const DistValues dv = hylleraas_dist(hy, r1, r2, u);
  // Gradients of the three distances in R^6 and their Hessians.
  std::array<Eigen::Matrix<double, 6, 1>, 3> gd;
  for (auto& g : gd) g.setZero();
  const Vec3 x1h = c[0] / r1, x2h = c[1] / r2, uh = diff / u;
  gd[0].head<3>() = x1h;
  gd[1].tail<3>() = x2h;
  gd[2].head<3>() = uh;
  gd[2].tail<3>() = -uh;
  Eigen::Matrix<double, 6, 6> out = Eigen::Matrix<double, 6, 6>::Zero();
  out.block<3, 3>(0, 0) += dv.d[0] * (I - x1h * x1h.transpose()) / r1;
  out.block<3, 3>(3, 3) += dv.d[1] * (I - x2h * x2h.transpose()) / r2;
  const Mat3 M = (I - uh * uh.transpose()) / u;
  out.block<3, 3>(0, 0) += dv.d[2] * M;
  out.block<3, 3>(3, 3) += dv.d[2] * M;
  out.block<3, 3>(0, 3) -= dv.d[2] * M;
  out.block<3, 3>(3, 0) -= dv.d[2] * M;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) out += dv.dd(p, q) * gd[p] * gd[q].transpose();
  return norm_ * out;
}

// ---------------------------------------------------------------------------

double eval_psi(const WavefunctionModel& model, std::span<const Vec3> c) { return model.psi(c); }

Eigen::VectorXd eval_grad_psi(const WavefunctionModel& model, std::span<const Vec3> c) {
  return model.grad(c);
}

Configuration assemble(int j, const Vec3& x, std::span<const Vec3> hat) {
  if (j < 0 || j > static_cast<int>(hat.size()))
    throw ContractViolation("electron index out of range");
  Configuration c;
  c.reserve(hat.size() + 1);
  c.insert(c.end(), hat.begin(), hat.begin() + j);
  c.push_back(x);
  c.insert(c.end(), hat.begin() + j, hat.end());
  return c;
}

double eval_phi(const WavefunctionModel& model, int j, const Vec3& x, std::span<const Vec3> hat) {
  const Configuration c = assemble(j, x, hat);
  return std::exp(0.5 * model.charge() * x.norm()) * model.psi(c);
}

Vec3 eval_grad_phi(const WavefunctionModel& model, int j, const Vec3& x,
                   std::span<const Vec3> hat) {
  const Configuration c = assemble(j, x, hat);
  const double half_z = 0.5 * model.charge();
  const double r = x.norm();
  if (r > 0.0) {
    return std::exp(half_z * r) * (half_z * model.psi(c) * (x / r) + model.grad_electron(c, j));
  }
  // Directional limits g(ω) = (Z/2)ψ(0)ω + lim ∇_jψ have the form a·ω + b;
  // a differentiable factor needs a = 0.
  const double psi0 = model.psi(c);
  auto g = [&](const Vec3& w) { return Vec3(half_z * psi0 * w + model.grad_limit(c, j, w)); };
  Vec3 b = Vec3::Zero();
  double cone = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Vec3 e = Vec3::Unit(k);
    const Vec3 gp = g(e), gm = g(-e);
    cone = std::max(cone, std::abs(0.5 * (gp - gm).dot(e)));
    b[k] = 0.5 * (gp[k] + gm[k]);
  }
  const double scale = std::abs(psi0) * half_z + b.norm();
  if (cone > 1e-10 * scale)
    throw UnsupportedModel(fmt::format(
        "regularized factor of electron {} has a direction-dependent gradient at the nucleus "
        "(cone coefficient {:.3e}); the model does not satisfy the nuclear cusp",
        j + 1, cone));
  return b;
}

// ---------------------------------------------------------------------------

Measured norm_squared(const WavefunctionModel& model) {
  const double n2 = model.norm_constant() * model.norm_constant();
  if (n2 == 0.0) return {0.0, 0.0};
  RadialOptions opts;
  opts.rel_tol = 1e-14;
  opts.abs_tol = 0.0;

  if (const auto* h = std::get_if<Hydrogenic>(&model.variant())) {
    const WavefunctionModel unit = model.with_norm(1.0);
    const Radial rad{laguerre_in_r(h->n - h->l - 1, 2 * h->l + 1, h->charge / h->n),
                     h->charge / (2.0 * h->n)};
    const double power = 2.0 * h->l + 2.0 + 2.0 * rad.degree();
    const auto radial = integrate_half_line(
        [&](double r) {
          const double f = rad.eval(r).f;
          return f * f * ipow(r, 2 * h->l + 2);
        },
        2.0 * rad.kappa, power, opts, "normalization");
    const Poly3 S = solid_harmonic(h->l, h->m);
    const auto ang = sphere_integrate(
        [&](const Vec3& w) {
          const double s = S.value(w);
          return s * s;
        },
        sphere_rule(29));
    return {n2 * radial.value * ang.value,
            n2 * (radial.error * ang.value + radial.value * ang.error)};
  }
  if (const auto* p = std::get_if<OrbitalProduct>(&model.variant())) {
    double v = n2, rel = 0.0;
    for (const auto& o : p->orbitals) {
      const Radial rad{o.poly, o.exponent};
      const auto r = integrate_half_line(
          [&](double s) {
            const double f = rad.eval(s).f;
            return four_pi * f * f * s * s;
          },
          2.0 * o.exponent, 2.0 + 2.0 * rad.degree(), opts, "normalization");
      v *= r.value;
      rel += r.error / std::abs(r.value);
    }
    return {v, std::abs(v) * rel};
  }

  // 8π² ∫∫ r1 r2 ∫_{|r1-r2|}^{r1+r2} u G² du dr2 dr1; the u integrand is a
  // polynomial, integrated exactly by a fixed Gauss rule.
  const auto& hy = std::get<HylleraasHelium>(model.variant());
  int max_u = 0, max_deg = 0;
  for (const auto& t : hy.terms) {
    max_u = std::max(max_u, t.u_pow);
    max_deg = std::max(max_deg, t.s_pow + t.t_pow + t.u_pow);
  }
  const GaussRule& gu = gauss_legendre(max_u + 2);
  auto inner = [&](double r1, double r2) {
    const double lo = std::abs(r1 - r2), hi = r1 + r2;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double s = 0.0;
    for (std::size_t i = 0; i < gu.nodes.size(); ++i) {
      const double u = mid + half * gu.nodes[i];
      const double p = eval_hylleraas_poly(hy.terms, r1 + r2, r1 - r2, u).p;
      s += half * gu.weights[i] * u * p * p;
    }
    return s * std::exp(-2.0 * hy.alpha * (r1 + r2)) * r1 * r2;
  };
  const double r_max = truncation_radius(2.0 * hy.alpha, 2.0 * max_deg + 3.0);
  RadialOptions in_opts = opts;
  in_opts.rel_tol = 1e-13;
  const auto outer = integrate_interval(
      [&](double r1) -> Measured {
        const auto a = integrate_interval([&](double r2) { return inner(r1, r2); }, 0.0, r1,
                                          in_opts, "normalization");
        const auto b = integrate_interval([&](double r2) { return inner(r1, r2); }, r1, r_max,
                                          in_opts, "normalization");
        return {a.value + b.value, a.error + b.error};
      },
      0.0, r_max, opts, "normalization");
  const double c = 8.0 * pi * pi * n2;
  return {c * outer.value, c * outer.error};
}

WavefunctionModel normalize(const WavefunctionModel& model) {
  const Measured n = norm_squared(model);
  if (!(n.value > 0.0)) throw DomainError("cannot normalize a model with zero norm");
  return model.with_norm(model.norm_constant() / std::sqrt(n.value));
}

}  // namespace cusplab

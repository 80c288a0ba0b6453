#include <doctest.h>

#include "cusplab/density.hpp"

#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace cusplab;

namespace {

// ρ̃(r) = c·q(r)·e^{-λr} with q a polynomial, differentiated by hand.
struct ExpPoly {
  double c;
  std::vector<double> q;
  double lambda;

  static double poly(const std::vector<double>& p, double r) {
    double v = 0.0;
    for (std::size_t k = p.size(); k-- > 0;) v = v * r + p[k];
    return v;
  }
  static std::vector<double> diff(const std::vector<double>& p) {
    std::vector<double> d;
    for (std::size_t k = 1; k < p.size(); ++k) d.push_back(k * p[k]);
    return d;
  }
  // d^k/dr^k of q e^{-λr} = e^{-λr} Σ_i C(k,i) (-λ)^{k-i} q^{(i)}.
  double deriv(int k, double r) const {
    std::vector<double> p = q;
    double sum = 0.0, binom = 1.0;
    for (int i = 0; i <= k; ++i) {
      sum += binom * std::pow(-lambda, k - i) * poly(p, r);
      p = diff(p);
      binom = binom * (k - i) / (i + 1);
    }
    return c * sum * std::exp(-lambda * r);
  }
  // h̃ forced by the radial equation -½(ρ̃'' + 2ρ̃'/r) - Zρ̃/r + h̃ = 0.
  double h(double z, double r) const {
    if (r == 0.0) return 1.5 * deriv(2, 0.0) + z * deriv(1, 0.0);
    return 0.5 * deriv(2, r) + deriv(1, r) / r + z * deriv(0, r) / r;
  }
  // Roundoff bound of h(): the 1/r terms cancel near the origin.
  double h_roundoff(double z, double r) const {
    if (r == 0.0) return 8.0 * machine_eps * (1.5 * std::abs(deriv(2, 0.0)) + z * std::abs(deriv(1, 0.0)));
    return 8.0 * machine_eps *
           (0.5 * std::abs(deriv(2, r)) + (std::abs(deriv(1, r)) + z * std::abs(deriv(0, r))) / r);
  }
  RhoHFn source(double z) const {
    return [*this, z](double r) {
      return RhoH{{deriv(0, r), 4.0 * machine_eps * std::abs(deriv(0, r))},
                  {h(z, r), h_roundoff(z, r)}};
    };
  }
};

// Hydrogen (Z = 1): 1s and 2s spherical averages.
const ExpPoly kRho1s{0.5, {1.0}, 1.0};
const ExpPoly kRho2s{1.0 / 16.0, {1.0, -0.5, 1.0 / 16.0}, 0.5};

WavefunctionModel hydrogen(int n) { return normalize(WavefunctionModel(Hydrogenic{n, 0, 0, 1.0})); }

WavefunctionModel helium_product() {
  return normalize(WavefunctionModel(OrbitalProduct{2.0, {SlaterOrbital{1.0}, SlaterOrbital{1.0}}}));
}

}  // namespace

TEST_CASE("density_at: hydrogen and separable helium") {
  const auto h1 = hydrogen(1);
  const auto spec1 = hydrogenic_spec(1, 1.0);
  const auto d0 = density_at(h1, spec1, Vec3::Zero());
  CHECK(d0.value == doctest::Approx(1.0 / (8.0 * pi)).epsilon(1e-12));
  CHECK(d0.value == doctest::Approx(0.0397887).epsilon(1e-6));

  const auto he = helium_product();
  const auto spec2 = AtomSpec::make(2, 2.0, -1.451862, -1.0);
  const auto dhe = density_at(he, spec2, Vec3::Zero());
  CHECK(dhe.value == doctest::Approx(2.0 * 8.0 / (8.0 * pi)).epsilon(1e-10));
  CHECK(dhe.error < 1e-8);

  for (const auto* m : {&h1, &he}) {
    const auto& spec = m == &h1 ? spec1 : spec2;
    double prev = density_at(*m, spec, Vec3::Zero()).value;
    for (double r = 0.5; r <= 12.0; r += 0.5) {
      const double d = density_at(*m, spec, Vec3(0.3, -0.4, 0.866).normalized() * r).value;
      CHECK(d < prev);
      CHECK(d <= prev * std::exp(-0.5 * 0.5 * m->charge()));
      prev = d;
    }
    CHECK(prev < 1e-4);
  }

  CHECK_THROWS_AS(density_at(he, spec1, Vec3::Zero()), ContractViolation);
}

TEST_CASE("rho_tilde against the analytic hydrogen averages") {
  const auto spec = hydrogenic_spec(1, 1.0);
  CHECK(rho_tilde(hydrogen(1), spec, 0.0).value == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(rho_tilde(hydrogen(1), spec, 1.0).value == doctest::Approx(0.18394).epsilon(1e-5));
  const auto spec2 = hydrogenic_spec(2, 1.0);
  for (double r : {0.0, 0.3, 1.0, 4.0, 9.5}) {
    CHECK(rho_tilde(hydrogen(1), spec, r).value ==
          doctest::Approx(kRho1s.deriv(0, r)).epsilon(1e-12));
    CHECK(rho_tilde(hydrogen(2), spec2, r).value ==
          doctest::Approx(kRho2s.deriv(0, r)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(rho_tilde(hydrogen(1), spec, -1.0), ContractViolation);
}

TEST_CASE("rho_tilde of a spherical density is 4π times a single point") {
  const auto he = helium_product();
  const auto spec = AtomSpec::make(2, 2.0, -1.451862, -1.0);
  EvalOptions opts;
  opts.sphere_degree = 7;
  for (double r : {0.0, 0.25, 1.5}) {
    const auto avg = rho_tilde(he, spec, r, opts);
    const auto pt = density_at(he, spec, Vec3(0, 0, r), opts);
    CHECK(avg.value == doctest::Approx(four_pi * pt.value).epsilon(1e-11));
    CHECK(avg.error >= 0.0);
  }
}

TEST_CASE("first-derivative formula") {
  const RhoHFn constant = [](double) { return RhoH{{3.0, 0.0}, {0.0, 0.0}}; };
  for (double z : {1.0, 2.5})
    for (double r : {0.01, 0.7, 3.0})
      CHECK(rho_tilde_prime(constant, z, r).value == doctest::Approx(-z * 3.0).epsilon(1e-13));

  const auto d1 = rho_tilde_prime(kRho1s.source(1.0), 1.0, 1.0);
  CHECK(d1.value == doctest::Approx(-0.5 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(d1.value == doctest::Approx(-0.18394).epsilon(1e-5));
  for (double r : {0.05, 0.8, 2.0, 6.0})
    CHECK(rho_tilde_prime(kRho2s.source(1.0), 1.0, r).value ==
          doctest::Approx(kRho2s.deriv(1, r)).epsilon(1e-11));

  // Model-driven form: ρ̃ by sphere quadrature of the normalized eigenstate.
  const auto spec = hydrogenic_spec(1, 1.0);
  const auto m = rho_tilde_prime(hydrogen(1), spec, 1.0,
                                 [](double r) { return Measured{kRho1s.h(1.0, r), 0.0}; });
  CHECK(m.value == doctest::Approx(-0.5 * std::exp(-1.0)).epsilon(1e-11));

  CHECK_THROWS_AS(rho_tilde_prime(constant, 1.0, 0.0), ContractViolation);
}

TEST_CASE("first derivative tends to -Z rho(0) as r shrinks") {
  for (const auto& [rho, z] : {std::pair{kRho1s, 1.0}, std::pair{kRho2s, 1.0}}) {
    std::vector<Measured> seq;
    for (int m = 0; m < 7; ++m) {
      const auto e = rho_tilde_prime(rho.source(z), z, 0.1 * std::ldexp(1.0, -m));
      seq.push_back({e.value, e.error});
    }
    const auto lim = richardson(seq, 1);
    const double target = -z * rho.deriv(0, 0.0);
    CHECK(std::abs(lim.value - target) < 1e-6 * std::abs(target));
  }
}

TEST_CASE("second-derivative formula") {
  CHECK(rho_tilde_second(kRho1s.source(1.0), 1.0, 0.0).value ==
        doctest::Approx(0.5).epsilon(1e-14));
  const RhoHFn constant = [](double) { return RhoH{{2.0, 0.0}, {0.0, 0.0}}; };
  CHECK(rho_tilde_second(constant, 0.0, 0.0).value == 0.0);
  CHECK(std::abs(rho_tilde_second(constant, 0.0, 0.9).value) < 1e-15);

  const double rho0 = kRho2s.deriv(0, 0.0);
  CHECK(rho_tilde_second(kRho2s.source(1.0), 1.0, 0.0).value ==
        doctest::Approx(0.875 * rho0).epsilon(1e-14));
  for (double r : {0.1, 1.0, 5.0}) {
    const auto e = rho_tilde_second(kRho2s.source(1.0), 1.0, r);
    CHECK(e.value == doctest::Approx(kRho2s.deriv(2, r)).epsilon(1e-10));
    CHECK(std::abs(e.value - kRho2s.deriv(2, r)) <= e.error + 1e-12);
  }

  const auto spec = hydrogenic_spec(2, 1.0);
  const auto m = rho_tilde_second(hydrogen(2), spec, 0.0,
                                  [](double r) { return Measured{kRho2s.h(1.0, r), 0.0}; });
  CHECK(m.value == doctest::Approx(0.875 * rho0).epsilon(1e-12));
  CHECK_THROWS_AS(rho_tilde_second(constant, 1.0, -0.1), ContractViolation);
}

TEST_CASE("radial equation residual vanishes for hydrogen eigenstates") {
  for (const auto& rho : {kRho1s, kRho2s}) {
    const auto f = rho.source(1.0);
    for (int i = 0; i <= 8; ++i) {
      const double r = 1e-3 * std::pow(1e4, i / 8.0);
      const auto d1 = rho_tilde_prime(f, 1.0, r);
      const auto d2 = rho_tilde_second(f, 1.0, r);
      const RhoH v = f(r);
      const double resid = -0.5 * (d2.value + 2.0 * d1.value / r) - v.rho.value / r + v.h.value;
      const double tol = 0.5 * (d2.error + 2.0 * d1.error / r) + 1e-12 * (1.0 + 1.0 / r);
      INFO("r = " << r);
      CHECK(std::abs(resid) <= tol);
      const Measured lib = radial_equation_residual(f, 1.0, r);
      CHECK(std::abs(lib.value - resid) <= 1e-12 * (1.0 + 1.0 / r));
      CHECK(std::abs(lib.value) <= 3.0 * lib.error + 1e-12);
    }
  }
  // h̃ = 0 is not the forced source.
  const RhoHFn wrong = [](double r) {
    return RhoH{{kRho1s.deriv(0, r), 0.0}, {0.0, 0.0}};
  };
  for (double r : {0.01, 0.5, 3.0}) {
    const Measured lib = radial_equation_residual(wrong, 1.0, r);
    CHECK(std::abs(lib.value) > 100.0 * lib.error);
  }
}

TEST_CASE("derivative recursion at the origin") {
  CHECK(rho_tilde_kth_at_zero(0, 0.25, -0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rho_tilde_kth_at_zero(1, -0.25, 0.5, 1.0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(rho_tilde_kth_at_zero(0, 0.0, 0.0, 0.0) == 0.0);
  CHECK(rho_tilde_kth_at_zero(3, 0.0, 0.0, 2.0) == 0.0);
  CHECK_THROWS_AS(rho_tilde_kth_at_zero(-1, 0.0, 0.0, 1.0), DomainError);

  // Third derivative two ways: h̃'(0) - (Z/3)[h̃(0) + Z²ρ̃(0)] versus the k = 1
  // step fed by the k = 0 step.
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0), zdist(0.5, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double h0 = u(gen), h1 = u(gen), r0 = std::abs(u(gen)), z = zdist(gen);
    const double direct = h1 - z / 3.0 * (h0 + z * z * r0);
    const double rho2 = rho_tilde_kth_at_zero(0, h0, -z * r0, z);
    const double chained = rho_tilde_kth_at_zero(1, h1, rho2, z);
    const double scale = std::abs(h1) + z * std::abs(h0) + z * z * z * r0;
    worst = std::max(worst, std::abs(direct - chained) / std::max(1.0, scale));
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("finite-difference radii") {
  const FdOptions o;
  const auto r = fd_radii(o);
  CHECK(r.front() == 0.0);
  CHECK(r.back() == doctest::Approx(0.4));
  std::set<double> expect{0.0};
  for (int m = 0; m <= o.halvings; ++m)
    for (int i = 1; i <= 4; ++i) expect.insert(i * 0.1 * std::ldexp(1.0, -m));
  CHECK(r.size() == expect.size());
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] > r[i - 1]);
  CHECK_THROWS_AS(fd_radii(FdOptions{0.0, 6}), ContractViolation);
  CHECK_THROWS_AS(fd_radii(FdOptions{0.1, 0}), ContractViolation);
}

TEST_CASE("derivatives at the origin from exact samples") {
  const FdOptions o;
  for (const auto& rho : {kRho1s, kRho2s}) {
    RadialSamples s{"rho", fd_radii(o), {}};
    for (double r : s.radii) {
      IntegralEstimate e;
      e.value = rho.deriv(0, r);
      e.error = 4.0 * machine_eps * std::abs(e.value);
      s.values.push_back(e);
    }
    for (int k = 1; k <= 3; ++k) {
      const auto d = derivative_at_zero(s, k, o);
      const double truth = rho.deriv(k, 0.0);
      INFO("k = " << k);
      CHECK(std::abs(d.value - truth) <= d.error);
      CHECK(std::abs(d.value - truth) < 1e-5 * std::abs(truth));
      CHECK(d.error < 1e-4 * std::abs(truth));
      CHECK(d.error == doctest::Approx(d.truncation + d.quadrature + d.roundoff));
    }
    const auto lim = limit_at_zero(s, o);
    CHECK(std::abs(lim.value - rho.deriv(0, 0.0)) <= lim.error);
    CHECK(std::abs(lim.value - rho.deriv(0, 0.0)) < 1e-9);
  }
  CHECK_THROWS_AS(derivative_at_zero(RadialSamples{"x", {0.0}, {IntegralEstimate{}}}, 1, o),
                  ContractViolation);
  CHECK_THROWS_AS(derivative_at_zero(RadialSamples{}, 4, o), ContractViolation);
}

TEST_CASE("quadrature noise in samples shows up in the derivative error") {
  const FdOptions o;
  RadialSamples s{"rho", fd_radii(o), {}};
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double r : s.radii) {
    IntegralEstimate e;
    const double noise = 1e-9 * u(gen);
    e.value = kRho1s.deriv(0, r) + noise;
    e.companion = e.value + 1e-9 * u(gen);
    e.error = 2e-9;
    s.values.push_back(e);
  }
  for (int k = 1; k <= 3; ++k) {
    const auto d = derivative_at_zero(s, k, o);
    CHECK(d.quadrature > 1e-9);
    CHECK(std::abs(d.value - kRho1s.deriv(k, 0.0)) <= d.error);
  }
}

TEST_CASE("richardson on a polynomial in the step") {
  std::vector<Measured> seq;
  for (int m = 0; m < 5; ++m) {
    const double h = std::ldexp(0.5, -m);
    seq.push_back({2.0 + 3.0 * h - h * h + 0.5 * h * h * h, 0.0});
  }
  const auto z = richardson(seq, 1);
  CHECK(z.value == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(richardson({{1.0, 0.0}}, 1), ContractViolation);
}

TEST_CASE("radial samples: validation, lookup and CSV") {
  IntegralEstimate a;
  a.value = 0.5;
  a.error = 1e-13;
  IntegralEstimate b = a;
  b.value = 0.25;
  b.method = Method::monte_carlo;
  RadialSamples s{"rho_tilde", {0.0, 0.125}, {a, b}};
  CHECK_NOTHROW(s.validate());
  CHECK(s.at(0.125).value == 0.25);
  CHECK_THROWS_AS(s.at(0.1), ContractViolation);
  std::ostringstream os;
  write_csv_rows(os, s, "eigen");
  CHECK(os.str() ==
        "rho_tilde,0,0.5,1e-13,tensor-grid,eigen\n"
        "rho_tilde,0.125,0.25,1e-13,monte-carlo,eigen\n");
  CHECK_THROWS_AS((RadialSamples{"x", {0.1, 0.1}, {a, b}}.validate()), ContractViolation);
  CHECK_THROWS_AS((RadialSamples{"x", {-0.1, 0.1}, {a, b}}.validate()), ContractViolation);
  CHECK_THROWS_AS((RadialSamples{"x", {0.1}, {a, b}}.validate()), ContractViolation);
}

TEST_CASE("rho_tilde is Lipschitz on [0, 1]") {
  const auto spec = hydrogenic_spec(2, 1.0);
  const auto m = hydrogen(2);
  double lip = 0.0, prev = rho_tilde(m, spec, 0.0).value;
  for (int i = 1; i <= 100; ++i) {
    const double v = rho_tilde(m, spec, i / 100.0).value;
    lip = std::max(lip, std::abs(v - prev) * 100.0);
    prev = v;
  }
  CHECK(std::isfinite(lip));
  // |ρ̃'| peaks at the origin where it equals Z ρ̃(0).
  CHECK(lip <= 1.0 / 16.0 * 1.0001);
}

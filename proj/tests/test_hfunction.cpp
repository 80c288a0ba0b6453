#include <doctest.h>

#include "cusplab/hfunction.hpp"

#include <cmath>

using namespace cusplab;

namespace {

WavefunctionModel hydrogen(int n, double z = 1.0) {
  return normalize(WavefunctionModel(Hydrogenic{n, 0, 0, z}));
}

WavefunctionModel helium_product(double exponent = 1.0) {
  return normalize(WavefunctionModel(
      OrbitalProduct{2.0, {SlaterOrbital{exponent}, SlaterOrbital{exponent}}}));
}

WavefunctionModel hylleraas() {
  return normalize(WavefunctionModel(HylleraasHelium{
      2.0, 1.0, {{0, 0, 0, 1.0}, {0, 0, 1, 0.25}, {2, 0, 0, 0.015}, {0, 2, 0, 0.015}}}));
}

const AtomSpec kHe = AtomSpec::make(2, 2.0, -1.451862, -1.0);

// ρ̃_n(0) = 4π|ψ_n(0)|² = Z³/(2n³) for hydrogenic s-states.
double rho0(int n, double z = 1.0) { return z * z * z / (2.0 * n * n * n); }

// Spherical average of hydrogen 2s (Z = 1) and the h̃ that the radial
// equation -½(ρ̃'' + 2ρ̃'/r) - Zρ̃/r + h̃ = 0 forces on it.
double rho2s(double r) { return std::pow(1.0 - r / 4.0, 2) * std::exp(-r / 2.0) / 16.0; }
double h2s(double r) {
  // ρ̃ = e^{-r/2} q(r)/16, q = 1 - r/2 + r²/16.
  const double q = 1.0 - r / 2.0 + r * r / 16.0, q1 = -0.5 + r / 8.0, q2 = 1.0 / 8.0;
  const double e = std::exp(-r / 2.0) / 16.0;
  const double d0 = e * q, d1 = e * (q1 - 0.5 * q), d2 = e * (q2 - q1 + 0.25 * q);
  if (r == 0.0) return 1.5 * d2 + d1;
  return 0.5 * d2 + (d1 + d0) / r;
}

}  // namespace

TEST_CASE("one-electron breakdown reduces to the hydrogen values") {
  const auto m = hydrogen(1);
  const auto spec = hydrogenic_spec(1, 1.0);
  for (double r : {0.0, 0.2, 1.0, 3.5}) {
    const Vec3 x = Vec3(0.48, 0.6, 0.64) * r;
    const double psi2 = std::exp(-r) / (8.0 * pi);
    const auto b = h_terms_at(m, spec, 0, x);
    INFO("r = " << r);
    CHECK(b.t.value == doctest::Approx(0.25 * psi2).epsilon(1e-13));
    CHECK(b.v.value == 0.0);
    CHECK(b.w.value == 0.0);
    CHECK(b.e_rho.value == doctest::Approx(-0.25 * psi2).epsilon(1e-13));
    CHECK(b.total.value == doctest::Approx(0.5 * psi2).epsilon(1e-13));
    CHECK(b.total.value == b.t.value - b.v.value + b.w.value - b.e_rho.value);
  }
  CHECK_THROWS_AS(h_terms_at(m, spec, 1, Vec3::Zero()), ContractViolation);
}

TEST_CASE("h_tilde for hydrogen eigenstates") {
  const auto spec = hydrogenic_spec(1, 1.0);
  CHECK(h_tilde(hydrogen(1), spec, 0.0).value == doctest::Approx(0.25).epsilon(1e-13));
  for (double r : {0.1, 1.0, 4.0})
    CHECK(h_tilde(hydrogen(1), spec, r).value ==
          doctest::Approx(0.25 * std::exp(-r)).epsilon(1e-12));
  const auto zero = hydrogen(1).scaled(0.0);
  CHECK(h_tilde(zero, spec, 0.7).value == 0.0);

  const auto spec2 = hydrogenic_spec(2, 1.0);
  for (double r : {0.0, 0.05, 1.0, 3.0, 4.0, 8.0}) {
    const auto b = h_tilde_terms(hydrogen(2), spec2, r);
    INFO("r = " << r);
    CHECK(b.rho.value == doctest::Approx(rho2s(r)).epsilon(1e-12));
    CHECK(std::abs(b.total.value - h2s(r)) < 1e-12 * (1.0 + 1.0 / std::max(r, 1e-3)) / 16.0);
  }
}

TEST_CASE("helium product: separable values and grid against sampling") {
  const auto he = helium_product();
  const auto b = h_terms_at(he, kHe, 0, Vec3::Zero());
  // Z ∫ e^{-2r}/π · (1/r) dx / π.
  CHECK(b.v.value == doctest::Approx(2.0 / pi).epsilon(1e-10));
  CHECK(b.rho.value == doctest::Approx(1.0 / pi).epsilon(1e-11));
  // Repulsion at the nucleus equals ⟨1/r⟩ |ψ(0)|² too.
  CHECK(b.w.value == doctest::Approx(1.0 / pi).epsilon(1e-10));

  EvalOptions mc;
  mc.hat = McSampler{11, 200000, 0.0};
  const auto s = h_terms_at(he, kHe, 0, Vec3::Zero(), mc);
  CHECK(s.v.method == Method::monte_carlo);
  CHECK(std::abs(s.v.value - b.v.value) <= 3.0 * s.v.error + b.v.error);
  CHECK(std::abs(s.w.value - b.w.value) <= 3.0 * s.w.error + b.w.error);
  CHECK(std::abs(s.t.value - b.t.value) <= 3.0 * s.t.error + b.t.error);

  const Vec3 x(0.3, 0.1, -0.2);
  const auto g = h_at(he, kHe, x);
  const auto q = h_at(he, kHe, x, mc);
  CHECK(std::abs(q.total.value - g.total.value) <= 3.0 * q.total.error + g.total.error);
}

TEST_CASE("closed forms at the nucleus for hydrogen s-states") {
  const auto spec1 = hydrogenic_spec(1, 1.0);
  CHECK(h0_closed(hydrogen(1), spec1).value == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(h0_closed(hydrogen(1), spec1).eigen_only);
  CHECK(hprime0_closed(hydrogen(1), spec1).value == doctest::Approx(-0.25).epsilon(1e-13));
  CHECK(t0_closed(hydrogen(1), spec1).value == doctest::Approx(0.125).epsilon(1e-13));
  CHECK_FALSE(t0_closed(hydrogen(1), spec1).eigen_only);
  CHECK(tprime0_closed(hydrogen(1), spec1).value == doctest::Approx(-0.125).epsilon(1e-13));
  CHECK(tprime0_closed(hydrogen(1), spec1).eigen_only);

  const auto spec2 = hydrogenic_spec(2, 1.0);
  CHECK(h0_closed(hydrogen(2), spec2).value == doctest::Approx(0.3125 * rho0(2)).epsilon(1e-13));
  CHECK(hprime0_closed(hydrogen(2), spec2).value ==
        doctest::Approx(-0.25 * rho0(2)).epsilon(1e-12));

  const auto zero = hydrogen(1).scaled(0.0);
  CHECK(h0_closed(zero, spec1).value == 0.0);
  CHECK(hprime0_closed(zero, spec1).value == 0.0);
  CHECK(t0_closed(zero, spec1).value == 0.0);

  // Z = 2 ground state: h̃(0) = (Z²/4 - E)ρ̃(0) = 2·4.
  const auto specz = hydrogenic_spec(1, 2.0);
  CHECK(h0_closed(hydrogen(1, 2.0), specz).value == doctest::Approx(2.0 * 4.0).epsilon(1e-12));
}

TEST_CASE("expectation of the ionized Hamiltonian") {
  const auto spec1 = hydrogenic_spec(1, 1.0);
  CHECK(expectation_prev_hamiltonian(hydrogen(1), spec1, 0).value ==
        doctest::Approx(0.25 / (8.0 * pi)).epsilon(1e-13));
  // |ψ_1s(0)|² · (kinetic 1 - (Z-1)⟨1/r⟩ - E) for the unit-exponent factor.
  const auto e = expectation_prev_hamiltonian(helium_product(), kHe, 0);
  CHECK(e.value == doctest::Approx((1.0 - 1.0 + 1.451862) / pi).epsilon(1e-10));
  CHECK(expectation_prev_hamiltonian(helium_product(), kHe, 1).value ==
        doctest::Approx(e.value).epsilon(1e-12));
  CHECK(expectation_prev_hamiltonian(helium_product().scaled(0.0), kHe, 0).value == 0.0);
  const auto in = nucleus_ingredients(helium_product(), kHe, 0);
  CHECK(in.kin.value + in.pot.value == doctest::Approx(e.value).epsilon(1e-12));
}

TEST_CASE("direct h_tilde(0) matches the closed form for n = 1, 2, 3") {
  for (int n = 1; n <= 3; ++n) {
    const auto spec = hydrogenic_spec(n, 1.0);
    const auto m = hydrogen(n);
    const auto direct = h_tilde(m, spec, 0.0);
    const auto closed = h0_closed(m, spec);
    INFO("n = " << n);
    CHECK(std::abs(direct.value - closed.value) <= direct.error + closed.error + 1e-14);
    CHECK(closed.value == doctest::Approx((0.25 + 0.25 / (n * n)) * rho0(n)).epsilon(1e-12));
  }
}

TEST_CASE("finite-difference h_tilde'(0) matches the closed form for n = 1, 2, 3") {
  const FdOptions fd;
  for (int n = 1; n <= 3; ++n) {
    const auto spec = hydrogenic_spec(n, 1.0);
    const auto m = hydrogen(n);
    const auto s = sample_terms(m, spec, fd_radii(fd));
    const auto d = derivative_at_zero(s.h, 1, fd);
    const auto closed = hprime0_closed(m, spec);
    INFO("n = " << n);
    CHECK(std::abs(d.value - closed.value) < 1e-4 * std::abs(closed.value));
    // Same chain for ρ̃: the Kato limit.
    const auto r1 = derivative_at_zero(s.rho, 1, fd);
    CHECK(r1.value == doctest::Approx(-rho0(n)).epsilon(1e-6));
  }
}

TEST_CASE("cusp relations of v and w") {
  const auto spec1 = hydrogenic_spec(1, 1.0);
  const auto none = vw_cusp_check(hydrogen(1), spec1);
  CHECK(none.v.value == 0.0);
  CHECK(none.w.value == 0.0);

  EvalOptions opts;
  opts.sphere_degree = 7;
  const FdOptions fd;
  const auto good = vw_cusp_check(helium_product(), kHe, fd, opts);
  CHECK(std::abs(good.v.value) <= good.v.error);
  CHECK(std::abs(good.w.value) <= good.w.error);
  CHECK(good.v.error < 1e-5);
  CHECK(good.w.error < 1e-5);

  const auto bad = vw_cusp_check(helium_product(0.84), kHe, fd, opts);
  CHECK(std::abs(bad.v.value) > 10.0 * bad.v.error);
  CHECK(std::abs(bad.w.value) > 10.0 * bad.w.error);
}

TEST_CASE("kinetic term at the nucleus splits into cusp, regular and hat parts") {
  for (const auto& m : {helium_product(), hylleraas()}) {
    const auto direct = h_tilde_terms(m, kHe, 0.0);
    const auto in = nucleus_ingredients(m, kHe);
    const double z = kHe.charge;
    INFO(m.describe());
    CHECK(direct.t_self.value ==
          doctest::Approx(four_pi * (z * z / 4.0 * in.rho.value + in.grad.value)).epsilon(1e-10));
    CHECK(direct.t_hat.value == doctest::Approx(four_pi * in.kin.value).epsilon(1e-10));
    const auto t0 = t0_closed(in, z);
    CHECK(std::abs(direct.t.value - t0.value) <= direct.t.error + t0.error + 1e-12);
    // h̃(0) = t̃(0) + 4πΣ⟨(V - E)⟩ needs only the regular-factor structure.
    const auto h0 = h0_closed(in, z);
    CHECK(std::abs(direct.total.value - h0.value) <= direct.total.error + h0.error + 1e-12);
  }
}

TEST_CASE("t_tilde(0) closed form against extrapolated direct samples") {
  EvalOptions opts;
  opts.sphere_degree = 7;
  const FdOptions fd;
  std::vector<double> radii;
  for (int m = 0; m <= fd.halvings; ++m) radii.push_back(fd.r0 * std::ldexp(1.0, -m));
  std::sort(radii.begin(), radii.end());
  const auto s = sample_terms(helium_product(), kHe, radii, opts);
  const auto lim = limit_at_zero(s.t, fd);
  const auto t0 = t0_closed(helium_product(), kHe, opts);
  CHECK(std::abs(lim.value - t0.value) <= lim.error + t0.error);
  CHECK(lim.error < 1e-6 * std::abs(t0.value));
}

TEST_CASE("a regular factor with a direction-dependent limit is unsupported") {
  CHECK_THROWS_AS(nucleus_ingredients(helium_product(0.84), kHe), UnsupportedModel);
  CHECK_THROWS_AS(h0_closed(helium_product(0.84), kHe), UnsupportedModel);
}

TEST_CASE("ionization bounds") {
  const std::vector<Vec3> pts{Vec3(0.1, 0, 0), Vec3(0, 1.0, 0.5), Vec3(2.0, -1.0, 0.0)};
  for (int n = 1; n <= 2; ++n) {
    const auto spec = hydrogenic_spec(n, 1.0);
    const auto rows = ion_bound_check(hydrogen(n), spec, pts);
    REQUIRE(rows.size() == pts.size() + 1);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CHECK(rows[i].verdict == Verdict::holds);
      CHECK(rows[i].margin == doctest::Approx(rows[i].lhs.value - rows[i].rhs.value));
    }
    INFO("n = " << n);
    CHECK(rows.back().verdict == Verdict::holds_at_equality);
    CHECK(std::abs(rows.back().margin) < 1e-13);
    CHECK(rows.back().eigen_only);
  }

  const auto negative = AtomSpec::make(1, 1.0, -0.25, -0.5);
  const auto rows = ion_bound_check(hydrogen(1), negative, pts);
  REQUIRE(rows.size() == pts.size() + 1);
  for (const auto& r : rows) {
    CHECK(r.verdict == Verdict::skipped);
    CHECK_FALSE(r.notice.empty());
  }
}

TEST_CASE("verdict classification") {
  CHECK(classify(0.0, 0.0, Sense::at_least) == Verdict::holds_at_equality);
  CHECK(classify(5e-11, 0.0, Sense::at_most) == Verdict::holds_at_equality);
  CHECK(classify(1e-3, 1e-4, Sense::at_least) == Verdict::holds);
  CHECK(classify(2e-4, 1e-4, Sense::at_least) == Verdict::holds_at_equality);
  CHECK(classify(-1e-3, 1e-4, Sense::at_least) == Verdict::violated_beyond_error);
  CHECK(classify(-1e-3, 1e-4, Sense::at_most) == Verdict::holds);
  CHECK(classify(1e-3, 1e-4, Sense::equal) == Verdict::violated_beyond_error);
  CHECK(verdict_name(Verdict::holds_at_equality) == "holds-at-equality");
  const auto b = make_bound("x", Sense::at_least, {1.0, 0.01}, {0.5, 0.01}, false);
  CHECK(b.margin == 0.5);
  CHECK(b.error == doctest::Approx(0.02));
  CHECK(b.verdict == Verdict::holds);
}

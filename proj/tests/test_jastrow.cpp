#include <doctest.h>

#include "cusplab/jastrow.hpp"

#include <cmath>
#include <functional>
#include <vector>

using namespace cusplab;

namespace {

WavefunctionModel helium_product(double exponent = 1.0) {
  return normalize(WavefunctionModel(
      OrbitalProduct{2.0, {SlaterOrbital{exponent}, SlaterOrbital{exponent}}}));
}

WavefunctionModel lithium_product() {
  return WavefunctionModel(OrbitalProduct{
      3.0, {SlaterOrbital{1.5}, SlaterOrbital{1.5}, SlaterOrbital{0.6, {1.0, -0.3}}}});
}

WavefunctionModel hylleraas() {
  return WavefunctionModel(HylleraasHelium{2.0, 1.8, {{0, 0, 0, 1.0}, {0, 0, 1, 0.3}, {0, 2, 0, 0.1}}});
}

double cut_value(const Configuration& c, double z) {
  const auto p = f_cut(c, z);
  return p.f2_cut + p.f3_cut;
}

Configuration moved(Configuration c, int a, double t) {
  c[a / 3][a % 3] += t;
  return c;
}

/// Central second difference, one Richardson step (h, h/2).
double fd_second(const std::function<double(const Configuration&)>& f, const Configuration& c,
                 int a, int b, double h) {
  auto stencil = [&](double s) {
    if (a == b)
      return (f(moved(c, a, s)) - 2.0 * f(c) + f(moved(c, a, -s))) / (s * s);
    return (f(moved(moved(c, a, s), b, s)) - f(moved(moved(c, a, s), b, -s)) -
            f(moved(moved(c, a, -s), b, s)) + f(moved(moved(c, a, -s), b, -s))) /
           (4.0 * s * s);
  };
  return (4.0 * stencil(h / 2) - stencil(h)) / 3.0;
}

double fd_first(const std::function<double(const Configuration&)>& f, const Configuration& c,
                int a, double h) {
  auto stencil = [&](double s) { return (f(moved(c, a, s)) - f(moved(c, a, -s))) / (2.0 * s); };
  return (4.0 * stencil(h / 2) - stencil(h)) / 3.0;
}

/// Random regular configuration whose electrons stay at least `gap` from the
/// nucleus and from each other, so finite-difference stencils never cross a
/// kink.
Configuration spaced_configuration(int n, double scale, double gap, std::uint64_t index) {
  for (std::uint64_t k = 0;; ++k) {
    Configuration c = random_configuration(n, scale, 77, 1000 * index + k);
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      ok &= c[i].norm() > gap;
      for (int j = i + 1; j < n; ++j) ok &= (c[i] - c[j]).norm() > gap;
    }
    if (ok) return c;
  }
}

}  // namespace

TEST_CASE("log pair coefficient") {
  CHECK(log_pair_coefficient == doctest::Approx(-0.0302822).epsilon(1e-6));
  CHECK(log_pair_coefficient == (2.0 - pi) / (12.0 * pi));
}

TEST_CASE("cutoff profile") {
  CHECK(cutoff(0.0).value == 1.0);
  CHECK(cutoff(1.0).value == 1.0);
  CHECK(cutoff(-0.7).value == 1.0);
  CHECK(cutoff(2.0).value == 0.0);
  CHECK(cutoff(-3.5).value == 0.0);
  CHECK(cutoff(1.5).value == doctest::Approx(0.5).epsilon(1e-15));
  double prev = 1.0;
  for (int i = 1; i < 1000; ++i) {
    const double t = 1.0 + i / 1000.0;
    const auto c = cutoff(t);
    CHECK(c.value >= 0.0);
    CHECK(c.value <= 1.0);
    CHECK(c.value <= prev);
    prev = c.value;
    CHECK(cutoff(-t).value == c.value);
    CHECK(c.value + cutoff(3.0 - t).value == doctest::Approx(1.0).epsilon(1e-14));
  }
  // Analytic derivatives against differences of the value.
  for (double t : {1.05, 1.2, 1.37, 1.5, 1.66, 1.8, 1.95}) {
    auto v = [](double s) { return cutoff(s).value; };
    auto d1 = [](double s) { return cutoff(s).d1; };
    const double h = 1e-4;
    const double fd1 = (8.0 * (v(t + h) - v(t - h)) - (v(t + 2 * h) - v(t - 2 * h))) / (12.0 * h);
    const double fd2 = (8.0 * (d1(t + h) - d1(t - h)) - (d1(t + 2 * h) - d1(t - 2 * h))) / (12.0 * h);
    INFO("t = " << t);
    CHECK(std::abs(cutoff(t).d1 - fd1) <= 1e-8 * std::max(1.0, std::abs(fd1)));
    CHECK(std::abs(cutoff(t).d2 - fd2) <= 1e-7 * std::max(1.0, std::abs(fd2)));
  }
  // Every derivative vanishes at the shoulders.
  for (double eps : {1e-2, 1e-3}) {
    CHECK(std::abs(cutoff(1.0 + eps).d1) < 1e-30);
    CHECK(std::abs(cutoff(1.0 + eps).d2) < 1e-30);
    CHECK(std::abs(cutoff(2.0 - eps).d1) < 1e-30);
    CHECK(std::abs(cutoff(2.0 - eps).d2) < 1e-30);
  }
}

TEST_CASE("uncut factors") {
  const Configuration one{Vec3(0.3, -0.4, 1.2)};
  CHECK(f2(one, 1.7) == doctest::Approx(-1.7 * 1.3 / 2.0).epsilon(1e-15));
  CHECK(f3(one, 1.7) == 0.0);

  const Configuration orth{Vec3(1.0, 0.0, 0.0), Vec3(0.0, 2.0, 0.0)};
  CHECK(f3(orth, 2.0) == 0.0);
  CHECK(f3({Vec3::Zero(), Vec3::Zero()}, 2.0) == 0.0);

  const Vec3 x(0.2, 0.5, -0.1), y(-0.7, 0.3, 0.4);
  const double expect_f3 = (2.0 - pi) / (12.0 * pi) * 2.0 * x.dot(y) *
                           std::log(x.squaredNorm() + y.squaredNorm());
  CHECK(f3({x, y}, 2.0) == doctest::Approx(expect_f3).epsilon(1e-14));
  CHECK(f2({x, y}, 2.0) == doctest::Approx(-(x.norm() + y.norm()) + (x - y).norm() / 4.0).epsilon(1e-14));
}

TEST_CASE("cut factors agree with the uncut ones on the plateau and vanish far out") {
  for (std::uint64_t k = 0; k < 50; ++k) {
    Configuration c = random_configuration(3, 0.5, 3, k);  // |x_i| ≤ 0.5, pair distances ≤ 1
    const auto p = f_cut(c, 3.0);
    CHECK(p.f2_cut == p.f2);
    CHECK(p.f3_cut == p.f3);
  }
  const Configuration far1{Vec3(2.5, 0.0, 0.0)};
  CHECK(f_cut(far1, 1.0).f2_cut == 0.0);
  const Configuration far2{Vec3(3.0, 0.0, 0.0), Vec3(-2.1, 0.0, 0.5)};
  const auto p = f_cut(far2, 2.0);
  CHECK(p.f2_cut == 0.0);
  CHECK(p.f3_cut == 0.0);
  CHECK(p.hessian.cwiseAbs().maxCoeff() == 0.0);
  CHECK(hessian_f3_log_part(far2, 2.0).cwiseAbs().maxCoeff() == 0.0);

  // Fine sweep of |x_1| through the transition: no jumps.
  const Vec3 other(0.2, 0.3, -0.1);
  double prev = cut_value({Vec3(0.9, 0.0, 0.0), other}, 2.0);
  for (int i = 1; i <= 12000; ++i) {
    const double r = 0.9 + i * 1e-4;
    const double v = cut_value({Vec3(r, 0.0, 0.0), other}, 2.0);
    CHECK(std::abs(v - prev) <= 1e-3);
    prev = v;
  }
  // Singular configurations still have values.
  CHECK(std::isfinite(f_cut({Vec3::Zero(), Vec3::Zero()}, 2.0).f3_cut));
  CHECK(f_cut({Vec3::Zero(), Vec3::Zero()}, 2.0).hessian.size() == 0);
}

TEST_CASE("one-electron Hessian is the Hessian of -(Z/2)|x|") {
  for (std::uint64_t k = 0; k < 20; ++k) {
    const Configuration c = random_configuration(1, 0.95, 5, k);
    const Vec3 x = c[0];
    const double r = x.norm();
    const Mat3 expect = -1.5 * (Mat3::Identity() / r - x * x.transpose() / (r * r * r));
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        CHECK(second_partial_fcut(c, 3.0, 0, a, 0, b) ==
              doctest::Approx(expect(a, b)).epsilon(1e-12).scale(1.0 / r));
        CHECK(hessian_f2(c, 3.0)(a, b) ==
              doctest::Approx(expect(a, b)).epsilon(1e-12).scale(1.0 / r));
      }
  }
  CHECK_THROWS_AS(second_partial_fcut({Vec3::Zero()}, 1.0, 0, 0, 0, 0), SingularPoint);
  CHECK_THROWS_AS(second_partial_fcut({Vec3(1, 0, 0), Vec3(1, 0, 0)}, 1.0, 0, 0, 1, 0),
                  SingularPoint);
  CHECK_THROWS_AS(second_partial_fcut({Vec3(1, 0, 0)}, 1.0, 0, 3, 0, 0), ContractViolation);
}

TEST_CASE("analytic derivatives of F_cut, F2, F3 against finite differences") {
  double worst = 0.0;
  for (int n = 1; n <= 3; ++n)
    for (std::uint64_t k = 0; k < 20; ++k) {
      const Configuration c = spaced_configuration(n, 2.6, 0.05, 100 * n + k);
      const double z = 1.0 + n;
      const auto p = f_cut(c, z);
      const Eigen::MatrixXd hf2 = hessian_f2(c, z), hf3 = hessian_f3(c, z);
      const Eigen::VectorXd gf2 = grad_f2(c, z), gf3 = grad_f3(c, z);
      auto fc = [&](const Configuration& y) { return cut_value(y, z); };
      auto ff2 = [&](const Configuration& y) { return f2(y, z); };
      auto ff3 = [&](const Configuration& y) { return f3(y, z); };
      for (int a = 0; a < 3 * n; ++a) {
        CHECK(std::abs(p.grad[a] - fd_first(fc, c, a, 1e-3)) <= 1e-7);
        CHECK(std::abs(gf2[a] - fd_first(ff2, c, a, 1e-3)) <= 1e-7);
        CHECK(std::abs(gf3[a] - fd_first(ff3, c, a, 1e-3)) <= 1e-7);
        for (int b = 0; b < 3 * n; ++b) {
          const double an = p.hessian(a, b);
          const double fd = fd_second(fc, c, a, b, 1e-3);
          const double rel = std::abs(an - fd) / std::max(std::abs(an), 1e-3);
          worst = std::max(worst, rel);
          INFO("n = " << n << ", k = " << k << ", entry " << a << "," << b);
          CHECK(rel <= 1e-5);
          CHECK(std::abs(hf2(a, b) - fd_second(ff2, c, a, b, 1e-3)) <=
                1e-5 * std::max(std::abs(hf2(a, b)), 1e-3));
          CHECK(std::abs(hf3(a, b) - fd_second(ff3, c, a, b, 1e-3)) <=
                1e-5 * std::max(std::abs(hf3(a, b)), 1e-3));
        }
      }
    }
  MESSAGE("worst relative F_cut Hessian error: " << worst);
}

TEST_CASE("second partials of the cut-minus-uncut two-body factor stay bounded") {
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 20000; ++k) {
    const Configuration c = random_configuration(2, 5.0, 11, k);
    const Eigen::MatrixXd d = hessian_f2_cut(c, 2.0) - hessian_f2(c, 2.0);
    worst = std::max(worst, d.cwiseAbs().maxCoeff());
  }
  // Profile derivatives are O(10) on (1, 2); the uncut part's 1/r terms
  // cancel exactly inside radius 1.
  CHECK(worst < 50.0);
  for (std::uint64_t k = 0; k < 200; ++k) {
    const Configuration c = random_configuration(2, 0.5, 13, k);
    CHECK((hessian_f2_cut(c, 2.0) - hessian_f2(c, 2.0)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("contracted two-body identity") {
  const auto h = normalize(WavefunctionModel(Hydrogenic{1, 0, 0, 1.0}));
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto s = contracted_f2_identity(h, random_configuration(1, 3.0, 21, k));
    CHECK(s.rhs == 0.0);
    CHECK(std::abs(s.lhs) <= 1e-15);
  }
  const WavefunctionModel models[] = {helium_product(), hylleraas(), lithium_product()};
  double worst = 0.0;
  for (const auto& m : models)
    for (std::uint64_t k = 0; k < 20; ++k) {
      const Configuration c = random_configuration(m.n_electrons(), 3.0, 23, k);
      const auto s = contracted_f2_identity(m, c);
      INFO(m.describe() << " k = " << k << " lhs " << s.lhs << " rhs " << s.rhs);
      CHECK(s.residual() <= 1e-9);
      if (std::abs(s.lhs) > 1e-12)
        worst = std::max(worst, std::abs(s.lhs - s.rhs) / std::abs(s.lhs));
    }
  CHECK(worst <= 1e-9);

  const Configuration c = random_configuration(2, 2.0, 29, 0);
  const auto base = contracted_f2_identity(helium_product(), c);
  const auto scaled = contracted_f2_identity(helium_product().scaled(3.0), c);
  CHECK(scaled.lhs == doctest::Approx(9.0 * base.lhs).epsilon(1e-13));
  CHECK(scaled.rhs == doctest::Approx(9.0 * base.rhs).epsilon(1e-13));
  CHECK_THROWS_AS(contracted_f2_identity(helium_product(), {Vec3::Zero(), Vec3(1, 0, 0)}),
                  SingularPoint);
}

TEST_CASE("log-part contraction identity") {
  const auto h = normalize(WavefunctionModel(Hydrogenic{1, 0, 0, 1.0}));
  const auto s1 = f3_log_contraction(h, {Vec3(0.3, 0.2, 0.1)});
  CHECK(s1.lhs == 0.0);
  CHECK(s1.rhs == 0.0);
  const WavefunctionModel models[] = {helium_product(), hylleraas(), lithium_product()};
  double worst = 0.0;
  for (const auto& m : models)
    for (std::uint64_t k = 0; k < 20; ++k) {
      const Configuration c = random_configuration(m.n_electrons(), 2.5, 31, k);
      const auto s = f3_log_contraction(m, c);
      CHECK(s.residual() <= 1e-9);
      if (std::abs(s.lhs) > 1e-12)
        worst = std::max(worst, std::abs(s.lhs - s.rhs) / std::abs(s.lhs));
    }
  CHECK(worst <= 1e-9);
  const auto far = f3_log_contraction(helium_product(), {Vec3(2.5, 0, 0), Vec3(0, -3, 0)});
  CHECK(far.lhs == 0.0);
  CHECK(far.rhs == 0.0);
}

TEST_CASE("a priori ratio for hydrogen is finite and stable") {
  const auto h = normalize(WavefunctionModel(Hydrogenic{1, 0, 0, 1.0}));
  const auto r = apriori_residual(h, {Vec3::Zero()}, 1.0, 2.0, 2000, 3);
  CHECK_FALSE(r.unstable);
  CHECK(std::isfinite(r.ratio));
  // Inside the plateau the residual is ψ∇F∇Fᵀ, so the ratio is below 1/4.
  CHECK(r.ratio <= 0.25);
  CHECK(r.refined_ratio <= 0.25);
  CHECK(r.ratio > 0.2);
  CHECK(r.refined_ratio >= r.ratio);

  const auto zero = apriori_residual(h.scaled(0.0), {Vec3::Zero()}, 1.0, 2.0, 100);
  CHECK(zero.ratio == 0.0);
  CHECK_FALSE(zero.notice.empty());
  CHECK_THROWS_AS(apriori_residual(h, {Vec3::Zero()}, 2.0, 1.0, 10), DomainError);

  // Tiny balls away from the cutoff region: ∂²F_cut = 0, ratio → max|∂²ψ|/|ψ|.
  const Configuration x0{Vec3(3.0, 1.0, -2.0)};
  const double direct = h.hessian(x0).cwiseAbs().maxCoeff() / std::abs(eval_psi(h, x0));
  const auto tiny = apriori_residual(h, x0, 1e-4, 2e-4, 200);
  CHECK(tiny.ratio == doctest::Approx(direct).epsilon(1e-3));
}

TEST_CASE("regular-part smoothness probe") {
  const std::vector<double> radii{0.1, 0.03, 0.01, 0.003, 0.001};
  // Hydrogen ground state: ψ = N e^{F2} exactly, so the regular part is constant.
  const auto h1 = normalize(WavefunctionModel(Hydrogenic{1, 0, 0, 1.0}));
  const auto p1 = phi3_smoothness_probe(h1, {Vec3::Zero()}, radii);
  CHECK_FALSE(p1.unbounded);
  for (const auto& row : p1.rows) CHECK(row.quotient <= 1e-10);

  const auto h2 = normalize(WavefunctionModel(Hydrogenic{2, 0, 0, 1.0}));
  const auto p2 = phi3_smoothness_probe(h2, {Vec3::Zero()}, radii);
  CHECK_FALSE(p2.unbounded);
  CHECK(p2.rows.back().quotient > 0.0);
  CHECK(p2.rows.back().quotient <= 2.0 * p2.rows.front().quotient);

  // Nuclear cusp of the trial product is right: bounded across the nucleus.
  const auto he = helium_product();
  const Configuration at_nucleus{Vec3::Zero(), Vec3(0.7, -0.3, 0.4)};
  CHECK_FALSE(phi3_smoothness_probe(he, at_nucleus, radii).unbounded);
  // Wrong exponent: gradient jump across the nucleus.
  CHECK(phi3_smoothness_probe(helium_product(0.84), at_nucleus, radii).unbounded);
  // No electron-electron cusp in the product: jump across the coincidence.
  const Configuration coincide{Vec3(0.5, 0.2, 0.1), Vec3(0.5, 0.2, 0.1)};
  CHECK(phi3_smoothness_probe(he, coincide, radii).unbounded);

  const auto pz = phi3_smoothness_probe(he.scaled(0.0), at_nucleus, radii);
  for (const auto& row : pz.rows) CHECK(row.quotient == 0.0);

  // Away from singular points: quotient → sup_u |D²φ u| over the probe directions.
  const Configuration smooth{Vec3(0.6, 0.2, -0.3), Vec3(-0.4, 0.5, 0.9)};
  auto phi = [&](const Configuration& y) {
    return eval_psi(he, y) * std::exp(-f2(y, 2.0) - f3(y, 2.0));
  };
  Eigen::MatrixXd hess(6, 6);
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) hess(a, b) = fd_second(phi, smooth, a, b, 2e-3);
  double expect = 0.0;
  for (int a = 0; a < 6; ++a) expect = std::max(expect, hess.col(a).norm());
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(6).normalized(), alt(6);
  for (int a = 0; a < 6; ++a) alt[a] = a % 2 == 0 ? 1.0 : -1.0;
  alt.normalize();
  expect = std::max({expect, (hess * diag).norm(), (hess * alt).norm()});
  const auto ps = phi3_smoothness_probe(he, smooth, {1e-4});
  CHECK(ps.rows[0].quotient == doctest::Approx(expect).epsilon(1e-5));
}

TEST_CASE("subtraction removes the nuclear divergence of the Hessian") {
  const auto h = normalize(WavefunctionModel(Hydrogenic{1, 0, 0, 1.0}));
  const auto r = apriori_residual(h, {Vec3::Zero()}, 1.0, 2.0, 10000, 1);
  MESSAGE("ratio " << r.ratio << " -> " << r.refined_ratio << ", raw sup " << r.raw_sup << " -> "
                   << r.refined_raw_sup);
  CHECK(std::abs(r.refined_ratio - r.ratio) < 0.1 * r.ratio);
  // Under the same yardstick the raw sup has not settled.
  CHECK(r.refined_raw_sup > 1.1 * r.raw_sup);
  // It follows 1/min|x| over the samples: over 256 times the samples the
  // minimum radius shrinks about 6x.
  const auto wide = apriori_residual(h, {Vec3::Zero()}, 1.0, 2.0, 64000, 1);
  const auto narrow = apriori_residual(h, {Vec3::Zero()}, 1.0, 2.0, 1000, 1);
  CHECK(wide.refined_raw_sup > 2.0 * narrow.raw_sup);
  CHECK(std::abs(wide.refined_ratio - narrow.ratio) < 0.1 * narrow.ratio);
}

TEST_CASE("library finite-difference Hessian of F_cut") {
  for (std::uint64_t k = 0; k < 20; ++k) {
    const Configuration c = random_configuration(3, 2.6, 41, k);
    const Eigen::MatrixXd an = f_cut(c, 3.0).hessian;
    const Eigen::MatrixXd fd = fcut_hessian_fd(c, 3.0);
    for (int a = 0; a < 9; ++a)
      for (int b = 0; b < 9; ++b)
        CHECK(std::abs(an(a, b) - fd(a, b)) <= 1e-5 * std::max(std::abs(an(a, b)), 1e-3));
  }
}

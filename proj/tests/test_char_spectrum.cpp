#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"

using namespace wavefront;
using wavefront::testing::c_star;
using wavefront::testing::c_star2;
using wavefront::testing::ref;

namespace {

/// Sign changes of chi on a fine grid, refined by bisection.
std::vector<double> bisection_roots(const Quasipolynomial& qp, double lo, double hi, int n = 200000) {
    std::vector<double> out;
    double a = lo, fa = qp(lo);
    for (int i = 1; i <= n; ++i) {
        const double b = lo + (hi - lo) * i / n, fb = qp(b);
        if (fa * fb < 0.0) {
            double x0 = a, x1 = b, f0 = fa;
            for (int k = 0; k < 200; ++k) {
                const double m = 0.5 * (x0 + x1), fm = qp(m);
                if (f0 * fm <= 0.0) x1 = m;
                else {
                    x0 = m;
                    f0 = fm;
                }
            }
            out.push_back(0.5 * (x0 + x1));
        }
        a = b;
        fa = fb;
    }
    return out;
}

}  // namespace

TEST(CharSpectrum, BaseRoots) {
    auto [a, b] = base_roots(0.0);
    EXPECT_NEAR(a, -1.0, 1e-15);
    EXPECT_NEAR(b, 1.0, 1e-15);
    for (double c : {0.1, 0.75, 3.0, 40.0}) {
        auto [z1, z2] = base_roots(c);
        EXPECT_NEAR(z1 * z2, -1.0, 1e-13);
        EXPECT_NEAR(z1, (c - std::sqrt(c * c + 4.0)) / 2.0, 1e-13);
    }
    auto [z1, z2] = base_roots(0.75);
    // sqrt(4.5625) = 2.1360009363...
    EXPECT_NEAR(z1, -0.69300047, 1e-8);
    EXPECT_NEAR(z2, 1.44300047, 1e-8);
}

TEST(CharSpectrum, NoDelayTermGivesQuadraticRoots) {
    const auto roots = real_roots(Quasipolynomial::make(0.75, 2.0, 0.0));
    ASSERT_EQ(roots.size(), 2u);
    auto [z1, z2] = base_roots(0.75);
    EXPECT_NEAR(roots[0].value, z1, 1e-12);
    EXPECT_NEAR(roots[1].value, z2, 1e-12);
}

TEST(CharSpectrum, TwoPositiveRootsAgreeWithBisection) {
    const auto qp = Quasipolynomial::make(0.75, 2.0, 3.0);
    const auto roots = real_roots(qp);
    std::vector<double> pos;
    for (const auto& r : roots)
        if (r.value > 0.0) pos.push_back(r.value);
    ASSERT_EQ(pos.size(), 2u);
    const auto oracle = bisection_roots(qp, 0.01, 5.0);
    ASSERT_EQ(oracle.size(), 2u);
    for (int i = 0; i < 2; ++i) {
        EXPECT_NEAR(pos[i], oracle[i], 1e-10);
        EXPECT_LT(std::abs(qp(pos[i])), 1e-10);
    }
}

TEST(CharSpectrum, ChiKappaHasThreeRealRootsBelowCriticalSpeed) {
    const auto qp = Quasipolynomial::make(0.73, 2.0, -0.25);
    const auto roots = real_roots(qp);
    int neg = 0, pos = 0;
    for (const auto& r : roots) (r.value < 0.0 ? neg : pos) += r.multiplicity;
    EXPECT_EQ(neg, 2);
    EXPECT_EQ(pos, 1);
    const auto oracle = bisection_roots(qp, -20.0, 10.0, 600000);
    ASSERT_EQ(oracle.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(roots[i].value, oracle[i], 1e-9);
}

TEST(CharSpectrum, CriticalSpeeds) {
    const auto a = critical_speed(3.0, 2.0, Branch::positive_double_root);
    EXPECT_NEAR(a.c, 0.712278719101144, 1e-10);
    EXPECT_NEAR(a.z_double, 0.9268022164, 1e-8);
    const auto qp = Quasipolynomial::make(a.c, 2.0, 3.0);
    EXPECT_LT(std::abs(qp(a.z_double)), 1e-12);
    EXPECT_LT(std::abs(qp.d1(a.z_double)), 1e-12);
    const auto b = critical_speed(-0.25, 2.0, Branch::negative_double_root);
    EXPECT_NEAR(b.c, 0.751303971085185, 1e-10);
    EXPECT_NEAR(b.z_double, -1.5484351508, 1e-8);
}

TEST(CharSpectrum, CriticalSpeedWithoutDelay) {
    for (double k : {2.0, 3.0, 5.0}) {
        const auto r = critical_speed(k, 0.0, Branch::positive_double_root);
        EXPECT_NEAR(r.c, 2.0 * std::sqrt(k - 1.0), 1e-10);
        EXPECT_NEAR(r.z_double, r.c / 2.0, 1e-8);
    }
    EXPECT_THROW(critical_speed(0.5, 2.0, Branch::positive_double_root), Error);
    EXPECT_THROW(critical_speed(0.5, 2.0, Branch::negative_double_root), Error);
}

TEST(CharSpectrum, AdmissibleRegion) {
    EXPECT_TRUE(in_domain_dl(ref(), 2.0, 0.73).in_dl);
    const auto below = in_domain_dl(ref(), 2.0, 0.70);
    EXPECT_FALSE(below.in_dl);
    EXPECT_EQ(below.positive_roots_chi0, 0);
    const auto above = in_domain_dl(ref(), 2.0, 0.80);
    EXPECT_FALSE(above.in_dl);
    EXPECT_EQ(above.negative_roots_chi_kappa, 0);
}

TEST(CharSpectrum, Gamma) {
    const double cs = c_star();
    const auto ctx = make_context(ref(), 2.0, cs);
    const double mu = *ctx.mu1;
    EXPECT_NEAR(gamma(ref(), 2.0, cs), 1.0 / (1.0 + mu * mu), 1e-6);
    EXPECT_NEAR(gamma(ref(), 2.0, cs), 0.538, 5e-4);
    EXPECT_NEAR(gamma(ref(), 2.0, 0.73), 0.542083, 1e-6);
    EXPECT_THROW(gamma(ref(), 2.0, 0.5), Error);
    for (int i = 0; i <= 20; ++i) {
        const double c = cs + (c_star2() - cs) * i / 20.0 * 0.999;
        EXPECT_GT(gamma(ref(), 2.0, c), gamma1_reference(c)) << c;
    }
    EXPECT_NEAR(gamma1_reference(0.73), (1.0 + 1.53 * 0.5329) / (2.55 + 1.53 * 0.5329), 1e-15);
    EXPECT_NEAR(gamma1_reference(0.73), 0.5394, 1e-4);
}

TEST(CharSpectrum, Xi) {
    EXPECT_NEAR(xi(0.0, 0.73), 1.0, 1e-15);
    for (double c = 0.1; c < 3.0; c += 0.1) {
        const double v = xi(2.0, c);
        EXPECT_GE(v, std::exp(-2.0));
        EXPECT_LE(v, 1.0);
    }
    EXPECT_NEAR(xi(2.0, 0.73), 0.524871, 1e-6);
}

TEST(CharSpectrum, ComplexRootsPolynomialCase) {
    const auto r = complex_roots_in_rect(Quasipolynomial::make(0.73, 2.0, 0.0), Rect{-5.0, 5.0, 0.5, 8.0});
    EXPECT_TRUE(r.roots.empty());
    EXPECT_EQ(r.winding_count, 0);
}

TEST(CharSpectrum, ComplexRootsOfChiKappa) {
    const auto ctx = make_context(ref(), 2.0, 0.73);
    const double band = 2.0 * std::numbers::pi / ctx.tau;
    const auto strip = complex_roots_in_rect(ctx.chi_kappa(), Rect{-10.0, 0.0, 0.01, band - 0.01});
    EXPECT_TRUE(strip.roots.empty());
    const auto wide = complex_roots_in_rect(ctx.chi_kappa(), Rect{-5.0, 0.0, -8.0, 8.0});
    EXPECT_EQ(wide.winding_count, 4);
    for (auto z : wide.roots) {
        EXPECT_LT(std::abs(ctx.chi_kappa()(z)), 1e-10);
        if (std::abs(z.imag()) > 1e-9) {
            EXPECT_LT(z.real(), *ctx.lambda2);
        }
    }
}

TEST(CharSpectrum, WindingCountMatchesNewtonRoots) {
    // Independent count: roots reached by Newton from a seed lattice.
    const auto qp = Quasipolynomial::make(0.73, 2.0, -0.25);
    std::vector<std::complex<double>> found;
    for (double re = -5.0; re <= 0.0; re += 0.25) {
        for (double im = -8.0; im <= 8.0; im += 0.25) {
            std::complex<double> z(re, im);
            for (int k = 0; k < 60; ++k) z -= qp(z) / qp.d1(z);
            if (!(std::abs(qp(z)) < 1e-12) || z.real() < -5.0 || z.real() > 0.0 || std::abs(z.imag()) > 8.0) continue;
            bool dup = false;
            for (auto w : found) dup = dup || std::abs(w - z) < 1e-8;
            if (!dup) found.push_back(z);
        }
    }
    const auto r = complex_roots_in_rect(qp, Rect{-5.0, 0.0, -8.0, 8.0});
    EXPECT_EQ(static_cast<int>(found.size()), r.winding_count);
}

TEST(CharSpectrum, Contexts) {
    const auto a = make_context(ref(), 2.0, c_star());
    EXPECT_TRUE(a.mu_double);
    EXPECT_NEAR(*a.mu1, 0.9268022164, 1e-6);
    EXPECT_NEAR(*a.mu2, 0.9268022164, 1e-6);
    EXPECT_LE(*a.lambda2, *a.lambda1);
    EXPECT_LT(*a.lambda1, 0.0);
    EXPECT_NEAR(a.z1 * a.z2, -1.0, 1e-14);
    const auto b = make_context(ref(), 2.0, 0.8);
    EXPECT_FALSE(b.lambda1.has_value());
    EXPECT_FALSE(b.lambda2.has_value());
    EXPECT_EQ(b.regime, Regime::oscillatory);
    ASSERT_TRUE(b.oscillatory_mode.has_value());
    EXPECT_NEAR(b.oscillatory_mode->real(), -1.415294, 1e-6);
    EXPECT_NEAR(std::abs(b.oscillatory_mode->imag()), 0.368998, 1e-6);
    const auto c = make_context(ref(), 2.0, 0.73);
    EXPECT_NEAR(*c.mu1, 1.083940, 1e-6);
    EXPECT_NEAR(*c.mu2, 0.779319, 1e-6);
    EXPECT_NEAR(*c.lambda1, -1.333587, 1e-6);
    EXPECT_NEAR(*c.lambda2, -1.893329, 1e-6);
}

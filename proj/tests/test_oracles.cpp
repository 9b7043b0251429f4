#include "bores/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace bores;
using std::numbers::pi;

namespace {

Vec2 fd_gradient(const ExactField& f, double x, double y, double h = 1e-5) {
    return {(f.value(x + h, y) - f.value(x - h, y)) / (2.0 * h), (f.value(x, y + h) - f.value(x, y - h)) / (2.0 * h)};
}

Vec2 polar(double r, double t) { return {r * std::cos(t), r * std::sin(t)}; }

} // namespace

TEST(StokesCorner, ValuesOnTheAxisAndOutsideTheWedge) {
    const ExactField u = stokes_corner();
    EXPECT_NEAR(u.value(0.0, -1.0), -std::sqrt(2.0) / 3.0, 1e-15);
    EXPECT_EQ(u.value(0.0, 1.0), 0.0);
    EXPECT_EQ(u.value(1.0, 0.0), 0.0);
    const Vec2 p = polar(0.8, 7.0 * pi / 6.0);
    EXPECT_NEAR(u.value(p.x, p.y), 0.0, 1e-15);
    EXPECT_EQ(u.phase(0.0, -1.0), Phase::minus);
    EXPECT_EQ(u.phase(0.0, 1.0), Phase::plus);
}

TEST(StokesCorner, GradientSquaredIsHalfTheRadius) {
    const ExactField u = stokes_corner();
    for (double t = 7.0 * pi / 6.0 + 0.01; t < 11.0 * pi / 6.0; t += 0.1) {
        for (double r : {0.1, 0.5, 2.0}) {
            const Vec2 p = polar(r, t);
            EXPECT_NEAR(norm2(u.gradient(p.x, p.y)), r / 2.0, 1e-13 * (1.0 + r));
        }
    }
    // on the two boundary rays the free boundary condition reads |grad u|^2 = -y
    for (double t : {7.0 * pi / 6.0 + 1e-12, 11.0 * pi / 6.0 - 1e-12}) {
        const Vec2 p = polar(0.6, t);
        EXPECT_NEAR(norm2(u.gradient(p.x, p.y)), -p.y, 1e-11);
    }
}

TEST(StokesCorner, IsHarmonicInsideTheWedge) {
    const ExactField u = stokes_corner();
    const double h = 1e-3;
    for (double t : {4.0, 4.5, 5.2}) {
        const Vec2 p = polar(0.5, t);
        const double lap = (u.value(p.x + h, p.y) + u.value(p.x - h, p.y) + u.value(p.x, p.y + h) +
                            u.value(p.x, p.y - h) - 4.0 * u.value(p.x, p.y)) / (h * h);
        EXPECT_NEAR(lap, 0.0, 1e-5);
    }
}

TEST(StokesCorner, RotationMovesTheSupport) {
    const ExactField u = stokes_corner({1, 2});
    // rotating the argument by pi/2 moves the axis from 3pi/2 to pi
    EXPECT_NEAR(u.value(-1.0, 0.0), -std::sqrt(2.0) / 3.0, 1e-15);
    EXPECT_EQ(u.value(0.0, -1.0), 0.0);
}

TEST(Oracles, GradientsMatchDifferences) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const FluidPair f{4.0, 1.0, false};
    const std::vector<ExactField> fields{stokes_corner(),         stokes_corner({1, 3}), mu_harmonic(2.5, 0.7, 1.0),
                                         linear_field(0.3, -1.2), product_field(),       saddle_field(),
                                         translated(product_field(), 0.2, -0.1), laminar(f, 0.5)};
    for (const auto& u : fields) {
        for (int i = 0; i < 50; ++i) {
            const double x = U(rng), y = U(rng);
            if (std::abs(y) < 1e-3 && u.name == "laminar") continue;
            const Vec2 g = u.gradient(x, y), d = fd_gradient(u, x, y);
            if (u.phase(x + 1e-4, y) != u.phase(x - 1e-4, y) || u.phase(x, y + 1e-4) != u.phase(x, y - 1e-4)) continue;
            EXPECT_NEAR(g.x, d.x, 1e-8) << u.name << " at " << x << ", " << y;
            EXPECT_NEAR(g.y, d.y, 1e-8) << u.name << " at " << x << ", " << y;
        }
    }
}

TEST(Oracles, HomogeneousFieldsScale) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (const auto& u : {stokes_corner(), mu_harmonic(1.75), product_field(), saddle_field(), linear_field(1.0, 2.0)}) {
        ASSERT_TRUE(std::isfinite(u.degree));
        for (int i = 0; i < 20; ++i) {
            const double x = U(rng), y = U(rng), s = 0.1 + U(rng) * U(rng) + 1.0;
            const double lhs = u.value(s * x, s * y), rhs = std::pow(s, u.degree) * u.value(x, y);
            EXPECT_NEAR(lhs, rhs, 1e-12 * (1.0 + std::abs(rhs))) << u.name;
        }
    }
}

TEST(Oracles, LaminarWallValues) {
    const FluidPair f{4.0, 1.0, false};
    const double lambda = 0.4;
    const ExactField u = laminar(f, lambda);
    EXPECT_NEAR(u.value(0.0, -lambda), 2.0 * lambda, 1e-15);
    EXPECT_NEAR(u.value(3.0, 1.0 - lambda), -(1.0 - lambda), 1e-15);
    EXPECT_EQ(u.value(1.0, 0.0), 0.0);
    EXPECT_EQ(u.phase(0.0, -0.1), Phase::plus);
    EXPECT_EQ(u.phase(0.0, 0.1), Phase::minus);
    const auto [up, down] = conjugate_profiles(f, lambda);
    const double Hd = conjugate_downstream(f);
    EXPECT_NEAR(down.value(0.0, Hd - lambda), 0.0, 1e-15);
    EXPECT_NEAR(down.value(0.0, -lambda), up.value(0.0, -lambda), 1e-14);
    EXPECT_NEAR(down.value(0.0, 1.0 - lambda), up.value(0.0, 1.0 - lambda), 1e-14);
}

TEST(Oracles, NegationSwapsPhases) {
    const ExactField u = saddle_field();
    const ExactField v = negated(u);
    for (auto [x, y] : {std::pair{0.5, 0.1}, std::pair{0.1, 0.5}}) {
        EXPECT_EQ(v.value(x, y), -u.value(x, y));
        EXPECT_NE(v.phase(x, y), u.phase(x, y));
    }
    EXPECT_EQ(v.rho_plus, u.rho_minus);
    EXPECT_EQ(v.rho_minus, u.rho_plus);
}

TEST(Oracles, PositiveAndNegativePartsRecombine) {
    const ExactField u = product_field();
    const ExactField p = positive_part(u), m = negative_part(u);
    for (auto [x, y] : {std::pair{0.5, 0.3}, std::pair{-0.5, 0.3}, std::pair{0.2, -0.7}}) {
        EXPECT_GE(p.value(x, y), 0.0);
        EXPECT_GE(m.value(x, y), 0.0);
        EXPECT_DOUBLE_EQ(p.value(x, y) - m.value(x, y), u.value(x, y));
    }
}

TEST(Oracles, PerturbationKeepsThePhase) {
    const ExactField u = linear_field(0.0, 1.0);
    const ExactField v = perturbed(u, 0.1, product_field());
    EXPECT_DOUBLE_EQ(v.value(0.5, 0.2), 0.2 + 0.1 * 0.1);
    EXPECT_EQ(v.phase(0.5, -0.01), u.phase(0.5, -0.01));
}

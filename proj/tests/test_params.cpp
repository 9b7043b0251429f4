#include "bores/errors.hpp"
#include "bores/params.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace bores;

namespace {

// independent forms: (a - b)/(a + b) = (a - b)^2 / (a^2 - b^2), and a/(a + b) = 1/(1 + b/a)
double froude_rationalized(double r1, double r2) { return (r1 - 2.0 * std::sqrt(r1 * r2) + r2) / (r1 - r2); }
double downstream_ratio(double r1, double r2) { return 1.0 / (1.0 + std::sqrt(r2 / r1)); }

} // namespace

TEST(Params, FroudeAndDownstreamAtFourToOne) {
    const FluidPair f{4.0, 1.0, false};
    EXPECT_DOUBLE_EQ(front_froude(f), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(conjugate_downstream(f), 2.0 / 3.0);
}

TEST(Params, BoussinesqLimit) {
    const FluidPair f{1.0, 1.0, true};
    EXPECT_EQ(front_froude(f), 0.0);
    EXPECT_DOUBLE_EQ(conjugate_downstream(f), 0.5);
}

TEST(Params, ClosedFormsOnRandomPairs) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> r1d(1.0, 20.0), ratio(0.01, 0.99);
    for (int i = 0; i < 200; ++i) {
        FluidPair f{r1d(rng), 0.0, false};
        f.rho2 = f.rho1 * ratio(rng);
        EXPECT_NEAR(front_froude(f), froude_rationalized(f.rho1, f.rho2), 1e-14);
        EXPECT_NEAR(conjugate_downstream(f), downstream_ratio(f.rho1, f.rho2), 1e-14);
    }
}

TEST(Params, ValidateRejectsBadPairs) {
    EXPECT_THROW((FluidPair{-1.0, 1.0, false}.validate()), parameter_error);
    EXPECT_THROW((FluidPair{1.0, 2.0, false}.validate()), parameter_error);
    EXPECT_THROW((FluidPair{1.0, 1.0, false}.validate()), parameter_error);
    EXPECT_THROW((FluidPair{2.0, 1.0, true}.validate()), parameter_error);
    EXPECT_NO_THROW((FluidPair{2.0, 1.0, false}.validate()));
}

TEST(Params, ConjugateRootsAreLambdaAndDownstreamDepth) {
    const FluidPair f{4.0, 1.0, false};
    for (double lambda : {0.3, 0.5, 0.8}) {
        const auto roots = conjugate_roots(f, lambda, 100000);
        ASSERT_EQ(roots.size(), 2u) << lambda;
        const double lo = std::min(lambda, 2.0 / 3.0), hi = std::max(lambda, 2.0 / 3.0);
        EXPECT_NEAR(roots[0], lo, 1e-10);
        EXPECT_NEAR(roots[1], hi, 1e-10);
    }
}

TEST(Params, DownstreamDepthSharesTheFlowForce) {
    for (const FluidPair& f : {FluidPair{4.0, 1.0, false}, FluidPair{1.5, 1.0, false}, FluidPair{1.0, 1.0, true}}) {
        for (double lambda : {0.2, 0.45, 0.7}) {
            const double S0 = upstream_flow_force(f, lambda);
            EXPECT_NEAR(laminar_flow_force(f, lambda, lambda), S0, 1e-13 * std::abs(S0));
            EXPECT_NEAR(laminar_flow_force(f, lambda, conjugate_downstream(f)), S0, 1e-13 * std::abs(S0));
        }
    }
}

TEST(Params, UpstreamFlowForceClosedForm) {
    // rho1 (lambda + lambda^2 / 2F^2) + rho2 (h2 - h2^2 / 2F^2) at 4:1, F^2 = 1/3
    const FluidPair f{4.0, 1.0, false};
    const double l = 0.4, h2 = 0.6;
    EXPECT_NEAR(upstream_flow_force(f, l), 4.0 * (l + 1.5 * l * l) + (h2 - 1.5 * h2 * h2), 1e-14);
}

TEST(Params, JumpFunctionSignChangesAcrossTheTrivialDepth) {
    const FluidPair f{4.0, 1.0, false};
    const double lambda = 0.4;
    EXPECT_LT(jump_function(f, lambda, 0.55) * jump_function(f, lambda, 0.75), 0.0);
    EXPECT_NEAR(jump_function(f, lambda, 2.0 / 3.0), 0.0, 1e-13);
}

TEST(Params, ConjugateHeightAtZeroEpsIsExact) {
    for (const FluidPair& f : {FluidPair{4.0, 1.0, false}, FluidPair{1.5, 1.0, false}}) {
        const double Hd = conjugate_downstream(f);
        for (double lambda : {0.3, Hd, 0.8}) EXPECT_EQ(conjugate_height(f, lambda, 0.0).H, Hd);
    }
}

TEST(Params, ConjugateHeightFollowsEps) {
    const FluidPair f{4.0, 1.0, false};
    const double lambda = 0.5, eps = 1e-5;
    const auto h = conjugate_height(f, lambda, eps);
    EXPECT_NEAR(jump_function(f, lambda, h.H, eps), 0.0, 1e-13);
    const auto hm = conjugate_height(f, lambda, -eps);
    const auto h0 = conjugate_height(f, lambda, 0.0);
    EXPECT_NEAR((h.H - hm.H) / (2.0 * eps), h0.dH_deps, 1e-5 * std::abs(h0.dH_deps));
}

TEST(Params, ConjugateProfiles) {
    const FluidPair f{4.0, 1.0, false};
    const ConjugateState c = conjugate_state(f, 0.5);
    const double Hd = 2.0 / 3.0;
    EXPECT_NEAR(c.psi_down(Hd - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(c.psi_down_y(-0.25), -(0.5 / Hd) * 2.0, 1e-15);
    EXPECT_NEAR(c.psi_up(-0.5), 0.5 * 2.0, 1e-15);
    EXPECT_NEAR(c.psi_up(0.5), -0.5, 1e-15);
}

TEST(Params, SliceFlowForceOfLaminarProfile) {
    // piecewise-constant psi_y and a linear potential: the trapezoid rule is exact
    const FluidPair f{4.0, 1.0, false};
    const double lambda = 0.4;
    const ConjugateState c = conjugate_state(f, lambda);
    Slice s;
    s.lambda = lambda;
    const double H = c.H_down, top = 1.0 - lambda;
    for (int i = 0; i <= 8; ++i) {
        const double y = -lambda + (H) * i / 8.0;
        s.lower.y.push_back(y);
        s.lower.psi_x.push_back(0.0);
        s.lower.psi_y.push_back(c.psi_down_y(y - 1e-12));
    }
    for (int i = 0; i <= 8; ++i) {
        const double y = H - lambda + (top - (H - lambda)) * i / 8.0;
        s.upper.y.push_back(y);
        s.upper.psi_x.push_back(0.0);
        s.upper.psi_y.push_back(c.psi_down_y(y + 1e-12));
    }
    EXPECT_NEAR(flow_force(s, f, front_froude(f)), upstream_flow_force(f, lambda), 1e-12);
}

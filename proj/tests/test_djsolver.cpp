#include "bores/djsolver.hpp"
#include "bores/errors.hpp"
#include "bores/oracles.hpp"
#include "bores/params.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace bores;

namespace {

const FluidPair four_to_one{4.0, 1.0, false};

BoreState small_bore(double offset, int nq = 161, int np = 9) {
    const FrontConfig cfg = make_front_config(four_to_one, conjugate_downstream(four_to_one) + offset, 16.0, nq, np, np);
    return newton_solve(tanh_state(cfg, four_to_one), cfg, four_to_one);
}

} // namespace

TEST(DJSolver, LaminarStateIsExactAtTheTrivialDepth) {
    for (const FluidPair& f : {FluidPair{4.0, 1.0, false}, FluidPair{1.5, 1.0, false}, FluidPair{1.0, 1.0, true}}) {
        for (auto [nq, np1, np2] : {std::tuple{21, 3, 3}, {81, 5, 9}, {161, 9, 9}}) {
            const FrontConfig cfg = make_front_config(f, conjugate_downstream(f), 8.0, nq, np1, np2);
            EXPECT_LE(residual_norm(assemble_residual(laminar_state(cfg, f), cfg, f)), 1e-12);
        }
    }
}

TEST(DJSolver, LaminarStateIsNotASolutionAwayFromTheTrivialDepth) {
    const FrontConfig cfg = make_front_config(four_to_one, 0.5, 8.0, 81, 5, 5);
    EXPECT_GT(residual_norm(assemble_residual(laminar_state(cfg, four_to_one), cfg, four_to_one)), 1e-3);
}

TEST(DJSolver, ConfigValidation) {
    FrontConfig cfg = make_front_config(four_to_one, 0.5);
    EXPECT_NO_THROW(cfg.validate(four_to_one));
    cfg.nq = 4;
    EXPECT_THROW(cfg.validate(four_to_one), parameter_error);
    EXPECT_THROW(make_front_config(four_to_one, 1.2), error);
}

TEST(DJSolver, JacobianMatchesDifferences) {
    const FrontConfig cfg = make_front_config(four_to_one, 0.6, 8.0, 21, 4, 4);
    BoreState s = tanh_state(cfg, four_to_one);
    s.eps = 1e-3;
    Triplets J;
    const auto r0 = assemble_residual(s, cfg, four_to_one, &J);
    std::vector<double> dense(r0.size() * r0.size(), 0.0);
    for (std::size_t i = 0; i < J.vals.size(); ++i) dense[J.rows[i] * r0.size() + J.cols[i]] += J.vals[i];
    const auto x0 = pack(s);
    double worst = 0.0;
    for (std::size_t c = 0; c < x0.size(); c += 7) {
        const double h = 1e-7;
        auto x = x0;
        x[c] += h;
        BoreState p = s;
        unpack(x, p);
        const auto rp = assemble_residual(p, cfg, four_to_one);
        x[c] -= 2.0 * h;
        unpack(x, p);
        const auto rm = assemble_residual(p, cfg, four_to_one);
        for (std::size_t r = 0; r < r0.size(); ++r) {
            worst = std::max(worst, std::abs((rp[r] - rm[r]) / (2.0 * h) - dense[r * r0.size() + c]));
        }
    }
    EXPECT_LT(worst, 1e-6);
}

TEST(DJSolver, NewtonConvergesOnABore) {
    const FrontConfig cfg = make_front_config(four_to_one, conjugate_downstream(four_to_one) + 0.05, 16.0, 161, 9, 9);
    NewtonReport rep;
    const BoreState s = newton_solve(tanh_state(cfg, four_to_one), cfg, four_to_one, &rep);
    EXPECT_LE(rep.residual, cfg.newton_tol);
    EXPECT_LE(rep.iterations, 10);
    EXPECT_LT(std::abs(s.eps), 1e-4);
    const auto eta = s.eta();
    EXPECT_NEAR(eta.front(), 0.0, 1e-12);
    EXPECT_NEAR(eta.back(), conjugate_downstream(four_to_one) - cfg.lambda, 1e-4);
}

TEST(DJSolver, FlowForceIsNearlyColumnInvariant) {
    const BoreState s = small_bore(-0.05);
    const double F2 = front_froude(four_to_one);
    EXPECT_LT(flow_force_spread(s, four_to_one, F2), 1e-5);
    const auto S = column_flow_force(s, four_to_one, F2);
    EXPECT_NEAR(S.front(), upstream_flow_force(four_to_one, s.grid.lambda), 1e-5);
}

TEST(DJSolver, StateJsonRoundTripIsExact) {
    const BoreState s = small_bore(0.05, 41, 5);
    const FrontConfig cfg = make_front_config(four_to_one, s.grid.lambda, 16.0, 41, 5, 5);
    const StoredState back = state_from_json(state_to_json(s, cfg, four_to_one));
    EXPECT_EQ(back.state.H1, s.H1);
    EXPECT_EQ(back.state.H2, s.H2);
    EXPECT_EQ(back.state.eps, s.eps);
    EXPECT_EQ(back.cfg, cfg);
    EXPECT_EQ(back.fluids, four_to_one);
}

TEST(DJSolver, StateJsonRejectsForeignDocuments) {
    EXPECT_THROW(state_from_json("not json"), error);
    EXPECT_THROW(state_from_json(R"({"schema":"other","version":1})"), error);
    EXPECT_THROW(state_from_json(R"({"schema":"bores.state","version":99})"), error);
}

TEST(PhysicalInterpolant, ReproducesTheLaminarProfile) {
    const FluidPair f = four_to_one;
    const double lambda = conjugate_downstream(f);
    const FrontConfig cfg = make_front_config(f, lambda, 8.0, 41, 5, 5);
    const PhysicalInterpolant in(laminar_state(cfg, f), f);
    const ExactField exact = laminar(f, lambda);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> xs(-8.0, 8.0), ys(-lambda, 1.0 - lambda);
    for (int i = 0; i < 200; ++i) {
        const double x = xs(rng), y = ys(rng);
        EXPECT_NEAR(in.psi(x, y), exact.value(x, y), 1e-12);
        const Vec2 g = in.grad(x, y), ge = exact.gradient(x, y);
        EXPECT_NEAR(g.x, ge.x, 1e-12);
        EXPECT_NEAR(g.y, ge.y, 1e-12);
        EXPECT_EQ(in.layer(x, y), y <= 0.0 ? 1 : 2);
    }
}

TEST(PhysicalInterpolant, GradientMatchesDifferencesOnABore) {
    const BoreState s = small_bore(0.05);
    const PhysicalInterpolant in(s, four_to_one);
    const double h = 1e-6;
    for (double x : {-3.0, -0.5, 0.0, 1.7, 5.0}) {
        for (double dy : {-0.2, -0.05, 0.05, 0.2}) {
            const double y = in.eta(x) + dy;
            const Vec2 g = in.grad(x, y);
            EXPECT_NEAR(g.x, (in.psi(x + h, y) - in.psi(x - h, y)) / (2 * h), 1e-6);
            EXPECT_NEAR(g.y, (in.psi(x, y + h) - in.psi(x, y - h)) / (2 * h), 1e-6);
        }
    }
}

TEST(PhysicalInterpolant, InterfaceIsTheZeroStreamline) {
    const BoreState s = small_bore(0.05);
    const PhysicalInterpolant in(s, four_to_one);
    for (double x : {-4.0, -1.0, 0.3, 2.5}) EXPECT_NEAR(in.psi(x, in.eta(x)), 0.0, 1e-12);
}

TEST(PhysicalInterpolant, RejectsPointsOutsideTheChannel) {
    const BoreState s = small_bore(0.05, 41, 5);
    const PhysicalInterpolant in(s, four_to_one);
    EXPECT_FALSE(in.contains(0.0, 5.0));
    EXPECT_THROW(in.psi(0.0, 5.0), domain_error);
    EXPECT_THROW(in.psi(100.0, 0.0), domain_error);
}

TEST(PhysicalInterpolant, ReconstructionGrid) {
    const BoreState s = small_bore(0.05, 41, 5);
    const FrontConfig cfg = make_front_config(four_to_one, s.grid.lambda, 16.0, 41, 5, 5);
    const PhysicalField pf = reconstruct_physical(s, cfg, four_to_one, {-1.0, 0.0, 1.0}, {-0.3, 0.0, 0.2});
    EXPECT_EQ(pf.psi.size(), 9u);
    EXPECT_THROW(reconstruct_physical(s, cfg, four_to_one, {0.0}, {2.0}), domain_error);
}

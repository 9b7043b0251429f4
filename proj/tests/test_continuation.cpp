#include "bores/continuation.hpp"
#include "bores/errors.hpp"
#include "bores/params.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace bores;

namespace {

MonitorRecord record(double slope, double gap_upper, double gap_lower, double stagnation) {
    MonitorRecord m;
    m.max_slope = slope;
    m.gap_upper = gap_upper;
    m.gap_lower = gap_lower;
    m.stagnation = stagnation;
    return m;
}

Branch synthetic(Direction d, int n, auto&& make) {
    Branch b;
    b.direction = d;
    for (int i = 0; i < n; ++i) b.records.push_back(make(i));
    return b;
}

// Interface that meets the lid (depression) at gap g with slope s on both sides.
InterfaceTrace wedge(double lambda, double g, double s) {
    InterfaceTrace t;
    t.lambda = lambda;
    t.gap = g;
    const double h2 = 1.0 - lambda;
    for (int i = -2000; i <= 2000; ++i) {
        const double x = i * 1e-3;
        t.x.push_back(x);
        t.eta.push_back(h2 - g - s * std::abs(x));
    }
    return t;
}

} // namespace

TEST(Continuation, DirectionNames) {
    EXPECT_EQ(direction_from_string(to_string(Direction::elev)), Direction::elev);
    EXPECT_EQ(direction_from_string(to_string(Direction::depr)), Direction::depr);
    EXPECT_THROW(direction_from_string("sideways"), error);
}

TEST(Continuation, PolicyValidation) {
    StepPolicy p;
    EXPECT_NO_THROW(p.validate());
    p.min_step = 1.0;
    EXPECT_THROW(p.validate(), parameter_error);
}

TEST(ClassifyLimit, GrowingSlopeIsOverturning) {
    const Branch b = synthetic(Direction::elev, 30, [](int i) { return record(0.1 * std::exp(0.15 * i), 0.3, 0.3, 1.5); });
    EXPECT_EQ(classify_limit(b).trend, LimitTrend::overturning_trend);
}

TEST(ClassifyLimit, ClosingGapIsGravityCurrent) {
    const Branch b = synthetic(Direction::depr, 20, [](int i) { return record(0.2, 0.3 * std::exp(-0.3 * i), 0.6, 2.0); });
    const LimitVerdict v = classify_limit(b);
    EXPECT_EQ(v.trend, LimitTrend::gravity_current_trend);
    EXPECT_LT(v.gap_rate, 0.0);
}

TEST(ClassifyLimit, VanishingStagnationWithFlatSlopesIsDoubleStagnation) {
    const Branch b = synthetic(Direction::depr, 20, [](int i) { return record(0.5, 0.2, 0.2, 0.2 * std::exp(-0.2 * i)); });
    EXPECT_EQ(classify_limit(b).trend, LimitTrend::double_stagnation_trend);
}

TEST(ClassifyLimit, FasterTrendWinsWhenBothQualify) {
    const Branch b = synthetic(Direction::depr, 30, [](int i) {
        return record(1.0 * std::exp(0.05 * i), 0.2 * std::exp(-0.2 * i), 0.5, 1.0);
    });
    EXPECT_EQ(classify_limit(b).trend, LimitTrend::gravity_current_trend);
}

TEST(ClassifyLimit, ShortOrFlatBranchesAreInconclusive) {
    const Branch short_branch = synthetic(Direction::elev, 5, [](int i) { return record(std::exp(i), 0.3, 0.3, 1.0); });
    EXPECT_EQ(classify_limit(short_branch).trend, LimitTrend::inconclusive);
    const Branch flat = synthetic(Direction::elev, 30, [](int) { return record(0.5, 0.3, 0.3, 1.0); });
    EXPECT_EQ(classify_limit(flat).trend, LimitTrend::inconclusive);
}

TEST(ContactAngle, ExtrapolatesALinearGapLaw) {
    const double s0 = std::sqrt(3.0), a = -4.0;
    Branch b;
    b.direction = Direction::depr;
    for (double g : {0.06, 0.05, 0.04, 0.03, 0.02, 0.01}) b.tail.push_back(wedge(0.5, g, s0 + a * g));
    const ContactAngle c = contact_angle_estimate(b);
    EXPECT_NEAR(c.extrapolated_slope, s0, 1e-9);
    EXPECT_NEAR(c.degrees, 60.0, 1e-7);
    EXPECT_EQ(c.gaps.size(), 6u);
}

TEST(ContactAngle, BandSlopeIgnoresNodesFarFromTheWall) {
    InterfaceTrace t = wedge(0.5, 0.02, 0.5);
    for (std::size_t i = 0; i < t.x.size(); ++i) {
        if (std::abs(t.x[i]) > 1.0) t.eta[i] = t.eta[i] - 5.0 * (std::abs(t.x[i]) - 1.0);
    }
    EXPECT_NEAR(band_slope(t, Direction::depr, 0.5, 4.0), 0.5, 1e-9);
}

TEST(ContactAngle, TooFewTracesIsInconclusive) {
    Branch b;
    b.direction = Direction::depr;
    b.tail.push_back(wedge(0.5, 0.02, 0.3));
    EXPECT_THROW(contact_angle_estimate(b), inconclusive_error);
}

TEST(SignCheck, LaminarPassesAndAWrongWayBumpFails) {
    const FluidPair f{4.0, 1.0, false};
    const FrontConfig cfg = make_front_config(f, conjugate_downstream(f) + 0.05, 8.0, 41, 5, 5);
    const BoreState lam = laminar_state(cfg, f);
    EXPECT_TRUE(sign_check(lam, Direction::depr, 1e-10).ok);
    BoreState bump = lam;
    for (int k = 0; k < cfg.np1; ++k) bump.h1(20, k) += 0.01 * (k == 0 ? 1.0 : 1.0 - double(k) / (cfg.np1 - 1));
    EXPECT_FALSE(sign_check(bump, Direction::depr, 1e-10).ok);
    EXPECT_FALSE(sign_check(bump, Direction::elev, 1e-10).ok);
}

TEST(TraceBranch, ShortDepressionBranchIsMonotone) {
    const FluidPair f{4.0, 1.0, false};
    StepPolicy p;
    p.max_steps = 6;
    p.checkpoint_every = 1;
    const Branch b = trace_branch(Direction::depr, f, make_front_config(f, 0.5, 16.0, 81, 5, 5), p);
    ASSERT_EQ(b.records.size(), 7u);
    EXPECT_EQ(b.termination, Termination::max_steps);
    for (std::size_t i = 1; i < b.records.size(); ++i) EXPECT_GT(b.records[i].lambda, b.records[i - 1].lambda);
    for (const auto& cp : b.checkpoints) EXPECT_TRUE(sign_check(cp.state, Direction::depr, 1e-10).ok);
    EXPECT_FALSE(branch_csv(b).empty());
    EXPECT_NE(branch_json(b).find("\"termination\""), std::string::npos);
}

TEST(TraceBranch, ResumesFromAStoredState) {
    const FluidPair f{4.0, 1.0, false};
    StepPolicy p;
    p.max_steps = 3;
    const FrontConfig cfg = make_front_config(f, 0.5, 16.0, 81, 5, 5);
    const Branch first = trace_branch(Direction::elev, f, cfg, p);
    ASSERT_TRUE(first.last_state.has_value());
    const FrontConfig at_last = make_front_config(f, first.records.back().lambda, 16.0, 81, 5, 5);
    const Branch resumed = trace_branch_from(Direction::elev, f, *first.last_state, at_last, p);
    ASSERT_EQ(resumed.records.size(), 4u);
    EXPECT_DOUBLE_EQ(resumed.records.front().lambda, first.records.back().lambda);
    EXPECT_LT(resumed.records.back().lambda, first.records.back().lambda);
}

TEST(RemapState, KeepsTheInterfaceShapeScaled) {
    const FluidPair f{4.0, 1.0, false};
    const double Hd = conjugate_downstream(f);
    const FrontConfig a = make_front_config(f, Hd + 0.05, 8.0, 41, 5, 5);
    const BoreState s = tanh_state(a, f);
    const FrontConfig b = make_front_config(f, Hd + 0.1, 8.0, 41, 5, 5);
    const BoreState r = remap_state(s, b, f);
    const auto e0 = s.eta(), e1 = r.eta();
    for (std::size_t j = 0; j < e0.size(); ++j) EXPECT_NEAR(e1[j], e0[j] * 2.0, 1e-12);
}

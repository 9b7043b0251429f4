#include "bores/errors.hpp"
#include "bores/quadrature.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace bores;
using std::numbers::pi;

namespace {

const PlaneLabel one_phase = [](double, double) { return 0; };
const PlaneLabel right_half = [](double x, double) { return x > 0.0 ? 1 : 0; };
const PlaneLabel upper_half = [](double, double y) { return y > 0.0 ? 1 : 0; };

} // namespace

TEST(Quadrature, DiskAreas) {
    const auto one = [](double, double) { return 1.0; };
    EXPECT_NEAR(area_integral(one, one_phase, 2.0, Region::disk).value, 4.0 * pi, 1e-12);
    EXPECT_NEAR(area_integral(one, one_phase, 2.0, Region::lower_half).value, 2.0 * pi, 1e-12);
}

TEST(Quadrature, PolynomialMoments) {
    const double R = 0.7;
    const auto x2 = [](double x, double) { return x * x; };
    EXPECT_NEAR(area_integral(x2, one_phase, R, Region::disk).value, pi * std::pow(R, 4) / 4.0, 1e-13);
    const auto y = [](double, double y) { return y; };
    EXPECT_NEAR(area_integral(y, one_phase, R, Region::lower_half).value, -2.0 * R * R * R / 3.0, 1e-13);
}

TEST(Quadrature, JumpAcrossALabelIsExact) {
    const double R = 1.3;
    const auto step = [](double x, double) { return x > 0.0 ? 3.0 : -1.0; };
    EXPECT_NEAR(area_integral(step, right_half, R, Region::disk).value, pi * R * R, 1e-12);
    const auto kink = [](double, double y) { return std::abs(y); };
    EXPECT_NEAR(area_integral(kink, upper_half, R, Region::disk).value, 4.0 * R * R * R / 3.0, 1e-12);
}

TEST(Quadrature, ArcLength) {
    const double R = 0.4;
    const auto one = [](double, double) { return 1.0; };
    EXPECT_NEAR(arc_length_integral(one, one_phase, R, Region::disk).value, 2.0 * pi * R, 1e-13);
    EXPECT_NEAR(arc_length_integral(one, one_phase, R, Region::lower_half).value, pi * R, 1e-13);
    const auto x2 = [](double x, double) { return x * x; };
    EXPECT_NEAR(arc_length_integral(x2, right_half, R, Region::disk).value, pi * R * R * R, 1e-13);
}

TEST(Quadrature, LabelBreaksAreLocatedToRoundoff) {
    const auto wedge = [](double x, double y) { return y < x * std::tan(0.3) ? 1 : 0; };
    const auto b = label_breaks(wedge, 1.0, 0.0, 2.0 * pi, 64, true);
    ASSERT_EQ(b.size(), 2u);
    EXPECT_NEAR(b[0], 0.3, 1e-14);
    EXPECT_NEAR(b[1], 0.3 + pi, 1e-14);
    EXPECT_TRUE(label_breaks(one_phase, 1.0, 0.0, 2.0 * pi, 64, true).empty());
}

TEST(Quadrature, CircleSplitMergesExactBreaks) {
    QuadOptions o;
    o.circle_breaks = [](double) { return std::vector<double>{0.25}; };
    const auto s = circle_split(right_half, 1.0, Region::disk, o);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_TRUE(std::any_of(s.begin(), s.end(), [](double t) { return std::abs(t - 0.25) < 1e-15; }));
    EXPECT_TRUE(std::any_of(s.begin(), s.end(), [](double t) { return std::abs(t - pi / 2.0) < 1e-14; }));
}

TEST(Quadrature, FixedRuleIsFourthOrder) {
    const auto f = [](double x, double y) { return std::exp(x) * std::cos(2.0 * y); };
    const double exact = area_integral(f, one_phase, 1.0, Region::disk).value;
    double prev = 0.0;
    for (int n : {4, 8, 16}) {
        const double e = std::abs(area_integral_fixed(f, one_phase, 1.0, Region::disk, n, n) - exact);
        if (prev > 0.0) EXPECT_GT(prev / e, 12.0);
        prev = e;
    }
}

TEST(Quadrature, BadArgumentsThrow) {
    const auto one = [](double, double) { return 1.0; };
    EXPECT_THROW(area_integral(one, one_phase, 0.0, Region::disk), domain_error);
    EXPECT_THROW(arc_length_integral(one, one_phase, -1.0, Region::disk), domain_error);
    EXPECT_THROW(area_integral_fixed(one, one_phase, 1.0, Region::disk, 0, 4), domain_error);
}

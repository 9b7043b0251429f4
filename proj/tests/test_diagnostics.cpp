#include "bores/diagnostics.hpp"
#include "bores/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace bores;
using std::numbers::pi;

namespace {

const double sqrt3 = std::sqrt(3.0);

} // namespace

TEST(Radii, GeometricSequence) {
    const auto r = geometric_radii(1.0, 9, 4);
    ASSERT_EQ(r.size(), 9u);
    EXPECT_DOUBLE_EQ(r.front(), 1.0);
    EXPECT_NEAR(r[4], 0.5, 1e-15);
    EXPECT_NEAR(r[8], 0.25, 1e-15);
}

TEST(Radii, ChecksOrderAndCoverage) {
    const SampledField f = sample_exact(saddle_field(), {}, 1.0);
    EXPECT_NO_THROW(check_radii(f, {1.0, 0.5}));
    EXPECT_THROW(check_radii(f, {0.5, 0.5}), parameter_error);
    EXPECT_THROW(check_radii(f, {0.5, -0.1}), parameter_error);
    EXPECT_THROW(check_radii(f, {}), parameter_error);
    EXPECT_THROW(check_radii(f, {2.0, 1.0}), domain_error);
}

TEST(Weiss, StokesCornerIsConstant) {
    // pieces at r = 1: energy over the 120 degree wedge, potential -y over the wedge,
    // and (3/2) times the boundary integral of u^2
    const double energy = (2.0 * pi / 3.0) / 6.0;
    const double potential = (std::cos(11.0 * pi / 6.0) - std::cos(7.0 * pi / 6.0)) / 3.0;
    const double boundary = 1.5 * (2.0 / 9.0) * (pi / 3.0);
    const double expected = energy + potential - boundary;
    EXPECT_NEAR(expected, 1.0 / sqrt3, 1e-15);

    const SampledField f = sample_exact(stokes_corner());
    const FunctionalTrace t = weiss_M(f, geometric_radii(1.0, 6, 2));
    for (double v : t.values) EXPECT_NEAR(v, expected, 1e-9);
    EXPECT_LT(t.max_identity_residual(), 1e-6);
}

TEST(Weiss, TranslatedCornerIsMonotone) {
    const SampledField f = translated_stokes_corner(0.05);
    const FunctionalTrace t = weiss_M(f, geometric_radii(0.5, 6, 2));
    for (std::size_t k = 1; k < t.values.size(); ++k) EXPECT_LE(t.values[k], t.values[k - 1] + 1e-9);
    EXPECT_LT(t.max_identity_residual(), 1e-4);
}

TEST(AB, StokesCornerClosedForms) {
    // with f(z) the analytic primitive, u_x^2 - u_y^2 = y / 2 and u_x u_y = x / 4 in the wedge
    const SampledField f = sample_exact(stokes_corner());
    const auto radii = geometric_radii(1.0, 5, 2);
    const ABTraces ab = functional_AB(f, radii);
    for (std::size_t k = 0; k < radii.size(); ++k) {
        EXPECT_NEAR(ab.A.values[k], 0.0, 1e-10);
        EXPECT_NEAR(ab.B.values[k], radii[k] / (2.0 * sqrt3), 1e-9);
    }
}

TEST(EnergyBound, HalfPlaneFlowIsSharp) {
    const SampledField f = sample_exact(linear_field(0.0, 1.0));
    const auto radii = geometric_radii(1.0, 4, 2);
    const EnergyBoundReport rep = energy_bound_check(f, radii, 0.0);
    for (std::size_t k = 0; k < radii.size(); ++k) {
        EXPECT_NEAR(rep.lhs[k], pi, 1e-9);
        EXPECT_NEAR(rep.rhs[k], pi, 1e-9);
    }
    EXPECT_TRUE(rep.passed);
}

TEST(EnergyBound, StokesCornerBreaksTheSignPrecondition) {
    const SampledField f = sample_exact(stokes_corner());
    EXPECT_THROW(energy_bound_check(f, geometric_radii(1.0, 3, 2), 1.0), precondition_error);
    EXPECT_NO_THROW(energy_bound_check(f, geometric_radii(1.0, 3, 2), 1.0, {}, false));
}

TEST(Acf, HalfPlanePartsGiveQuarterPiSquared) {
    const ExactField y = linear_field(0.0, 1.0);
    const SampledField u1 = field_positive_part(sample_exact(y));
    const SampledField u2 = field_negative_part(sample_exact(y));
    const AcfReport rep = acf_phi(u1, u2, geometric_radii(1.0, 5, 2));
    for (double v : rep.trace.values) EXPECT_NEAR(v, pi * pi / 4.0, 1e-9);
    EXPECT_TRUE(rep.violations.empty());
}

TEST(Acf, SaddleGrowsLikeFourthPower) {
    const SampledField s = sample_exact(saddle_field());
    const auto radii = geometric_radii(1.0, 5, 2);
    const AcfReport rep = acf_phi(field_positive_part(s), field_negative_part(s), radii);
    for (std::size_t k = 0; k < radii.size(); ++k) {
        EXPECT_NEAR(rep.trace.values[k], pi * pi * std::pow(radii[k], 4), 1e-9);
    }
    EXPECT_TRUE(rep.violations.empty());
}

TEST(Acf, RejectsOverlappingSupports) {
    const SampledField s = sample_exact(saddle_field());
    EXPECT_THROW(acf_phi(field_positive_part(s), field_positive_part(s), {1.0, 0.5}), precondition_error);
}

TEST(GravityCurrent, DensitiesMatchQuadrature) {
    const double rp = 0.7, rm = 2.3;
    EXPECT_NEAR(gc_density_quadrature([](double, double) { return Phase::minus; }, rp, rm, 0.0),
                gc_density(GcAlternative::heavier_full, rp, rm), 1e-12);
    EXPECT_NEAR(gc_density_quadrature([](double, double) { return Phase::plus; }, rp, rm, 0.0),
                gc_density(GcAlternative::lighter_full, rp, rm), 1e-12);
    EXPECT_NEAR(gc_density_quadrature(stokes_corner().phase, rp, rm, 0.0),
                gc_density(GcAlternative::stokes_corner, rp, rm), 1e-12);
    // corner turned so its wedge spans angles pi to 5 pi / 3
    EXPECT_NEAR(gc_density_quadrature(stokes_corner({1, 6}).phase, rp, rm, 0.0),
                gc_density(GcAlternative::rotated_corner, rp, rm), 1e-12);
    EXPECT_NEAR(gc_density_quadrature([](double, double) { return Phase::plus; }, rp, rm, -0.3),
                gc_density_nonstagnation(-0.3, rp), 1e-12);
}

TEST(GravityCurrent, StokesCornerIsConstantOnHalfDisks) {
    const SampledField f = sample_exact(stokes_corner(), {}, std::numeric_limits<double>::infinity(), Region::lower_half);
    const GcTrace t = gc_M(f, geometric_radii(1.0, 5, 2));
    EXPECT_EQ(t.regime, GcRegime::stagnation);
    for (double v : t.trace.values) EXPECT_NEAR(v, 1.0 / sqrt3, 1e-9);
}

TEST(GravityCurrent, LinearFlowNeedsTheBoundaryPotentialTerm) {
    const double alpha = 0.7, rho = 2.0, Q = -0.3;
    SampledField f = sample_exact(linear_field(0.0, alpha), {}, 1.0, Region::lower_half);
    f.rho_plus = f.rho_minus = rho;
    f.bernoulli_q = Q;
    const auto radii = geometric_radii(0.9, 4, 2);
    const GcTrace t = gc_M(f, radii);
    EXPECT_EQ(t.regime, GcRegime::non_stagnation);
    for (std::size_t k = 0; k < radii.size(); ++k) {
        EXPECT_NEAR(t.trace.values[k], -Q * rho * pi / 2.0, 1e-9);
        EXPECT_NEAR(t.trace.derivative_estimates[k], 0.0, 1e-6);
        EXPECT_LT(t.trace.identity_residual[k], 1e-6);
        // without the boundary potential term the formula reduces to -(3/r^3) int y rho = 2 rho
        EXPECT_GT(std::abs(2.0 * rho - t.trace.derivative_estimates[k]), 1.0);
    }
}

TEST(GravityCurrent, RejectsPositiveValues) {
    const SampledField f = sample_exact(linear_field(1.0, 0.0), {}, 1.0, Region::lower_half);
    EXPECT_THROW(gc_M(f, {0.9, 0.5}), precondition_error);
}

TEST(Oddson, HarmonicConeHasUnitConstant) {
    const double mu = 1.25;
    const SampledField f = sample_exact(mu_harmonic(mu));
    const OddsonReport rep = oddson_check(f, mu, 1.0);
    EXPECT_NEAR(rep.constant, 1.0, 1e-9);
    EXPECT_NEAR(rep.half_aperture, pi / (2.0 * mu), 1e-15);
}

TEST(Poincare, ExponentsOfAHomogeneousField) {
    const double mu = 1.25;
    const SampledField f = sample_exact(mu_harmonic(mu));
    const PoincareDemo d = poincare_demo(f, mu, pi / 2.0, 0.0, geometric_radii(1.0, 6, 2));
    EXPECT_NEAR(d.energy_exponent, 2.0 * mu - 2.0, 1e-6);
    EXPECT_NEAR(d.bound_exponent, 2.0 * mu - 2.0, 1e-6);
    EXPECT_NEAR(fit_exponent({1.0, 2.0, 4.0}, {3.0, 12.0, 48.0}), 2.0, 1e-14);
}

TEST(Variational, ExactSolutionHasSmallResidual) {
    const SampledField f = sample_exact(stokes_corner());
    const auto bumps = random_bumps(3, 3, 0.8, Region::disk);
    for (const auto& e : variational_residual(f, 0.8, bumps)) EXPECT_LT(std::abs(e.residual), 1e-7 * e.scale);
}

TEST(Variational, WrongDensitiesLeaveAResidual) {
    SampledField f = sample_exact(stokes_corner());
    f.rho_minus = 2.0;
    const BumpField b{{0.0, -0.3}, 0.4, {1.0, 0.5}};
    const auto e = variational_residual(f, 0.8, {b});
    EXPECT_GT(std::abs(e[0].residual), 1e-3 * e[0].scale);
}

TEST(Variational, FixedRuleConvergesAtLeastQuadratically) {
    const SampledField f = sample_exact(stokes_corner());
    const BumpField b{{0.1, -0.3}, 0.35, {0.4, 1.0}};
    const RefinementStudy s = variational_refinement(f, 0.8, b, 8, 4);
    ASSERT_EQ(s.residuals.size(), 4u);
    EXPECT_GE(s.fitted_order, 2.0);
}

TEST(Variational, BumpsMustStayInside) {
    const SampledField f = sample_exact(stokes_corner());
    const BumpField b{{0.6, 0.0}, 0.5, {1.0, 0.0}};
    EXPECT_THROW(variational_residual(f, 0.8, {b}), precondition_error);
}

TEST(SampledFields, ExactGradientsAreConsistent) {
    EXPECT_LT(gradient_consistency(sample_exact(product_field(), {0.3, 0.2}), 0.5), 1e-8);
    EXPECT_LT(gradient_consistency(translated_stokes_corner(0.1), 0.5), 1e-6);
}

TEST(SampledFields, BoreSamplesMustStayInTheChannel) {
    const FluidPair fl{4.0, 1.0, false};
    const double Hd = conjugate_downstream(fl);
    const FrontConfig cfg = make_front_config(fl, Hd + 0.05, 8.0, 41, 5, 5);
    const BoreState s = laminar_state(cfg, fl);
    EXPECT_THROW(sample_bore(s, fl, {0.0, 0.0}, 2.0), domain_error);
    EXPECT_THROW(sample_bore(s, fl, {0.0, 5.0}, 0.1), domain_error);
    EXPECT_NO_THROW(sample_bore(s, fl, {0.0, 0.0}, 0.1));
}

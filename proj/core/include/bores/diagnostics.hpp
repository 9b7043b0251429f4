/**
 * @file diagnostics.hpp
 * @brief Monotonicity functionals, energy bounds and variational residuals on sampled fields
 *
 * Every functional works in local coordinates centred on a designated point and
 * integrates over B_r (front regime) or the lower half-disk B_r^- (gravity
 * current regime). The density weight is rho(z) = rho_+ chi^+ + rho_- chi^-,
 * with Omega^+ = {u >= 0}.
 */

#pragma once

#include "bores/djsolver.hpp"
#include "bores/oracles.hpp"
#include "bores/quadrature.hpp"
#include "bores/types.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace bores {

/**
 * @brief Scalar field with gradient and phase label, in local coordinates
 *
 * Values at (x, y) refer to the point center + (x, y) of the underlying field.
 */
struct SampledField {
    std::string name;
    std::function<double(double, double)> value;
    std::function<Vec2(double, double)> gradient;
    std::function<Phase(double, double)> phase;
    Vec2 center{};
    double radius = std::numeric_limits<double>::infinity();  ///< largest radius covered
    Region region = Region::disk;
    double rho_plus = 0.0;
    double rho_minus = 1.0;
    double bernoulli_q = 0.0;   ///< Q in the potential -rho (y + Q)
    std::vector<double> singular_radii;   ///< radii of non-smooth points, used as radial breaks
    CircleBreaks circle_breaks;           ///< exact angular breaks on circles about the centre

    double density(Phase p) const { return p == Phase::plus ? rho_plus : rho_minus; }
    PlaneLabel label() const;

    /// Throws parameter_error on missing callables or negative densities.
    void validate() const;
};

/// Quadrature options for a field: its radial and angular breaks merged into base.
QuadOptions field_quad_options(const SampledField& f, const QuadOptions& base);

/**
 * @brief Circle crossings of the edges of a Stokes corner with the given vertex and rotation
 *
 * Returns, for a circle of radius r about the origin, the polar angles where it
 * meets the two boundary rays.
 */
CircleBreaks stokes_edge_breaks(Vec2 vertex, PiRational rotation = {});

/// Stokes corner translated by (dx, 0), with its radial and angular breaks registered.
SampledField translated_stokes_corner(double dx);

/// Wraps an analytic field, recentred at center.
SampledField sample_exact(const ExactField& f, Vec2 center = {},
                          double radius = std::numeric_limits<double>::infinity(), Region region = Region::disk);

/**
 * @brief u = -psi of a converged bore around a physical point
 *
 * The upper fluid is Omega^+. Densities follow the rescaled dynamic condition:
 * rho_+ = 2 rho2 / F^2 and rho_- = 2 rho1 / F^2, or rho_+ = 0 and rho_- = 8 rho1
 * in the Boussinesq case. Q = c_y - F^2/2 (Boussinesq: Q = c_y) makes -rho (y + Q)
 * reproduce the dynamic condition up to a potential that is smooth across the
 * interface, so the variational residual vanishes for exact solutions.
 * @throws domain_error if the disk (or half-disk) leaves the channel
 */
SampledField sample_bore(const BoreState& state, const FluidPair& fluids, Vec2 center, double radius,
                         Region region = Region::disk);

/**
 * @brief Gravity-current field u = psi_lid - psi on the lower half-disk centred on the lid at x
 *
 * u <= 0 and u = 0 on the lid; the upper fluid is labelled plus.
 * @throws domain_error if the half-disk leaves the channel
 */
SampledField sample_bore_contact(const BoreState& state, const FluidPair& fluids, double x, double radius);

/// max(u, 0) and max(-u, 0), labelled plus on their supports.
SampledField field_positive_part(const SampledField& f);
SampledField field_negative_part(const SampledField& f);

/// One polar sample of a field.
struct FieldSample {
    double x = 0.0;
    double y = 0.0;
    double u = 0.0;
    Vec2 grad{};
    Phase phase = Phase::plus;
};

/// Samples at cell centres of an n_r x n_t polar grid over B_R (or B_R^-).
std::vector<FieldSample> polar_samples(const SampledField& f, double R, int n_r, int n_t);

/// Largest gap between the gradient callable and centred differences of the value, relative to |grad|.
double gradient_consistency(const SampledField& f, double R, int n_r = 12, int n_t = 24, double h = 1e-6);

/// Adaptive settings for analytic fields: relative tolerance 1e-9.
QuadOptions analytic_quad_options();

/// Adaptive quadrature, or the fixed composite rule for piecewise-interpolated fields.
struct Integration {
    QuadOptions adaptive = analytic_quad_options();
    bool fixed = false;
    int n_r = 64;
    int n_t = 32;
};

/// Integration settings suited to fields reconstructed from a solver grid.
Integration reconstructed_integration();

double disk_integral(const SampledField& f, const PlaneFunction& g, double r, const Integration& integ);
double circle_integral(const SampledField& f, const PlaneFunction& g, double r, const Integration& integ);

/// Functional on a decreasing radius sequence with a derivative check.
struct FunctionalTrace {
    std::string name;
    std::vector<double> radii;
    std::vector<double> values;
    std::vector<double> derivative_estimates;   ///< centred differences in r
    std::vector<double> identity_values;        ///< closed-form derivative identity (NaN if none)
    std::vector<double> identity_residual;      ///< |fd - identity| / max(|identity|, |value| / r)

    double max_identity_residual() const;
    /// Largest |values[k] - values[0]|.
    double max_variation() const;
    /// CSV: r, value, derivative_estimate, identity_residual.
    std::string csv() const;
};

/// r_k = R 2^{-k/per_octave}, k = 0 .. count-1.
std::vector<double> geometric_radii(double R, int count, int per_octave = 4);

struct TraceOptions {
    Integration integ{};
    double fd_rel_step = 1e-3;   ///< centred difference step h = fd_rel_step * r
    bool derivatives = true;
};

/// Checks radii are positive, strictly decreasing and inside the field.
void check_radii(const SampledField& f, const std::vector<double>& radii);

struct ABTraces {
    FunctionalTrace A;
    FunctionalTrace B;
};

/**
 * @brief A(r) = r^-2 int u_x u_y and B(r) = r^-2 int (u_y^2 - u_x^2) over B_r
 *
 * The identity columns hold A' = (1/2r^3) int rho x - r^-4 int_{dB} rho x y^2 and
 * B' = r^-3 int rho y - r^-4 int_{dB} rho y (y^2 - x^2), valid for variational
 * solutions on the full disk.
 */
ABTraces functional_AB(const SampledField& f, const std::vector<double>& radii, const TraceOptions& opts = {});

struct EnergyBoundReport {
    std::vector<double> radii;
    std::vector<double> lhs;      ///< r^-2 int |grad u|^2
    std::vector<double> rhs;      ///< max{2M+1, 2} |A| + B
    std::vector<double> margins;  ///< rhs - lhs
    double slope_bound = 0.0;
    double min_margin = 0.0;
    bool passed = false;
};

/// Sign conditions at polar samples: u_x u_y single-signed and |u_x| <= M |u_y|.
void check_monotone_samples(const SampledField& f, double R, double slope_bound, double tol = 1e-10);

/// Largest |u_x| / |u_y| over samples with |u_y| > floor.
double sampled_slope_bound(const SampledField& f, double R, int n_r = 32, int n_t = 64, double floor = 1e-12);

/**
 * @brief Pre-limit energy bound r^-2 int |grad u|^2 <= max{2M+1, 2}|A| + B at each radius
 * @throws precondition_error naming the first sample that breaks the sign conditions
 *         (skipped when check_signs is false)
 */
EnergyBoundReport energy_bound_check(const SampledField& f, const std::vector<double>& radii, double slope_bound,
                                     const Integration& integ = {}, bool check_signs = true);

/**
 * @brief M(r) = r^-3 int (|grad u|^2 - y rho) - (3/2) r^-4 int_{dB} u^2
 *
 * Identity column: M' = (2/r^3) int_{dB} (grad u . nu - 3u/(2r))^2.
 */
FunctionalTrace weiss_M(const SampledField& f, const std::vector<double>& radii, const TraceOptions& opts = {});

struct AcfReport {
    FunctionalTrace trace;
    std::vector<double> factor1;
    std::vector<double> factor2;
    std::vector<int> violations;   ///< k with Phi(r_{k+1}) > Phi(r_k) + slack
};

/**
 * @brief Phi(r) = (r^-2 int |grad u1|^2)(r^-2 int |grad u2|^2) on decreasing radii
 *
 * The formula is nondecreasing in r, so along the decreasing radius sequence the
 * trace must not increase.
 * @throws precondition_error if a sample has u_i < 0 or u1 u2 != 0
 */
AcfReport acf_phi(const SampledField& u1, const SampledField& u2, const std::vector<double>& radii,
                  const Integration& integ = {}, double slack = 1e-6);

enum class GcRegime { non_stagnation, stagnation };

std::string to_string(GcRegime r);

struct GcTrace {
    FunctionalTrace trace;
    GcRegime regime = GcRegime::stagnation;
};

/// Requires u <= tol at samples of B_R^- and |u| <= tol on the top segment.
void check_gc_samples(const SampledField& f, double R, double tol = 1e-12);

/**
 * @brief Gravity-current functional on lower half-disks
 *
 * Q != 0: M = r^-2 int (|grad u|^2 - Q rho) - r^-3 int_{dB^-} u^2, with
 *   M' = (2/r^2) int_{dB^-} (du/dnu - u/r)^2 + r^-2 int_{dB^-} y rho - (3/r^3) int y rho.
 * Q == 0: M = r^-3 int (|grad u|^2 - y rho) - (3/2) r^-4 int_{dB^-} u^2, with
 *   M' = (2/r^3) int_{dB^-} (du/dnu - 3u/(2r))^2.
 * The identity column holds the derivative formula of the matching regime.
 * @throws precondition_error if u > 0 at a sample or u != 0 on the top
 */
GcTrace gc_M(const SampledField& f, const std::vector<double>& radii, const TraceOptions& opts = {});

/// Blowup limits of the stagnation-point problem.
enum class GcAlternative { heavier_full, lighter_full, stokes_corner, rotated_corner };

/// Closed-form density of each alternative.
double gc_density(GcAlternative alt, double rho_plus, double rho_minus);

/// -Q rho pi / 2 for a non-stagnation blowup with full density of one phase.
double gc_density_nonstagnation(double Q, double rho);

/**
 * @brief Density of a blowup domain by quadrature on B_1^-
 *
 * Q == 0: -int y (rho_+ chi^+ + rho_- chi^-); Q != 0: -Q int (rho_+ chi^+ + rho_- chi^-).
 */
double gc_density_quadrature(const std::function<Phase(double, double)>& phase, double rho_plus, double rho_minus,
                             double Q, const QuadOptions& opts = {});

enum class BlowupRegime { front, gravity_current };

struct BlowupResult {
    SampledField field;
    double exponent = 1.5;
    double lipschitz = 0.0;   ///< max |grad u_m| over samples of the unit disk (or half-disk)
};

/// Blowup exponent: 3/2 for fronts and stagnation currents, 1 when Q != 0.
double blowup_exponent(BlowupRegime regime, double Q);

/**
 * @brief u_m(z) = u(r_m z) / r_m^d on the unit disk
 * @throws domain_error if r_m exceeds the covered radius
 */
BlowupResult blowup_sample(const SampledField& f, double r_m, BlowupRegime regime, int n_r = 24, int n_t = 48);

struct OddsonReport {
    double constant = 0.0;        ///< inf over samples of u / (|z|^mu cos(mu (theta - axis)))
    double x_min = 0.0;           ///< location of the infimum
    double y_min = 0.0;
    double half_aperture = 0.0;
};

/**
 * @brief Largest C with u >= C |z|^mu cos(mu (theta - axis)) on the sampled cone
 *
 * The cone has half-aperture pi / (2 mu) about the given axis and radius R.
 * @throws precondition_error if u <= 0 at an interior sample
 */
OddsonReport oddson_check(const SampledField& f, double mu, double R, double axis = std::numbers::pi / 2.0,
                          double half_aperture = 0.0, int n_r = 40, int n_t = 40);

/// Exponent fit of r^-2 int_{B_r} |grad u|^2 against the integrated Oddson bound.
struct PoincareDemo {
    double mu = 1.25;
    double half_aperture = 0.0;
    OddsonReport oddson;
    std::vector<double> radii;
    std::vector<double> energy;          ///< r^-2 int_{B_r} |grad u|^2
    std::vector<double> induced_bound;   ///< r^-4 int_{cone ∩ B_r} (C |z|^mu cos)^2
    double energy_exponent = 0.0;
    double bound_exponent = 0.0;
};

/// Log-log least-squares slope.
double fit_exponent(const std::vector<double>& r, const std::vector<double>& v);

PoincareDemo poincare_demo(const SampledField& f, double mu, double axis, double half_aperture,
                           const std::vector<double>& radii, const Integration& integ = {});

/// Smooth bump phi = a (1 - |z - c|^2 / s^2)^3, zero outside |z - c| < s.
struct BumpField {
    Vec2 center{};
    double width = 0.5;
    Vec2 amplitude{1.0, 0.0};

    Vec2 value(double x, double y) const;
    /// Jacobian rows: (d phi_x / dx, d phi_x / dy), (d phi_y / dx, d phi_y / dy).
    void jacobian(double x, double y, double J[2][2]) const;
};

/// Random bumps inside B_R (front regime), or tangential bumps on B_R^- when region is lower_half.
std::vector<BumpField> random_bumps(std::uint64_t seed, int count, double R, Region region);

struct ResidualEntry {
    double residual = 0.0;
    double scale = 0.0;   ///< integral of |integrand|
};

/**
 * @brief Domain-variation residual
 *
 *   int |grad u|^2 div phi - 2 Dphi[grad u, grad u] + div(V phi)
 *
 * over B_R (front regime) or B_R^- (gravity current regime). Adaptive quadrature
 * unless integ.fixed is set.
 * @throws precondition_error if a bump leaves B_R, or is not tangential on the top
 */
std::vector<ResidualEntry> variational_residual(const SampledField& f, double R, const std::vector<BumpField>& tests,
                                                const Integration& integ = {});

/// Residuals of one bump under refinement of the fixed rule, n = n0 2^k.
struct RefinementStudy {
    std::vector<int> panels;
    std::vector<double> residuals;
    std::vector<double> orders;    ///< log2 of successive residual ratios
    double min_order = 0.0;
    /// Least-squares slope of log|residual| against log(1/n) over the nonzero levels; inf if all vanish.
    double fitted_order = 0.0;
};

RefinementStudy variational_refinement(const SampledField& f, double R, const BumpField& test, int n0, int levels);

} // namespace bores

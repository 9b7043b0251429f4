/**
 * @file oracles.hpp
 * @brief Closed-form fields used as ground truth
 *
 * The Stokes corner is
 *
 *   u(x,y) = -(sqrt(2)/3) r^{3/2} cos(3/2 (theta - 3 pi/2))  for theta in (7pi/6, 11pi/6),
 *
 * and 0 elsewhere. It is 3/2-homogeneous, harmonic in its 120 degree support and
 * satisfies |grad u|^2 = -y on the two boundary rays.
 */

#pragma once

#include "bores/params.hpp"
#include "bores/types.hpp"

#include <functional>
#include <limits>
#include <string>
#include <utility>

namespace bores {

/// Field with analytic value, gradient and phase label.
struct ExactField {
    std::string name;
    std::function<double(double, double)> value;
    std::function<Vec2(double, double)> gradient;
    std::function<Phase(double, double)> phase;
    /// Homogeneity degree about the origin; NaN when the field is not homogeneous.
    double degree = std::numeric_limits<double>::quiet_NaN();
    /// Densities of the free boundary problem the field solves.
    double rho_plus = 0.0;
    double rho_minus = 1.0;
    PiRational rotation{};
};

/// Phase label from the sign convention Omega^+ = {u >= 0}.
Phase sign_phase(double u);

/// u o A_theta for the Stokes corner, A_theta the counterclockwise rotation by theta.
/// Support of the rotated field: theta_arg in (7pi/6 - theta, 11pi/6 - theta).
ExactField stokes_corner(PiRational rotation = {});

/// Laminar upstream state on the channel; phase plus is the lower layer (psi >= 0).
ExactField laminar(const FluidPair& fluids, double lambda);

/// Upstream and downstream vertical profiles as fields independent of x.
std::pair<ExactField, ExactField> conjugate_profiles(const FluidPair& fluids, double lambda);

/// scale * r^mu cos(mu (theta - axis)), theta measured from the positive x axis.
ExactField mu_harmonic(double mu, double scale = 1.0, double axis = std::numbers::pi / 2.0);

/// u = a x + b y.
ExactField linear_field(double a, double b);

/// u = x y.
ExactField product_field();

/// u = x^2 - y^2.
ExactField saddle_field();

/// u identically zero with a constant phase label.
ExactField zero_field(Phase label);

/// max(u, 0) and max(-u, 0).
ExactField positive_part(const ExactField& f);
ExactField negative_part(const ExactField& f);

/// u(x - dx, y - dy).
ExactField translated(const ExactField& f, double dx, double dy);

/// -u, with the phases of f swapped.
ExactField negated(const ExactField& f);

/// u + eps * h; the phase label of u is kept.
ExactField perturbed(const ExactField& f, double eps, const ExactField& h);

} // namespace bores

/**
 * @file params.hpp
 * @brief Densities, front Froude number, conjugate flows and flow force
 *
 * Nondimensionalization: channel height 1, upstream speed 1. The channel is
 * -lambda < y < 1 - lambda with the upstream interface at y = 0. The pseudo
 * stream function takes the wall values psi = lambda*sqrt(rho1) on the bed and
 * psi = -(1 - lambda)*sqrt(rho2) on the lid, and vanishes on the interface.
 */

#pragma once

#include <cstddef>
#include <vector>

namespace bores {

/// Lower (heavier) density rho1, upper density rho2 and the dynamic-condition switch.
struct FluidPair {
    double rho1 = 4.0;
    double rho2 = 1.0;
    bool boussinesq = false;

    /// Throws parameter_error if the invariants fail.
    void validate() const;

    bool operator==(const FluidPair&) const = default;
};

/// F^2 = (sqrt(rho1) - sqrt(rho2)) / (sqrt(rho1) + sqrt(rho2)); 0 for Boussinesq.
double front_froude(const FluidPair& fluids);

/// H_d = sqrt(rho1) / (sqrt(rho1) + sqrt(rho2)).
double conjugate_downstream(const FluidPair& fluids);

/// Coefficients of the interface row: c*eta + (1+eta_q^2)(|psi2_p|^2 - |psi1_p|^2) = rhs.
struct DynamicCoefficients {
    double c = 0.0;
    double rhs = 0.0;
};

DynamicCoefficients dynamic_coefficients(const FluidPair& fluids);

/**
 * @brief Jump condition for a laminar state with lower-layer thickness H
 *
 * g(H) = rho2 h2^2/(1-H)^2 - rho1 lambda^2/H^2 + c (1+eps)(H - lambda) - rhs,
 * the dynamic condition evaluated on the conjugate profile. eps scales the
 * potential coefficient (the solver's eigenvalue correction).
 */
double jump_function(const FluidPair& fluids, double lambda, double H, double eps = 0.0);
double jump_function_dH(const FluidPair& fluids, double lambda, double H, double eps = 0.0);

/// Flow force of a laminar state with lower-layer thickness H at upstream depth lambda.
double laminar_flow_force(const FluidPair& fluids, double lambda, double H);

/// S0(lambda): flow force of the uniform upstream state, closed form.
double upstream_flow_force(const FluidPair& fluids, double lambda);

/// Downstream height of the perturbed jump condition, found by Newton from H_d.
struct ConjugateHeight {
    double H = 0.0;
    double dH_deps = 0.0;
};

ConjugateHeight conjugate_height(const FluidPair& fluids, double lambda, double eps);

/// All sign-change roots of the jump function on (0,1), refined by bisection.
std::vector<double> jump_roots(const FluidPair& fluids, double lambda, std::size_t n_scan = 1000000);

/**
 * @brief Roots of the conjugate-flow system on (0,1)
 *
 * Brute-force scan of the jump function followed by bisection; a root is kept
 * when its laminar flow force matches S0(lambda) to force_tol (relative).
 */
std::vector<double> conjugate_roots(const FluidPair& fluids, double lambda,
                                    std::size_t n_scan = 1000000, double force_tol = 1e-8);

/// Upstream and downstream piecewise-linear vertical profiles.
struct ConjugateState {
    FluidPair fluids;
    double lambda = 0.5;
    double H_up = 0.5;
    double H_down = 0.5;

    /// Psi^u(y): laminar profile with interface at y = 0.
    double psi_up(double y) const;
    double psi_up_y(double y) const;
    /// Psi^d(y): laminar profile with interface at y = H_down - lambda.
    double psi_down(double y) const;
    double psi_down_y(double y) const;
};

ConjugateState conjugate_state(const FluidPair& fluids, double lambda);

/// One layer of a vertical slice, nodes ordered by increasing y.
struct LayerSlice {
    std::vector<double> y;
    std::vector<double> psi_x;
    std::vector<double> psi_y;
};

/// Vertical slice of a solution: lower layer from the bed to the interface, upper from
/// the interface to the lid. The interface node appears in both layers.
struct Slice {
    double lambda = 0.5;
    LayerSlice lower;
    LayerSlice upper;
};

/**
 * @brief Flow force S = 1/2 int (psi_y^2 - psi_x^2 - w(y)) dy on a slice
 *
 * w = rho_i (2 y / F^2 - 1) per layer; in the Boussinesq case the potential term
 * uses the average-density splitting, w = rho1 (4y - 1) below and rho1 (-4y - 1)
 * above the interface. Trapezoid rule on the slice nodes.
 */
double flow_force(const Slice& slice, const FluidPair& fluids, double froude_sq);

} // namespace bores

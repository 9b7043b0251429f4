/**
 * @file quadrature.hpp
 * @brief Phase-aware polar quadrature on disks and lower half-disks
 *
 * Radial integrals use adaptive Gauss-Kronrod. On each circle the phase label is
 * scanned on a coarse angular grid; every label change is located by bisection to
 * machine precision and the angular integral is split there, so that the
 * integrand is smooth on each arc. Arcs are integrated with adaptive
 * Gauss-Kronrod; a full circle without label changes uses the periodic
 * trapezoidal rule.
 */

#pragma once

#include <functional>
#include <vector>

namespace bores {

/// Integrand and label in local Cartesian coordinates centred on the disk.
using PlaneFunction = std::function<double(double, double)>;
using PlaneLabel = std::function<int(double, double)>;
/// Known angles in [0, 2 pi) where an integrand is not smooth on the circle of radius r.
using CircleBreaks = std::function<std::vector<double>(double)>;

struct QuadOptions {
    double rel_tol = 1e-11;   ///< relative to the L1 norm of the integrand
    double abs_tol = 1e-13;
    int max_depth = 18;
    int coarse_angles = 64;   ///< label scan resolution on each circle
    bool throw_on_fail = true;
    std::vector<double> radial_breaks;   ///< radii where the integrand is not smooth in r
    CircleBreaks circle_breaks;          ///< exact angular breaks, merged with the label scan
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

/// Region shape: full disk B_R or lower half-disk B_R^- = B_R ∩ {y < 0}.
enum class Region { disk, lower_half };

/// Angles in [t0, t1] where the label changes along the circle of radius r.
std::vector<double> label_breaks(const PlaneLabel& label, double r, double t0, double t1, int coarse, bool periodic);

/// Integral over B_R (or B_R^-) of f dA.
QuadResult area_integral(const PlaneFunction& f, const PlaneLabel& label, double R, Region region,
                         const QuadOptions& opts = {});

/// Integral over the arc of the boundary circle of radius R (the full circle, or the lower
/// semicircle for Region::lower_half) of f ds.
QuadResult arc_length_integral(const PlaneFunction& f, const PlaneLabel& label, double R, Region region,
                               const QuadOptions& opts = {});

/**
 * @brief Fixed composite two-point Gauss-Legendre rule on B_R or B_R^-
 *
 * n_r uniform panels in r, and n_t uniform panels on each label-constant arc.
 * Fourth order for integrands that are smooth in (r, theta) on each arc; used
 * for refinement studies.
 */
double area_integral_fixed(const PlaneFunction& f, const PlaneLabel& label, double R, Region region, int n_r,
                           int n_t, const QuadOptions& opts = {});

/// Sorted angular breaks on the circle of radius r: label scan plus any exact breaks in opts.
std::vector<double> circle_split(const PlaneLabel& label, double r, Region region, const QuadOptions& opts);

} // namespace bores

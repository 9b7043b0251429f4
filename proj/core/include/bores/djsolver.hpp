/**
 * @file djsolver.hpp
 * @brief Internal front solver in Dubreil-Jacotin coordinates
 *
 * Each layer is described by its height function y = H_i(q, p), with q = x and
 * p = psi. The lower layer occupies 0 <= p <= lambda*sqrt(rho1), the upper layer
 * -h2*sqrt(rho2) <= p <= 0, and p = 0 is the interface in both. Unknowns are
 *
 *   H1(j, k)  k = 0 .. np1-2   (k = 0 is the interface eta, shared)
 *   H2(j, k)  k = 1 .. np2-2
 *   eps                        (eigenvalue correction of the potential coefficient)
 *
 * Rows:
 *   - interior: dp_i^2 [ (1 + H_q^2) H_pp - 2 H_q H_p H_qp + H_p^2 H_qq ] = 0
 *   - interface: (1 + eta_q^2)(1/H2_p^2 - 1/H1_p^2) + c (1 + eps) eta - rhs = 0
 *   - q = -L: laminar upstream profile (eta = 0)
 *   - q = +L: laminar profile with interface H*(eps) - lambda, where H*(eps) is the
 *     root of the eps-perturbed jump condition continued from H_d
 *   - pin: eta(0) = (H_d - lambda) / 2
 *
 * Wall rows H1 = -lambda and H2 = h2 are enforced, not solved.
 */

#pragma once

#include "bores/params.hpp"
#include "bores/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace bores {

/// Upstream depth, truncation length, grid counts and Newton controls.
struct FrontConfig {
    double lambda = 0.5;
    double froude_sq = 0.0;
    double h2 = 0.5;
    double L = 16.0;
    int nq = 321;
    int np1 = 17;
    int np2 = 17;
    double newton_tol = 1e-10;
    int max_newton_iters = 30;

    void validate(const FluidPair& fluids) const;

    bool operator==(const FrontConfig&) const = default;
};

/// Builds a consistent config (derives froude_sq and h2).
FrontConfig make_front_config(const FluidPair& fluids, double lambda, double L = 16.0, int nq = 321,
                              int np1 = 17, int np2 = 17);

struct Grid {
    int nq = 0;
    int np1 = 0;
    int np2 = 0;
    double L = 0.0;
    double lambda = 0.0;
    double h2 = 0.0;
    double P1 = 0.0;   ///< lambda * sqrt(rho1)
    double P2 = 0.0;   ///< h2 * sqrt(rho2)
    double dq = 0.0;
    double dp1 = 0.0;  ///< positive
    double dp2 = 0.0;  ///< negative: p decreases from the interface to the lid
    int jmid = 0;      ///< pin column
    std::vector<double> q;
    std::vector<double> p1;
    std::vector<double> p2;

    static Grid make(const FrontConfig& cfg, const FluidPair& fluids);
    int unknowns() const;
};

/// Height fields of both layers, row-major in (j, k).
struct BoreState {
    Grid grid;
    std::vector<double> H1;
    std::vector<double> H2;
    double eps = 0.0;

    double h1(int j, int k) const { return H1[static_cast<std::size_t>(j) * grid.np1 + k]; }
    double h2(int j, int k) const { return H2[static_cast<std::size_t>(j) * grid.np2 + k]; }
    double& h1(int j, int k) { return H1[static_cast<std::size_t>(j) * grid.np1 + k]; }
    double& h2(int j, int k) { return H2[static_cast<std::size_t>(j) * grid.np2 + k]; }

    std::vector<double> eta() const;
};

/// Layered state whose interface is the given trace (linear in p per layer).
BoreState layered_state(const FrontConfig& cfg, const FluidPair& fluids, const std::vector<double>& eta);

/// Trivial laminar state, eta = 0.
BoreState laminar_state(const FrontConfig& cfg, const FluidPair& fluids);

/// Laminar state with a tanh-shaped interface from 0 to (H_d - lambda), half height at q = 0.
BoreState tanh_state(const FrontConfig& cfg, const FluidPair& fluids, double width = 4.0);

std::vector<double> pack(const BoreState& state);
void unpack(const std::vector<double>& x, BoreState& state);

/// Sparse matrix in coordinate form.
struct Triplets {
    int n = 0;
    std::vector<int> rows;
    std::vector<int> cols;
    std::vector<double> vals;
};

/**
 * @brief Residual of the discrete front system, optionally with its Jacobian
 * @throws degeneracy_error if some H_p is within 1e-8 of zero (or has the wrong sign)
 */
std::vector<double> assemble_residual(const BoreState& state, const FrontConfig& cfg, const FluidPair& fluids,
                                      Triplets* jacobian = nullptr);

/// Largest absolute residual entry.
double residual_norm(const std::vector<double>& r);

struct NewtonReport {
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> history;
};

/**
 * @brief Damped Newton iteration with sparse LU sub-solves
 *
 * Steps are halved down to 1/64 until the residual decreases strictly and the
 * height functions stay monotone in p.
 * @throws convergence_error on failure, carrying the last iterate
 */
BoreState newton_solve(const BoreState& initial, const FrontConfig& cfg, const FluidPair& fluids,
                       NewtonReport* report = nullptr);

/// Vertical slice through column j, with psi_x = -H_q/H_p and psi_y = 1/H_p.
Slice column_slice(const BoreState& state, const FluidPair& fluids, int j);

/// Flow force at every column.
std::vector<double> column_flow_force(const BoreState& state, const FluidPair& fluids, double froude_sq);

/// Relative spread (max - min) / |mean| of the column flow forces.
double flow_force_spread(const BoreState& state, const FluidPair& fluids, double froude_sq);

/**
 * @brief Point evaluation of psi and its gradient in physical variables
 *
 * Each row H_i(., p_k) is a cubic B-spline in q. At a given x the row values
 * and their q-derivatives are splined again in p, y = H(x, p) is inverted for
 * p = psi, and psi_y = 1/H_p, psi_x = -H_q/H_p. The reconstruction is C^2 in
 * each layer and the interface is exactly p = 0.
 */
class PhysicalInterpolant {
public:
    PhysicalInterpolant(const BoreState& state, const FluidPair& fluids);
    bool contains(double x, double y) const;
    double eta(double x) const;
    /// 1 for the lower fluid, 2 for the upper fluid.
    int layer(double x, double y) const;
    double psi(double x, double y) const;
    Vec2 grad(double x, double y) const;
    double lambda() const { return grid_.lambda; }
    double h2() const { return grid_.h2; }
    double L() const { return grid_.L; }

private:
    struct Rows;
    struct Sample {
        double psi = 0.0;
        Vec2 grad{};
    };
    Sample sample(double x, double y) const;

    Grid grid_;
    std::shared_ptr<const Rows> rows_;
};

/// Samples of psi, grad psi and the layer label on a structured physical grid.
struct PhysicalField {
    int nx = 0;
    int ny = 0;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> psi;    ///< row-major (i over x, m over y)
    std::vector<double> psi_x;
    std::vector<double> psi_y;
    std::vector<int> layer;
};

/**
 * @brief Reconstructs psi on an (x, y) grid by inverting y = H_i(q, p) column by column
 * @throws domain_error if a requested point lies outside the channel
 */
PhysicalField reconstruct_physical(const BoreState& state, const FrontConfig& cfg, const FluidPair& fluids,
                                   const std::vector<double>& xs, const std::vector<double>& ys);

/// Serialized state document with its config and densities.
struct StoredState {
    BoreState state;
    FrontConfig cfg;
    FluidPair fluids;
};

inline constexpr const char* state_schema = "bores.state";
inline constexpr int state_schema_version = 1;

std::string state_to_json(const BoreState& state, const FrontConfig& cfg, const FluidPair& fluids);
StoredState state_from_json(const std::string& text);

} // namespace bores

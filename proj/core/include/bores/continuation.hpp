/**
 * @file continuation.hpp
 * @brief Natural-parameter continuation of bore branches in lambda
 *
 * The elevation branch starts just below the trivial depth H_d and decreases
 * lambda; the depression branch starts just above it and increases lambda. Each
 * step uses the previous state, remapped to the new depth, as the Newton guess.
 */

#pragma once

#include "bores/djsolver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bores {

enum class Direction { elev, depr };

std::string to_string(Direction d);
Direction direction_from_string(const std::string& s);

/// Monitors of one accepted state.
struct MonitorRecord {
    double lambda = 0.0;
    double max_slope = 0.0;          ///< sup |eta_q|
    double min_slope_signed = 0.0;   ///< inf eta_q
    double max_slope_signed = 0.0;   ///< sup eta_q
    double gap_upper = 0.0;          ///< min (h2 - eta)
    double gap_lower = 0.0;          ///< min (eta + lambda)
    double stagnation = 0.0;         ///< inf over the interface of |grad psi_1| + |grad psi_2|
    double upper_interface_speed = 0.0;  ///< inf over the interface of |d_y psi_2| = -sup d_y psi_2
    double eps = 0.0;
    double flow_force_spread = 0.0;
    int newton_iterations = 0;
};

/// Monitors of a state. Slopes use centred differences at interior columns.
MonitorRecord compute_monitors(const BoreState& state, const FluidPair& fluids, double froude_sq);

/// Gap to the wall a branch approaches: the lid for depression, the bed for elevation.
double approached_gap(const MonitorRecord& m, Direction d);

/// Distance of the interface to the approached wall at every column.
std::vector<double> wall_distance(const BoreState& state, Direction d);

struct StepPolicy {
    double seed_offset = 0.03;     ///< |lambda_0 - H_d|
    double seed_width = 4.0;       ///< tanh width of the seed interface
    double initial_step = 0.01;
    double max_step = 0.02;
    double min_step = 1e-5;
    double growth = 1.3;           ///< step multiplier after a success
    double wall_gap_floor = 0.01;
    double eps_limit = 5e-2;       ///< |eps| above this ends the branch
    double spread_limit = 0.1;     ///< relative flow-force spread above this ends the branch
    double sign_tol = 1e-10;
    int max_steps = 400;
    int checkpoint_every = 5;
    int tail_traces = 12;          ///< interface traces kept from the end of the branch

    void validate() const;

    bool operator==(const StepPolicy&) const = default;
};

enum class Termination {
    step_underflow,
    degeneracy,
    wall_gap_floor,
    max_steps,
    eigenvalue_drift,
    resolution_loss,
    lambda_bound
};

std::string to_string(Termination t);

struct Checkpoint {
    int record = 0;
    BoreState state;
};

struct InterfaceTrace {
    double lambda = 0.0;
    double gap = 0.0;            ///< distance to the approached wall
    std::vector<double> x;
    std::vector<double> eta;
};

struct Branch {
    Direction direction = Direction::depr;
    FluidPair fluids;
    FrontConfig cfg;             ///< grid and solver settings; lambda is that of the seed
    std::vector<MonitorRecord> records;
    std::vector<Checkpoint> checkpoints;
    std::vector<InterfaceTrace> tail;
    std::optional<BoreState> last_state;
    Termination termination = Termination::max_steps;
    std::string termination_detail;
};

/// Result of the sign checks on one state.
struct SignReport {
    bool ok = true;
    std::string detail;
};

/**
 * @brief Strict monotonicity conditions at interior grid points
 *
 * Depression: eta_q <= tol and H_q <= tol (psi_x <= 0). Elevation: the mirrored
 * signs. H_p < 0 holds for every state the residual accepts.
 */
SignReport sign_check(const BoreState& state, Direction d, double tol);

/**
 * @brief Rescales a converged state to a new upstream depth
 *
 * The interface is multiplied by the ratio of downstream offsets H_d - lambda and
 * each layer keeps its normalized vertical node positions; eps is carried over.
 */
BoreState remap_state(const BoreState& state, const FrontConfig& cfg, const FluidPair& fluids);

/**
 * @brief Traces a branch from the seed near H_d
 * @throws setup_error if the seed does not converge
 */
Branch trace_branch(Direction d, const FluidPair& fluids, const FrontConfig& cfg, const StepPolicy& policy);

/// Traces a branch starting from a given converged state.
Branch trace_branch_from(Direction d, const FluidPair& fluids, const BoreState& seed, const FrontConfig& cfg,
                         const StepPolicy& policy);

enum class LimitTrend { overturning_trend, gravity_current_trend, double_stagnation_trend, inconclusive };

std::string to_string(LimitTrend t);

struct Thresholds {
    double slope_min = 2.0;
    double gap_max = 0.05;
    double stagnation_max = 0.05;
    double flat_rate = 0.02;     ///< |d log m / d step| below this counts as flat
    int min_records = 10;

    bool operator==(const Thresholds&) const = default;
};

struct LimitVerdict {
    LimitTrend trend = LimitTrend::inconclusive;
    double slope_rate = 0.0;       ///< fitted d log(max_slope) / d step over the final third
    double gap_rate = 0.0;         ///< same for the approached wall gap
    double stagnation_rate = 0.0;
};

/// Least-squares log-rates over the final third; when several trends qualify the fastest wins.
LimitVerdict classify_limit(const Branch& branch, const Thresholds& th = {});

struct ContactAngleOptions {
    double band_factor = 4.0;   ///< band of wall distances [g, band_factor * g]
    int fit_states = 6;         ///< number of final traces used in the fit
    double gap_power = 1.0;     ///< slope model s0 + a g^power

    bool operator==(const ContactAngleOptions&) const = default;
};

struct ContactAngle {
    double degrees = 0.0;        ///< arctan of the extrapolated slope
    double raw_degrees = 0.0;    ///< arctan of the slope of the last trace
    double extrapolated_slope = 0.0;
    std::vector<double> gaps;
    std::vector<double> slopes;
};

/// Band slope of one trace: max |eta_x| over nodes whose wall distance lies in [g, k g].
double band_slope(const InterfaceTrace& trace, Direction d, double lambda, double band_factor);

/**
 * @brief Contact angle at the wall the branch approaches, extrapolated to zero gap
 * @throws inconclusive_error if fewer than three traces have nodes in the band
 */
ContactAngle contact_angle_estimate(const Branch& branch, const ContactAngleOptions& opts = {});

/// One CSV row per record.
std::string branch_csv(const Branch& branch);

/// Full branch document with records, tail traces and checkpoint states.
std::string branch_json(const Branch& branch);

} // namespace bores

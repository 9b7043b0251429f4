#include "bores/continuation.hpp"

#include "bores/csv.hpp"
#include "bores/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace bores {

namespace {

FrontConfig with_lambda(const FrontConfig& cfg, const FluidPair& fluids, double lambda) {
    FrontConfig out = make_front_config(fluids, lambda, cfg.L, cfg.nq, cfg.np1, cfg.np2);
    out.newton_tol = cfg.newton_tol;
    out.max_newton_iters = cfg.max_newton_iters;
    out.validate(fluids);
    return out;
}

double interface_slope(const BoreState& s, int j) {
    return (s.h1(j + 1, 0) - s.h1(j - 1, 0)) / (2.0 * s.grid.dq);
}

// least-squares slope of y against x
double fit_rate(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

double safe_log(double v) { return std::log(std::max(v, std::numeric_limits<double>::min())); }

} // namespace

std::string to_string(Direction d) { return d == Direction::elev ? "elev" : "depr"; }

Direction direction_from_string(const std::string& s) {
    if (s == "elev") return Direction::elev;
    if (s == "depr") return Direction::depr;
    throw parameter_error("unknown branch direction '" + s + "' (expected elev or depr)");
}

std::string to_string(Termination t) {
    switch (t) {
    case Termination::step_underflow: return "step_underflow";
    case Termination::degeneracy: return "degeneracy";
    case Termination::wall_gap_floor: return "wall_gap_floor";
    case Termination::max_steps: return "max_steps";
    case Termination::eigenvalue_drift: return "eigenvalue_drift";
    case Termination::resolution_loss: return "resolution_loss";
    case Termination::lambda_bound: return "lambda_bound";
    }
    return "unknown";
}

std::string to_string(LimitTrend t) {
    switch (t) {
    case LimitTrend::overturning_trend: return "overturning_trend";
    case LimitTrend::gravity_current_trend: return "gravity_current_trend";
    case LimitTrend::double_stagnation_trend: return "double_stagnation_trend";
    case LimitTrend::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

MonitorRecord compute_monitors(const BoreState& s, const FluidPair& fluids, double froude_sq) {
    const Grid& g = s.grid;
    MonitorRecord m;
    m.lambda = g.lambda;
    m.eps = s.eps;
    m.min_slope_signed = std::numeric_limits<double>::infinity();
    m.max_slope_signed = -std::numeric_limits<double>::infinity();
    m.gap_upper = std::numeric_limits<double>::infinity();
    m.gap_lower = std::numeric_limits<double>::infinity();
    m.stagnation = std::numeric_limits<double>::infinity();
    m.upper_interface_speed = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.nq; ++j) {
        const double eta = s.h1(j, 0);
        m.gap_upper = std::min(m.gap_upper, g.h2 - eta);
        m.gap_lower = std::min(m.gap_lower, eta + g.lambda);
    }
    for (int j = 1; j + 1 < g.nq; ++j) {
        const double sl = interface_slope(s, j);
        m.max_slope = std::max(m.max_slope, std::abs(sl));
        m.min_slope_signed = std::min(m.min_slope_signed, sl);
        m.max_slope_signed = std::max(m.max_slope_signed, sl);
        const double H1p = (-3.0 * s.h1(j, 0) + 4.0 * s.h1(j, 1) - s.h1(j, 2)) / (2.0 * g.dp1);
        const double H2p = (-3.0 * s.h2(j, 0) + 4.0 * s.h2(j, 1) - s.h2(j, 2)) / (2.0 * g.dp2);
        const double a = std::sqrt(1.0 + sl * sl);
        m.stagnation = std::min(m.stagnation, a / std::abs(H1p) + a / std::abs(H2p));
        m.upper_interface_speed = std::min(m.upper_interface_speed, 1.0 / std::abs(H2p));
    }
    m.flow_force_spread = flow_force_spread(s, fluids, froude_sq);
    return m;
}

double approached_gap(const MonitorRecord& m, Direction d) { return d == Direction::depr ? m.gap_upper : m.gap_lower; }

std::vector<double> wall_distance(const BoreState& s, Direction d) {
    std::vector<double> out(s.grid.nq);
    for (int j = 0; j < s.grid.nq; ++j) {
        const double eta = s.h1(j, 0);
        out[j] = d == Direction::depr ? s.grid.h2 - eta : eta + s.grid.lambda;
    }
    return out;
}

void StepPolicy::validate() const {
    if (!(seed_offset > 0.0 && seed_offset < 0.5)) throw parameter_error("StepPolicy: seed_offset must lie in (0, 0.5)");
    if (!(seed_width > 0.0)) throw parameter_error("StepPolicy: seed_width must be positive");
    if (!(min_step > 0.0) || !(initial_step >= min_step) || !(max_step >= initial_step)) {
        throw parameter_error("StepPolicy: need 0 < min_step <= initial_step <= max_step");
    }
    if (!(growth >= 1.0)) throw parameter_error("StepPolicy: growth must be at least 1");
    if (!(wall_gap_floor >= 0.0)) throw parameter_error("StepPolicy: wall_gap_floor must be nonnegative");
    if (!(eps_limit > 0.0)) throw parameter_error("StepPolicy: eps_limit must be positive");
    if (!(spread_limit > 0.0)) throw parameter_error("StepPolicy: spread_limit must be positive");
    if (!(sign_tol >= 0.0)) throw parameter_error("StepPolicy: sign_tol must be nonnegative");
    if (max_steps < 1 || checkpoint_every < 1 || tail_traces < 0) {
        throw parameter_error("StepPolicy: max_steps and checkpoint_every must be positive");
    }
}

SignReport sign_check(const BoreState& s, Direction d, double tol) {
    const Grid& g = s.grid;
    const double sgn = d == Direction::depr ? 1.0 : -1.0;  // sgn * slope must be <= tol
    auto fail = [](const char* what, int j, int k, double v) {
        std::ostringstream os;
        os << what << " has the wrong sign at column " << j << ", level " << k << " (" << v << ")";
        return SignReport{false, os.str()};
    };
    for (int j = 1; j + 1 < g.nq; ++j) {
        const double sl = interface_slope(s, j);
        if (sgn * sl > tol) return fail("eta_q", j, 0, sl);
        for (int k = 1; k + 1 < g.np1; ++k) {
            const double hq = (s.h1(j + 1, k) - s.h1(j - 1, k)) / (2.0 * g.dq);
            if (sgn * hq > tol) return fail("lower H_q", j, k, hq);
        }
        for (int k = 1; k + 1 < g.np2; ++k) {
            const double hq = (s.h2(j + 1, k) - s.h2(j - 1, k)) / (2.0 * g.dq);
            if (sgn * hq > tol) return fail("upper H_q", j, k, hq);
        }
    }
    return {};
}

BoreState remap_state(const BoreState& s, const FrontConfig& cfg, const FluidPair& fluids) {
    const Grid& go = s.grid;
    if (cfg.nq != go.nq || cfg.np1 != go.np1 || cfg.np2 != go.np2) {
        throw parameter_error("remap_state: grid counts must match");
    }
    const double Hd = conjugate_downstream(fluids);
    const double etad_old = Hd - go.lambda;
    const double etad_new = Hd - cfg.lambda;
    const double ratio = etad_old != 0.0 ? etad_new / etad_old : 1.0;
    BoreState out;
    out.grid = Grid::make(cfg, fluids);
    out.eps = s.eps;
    out.H1.resize(s.H1.size());
    out.H2.resize(s.H2.size());
    const Grid& gn = out.grid;
    for (int j = 0; j < gn.nq; ++j) {
        const double eo = s.h1(j, 0);
        const double en = eo * ratio;
        for (int k = 0; k < gn.np1; ++k) {
            const double t = (s.h1(j, k) - eo) / (-go.lambda - eo);
            out.h1(j, k) = en + t * (-gn.lambda - en);
        }
        for (int k = 0; k < gn.np2; ++k) {
            const double t = (s.h2(j, k) - eo) / (go.h2 - eo);
            out.h2(j, k) = en + t * (gn.h2 - en);
        }
        out.h1(j, 0) = en;
        out.h2(j, 0) = en;
        out.h1(j, gn.np1 - 1) = -gn.lambda;
        out.h2(j, gn.np2 - 1) = gn.h2;
    }
    return out;
}

Branch trace_branch(Direction d, const FluidPair& fluids, const FrontConfig& cfg, const StepPolicy& policy) {
    policy.validate();
    const double Hd = conjugate_downstream(fluids);
    const double lambda0 = d == Direction::elev ? Hd - policy.seed_offset : Hd + policy.seed_offset;
    if (!(lambda0 > 0.0 && lambda0 < 1.0)) throw setup_error("trace_branch: seed depth lies outside (0,1)");
    const FrontConfig c0 = with_lambda(cfg, fluids, lambda0);
    BoreState seed;
    try {
        seed = newton_solve(tanh_state(c0, fluids, policy.seed_width), c0, fluids);
    } catch (const error& e) {
        throw setup_error(std::string("trace_branch: seed solve failed: ") + e.what());
    }
    return trace_branch_from(d, fluids, seed, c0, policy);
}

Branch trace_branch_from(Direction d, const FluidPair& fluids, const BoreState& seed, const FrontConfig& cfg,
                         const StepPolicy& policy) {
    policy.validate();
    Branch br;
    br.direction = d;
    br.fluids = fluids;
    br.cfg = cfg;

    const double sgn = d == Direction::elev ? -1.0 : 1.0;
    const auto seed_signs = sign_check(seed, d, policy.sign_tol);
    if (!seed_signs.ok) throw setup_error("trace_branch: seed fails the sign conditions: " + seed_signs.detail);
    if (std::abs(seed.eps) > policy.eps_limit) throw setup_error("trace_branch: seed eigenvalue correction too large");

    auto accept = [&](const BoreState& s, int iters) {
        MonitorRecord m = compute_monitors(s, fluids, cfg.froude_sq);
        m.newton_iterations = iters;
        br.records.push_back(m);
        const int idx = static_cast<int>(br.records.size()) - 1;
        if (idx % policy.checkpoint_every == 0) br.checkpoints.push_back({idx, s});
        if (policy.tail_traces > 0) {
            br.tail.push_back({m.lambda, approached_gap(m, d), s.grid.q, s.eta()});
            if (br.tail.size() > static_cast<std::size_t>(policy.tail_traces)) br.tail.erase(br.tail.begin());
        }
        br.last_state = s;
    };
    accept(seed, 0);

    BoreState s = seed;
    double step = policy.initial_step;
    bool last_failure_degenerate = false;
    std::string last_failure;
    for (;;) {
        if (static_cast<int>(br.records.size()) - 1 >= policy.max_steps) {
            br.termination = Termination::max_steps;
            br.termination_detail = "reached the step limit";
            break;
        }
        if (step < policy.min_step) {
            br.termination = last_failure_degenerate ? Termination::degeneracy : Termination::step_underflow;
            br.termination_detail = last_failure;
            break;
        }
        const double lam = s.grid.lambda + sgn * step;
        if (!(lam > policy.min_step && lam < 1.0 - policy.min_step)) {
            step *= 0.5;
            last_failure_degenerate = false;
            last_failure = "lambda left (0,1)";
            if (step < policy.min_step) {
                br.termination = Termination::lambda_bound;
                br.termination_detail = last_failure;
                break;
            }
            continue;
        }
        const FrontConfig cn = with_lambda(cfg, fluids, lam);
        BoreState next;
        NewtonReport rep;
        try {
            next = newton_solve(remap_state(s, cn, fluids), cn, fluids, &rep);
        } catch (const degeneracy_error& e) {
            last_failure_degenerate = true;
            last_failure = e.what();
            step *= 0.5;
            continue;
        } catch (const convergence_error& e) {
            last_failure_degenerate = false;
            last_failure = e.what();
            step *= 0.5;
            continue;
        }
        const auto signs = sign_check(next, d, policy.sign_tol);
        if (!signs.ok) {
            last_failure_degenerate = false;
            last_failure = "sign check: " + signs.detail;
            step *= 0.5;
            continue;
        }
        if (std::abs(next.eps) > policy.eps_limit) {
            br.termination = Termination::eigenvalue_drift;
            std::ostringstream os;
            os << "eigenvalue correction " << next.eps << " at lambda " << lam;
            br.termination_detail = os.str();
            break;
        }
        const double spread = flow_force_spread(next, fluids, cfg.froude_sq);
        if (spread > policy.spread_limit) {
            br.termination = Termination::resolution_loss;
            std::ostringstream os;
            os << "flow force spread " << spread << " at lambda " << lam;
            br.termination_detail = os.str();
            break;
        }
        s = std::move(next);
        accept(s, rep.iterations);
        last_failure.clear();
        last_failure_degenerate = false;
        const double gap = approached_gap(br.records.back(), d);
        if (gap < policy.wall_gap_floor) {
            br.termination = Termination::wall_gap_floor;
            std::ostringstream os;
            os << "wall gap " << gap << " below the floor " << policy.wall_gap_floor;
            br.termination_detail = os.str();
            break;
        }
        step = std::min(step * policy.growth, policy.max_step);
    }
    if (br.checkpoints.empty() || br.checkpoints.back().record != static_cast<int>(br.records.size()) - 1) {
        br.checkpoints.push_back({static_cast<int>(br.records.size()) - 1, s});
    }
    return br;
}

LimitVerdict classify_limit(const Branch& br, const Thresholds& th) {
    LimitVerdict v;
    const std::size_t n = br.records.size();
    if (n < static_cast<std::size_t>(std::max(th.min_records, 3))) return v;
    const std::size_t start = n - std::max<std::size_t>(3, n / 3);
    std::vector<double> idx, ls, lg, lz;
    for (std::size_t i = start; i < n; ++i) {
        const auto& m = br.records[i];
        idx.push_back(static_cast<double>(i));
        ls.push_back(safe_log(m.max_slope));
        lg.push_back(safe_log(approached_gap(m, br.direction)));
        lz.push_back(safe_log(m.stagnation));
    }
    v.slope_rate = fit_rate(idx, ls);
    v.gap_rate = fit_rate(idx, lg);
    v.stagnation_rate = fit_rate(idx, lz);
    const auto& last = br.records.back();
    const bool over = last.max_slope > th.slope_min && v.slope_rate > 0.0;
    const bool gc = approached_gap(last, br.direction) < th.gap_max && v.gap_rate < 0.0;
    const bool ds = last.stagnation < th.stagnation_max && v.stagnation_rate < 0.0 &&
                    std::abs(v.slope_rate) < th.flat_rate && std::abs(v.gap_rate) < th.flat_rate;
    if (over && gc) {
        v.trend = v.slope_rate >= -v.gap_rate ? LimitTrend::overturning_trend : LimitTrend::gravity_current_trend;
    } else if (over) {
        v.trend = LimitTrend::overturning_trend;
    } else if (gc) {
        v.trend = LimitTrend::gravity_current_trend;
    } else if (ds) {
        v.trend = LimitTrend::double_stagnation_trend;
    }
    return v;
}

double band_slope(const InterfaceTrace& tr, Direction d, double lambda, double band_factor) {
    const std::size_t n = tr.eta.size();
    if (n < 3 || tr.x.size() != n) throw parameter_error("band_slope: malformed trace");
    auto dist = [&](std::size_t i) { return d == Direction::depr ? (1.0 - lambda) - tr.eta[i] : tr.eta[i] + lambda; };
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) g = std::min(g, dist(i));
    double best = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double di = dist(i);
        if (di < g || di > band_factor * g) continue;
        const double sl = std::abs((tr.eta[i + 1] - tr.eta[i - 1]) / (tr.x[i + 1] - tr.x[i - 1]));
        if (!(best >= sl)) best = sl;
    }
    return best;
}

ContactAngle contact_angle_estimate(const Branch& br, const ContactAngleOptions& opts) {
    if (!(opts.band_factor > 1.0) || opts.fit_states < 3 || !(opts.gap_power > 0.0)) {
        throw parameter_error("contact_angle_estimate: need band_factor > 1, fit_states >= 3, gap_power > 0");
    }
    ContactAngle out;
    for (const auto& tr : br.tail) {
        const double s = band_slope(tr, br.direction, tr.lambda, opts.band_factor);
        if (!std::isfinite(s) || !(tr.gap > 0.0)) continue;
        out.gaps.push_back(tr.gap);
        out.slopes.push_back(s);
    }
    if (out.gaps.size() > static_cast<std::size_t>(opts.fit_states)) {
        const auto drop = static_cast<std::ptrdiff_t>(out.gaps.size() - opts.fit_states);
        out.gaps.erase(out.gaps.begin(), out.gaps.begin() + drop);
        out.slopes.erase(out.slopes.begin(), out.slopes.begin() + drop);
    }
    if (out.gaps.size() < 3) throw inconclusive_error("contact_angle_estimate: fewer than three traces in the band");
    std::vector<double> gp(out.gaps.size());
    for (std::size_t i = 0; i < gp.size(); ++i) gp[i] = std::pow(out.gaps[i], opts.gap_power);
    const double a = fit_rate(gp, out.slopes);
    double mg = 0.0, ms = 0.0;
    for (std::size_t i = 0; i < gp.size(); ++i) {
        mg += gp[i];
        ms += out.slopes[i];
    }
    mg /= static_cast<double>(gp.size());
    ms /= static_cast<double>(gp.size());
    out.extrapolated_slope = ms - a * mg;
    constexpr double deg = 180.0 / std::numbers::pi;
    out.degrees = std::atan(std::abs(out.extrapolated_slope)) * deg;
    out.raw_degrees = std::atan(out.slopes.back()) * deg;
    return out;
}

std::string branch_csv(const Branch& br) {
    CsvTable t("bores.branch v1 direction=" + to_string(br.direction),
               {"lambda", "max_slope", "min_slope_signed", "max_slope_signed", "gap_upper", "gap_lower", "stagnation",
                "upper_interface_speed", "eps", "flow_force_spread", "newton_iterations"});
    for (const auto& m : br.records) {
        t.add_row({m.lambda, m.max_slope, m.min_slope_signed, m.max_slope_signed, m.gap_upper, m.gap_lower,
                   m.stagnation, m.upper_interface_speed, m.eps, m.flow_force_spread,
                   static_cast<double>(m.newton_iterations)});
    }
    return t.str();
}

std::string branch_json(const Branch& br) {
    using nlohmann::json;
    json j;
    j["schema"] = "bores.branch";
    j["version"] = 1;
    j["direction"] = to_string(br.direction);
    j["termination"] = to_string(br.termination);
    j["termination_detail"] = br.termination_detail;
    json recs = json::array();
    for (const auto& m : br.records) {
        recs.push_back({{"lambda", m.lambda},
                        {"max_slope", m.max_slope},
                        {"min_slope_signed", m.min_slope_signed},
                        {"max_slope_signed", m.max_slope_signed},
                        {"gap_upper", m.gap_upper},
                        {"gap_lower", m.gap_lower},
                        {"stagnation", m.stagnation},
                        {"upper_interface_speed", m.upper_interface_speed},
                        {"eps", m.eps},
                        {"flow_force_spread", m.flow_force_spread},
                        {"newton_iterations", m.newton_iterations}});
    }
    j["records"] = recs;
    json tail = json::array();
    for (const auto& tr : br.tail) tail.push_back({{"lambda", tr.lambda}, {"gap", tr.gap}, {"x", tr.x}, {"eta", tr.eta}});
    j["tail"] = tail;
    json cps = json::array();
    for (const auto& cp : br.checkpoints) {
        const FrontConfig c = with_lambda(br.cfg, br.fluids, cp.state.grid.lambda);
        cps.push_back({{"record", cp.record}, {"state", json::parse(state_to_json(cp.state, c, br.fluids))}});
    }
    j["checkpoints"] = cps;
    return j.dump(1);
}

} // namespace bores

#include "bores_cli/acceptance.hpp"

#include "bores/continuation.hpp"
#include "bores/diagnostics.hpp"
#include "bores/errors.hpp"
#include "bores/oracles.hpp"
#include "bores/params.hpp"
#include "bores_cli/config.hpp"
#include "bores_cli/pipeline.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>

namespace bores::cli {

namespace {

constexpr double pi = std::numbers::pi;

struct Check {
    bool ok = true;
    std::vector<std::string> notes;

    void require(bool cond, const std::string& note) {
        ok = ok && cond;
        notes.push_back((cond ? "" : "!") + note);
    }
    std::string detail() const {
        std::string s;
        for (std::size_t i = 0; i < notes.size(); ++i) s += (i ? "; " : "") + notes[i];
        return s;
    }
};

CriterionResult result(int id, const char* name, const Check& c) { return {id, name, c.ok, c.detail()}; }

/// Branches shared by several criteria, traced on first use.
class BranchCache {
public:
    const Branch& get(const std::string& key) {
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        spdlog::info("acceptance: tracing {}", key);
        return cache_.emplace(key, trace(key)).first->second;
    }

private:
    static Branch trace(const std::string& key) {
        StepPolicy pol;
        pol.checkpoint_every = 1;
        if (key == "elev") {
            const FluidPair fl{4.0, 1.0, false};
            pol.max_step = 0.01;
            return trace_branch(Direction::elev, fl, make_front_config(fl, 0.5, 8.0, 641, 33, 33), pol);
        }
        if (key == "depr") {
            const FluidPair fl{4.0, 1.0, false};
            return trace_branch(Direction::depr, fl, make_front_config(fl, 0.5, 16.0, 321, 17, 17), pol);
        }
        const FluidPair fl{1.0, 1.0, true};
        pol.max_step = 0.01;
        pol.checkpoint_every = 1000;
        const Direction d = key == "bous_depr" ? Direction::depr : Direction::elev;
        return trace_branch(d, fl, make_front_config(fl, 0.5, 8.0, 641, 33, 33), pol);
    }

    std::map<std::string, Branch> cache_;
};

/// Converged 4:1 bores at the trivial depth plus or minus 0.05, for the field checks.
struct BoreFields {
    FluidPair fluids{4.0, 1.0, false};
    std::vector<BoreState> states;

    BoreFields() {
        for (double off : {0.05, -0.05}) {
            const FrontConfig cfg = make_front_config(fluids, conjugate_downstream(fluids) + off);
            states.push_back(newton_solve(tanh_state(cfg, fluids), cfg, fluids));
        }
    }
};

// ---------------------------------------------------------------------------

CriterionResult exact_algebra() {
    Check c;
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> rho1d(1.0, 10.0), ratio(0.05, 0.95);
    double worst_f = 0.0, worst_h = 0.0, worst_root = 0.0;
    int missing = 0;
    for (int i = 0; i < 50; ++i) {
        FluidPair f{rho1d(rng), 0.0, false};
        f.rho2 = f.rho1 * ratio(rng);
        // (a - b)/(a + b) = (a - b)^2 / (a^2 - b^2)
        const double a = std::sqrt(f.rho1), b = std::sqrt(f.rho2);
        const double F2 = (f.rho1 - 2.0 * a * b + f.rho2) / (f.rho1 - f.rho2);
        const double Hd = 1.0 / (1.0 + std::sqrt(f.rho2 / f.rho1));
        worst_f = std::max(worst_f, std::abs(front_froude(f) - F2));
        worst_h = std::max(worst_h, std::abs(conjugate_downstream(f) - Hd));
        if (i < 10) {
            const double lambda = Hd + (i % 2 ? 1.0 : -1.0) * (0.03 + 0.01 * i);
            const auto roots = conjugate_roots(f, lambda, 200000);
            for (double want : {lambda, Hd}) {
                double best = 1.0;
                for (double r : roots) best = std::min(best, std::abs(r - want));
                if (best > 1e-10) ++missing;
                worst_root = std::max(worst_root, best);
            }
        }
    }
    c.require(worst_f <= 1e-14, fmt::format("F^2 error {:.2e}", worst_f));
    c.require(worst_h <= 1e-14, fmt::format("H_d error {:.2e}", worst_h));
    c.require(missing == 0, fmt::format("root error {:.2e} on 10 pairs", worst_root));
    return result(1, "exact algebra", c);
}

CriterionResult laminar_exactness() {
    Check c;
    double worst = 0.0;
    int cases = 0;
    for (const FluidPair& fl : {FluidPair{4.0, 1.0, false}, FluidPair{1.5, 1.0, false}, FluidPair{1.0, 1.0, true}}) {
        for (auto [nq, np1, np2] : {std::tuple{41, 5, 5}, {161, 9, 17}, {321, 17, 17}, {641, 33, 33}}) {
            for (double L : {8.0, 16.0}) {
                const FrontConfig cfg = make_front_config(fl, conjugate_downstream(fl), L, nq, np1, np2);
                worst = std::max(worst, residual_norm(assemble_residual(laminar_state(cfg, fl), cfg, fl)));
                ++cases;
            }
        }
    }
    c.require(worst <= 1e-12, fmt::format("max residual {:.2e} over {} grids", worst, cases));
    return result(2, "laminar exactness", c);
}

CriterionResult flow_force_invariance() {
    Check c;
    const FluidPair fl{4.0, 1.0, false};
    for (double off : {-0.05, 0.05}) {
        std::vector<double> spread;
        for (auto [nq, np] : {std::pair{321, 17}, {641, 33}, {1281, 65}}) {
            FrontConfig cfg = make_front_config(fl, conjugate_downstream(fl) + off, 16.0, nq, np, np);
            cfg.newton_tol = 1e-12;
            const BoreState s = newton_solve(tanh_state(cfg, fl), cfg, fl);
            spread.push_back(flow_force_spread(s, fl, cfg.froude_sq));
        }
        const double o1 = std::log2(spread[0] / spread[1]), o2 = std::log2(spread[1] / spread[2]);
        c.require(o1 >= 1.8 && o2 >= 1.8,
                  fmt::format("offset {:+.2f}: spread {:.2e} {:.2e} {:.2e}, orders {:.3f} {:.3f}", off, spread[0],
                              spread[1], spread[2], o1, o2));
    }
    return result(3, "flow-force invariance", c);
}

CriterionResult monotonicity(BranchCache& cache) {
    Check c;
    for (const char* key : {"elev", "depr"}) {
        const Branch& br = cache.get(key);
        int bad = 0;
        std::string first;
        for (const auto& cp : br.checkpoints) {
            const SignReport r = sign_check(cp.state, br.direction, 1e-10);
            if (!r.ok && bad++ == 0) first = r.detail;
        }
        c.require(bad == 0 && br.checkpoints.size() == br.records.size(),
                  fmt::format("{}: {} of {} states fail{}", key, bad, br.checkpoints.size(),
                              first.empty() ? "" : " (" + first + ")"));
    }
    return result(4, "monotonicity sign checks", c);
}

CriterionResult overturning(BranchCache& cache) {
    Check c;
    const Branch& br = cache.get("elev");
    const auto& r = br.records;
    c.require(r.size() >= 30, fmt::format("{} steps, {}", r.size(), to_string(br.termination)));
    bool nondecreasing = true;
    for (std::size_t k = 1; k < r.size(); ++k) nondecreasing = nondecreasing && r[k].max_slope >= r[k - 1].max_slope;
    c.require(nondecreasing, "max_slope nondecreasing");
    if (r.size() >= 10) {
        c.require(r.back().max_slope > 2.0 * r[9].max_slope,
                  fmt::format("slope {:.4f} vs 2 x {:.4f} at step 10", r.back().max_slope, r[9].max_slope));
    }
    const LimitVerdict v = classify_limit(br);
    c.require(v.trend == LimitTrend::overturning_trend, to_string(v.trend));
    return result(5, "overturning trend (elevation)", c);
}

CriterionResult gravity_current(BranchCache& cache) {
    Check c;
    const Branch& br = cache.get("depr");
    const auto& r = br.records;
    double gap = 1.0;
    for (const auto& m : r) gap = std::min(gap, approached_gap(m, Direction::depr));
    c.require(gap < 0.05, fmt::format("wall gap {:.4f}", gap));
    bool decreasing = r.size() >= 3;
    for (std::size_t k = r.size() - r.size() / 3; k < r.size() && k > 0; ++k) {
        decreasing = decreasing && r[k].upper_interface_speed < r[k - 1].upper_interface_speed;
    }
    c.require(decreasing, fmt::format("interface speed over the final third, last {:.4f}",
                                      r.empty() ? 0.0 : r.back().upper_interface_speed));
    const ContactAngle a = contact_angle_estimate(br);
    c.require(a.degrees <= 10.0, fmt::format("contact angle {:.2f} deg (last trace {:.2f})", a.degrees, a.raw_degrees));
    return result(6, "gravity-current trend (depression)", c);
}

CriterionResult boussinesq_angle(BranchCache& cache) {
    Check c;
    for (const char* key : {"bous_depr", "bous_elev"}) {
        const Branch& br = cache.get(key);
        const double gap = approached_gap(br.records.back(), br.direction);
        try {
            const ContactAngle a = contact_angle_estimate(br);
            c.require(std::abs(a.degrees - 60.0) <= 5.0,
                      fmt::format("{}: {:.2f} deg at gap {:.3f}, {}", key, a.degrees, gap, to_string(br.termination)));
        } catch (const inconclusive_error& e) {
            c.require(false, fmt::format("{}: {}", key, e.what()));
        }
    }
    return result(7, "Boussinesq 60 degree contact", c);
}

CriterionResult weiss_identity() {
    Check c;
    const SampledField ub = sample_exact(stokes_corner());
    const auto radii = geometric_radii(1.0, 9, 1);
    TraceOptions o;
    o.integ.adaptive.rel_tol = 1e-9;
    const FunctionalTrace M = weiss_M(ub, radii, o);
    c.require(M.max_identity_residual() <= 1e-4, fmt::format("corner identity {:.2e}", M.max_identity_residual()));
    c.require(M.max_variation() <= 1e-8,
              fmt::format("M = {:.12f}, variation {:.2e} over r in [{:.4f}, 1]", M.values.front(), M.max_variation(),
                          radii.back()));
    const SampledField ut = translated_stokes_corner(0.05);
    const FunctionalTrace Mt = weiss_M(ut, {1.0, 0.5, 0.25, 0.1}, o);
    c.require(Mt.max_identity_residual() <= 1e-4,
              fmt::format("translated identity {:.2e}, M {:.6f}..{:.6f}", Mt.max_identity_residual(),
                          Mt.values.front(), Mt.values.back()));
    return result(8, "Weiss functional identity", c);
}

CriterionResult density_values() {
    Check c;
    const double rp = 1.0, rm = 2.0;
    const double s3 = std::sqrt(3.0);
    struct Case {
        const char* name;
        ExactField field;
        double expected;
    };
    const std::vector<Case> cases{{"heavier", zero_field(Phase::minus), 2.0 * rm / 3.0},
                                  {"lighter", zero_field(Phase::plus), 2.0 * rp / 3.0},
                                  {"corner", stokes_corner(), (2.0 / 3.0 - 1.0 / s3) * rp + rm / s3},
                                  {"rotated", stokes_corner({1, 6}), rp / 6.0 + rm / 2.0}};
    double worst = 0.0;
    for (const auto& k : cases) {
        const double q = gc_density_quadrature(k.field.phase, rp, rm, 0.0);
        SampledField f = sample_exact(k.field, {}, 2.0, Region::lower_half);
        f.rho_plus = rp;
        f.rho_minus = rm;
        const GcTrace g = gc_M(f, {1.0, 0.1}, {});
        worst = std::max({worst, std::abs(q - k.expected), std::abs(g.trace.values.front() - k.expected)});
    }
    c.require(worst <= 1e-8, fmt::format("stagnation densities, max error {:.2e}", worst));
    double worst_q = 0.0;
    const double Q = -0.3;
    for (Phase p : {Phase::plus, Phase::minus}) {
        ExactField f = linear_field(0.0, 0.7);
        f.phase = [p](double, double) { return p; };
        SampledField s = sample_exact(f, {}, 2.0, Region::lower_half);
        s.rho_plus = rp;
        s.rho_minus = rm;
        s.bernoulli_q = Q;
        const double expected = -Q * (p == Phase::plus ? rp : rm) * pi / 2.0;
        const GcTrace g = gc_M(s, {1.0, 0.3, 0.1}, {});
        for (double v : g.trace.values) worst_q = std::max(worst_q, std::abs(v - expected));
    }
    c.require(worst_q <= 1e-8, fmt::format("Q = -0.3 densities, max error {:.2e}", worst_q));
    return result(9, "blowup density values", c);
}

// interface points of the shared bores, disks of radius 0.1
std::vector<SampledField> bore_samples(const BoreFields& b) {
    std::vector<SampledField> out;
    for (const auto& s : b.states) {
        PhysicalInterpolant in(s, b.fluids);
        for (double x : {0.0, 2.0}) out.push_back(sample_bore(s, b.fluids, {x, in.eta(x)}, 0.1));
    }
    return out;
}

CriterionResult energy_bound(const BoreFields& bores) {
    Check c;
    const SampledField ub = sample_exact(stokes_corner());
    const auto radii = geometric_radii(1.0, 9, 1);
    try {
        const auto r = energy_bound_check(ub, radii, std::sqrt(3.0));
        c.require(r.passed, fmt::format("corner margin {:.4f}", r.min_margin));
    } catch (const precondition_error& e) {
        const auto r = energy_bound_check(ub, radii, std::sqrt(3.0), {}, false);
        c.require(false, fmt::format("corner: {}; unconditioned margin {:.4f}", e.what(), r.min_margin));
    }
    double worst = std::numeric_limits<double>::infinity();
    bool all = true;
    for (const auto& f : bore_samples(bores)) {
        const auto r = energy_bound_check(f, geometric_radii(0.1, 8, 4), sampled_slope_bound(f, 0.1),
                                          reconstructed_integration());
        all = all && r.passed;
        worst = std::min(worst, r.min_margin);
    }
    c.require(all, fmt::format("bore fields min margin {:.4f}", worst));
    return result(10, "energy-bound inequality", c);
}

CriterionResult acf(const BoreFields& bores) {
    Check c;
    const std::vector<double> radii{1.0, 0.5, 0.25, 0.125};
    std::size_t bad = 0;
    for (const char* name : {"linear_y", "saddle", "product"}) {
        const SampledField f = builtin_field(name);
        bad += acf_phi(field_positive_part(f), field_negative_part(f), radii).violations.size();
    }
    c.require(bad == 0, fmt::format("analytic pairs: {} violations", bad));
    bad = 0;
    int pairs = 0;
    for (const auto& f : bore_samples(bores)) {
        bad += acf_phi(field_positive_part(f), field_negative_part(f), geometric_radii(0.1, 8, 4),
                       reconstructed_integration())
                   .violations.size();
        ++pairs;
    }
    c.require(bad == 0, fmt::format("{} bore pairs: {} violations", pairs, bad));
    return result(11, "ACF monotonicity", c);
}

CriterionResult variational() {
    Check c;
    const SampledField ub = sample_exact(stokes_corner());
    double worst = std::numeric_limits<double>::infinity();
    int exact = 0;
    std::string orders;
    for (const auto& b : random_bumps(7, 5, 1.0, Region::disk)) {
        const RefinementStudy st = variational_refinement(ub, 1.0, b, 4, 5);
        if (std::isinf(st.fitted_order)) {
            ++exact;
            orders += " exact";
            continue;
        }
        worst = std::min(worst, st.fitted_order);
        orders += fmt::format(" {:.2f}", st.fitted_order);
    }
    c.require(worst >= 2.0, fmt::format("fitted orders{} (n = 4..64)", orders));
    return result(12, "variational residual order", c);
}

CriterionResult poincare() {
    Check c;
    const SampledField f = sample_exact(negated(stokes_corner()));
    const PoincareDemo d = poincare_demo(f, 1.25, 1.5 * pi, pi / 5.0, geometric_radii(1.0, 9, 1));
    c.require(std::abs(d.energy_exponent - 1.0) <= 0.1, fmt::format("energy exponent {:.4f}", d.energy_exponent));
    c.require(std::abs(d.bound_exponent - 0.5) <= 0.1, fmt::format("bound exponent {:.4f}", d.bound_exponent));
    c.require(d.bound_exponent < d.energy_exponent && d.oddson.constant > 0.0,
              fmt::format("Oddson constant {:.4f}", d.oddson.constant));
    return result(13, "Poincare contradiction demo", c);
}

CriterionResult determinism(int threads) {
    Check c;
    RunConfig cfg;
    cfg.nq = 161;
    cfg.np1 = 9;
    cfg.np2 = 9;
    cfg.directions = {Direction::depr, Direction::elev};
    cfg.policy.max_steps = 6;
    cfg.policy.checkpoint_every = 2;
    cfg.diagnostics.functionals = {"weiss_M", "acf_phi"};
    cfg.diagnostics.radii_count = 4;
    const auto one = run_pipeline(cfg, {"", 1, std::nullopt});
    const auto again = run_pipeline(cfg, {"", 1, std::nullopt});
    const auto many = run_pipeline(cfg, {"", std::max(threads, 2), std::nullopt});
    auto same = [](const std::vector<Artifact>& a, const std::vector<Artifact>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i].name != b[i].name || a[i].text != b[i].text) return false;
        }
        return true;
    };
    c.require(same(one, again), fmt::format("repeat run, {} files", one.size()));
    c.require(same(one, many), fmt::format("1 vs {} threads", std::max(threads, 2)));
    return result(14, "determinism", c);
}

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
    BranchCache cache;
    std::unique_ptr<BoreFields> bores;
    auto fields = [&bores]() -> const BoreFields& {
        if (!bores) bores = std::make_unique<BoreFields>();
        return *bores;
    };
    const std::vector<std::pair<const char*, std::function<CriterionResult()>>> suite{
        {"exact algebra", exact_algebra},
        {"laminar exactness", laminar_exactness},
        {"flow-force invariance", flow_force_invariance},
        {"monotonicity sign checks", [&] { return monotonicity(cache); }},
        {"overturning trend (elevation)", [&] { return overturning(cache); }},
        {"gravity-current trend (depression)", [&] { return gravity_current(cache); }},
        {"Boussinesq 60 degree contact", [&] { return boussinesq_angle(cache); }},
        {"Weiss functional identity", weiss_identity},
        {"blowup density values", density_values},
        {"energy-bound inequality", [&] { return energy_bound(fields()); }},
        {"ACF monotonicity", [&] { return acf(fields()); }},
        {"variational residual order", variational},
        {"Poincare contradiction demo", poincare},
        {"determinism", [&] { return determinism(opts.threads); }},
    };
    std::vector<CriterionResult> out;
    for (int id = 1; id <= criterion_count; ++id) {
        if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), id) == opts.only.end()) continue;
        const auto& [name, fn] = suite[static_cast<std::size_t>(id - 1)];
        CriterionResult r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r = {id, name, false, std::string("error: ") + e.what()};
        }
        if (opts.on_result) opts.on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_result(const CriterionResult& r) {
    return fmt::format("{} [{:2d}] {}: {}", r.passed ? "PASS" : "FAIL", r.id, r.name, r.detail);
}

} // namespace bores::cli

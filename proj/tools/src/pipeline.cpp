#include "bores_cli/pipeline.hpp"

#include "bores/continuation.hpp"
#include "bores/csv.hpp"
#include "bores/errors.hpp"
#include "bores/oracles.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fmt/format.h>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

namespace bores::cli {

using nlohmann::json;

namespace {

struct FunctionalJob {
    SampledField field;                   ///< front-regime field on B_R
    std::optional<SampledField> contact;  ///< lower half-disk field for gc_M
    double R = 1.0;
    std::vector<double> radii;
    Integration integ;
    int bumps = 3;
    std::uint64_t seed = 1;
};

std::string energy_csv(const EnergyBoundReport& r) {
    CsvTable t("bores.energy_bound v1", {"r", "lhs", "rhs", "margin"});
    for (std::size_t k = 0; k < r.radii.size(); ++k) t.add_row({r.radii[k], r.lhs[k], r.rhs[k], r.margins[k]});
    return t.str();
}

std::string residual_csv(const std::vector<BumpField>& bumps, const std::vector<ResidualEntry>& res) {
    CsvTable t("bores.variational_residual v1",
               {"bump", "center_x", "center_y", "width", "amp_x", "amp_y", "residual", "scale"});
    for (std::size_t i = 0; i < res.size(); ++i) {
        const BumpField& b = bumps[i];
        t.add_row({static_cast<double>(i), b.center.x, b.center.y, b.width, b.amplitude.x, b.amplitude.y,
                   res[i].residual, res[i].scale});
    }
    return t.str();
}

json trace_summary(const FunctionalTrace& t) {
    return {{"max_identity_residual", t.max_identity_residual()}, {"max_variation", t.max_variation()}};
}

// Evaluates the requested functionals; a precondition failure is recorded, not raised.
json evaluate(const FunctionalJob& job, const std::vector<std::string>& names, const std::string& prefix,
              std::vector<Artifact>& out) {
    TraceOptions topts;
    topts.integ = job.integ;
    json summary = json::array();
    for (const auto& name : names) {
        json entry{{"functional", name}};
        try {
            if (name == "weiss_M") {
                const auto t = weiss_M(job.field, job.radii, topts);
                out.push_back({prefix + "weiss_M.csv", t.csv()});
                entry["file"] = out.back().name;
                entry.update(trace_summary(t));
            } else if (name == "AB") {
                const auto ab = functional_AB(job.field, job.radii, topts);
                out.push_back({prefix + "A.csv", ab.A.csv()});
                out.push_back({prefix + "B.csv", ab.B.csv()});
                entry["files"] = {prefix + "A.csv", prefix + "B.csv"};
                entry["A"] = trace_summary(ab.A);
                entry["B"] = trace_summary(ab.B);
            } else if (name == "energy_bound") {
                const double M = sampled_slope_bound(job.field, job.R);
                entry["slope_bound"] = M;
                EnergyBoundReport r;
                try {
                    r = energy_bound_check(job.field, job.radii, M, job.integ);
                } catch (const precondition_error& e) {
                    entry["precondition"] = e.what();
                    r = energy_bound_check(job.field, job.radii, M, job.integ, false);
                }
                out.push_back({prefix + "energy_bound.csv", energy_csv(r)});
                entry["file"] = out.back().name;
                entry["min_margin"] = r.min_margin;
                entry["passed"] = r.passed && !entry.contains("precondition");
            } else if (name == "acf_phi") {
                const auto a = acf_phi(field_positive_part(job.field), field_negative_part(job.field), job.radii,
                                       job.integ);
                out.push_back({prefix + "acf_phi.csv", a.trace.csv()});
                entry["file"] = out.back().name;
                entry["violations"] = a.violations.size();
            } else if (name == "gc_M") {
                if (!job.contact) throw precondition_error("gc_M needs a lower half-disk field");
                const auto g = gc_M(*job.contact, job.radii, topts);
                out.push_back({prefix + "gc_M.csv", g.trace.csv()});
                entry["file"] = out.back().name;
                entry["regime"] = to_string(g.regime);
                entry.update(trace_summary(g.trace));
            } else if (name == "variational_residual") {
                const auto bumps = random_bumps(job.seed, job.bumps, job.R, job.field.region);
                const auto res = variational_residual(job.field, job.R, bumps, job.integ);
                out.push_back({prefix + "variational_residual.csv", residual_csv(bumps, res)});
                entry["file"] = out.back().name;
                double worst = 0.0;
                for (const auto& e : res) worst = std::max(worst, std::abs(e.residual) / std::max(e.scale, 1e-300));
                entry["max_relative_residual"] = worst;
            } else {
                throw parameter_error("unknown functional " + name);
            }
        } catch (const precondition_error& e) {
            entry["error"] = e.what();
        } catch (const tolerance_error& e) {
            entry["error"] = e.what();
        }
        summary.push_back(entry);
    }
    return summary;
}

// radii of the traces; the largest stays clear of R so the difference stencil fits
std::vector<double> trace_radii(double R, int count, int per_octave) {
    return geometric_radii(R / 1.01, count, per_octave);
}

std::string interface_csv(const BoreState& s) {
    CsvTable t(fmt::format("bores.interface v1 lambda={}", format_double(s.grid.lambda)), {"x", "eta"});
    const auto eta = s.eta();
    for (int j = 0; j < s.grid.nq; ++j) t.add_row({s.grid.q[j], eta[j]});
    return t.str();
}

struct BranchTask {
    Direction direction;
    std::vector<Artifact> artifacts;
    json summary;
    std::exception_ptr failure;
};

// Diagnostics on a final state, centred on the interface at center_x.
json branch_diagnostics(const RunConfig& cfg, const Branch& br, const std::string& prefix,
                        std::vector<Artifact>& out) {
    const DiagnosticsRequest& d = cfg.diagnostics;
    if (d.functionals.empty() || !br.last_state) return json::array();
    const BoreState& s = *br.last_state;
    const FluidPair& fl = br.fluids;
    PhysicalInterpolant in(s, fl);
    const double x = std::clamp(d.center_x, -s.grid.L, s.grid.L);
    const double y = in.eta(x);
    const double wall = std::min({y + s.grid.lambda, s.grid.h2 - y, s.grid.L - std::abs(x)});
    const double R = std::min(d.radius, 0.9 * wall);
    if (!(R > 0.0)) throw invariant_error("interface touches a wall at the diagnostics centre");
    FunctionalJob job;
    job.field = sample_bore(s, fl, {x, y}, R);
    const double lid_room = std::min(s.grid.h2 + s.grid.lambda, s.grid.L - std::abs(x));
    if (0.9 * lid_room >= R) job.contact = sample_bore_contact(s, fl, x, R);
    job.R = R;
    job.radii = trace_radii(R, d.radii_count, d.per_octave);
    job.integ = reconstructed_integration();
    job.bumps = d.bumps;
    job.seed = d.seed;
    json j{{"center", {x, y}}, {"radius", R}, {"lambda", s.grid.lambda}};
    j["functionals"] = evaluate(job, d.functionals, prefix, out);
    return j;
}

void run_branch(const RunConfig& cfg, const std::optional<StoredState>& seed, BranchTask& task) {
    const Direction d = task.direction;
    const std::string tag = to_string(d);
    spdlog::info("tracing {} branch", tag);
    const FrontConfig fc = cfg.front_config(conjugate_downstream(cfg.fluids));
    Branch br = seed ? trace_branch_from(d, cfg.fluids, seed->state, fc, cfg.policy)
                     : trace_branch(d, cfg.fluids, fc, cfg.policy);
    spdlog::info("{} branch: {} records, {}", tag, br.records.size(), to_string(br.termination));

    for (const auto& cp : br.checkpoints) {
        const SignReport r = sign_check(cp.state, d, cfg.policy.sign_tol);
        if (!r.ok) throw invariant_error(fmt::format("{} checkpoint {}: {}", tag, cp.record, r.detail));
    }

    auto& out = task.artifacts;
    out.push_back({"branch_" + tag + ".csv", branch_csv(br)});
    out.push_back({"branch_" + tag + ".json", branch_json(br)});
    json cps = json::array();
    for (const auto& cp : br.checkpoints) {
        out.push_back({fmt::format("interface_{}_{:04d}.csv", tag, cp.record), interface_csv(cp.state)});
        cps.push_back(out.back().name);
    }
    if (br.last_state) {
        const FrontConfig last = cfg.front_config(br.last_state->grid.lambda);
        out.push_back({"state_" + tag + ".json", state_to_json(*br.last_state, last, br.fluids)});
    }

    json& s = task.summary;
    s["direction"] = tag;
    s["records"] = br.records.size();
    s["termination"] = to_string(br.termination);
    s["termination_detail"] = br.termination_detail;
    if (!br.records.empty()) s["final_lambda"] = br.records.back().lambda;
    s["interface_files"] = cps;
    const LimitVerdict v = classify_limit(br, cfg.thresholds);
    s["verdict"] = {{"trend", to_string(v.trend)},
                    {"slope_rate", v.slope_rate},
                    {"gap_rate", v.gap_rate},
                    {"stagnation_rate", v.stagnation_rate}};
    try {
        const ContactAngle a = contact_angle_estimate(br, cfg.contact);
        s["contact_angle"] = {{"degrees", a.degrees},
                              {"raw_degrees", a.raw_degrees},
                              {"extrapolated_slope", a.extrapolated_slope},
                              {"gaps", a.gaps},
                              {"slopes", a.slopes}};
    } catch (const inconclusive_error& e) {
        s["contact_angle"] = {{"error", e.what()}};
    }
    s["diagnostics"] = branch_diagnostics(cfg, br, "diag_" + tag + "_", out);
}

StoredState read_state(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw setup_error("cannot read state file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return state_from_json(ss.str());
    } catch (const std::exception& e) {
        throw setup_error("invalid state file " + path.string() + ": " + e.what());
    }
}

} // namespace

std::vector<Artifact> run_pipeline(const RunConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    std::vector<Artifact> out;
    json manifest;
    manifest["schema"] = manifest_schema;
    manifest["version"] = manifest_version;
    manifest["config_hash"] = config_hash(cfg);
    manifest["fluids"] = {{"rho1", cfg.fluids.rho1}, {"rho2", cfg.fluids.rho2}, {"boussinesq", cfg.fluids.boussinesq}};
    out.push_back({"config.ini", config_to_string(cfg)});

    if (cfg.sanity) {
        // the laminar state solves the discrete system exactly at the trivial depth
        const FrontConfig fc = cfg.front_config(conjugate_downstream(cfg.fluids));
        const double r = residual_norm(assemble_residual(laminar_state(fc, cfg.fluids), fc, cfg.fluids));
        const bool ok = r <= sanity_threshold;
        manifest["sanity"] = {{"check", fmt::format("residual_max <= {:g}", sanity_threshold)},
                              {"residual_max", r},
                              {"passed", ok}};
        spdlog::info("laminar residual {:.3e}", r);
        if (!ok) throw invariant_error(fmt::format("laminar residual {} exceeds {}", r, sanity_threshold));
    }

    std::optional<StoredState> seed;
    if (opts.seed_state) {
        seed = read_state(*opts.seed_state);
        if (!(seed->fluids == cfg.fluids)) throw setup_error("seed state densities differ from the config");
    }

    std::vector<BranchTask> tasks;
    for (Direction d : cfg.directions) tasks.push_back({d, {}, json::object(), nullptr});
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                run_branch(cfg, seed, tasks[i]);
            } catch (...) {
                tasks[i].failure = std::current_exception();
            }
        }
    };
    const std::size_t n = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(opts.threads, 1)), 1,
                                                  std::max<std::size_t>(tasks.size(), 1));
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    pool.clear();

    json branches = json::array();
    for (auto& t : tasks) {
        if (t.failure) std::rethrow_exception(t.failure);
        for (auto& a : t.artifacts) out.push_back(std::move(a));
        branches.push_back(std::move(t.summary));
    }
    manifest["branches"] = branches;
    json files = json::array();
    for (const auto& a : out) files.push_back(a.name);
    manifest["files"] = files;
    out.push_back({"manifest.json", manifest.dump(2) + "\n"});
    return out;
}

void write_artifacts(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts) {
    std::filesystem::create_directories(dir);
    for (const auto& a : artifacts) {
        std::ofstream f(dir / a.name, std::ios::binary);
        f << a.text;
        if (!f) throw setup_error("cannot write " + (dir / a.name).string());
    }
}

const std::vector<std::string>& builtin_fields() {
    static const std::vector<std::string> names{"stokes_corner", "translated_stokes_corner", "linear_y", "saddle",
                                                "product", "mu_harmonic"};
    return names;
}

SampledField builtin_field(const std::string& name, Vec2 center) {
    if (name == "translated_stokes_corner" && center.x == 0.0 && center.y == 0.0) return translated_stokes_corner(0.05);
    if (name == "translated_stokes_corner") return sample_exact(translated(stokes_corner(), 0.05, 0.0), center);
    if (name == "stokes_corner") return sample_exact(stokes_corner(), center);
    if (name == "linear_y") return sample_exact(linear_field(0.0, 1.0), center);
    if (name == "saddle") return sample_exact(saddle_field(), center);
    if (name == "product") return sample_exact(product_field(), center);
    if (name == "mu_harmonic") return sample_exact(mu_harmonic(1.25), center);
    throw setup_error("unknown built-in field " + name);
}

std::vector<Artifact> diagnose(const DiagnoseRequest& req) {
    if (!(req.radius > 0.0) || req.radii_count < 3 || req.per_octave < 1 || req.bumps < 1) {
        throw setup_error("diagnose: need radius > 0, radii_count >= 3, per_octave >= 1, bumps >= 1");
    }
    FunctionalJob job;
    job.R = req.radius;
    job.radii = trace_radii(req.radius, req.radii_count, req.per_octave);
    job.bumps = req.bumps;
    job.seed = req.seed;
    json doc{{"schema", "bores.diagnose"}, {"version", 1}, {"center", {req.center.x, req.center.y}},
             {"radius", req.radius}};
    if (req.state) {
        const StoredState st = read_state(*req.state);
        PhysicalInterpolant in(st.state, st.fluids);
        if (!in.contains(req.center.x, req.center.y)) {
            throw setup_error(fmt::format("centre ({}, {}) lies outside the channel", req.center.x, req.center.y));
        }
        try {
            job.field = sample_bore(st.state, st.fluids, req.center, req.radius);
            if (std::abs(req.center.y - st.state.grid.h2) <= 1e-12) {
                job.contact = sample_bore_contact(st.state, st.fluids, req.center.x, req.radius);
            }
        } catch (const domain_error& e) {
            throw setup_error(e.what());
        }
        job.integ = reconstructed_integration();
        doc["source"] = req.state->filename().string();
        doc["lambda"] = st.state.grid.lambda;
    } else {
        job.field = builtin_field(req.field, req.center);
        SampledField c = job.field;
        c.region = Region::lower_half;
        job.contact = c;
        doc["source"] = req.field;
    }
    std::vector<Artifact> out;
    doc["functionals"] = evaluate(job, req.functionals, "", out);
    out.push_back({"diagnose.json", doc.dump(2) + "\n"});
    return out;
}

} // namespace bores::cli

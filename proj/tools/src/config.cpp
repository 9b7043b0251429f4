#include "bores_cli/config.hpp"

#include "bores/errors.hpp"

#include <boost/algorithm/string/classification.hpp>
#include <boost/algorithm/string/split.hpp>
#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace bores::cli {

namespace {

/// Shortest text that parses back to the same double.
std::string config_double(double v) { return fmt::format("{}", v); }

// value parsers; std::invalid_argument carries the reason up to the config_error
double to_double(const std::string& s) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(v)) {
        throw std::invalid_argument("expected a finite number, got '" + s + "'");
    }
    return v;
}

template <class Int>
Int to_integer(const std::string& s) {
    Int v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size()) {
        throw std::invalid_argument("expected an integer, got '" + s + "'");
    }
    return v;
}

bool to_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::invalid_argument("expected true or false, got '" + s + "'");
}

std::vector<std::string> to_list(const std::string& s) {
    std::vector<std::string> parts;
    if (s.empty()) return parts;
    boost::split(parts, s, boost::is_any_of(","));
    for (auto& p : parts) {
        boost::trim(p);
        if (p.empty()) throw std::invalid_argument("empty list entry");
    }
    return parts;
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
    return out;
}

struct Field {
    const char* section;
    const char* key;
    const char* doc;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
    bool required = false;
};

Field num(const char* sec, const char* key, const char* doc, double RunConfig::*m) {
    return {sec, key, doc, [m](const RunConfig& c) { return config_double(c.*m); },
            [m](RunConfig& c, const std::string& v) { c.*m = to_double(v); }};
}

template <class S, class T>
Field member(const char* sec, const char* key, const char* doc, S RunConfig::*outer, T S::*m) {
    Field f{sec, key, doc, nullptr, nullptr};
    if constexpr (std::is_same_v<T, double>) {
        f.get = [outer, m](const RunConfig& c) { return config_double(c.*outer.*m); };
        f.set = [outer, m](RunConfig& c, const std::string& v) { c.*outer.*m = to_double(v); };
    } else if constexpr (std::is_same_v<T, bool>) {
        f.get = [outer, m](const RunConfig& c) { return std::string(c.*outer.*m ? "true" : "false"); };
        f.set = [outer, m](RunConfig& c, const std::string& v) { c.*outer.*m = to_bool(v); };
    } else {
        f.get = [outer, m](const RunConfig& c) { return std::to_string(c.*outer.*m); };
        f.set = [outer, m](RunConfig& c, const std::string& v) { c.*outer.*m = to_integer<T>(v); };
    }
    return f;
}

Field integer(const char* sec, const char* key, const char* doc, int RunConfig::*m) {
    return {sec, key, doc, [m](const RunConfig& c) { return std::to_string(c.*m); },
            [m](RunConfig& c, const std::string& v) { c.*m = to_integer<int>(v); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        std::vector<Field> t;
        Field rho1 = member("fluids", "rho1", "density of the lower (heavier) fluid", &RunConfig::fluids, &FluidPair::rho1);
        rho1.required = true;
        Field rho2 = member("fluids", "rho2", "density of the upper fluid", &RunConfig::fluids, &FluidPair::rho2);
        rho2.required = true;
        t.push_back(rho1);
        t.push_back(rho2);
        t.push_back(member("fluids", "boussinesq", "use the Boussinesq dynamic condition (needs rho1 = rho2)",
                           &RunConfig::fluids, &FluidPair::boussinesq));

        t.push_back(num("grid", "L", "half length of the truncated channel", &RunConfig::L));
        t.push_back(integer("grid", "nq", "grid points in q (odd)", &RunConfig::nq));
        t.push_back(integer("grid", "np1", "grid points in p, lower layer", &RunConfig::np1));
        t.push_back(integer("grid", "np2", "grid points in p, upper layer", &RunConfig::np2));
        t.push_back(num("grid", "newton_tol", "Newton tolerance on the scaled residual (max norm)", &RunConfig::newton_tol));
        t.push_back(integer("grid", "max_newton_iters", "Newton iteration cap", &RunConfig::max_newton_iters));

        t.push_back({"branch", "directions", "branches to trace: depr, elev (may be empty)",
                     [](const RunConfig& c) {
                         std::vector<std::string> v;
                         for (Direction d : c.directions) v.push_back(to_string(d));
                         return join(v);
                     },
                     [](RunConfig& c, const std::string& s) {
                         c.directions.clear();
                         for (const auto& p : to_list(s)) c.directions.push_back(direction_from_string(p));
                     }});
        using P = StepPolicy;
        auto pol = [&t](const char* key, const char* doc, auto m) {
            t.push_back(member("branch", key, doc, &RunConfig::policy, m));
        };
        pol("seed_offset", "distance of the seed depth from the trivial depth", &P::seed_offset);
        pol("seed_width", "tanh width of the seed interface", &P::seed_width);
        pol("initial_step", "first continuation step in lambda", &P::initial_step);
        pol("max_step", "largest continuation step", &P::max_step);
        pol("min_step", "step below which the branch ends", &P::min_step);
        pol("growth", "step multiplier after an accepted step", &P::growth);
        pol("wall_gap_floor", "branch ends when the interface is this close to a wall", &P::wall_gap_floor);
        pol("eps_limit", "branch ends when |eps| exceeds this", &P::eps_limit);
        pol("spread_limit", "branch ends when the relative flow-force spread exceeds this", &P::spread_limit);
        pol("sign_tol", "tolerance of the monotonicity sign checks", &P::sign_tol);
        pol("max_steps", "accepted steps per branch", &P::max_steps);
        pol("checkpoint_every", "store the state every this many records", &P::checkpoint_every);
        pol("tail_traces", "interface traces kept from the end of the branch", &P::tail_traces);

        auto thr = [&t](const char* key, const char* doc, auto m) {
            t.push_back(member("thresholds", key, doc, &RunConfig::thresholds, m));
        };
        thr("slope_min", "final max slope for an overturning verdict", &Thresholds::slope_min);
        thr("gap_max", "final wall gap for a gravity-current verdict", &Thresholds::gap_max);
        thr("stagnation_max", "final stagnation monitor for a double-stagnation verdict", &Thresholds::stagnation_max);
        thr("flat_rate", "log-rates below this count as flat", &Thresholds::flat_rate);
        thr("min_records", "records needed for any verdict", &Thresholds::min_records);

        auto con = [&t](const char* key, const char* doc, auto m) {
            t.push_back(member("contact", key, doc, &RunConfig::contact, m));
        };
        con("band_factor", "slopes are taken where the wall distance is in [g, band_factor g]", &ContactAngleOptions::band_factor);
        con("fit_states", "final interface traces used in the extrapolation", &ContactAngleOptions::fit_states);
        con("gap_power", "slope model s0 + a g^gap_power", &ContactAngleOptions::gap_power);

        t.push_back({"diagnostics", "functionals",
                     "functionals on final states: weiss_M, AB, energy_bound, acf_phi, gc_M, variational_residual",
                     [](const RunConfig& c) { return join(c.diagnostics.functionals); },
                     [](RunConfig& c, const std::string& s) {
                         c.diagnostics.functionals = to_list(s);
                         for (const auto& f : c.diagnostics.functionals) {
                             const auto& k = known_functionals();
                             if (std::find(k.begin(), k.end(), f) == k.end()) {
                                 throw std::invalid_argument("unknown functional '" + f + "'");
                             }
                         }
                     }});
        using D = DiagnosticsRequest;
        auto dia = [&t](const char* key, const char* doc, auto m) {
            t.push_back(member("diagnostics", key, doc, &RunConfig::diagnostics, m));
        };
        dia("center_x", "x of the interface point the disks are centred on", &D::center_x);
        dia("radius", "largest radius (clipped to 0.9 of the wall distance)", &D::radius);
        dia("radii_count", "number of radii", &D::radii_count);
        dia("per_octave", "radii per halving of r", &D::per_octave);
        dia("bumps", "random test fields for the variational residual", &D::bumps);
        dia("seed", "seed of the random test fields", &D::seed);

        t.push_back({"run", "sanity", "check the residual of the laminar state before tracing",
                     [](const RunConfig& c) { return std::string(c.sanity ? "true" : "false"); },
                     [](RunConfig& c, const std::string& s) { c.sanity = to_bool(s); }});
        t.push_back({"output", "dir", "output directory (overridden by --out)",
                     [](const RunConfig& c) { return c.out_dir; },
                     [](RunConfig& c, const std::string& s) { c.out_dir = s; }});
        return t;
    }();
    return table;
}

// line of every "section.key", and of every section header under "section"
std::map<std::string, int> key_lines(const std::string& text) {
    std::map<std::string, int> lines;
    std::istringstream in(text);
    std::string line, section;
    for (int n = 1; std::getline(in, line); ++n) {
        boost::trim(line);
        if (line.empty() || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = boost::trim_copy(line.substr(1, line.size() - 2));
            lines.emplace(section, n);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        lines.emplace(section + "." + boost::trim_copy(line.substr(0, eq)), n);
    }
    return lines;
}

} // namespace

const std::vector<std::string>& known_functionals() {
    static const std::vector<std::string> names{"weiss_M", "AB", "energy_bound", "acf_phi", "gc_M",
                                                "variational_residual"};
    return names;
}

FrontConfig RunConfig::front_config(double at_lambda) const {
    FrontConfig c = make_front_config(fluids, at_lambda, L, nq, np1, np2);
    c.newton_tol = newton_tol;
    c.max_newton_iters = max_newton_iters;
    return c;
}

void RunConfig::validate() const {
    auto check = [](bool ok, const char* field, const std::string& what) {
        if (!ok) throw config_error(what, 0, field);
    };
    try {
        fluids.validate();
    } catch (const error& e) {
        throw config_error(e.what(), 0, "fluids");
    }
    try {
        front_config(conjugate_downstream(fluids)).validate(fluids);
    } catch (const error& e) {
        throw config_error(e.what(), 0, "grid");
    }
    try {
        policy.validate();
    } catch (const error& e) {
        throw config_error(e.what(), 0, "branch");
    }
    check(thresholds.min_records >= 3, "thresholds.min_records", "min_records must be at least 3");
    check(contact.band_factor > 1.0, "contact.band_factor", "band_factor must exceed 1");
    check(contact.fit_states >= 3, "contact.fit_states", "fit_states must be at least 3");
    check(contact.gap_power > 0.0, "contact.gap_power", "gap_power must be positive");
    check(diagnostics.radius > 0.0, "diagnostics.radius", "radius must be positive");
    check(diagnostics.radii_count >= 3, "diagnostics.radii_count", "radii_count must be at least 3");
    check(diagnostics.per_octave >= 1, "diagnostics.per_octave", "per_octave must be at least 1");
    check(diagnostics.bumps >= 1, "diagnostics.bumps", "bumps must be at least 1");
    check(!out_dir.empty(), "output.dir", "dir must not be empty");
}

RunConfig parse_config(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw config_error(e.message(), static_cast<int>(e.line()), "");
    }
    const auto lines = key_lines(text);
    auto line_of = [&lines](const std::string& path) {
        const auto it = lines.find(path);
        return it == lines.end() ? 0 : it->second;
    };
    RunConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw config_error("key outside any section", line_of("." + section), section);
        }
        for (const auto& [key, value] : body) {
            const std::string path = section + "." + key;
            const auto& table = fields();
            const auto it = std::find_if(table.begin(), table.end(),
                                         [&](const Field& f) { return section == f.section && key == f.key; });
            if (it == table.end()) throw config_error("unknown field", line_of(path), path);
            try {
                it->set(cfg, boost::trim_copy(value.data()));
            } catch (const std::exception& e) {
                throw config_error(e.what(), line_of(path), path);
            }
        }
    }
    for (const auto& f : fields()) {
        const std::string path = std::string(f.section) + "." + f.key;
        if (f.required && !tree.get_child_optional(pt::ptree::path_type(path, '.'))) {
            throw config_error("missing required field", line_of(f.section), path);
        }
    }
    try {
        cfg.validate();
    } catch (const config_error& e) {
        throw config_error(e.what(), line_of(e.field), e.field);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read config file " + path, 0, "");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_string(const RunConfig& cfg, bool with_comments) {
    std::string out;
    std::string section;
    for (const auto& f : fields()) {
        if (section != f.section) {
            if (!section.empty()) out += "\n";
            section = f.section;
            out += "[" + section + "]\n";
        }
        if (with_comments) out += fmt::format("; {}{}\n", f.doc, f.required ? " (required)" : "");
        out += fmt::format("{} = {}\n", f.key, f.get(cfg));
    }
    return out;
}

std::string config_hash(const RunConfig& cfg) {
    // FNV-1a, 64 bit
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config_to_string(cfg)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

} // namespace bores::cli

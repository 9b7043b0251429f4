#include "bores/djsolver.hpp"
#include "bores/errors.hpp"

#include <json.hpp>

namespace bores {

using nlohmann::json;

std::string state_to_json(const BoreState& state, const FrontConfig& cfg, const FluidPair& fluids) {
    json j;
    j["schema"] = state_schema;
    j["version"] = state_schema_version;
    j["fluids"] = {{"rho1", fluids.rho1}, {"rho2", fluids.rho2}, {"boussinesq", fluids.boussinesq}};
    j["config"] = {{"lambda", cfg.lambda},   {"froude_sq", cfg.froude_sq}, {"h2", cfg.h2},
                   {"L", cfg.L},             {"nq", cfg.nq},               {"np1", cfg.np1},
                   {"np2", cfg.np2},         {"newton_tol", cfg.newton_tol},
                   {"max_newton_iters", cfg.max_newton_iters}};
    j["eps"] = state.eps;
    j["layout"] = "row-major (j over q, k over p)";
    j["H1"] = state.H1;
    j["H2"] = state.H2;
    return j.dump(1);
}

StoredState state_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw parameter_error(std::string("state file: invalid JSON: ") + e.what());
    }
    try {
        if (j.at("schema").get<std::string>() != state_schema) throw parameter_error("state file: unknown schema");
        const int version = j.at("version").get<int>();
        if (version != state_schema_version) {
            throw parameter_error("state file: unsupported schema version " + std::to_string(version));
        }
        StoredState out;
        const auto& f = j.at("fluids");
        out.fluids.rho1 = f.at("rho1").get<double>();
        out.fluids.rho2 = f.at("rho2").get<double>();
        out.fluids.boussinesq = f.at("boussinesq").get<bool>();
        const auto& c = j.at("config");
        out.cfg.lambda = c.at("lambda").get<double>();
        out.cfg.froude_sq = c.at("froude_sq").get<double>();
        out.cfg.h2 = c.at("h2").get<double>();
        out.cfg.L = c.at("L").get<double>();
        out.cfg.nq = c.at("nq").get<int>();
        out.cfg.np1 = c.at("np1").get<int>();
        out.cfg.np2 = c.at("np2").get<int>();
        out.cfg.newton_tol = c.at("newton_tol").get<double>();
        out.cfg.max_newton_iters = c.at("max_newton_iters").get<int>();
        out.cfg.validate(out.fluids);
        out.state.grid = Grid::make(out.cfg, out.fluids);
        out.state.eps = j.at("eps").get<double>();
        out.state.H1 = j.at("H1").get<std::vector<double>>();
        out.state.H2 = j.at("H2").get<std::vector<double>>();
        const auto& g = out.state.grid;
        if (out.state.H1.size() != static_cast<std::size_t>(g.nq) * g.np1 ||
            out.state.H2.size() != static_cast<std::size_t>(g.nq) * g.np2) {
            throw parameter_error("state file: field arrays do not match the grid");
        }
        return out;
    } catch (const json::exception& e) {
        throw parameter_error(std::string("state file: ") + e.what());
    }
}

} // namespace bores

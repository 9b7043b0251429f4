#include "bores/errors.hpp"

#include <sstream>
#include <utility>

namespace bores {

namespace {

std::string degeneracy_message(int layer, int j, int k, double hp) {
    std::ostringstream os;
    os << "degenerate height function: |H_p| = " << hp << " in layer " << layer
       << " at node (j=" << j << ", k=" << k << ")";
    return os.str();
}

std::string config_message(const std::string& what, int line, const std::string& field) {
    std::ostringstream os;
    os << "config error";
    if (line > 0) os << " at line " << line;
    if (!field.empty()) os << " [" << field << "]";
    os << ": " << what;
    return os.str();
}

} // namespace

degeneracy_error::degeneracy_error(int layer_, int j_, int k_, double hp_)
    : error(degeneracy_message(layer_, j_, k_, hp_)), layer(layer_), j(j_), k(k_), hp(hp_) {}

convergence_error::convergence_error(const std::string& what, double residual_, int iterations_,
                                     std::vector<double> last_iterate_)
    : error(what), residual(residual_), iterations(iterations_),
      last_iterate(std::move(last_iterate_)) {}

tolerance_error::tolerance_error(const std::string& what, double estimate_, double error_estimate_)
    : error(what), estimate(estimate_), error_estimate(error_estimate_) {}

config_error::config_error(const std::string& what, int line_, std::string field_)
    : error(config_message(what, line_, field_)), line(line_), field(std::move(field_)) {}

} // namespace bores

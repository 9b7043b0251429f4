#include "bores/params.hpp"

#include "bores/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bores {

void FluidPair::validate() const {
    if (!(rho1 > 0.0) || !(rho2 > 0.0)) throw parameter_error("densities must be positive");
    if (!std::isfinite(rho1) || !std::isfinite(rho2)) throw parameter_error("densities must be finite");
    if (boussinesq) {
        if (rho1 != rho2) throw parameter_error("Boussinesq pair requires rho2 == rho1");
    } else if (!(rho2 < rho1)) {
        throw parameter_error("non-Boussinesq pair requires rho2 < rho1");
    }
}

double front_froude(const FluidPair& fluids) {
    fluids.validate();
    if (fluids.boussinesq) return 0.0;
    const double a = std::sqrt(fluids.rho1);
    const double b = std::sqrt(fluids.rho2);
    return (a - b) / (a + b);
}

double conjugate_downstream(const FluidPair& fluids) {
    fluids.validate();
    const double a = std::sqrt(fluids.rho1);
    const double b = std::sqrt(fluids.rho2);
    return a / (a + b);
}

DynamicCoefficients dynamic_coefficients(const FluidPair& fluids) {
    if (fluids.boussinesq) return {-8.0 * fluids.rho1, 0.0};
    const double F2 = front_froude(fluids);
    return {2.0 * (fluids.rho2 - fluids.rho1) / F2, fluids.rho2 - fluids.rho1};
}

double jump_function(const FluidPair& fluids, double lambda, double H, double eps) {
    const auto dc = dynamic_coefficients(fluids);
    const double h2 = 1.0 - lambda;
    return fluids.rho2 * h2 * h2 / ((1.0 - H) * (1.0 - H)) - fluids.rho1 * lambda * lambda / (H * H)
           + dc.c * (1.0 + eps) * (H - lambda) - dc.rhs;
}

double jump_function_dH(const FluidPair& fluids, double lambda, double H, double eps) {
    const auto dc = dynamic_coefficients(fluids);
    const double h2 = 1.0 - lambda;
    return 2.0 * fluids.rho2 * h2 * h2 / std::pow(1.0 - H, 3) + 2.0 * fluids.rho1 * lambda * lambda / std::pow(H, 3)
           + dc.c * (1.0 + eps);
}

namespace {

// integral over [a, b] of the hydrostatic weight of the given layer
double hydrostatic(const FluidPair& fluids, double F2, int layer, double a, double b) {
    const double sq = b * b - a * a;
    const double len = b - a;
    if (fluids.boussinesq) {
        const double sgn = layer == 1 ? 1.0 : -1.0;
        return fluids.rho1 * (sgn * 2.0 * sq - len);
    }
    const double rho = layer == 1 ? fluids.rho1 : fluids.rho2;
    return rho * (sq / F2 - len);
}

double hydrostatic_weight(const FluidPair& fluids, double F2, int layer, double y) {
    if (fluids.boussinesq) return fluids.rho1 * ((layer == 1 ? 4.0 : -4.0) * y - 1.0);
    const double rho = layer == 1 ? fluids.rho1 : fluids.rho2;
    return rho * (2.0 * y / F2 - 1.0);
}

} // namespace

double laminar_flow_force(const FluidPair& fluids, double lambda, double H) {
    fluids.validate();
    if (!(H > 0.0 && H < 1.0)) throw domain_error("laminar_flow_force: H must lie in (0,1)");
    const double F2 = front_froude(fluids);
    const double h2 = 1.0 - lambda;
    const double kinetic = fluids.rho1 * lambda * lambda / H + fluids.rho2 * h2 * h2 / (1.0 - H);
    const double a = H - lambda;
    return 0.5 * (kinetic - hydrostatic(fluids, F2, 1, -lambda, a) - hydrostatic(fluids, F2, 2, a, h2));
}

double upstream_flow_force(const FluidPair& fluids, double lambda) {
    fluids.validate();
    const double h2 = 1.0 - lambda;
    if (fluids.boussinesq) return fluids.rho1 * (1.0 + lambda * lambda + h2 * h2);
    const double F2 = front_froude(fluids);
    return fluids.rho1 * (lambda + lambda * lambda / (2.0 * F2)) + fluids.rho2 * (h2 - h2 * h2 / (2.0 * F2));
}

ConjugateHeight conjugate_height(const FluidPair& fluids, double lambda, double eps) {
    const auto dc = dynamic_coefficients(fluids);
    double H = conjugate_downstream(fluids);
    auto derivative = [&](double h) {
        const double gH = jump_function_dH(fluids, lambda, h, eps);
        return gH != 0.0 ? -dc.c * (h - lambda) / gH : 0.0;
    };
    // H_d is an exact root for every lambda when eps = 0; Newton would wander along
    // the double root at lambda = H_d
    if (eps == 0.0) return {H, derivative(H)};
    for (int it = 0; it < 100; ++it) {
        const double g = jump_function(fluids, lambda, H, eps);
        if (g == 0.0) return {H, derivative(H)};
        const double gH = jump_function_dH(fluids, lambda, H, eps);
        const double dH = -g / gH;
        H += dH;
        if (!(H > 0.0 && H < 1.0) || !std::isfinite(H)) break;
        if (std::abs(dH) < 1e-14) return {H, derivative(H)};
    }
    std::ostringstream os;
    os << "conjugate_height: Newton on the jump condition failed at lambda=" << lambda << ", eps=" << eps;
    throw convergence_error(os.str(), std::abs(jump_function(fluids, lambda, H, eps)), 100, {H});
}

std::vector<double> jump_roots(const FluidPair& fluids, double lambda, std::size_t n_scan) {
    fluids.validate();
    if (!(lambda > 0.0 && lambda < 1.0)) throw domain_error("jump_roots: lambda must lie in (0,1)");
    if (n_scan < 3) throw parameter_error("jump_roots: scan needs at least 3 points");
    auto g = [&](double H) { return jump_function(fluids, lambda, H); };
    auto node = [&](std::size_t i) { return (static_cast<double>(i) + 0.5) / static_cast<double>(n_scan); };

    std::vector<double> roots;
    double a = node(0);
    double ga = g(a);
    if (ga == 0.0) roots.push_back(a);
    for (std::size_t i = 1; i < n_scan; ++i) {
        const double b = node(i);
        const double gb = g(b);
        if (gb == 0.0) {
            roots.push_back(b);
        } else if (ga != 0.0 && (ga < 0.0) != (gb < 0.0)) {
            double lo = a, hi = b, glo = ga;
            for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const double gm = g(mid);
                if (gm == 0.0) { lo = hi = mid; break; }
                if ((gm < 0.0) == (glo < 0.0)) { lo = mid; glo = gm; } else { hi = mid; }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        a = b;
        ga = gb;
    }
    return roots;
}

std::vector<double> conjugate_roots(const FluidPair& fluids, double lambda, std::size_t n_scan, double force_tol) {
    const double S0 = upstream_flow_force(fluids, lambda);
    std::vector<double> out;
    for (double H : jump_roots(fluids, lambda, n_scan)) {
        const double S = laminar_flow_force(fluids, lambda, H);
        if (std::abs(S - S0) <= force_tol * std::max(1.0, std::abs(S0))) out.push_back(H);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double ConjugateState::psi_up(double y) const {
    return y < 0.0 ? -std::sqrt(fluids.rho1) * y : -std::sqrt(fluids.rho2) * y;
}

double ConjugateState::psi_up_y(double y) const {
    return y < 0.0 ? -std::sqrt(fluids.rho1) : -std::sqrt(fluids.rho2);
}

double ConjugateState::psi_down(double y) const {
    const double s = y + lambda - H_down;
    if (s < 0.0) return -(lambda / H_down) * std::sqrt(fluids.rho1) * s;
    return -((1.0 - lambda) / (1.0 - H_down)) * std::sqrt(fluids.rho2) * s;
}

double ConjugateState::psi_down_y(double y) const {
    const double s = y + lambda - H_down;
    if (s < 0.0) return -(lambda / H_down) * std::sqrt(fluids.rho1);
    return -((1.0 - lambda) / (1.0 - H_down)) * std::sqrt(fluids.rho2);
}

ConjugateState conjugate_state(const FluidPair& fluids, double lambda) {
    fluids.validate();
    if (!(lambda > 0.0 && lambda < 1.0)) throw domain_error("conjugate_state: lambda must lie in (0,1)");
    ConjugateState cs;
    cs.fluids = fluids;
    cs.lambda = lambda;
    cs.H_up = lambda;
    cs.H_down = conjugate_downstream(fluids);
    return cs;
}

namespace {

double layer_integral(const LayerSlice& s, const FluidPair& fluids, double F2, int layer) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < s.y.size(); ++i) {
        const double h = s.y[i + 1] - s.y[i];
        if (!(h >= 0.0)) throw domain_error("flow_force: slice nodes must be ordered by increasing y");
        auto f = [&](std::size_t m) {
            return s.psi_y[m] * s.psi_y[m] - s.psi_x[m] * s.psi_x[m] - hydrostatic_weight(fluids, F2, layer, s.y[m]);
        };
        acc += 0.5 * h * (f(i) + f(i + 1));
    }
    return acc;
}

void check_layer(const LayerSlice& s, const char* name) {
    if (s.y.size() < 2 || s.psi_x.size() != s.y.size() || s.psi_y.size() != s.y.size()) {
        throw domain_error(std::string("flow_force: malformed ") + name + " layer slice");
    }
}

} // namespace

double flow_force(const Slice& slice, const FluidPair& fluids, double froude_sq) {
    fluids.validate();
    check_layer(slice.lower, "lower");
    check_layer(slice.upper, "upper");
    const double tol = 1e-12;
    const double bed = -slice.lambda;
    const double lid = 1.0 - slice.lambda;
    if (std::abs(slice.lower.y.front() - bed) > tol || std::abs(slice.upper.y.back() - lid) > tol) {
        throw domain_error("flow_force: slice does not span the channel");
    }
    if (std::abs(slice.lower.y.back() - slice.upper.y.front()) > tol) {
        throw domain_error("flow_force: layers do not meet at the interface");
    }
    const double F2 = fluids.boussinesq ? 0.0 : froude_sq;
    if (!fluids.boussinesq && !(F2 > 0.0)) throw parameter_error("flow_force: froude_sq must be positive");
    return 0.5 * (layer_integral(slice.lower, fluids, F2, 1) + layer_integral(slice.upper, fluids, F2, 2));
}

} // namespace bores

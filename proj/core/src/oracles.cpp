#include "bores/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bores {

namespace {

constexpr double pi = std::numbers::pi;

// angle in [0, 2pi)
double arg0(double x, double y) {
    double t = std::atan2(y, x);
    if (t < 0.0) t += 2.0 * pi;
    return t;
}

// wrap to (-pi, pi]
double wrap(double t) {
    t = std::fmod(t + pi, 2.0 * pi);
    if (t <= 0.0) t += 2.0 * pi;
    return t - pi;
}

} // namespace

Phase sign_phase(double u) { return u >= 0.0 ? Phase::plus : Phase::minus; }

ExactField stokes_corner(PiRational rotation) {
    const double rot = rotation.value();
    const double a = -std::sqrt(2.0) / 3.0;
    // offset of the rotated argument from the symmetry axis 3pi/2
    auto offset = [rot](double x, double y) { return wrap(arg0(x, y) + rot - 1.5 * pi); };

    ExactField f;
    f.name = "stokes_corner";
    f.degree = 1.5;
    f.rho_plus = 0.0;
    f.rho_minus = 1.0;
    f.rotation = rotation;
    f.value = [=](double x, double y) {
        const double phi = offset(x, y);
        if (!(std::abs(phi) < pi / 3.0)) return 0.0;
        const double r = std::hypot(x, y);
        return a * std::pow(r, 1.5) * std::cos(1.5 * phi);
    };
    f.gradient = [=](double x, double y) -> Vec2 {
        const double phi = offset(x, y);
        const double r = std::hypot(x, y);
        if (!(std::abs(phi) < pi / 3.0) || r == 0.0) return {0.0, 0.0};
        const double sr = std::sqrt(r);
        const double ur = 1.5 * a * sr * std::cos(1.5 * phi);
        const double ut = -1.5 * a * sr * std::sin(1.5 * phi);
        const double c = x / r, s = y / r;
        return {ur * c - ut * s, ur * s + ut * c};
    };
    f.phase = [=](double x, double y) {
        return std::abs(offset(x, y)) < pi / 3.0 && (x != 0.0 || y != 0.0) ? Phase::minus : Phase::plus;
    };
    return f;
}

ExactField laminar(const FluidPair& fluids, double lambda) {
    const auto cs = conjugate_state(fluids, lambda);
    ExactField f;
    f.name = "laminar";
    f.rho_plus = fluids.rho1;
    f.rho_minus = fluids.rho2;
    f.value = [cs](double, double y) { return cs.psi_up(y); };
    f.gradient = [cs](double, double y) -> Vec2 { return {0.0, cs.psi_up_y(y)}; };
    f.phase = [](double, double y) { return y <= 0.0 ? Phase::plus : Phase::minus; };
    return f;
}

std::pair<ExactField, ExactField> conjugate_profiles(const FluidPair& fluids, double lambda) {
    const auto cs = conjugate_state(fluids, lambda);
    ExactField up = laminar(fluids, lambda);
    up.name = "conjugate_up";
    ExactField down;
    down.name = "conjugate_down";
    down.rho_plus = fluids.rho1;
    down.rho_minus = fluids.rho2;
    const double level = cs.H_down - lambda;
    down.value = [cs](double, double y) { return cs.psi_down(y); };
    down.gradient = [cs](double, double y) -> Vec2 { return {0.0, cs.psi_down_y(y)}; };
    down.phase = [level](double, double y) { return y <= level ? Phase::plus : Phase::minus; };
    return {up, down};
}

ExactField mu_harmonic(double mu, double scale, double axis) {
    ExactField f;
    f.name = "mu_harmonic";
    f.degree = mu;
    f.value = [=](double x, double y) {
        const double r = std::hypot(x, y);
        const double phi = wrap(arg0(x, y) - axis);
        return scale * std::pow(r, mu) * std::cos(mu * phi);
    };
    f.gradient = [=](double x, double y) -> Vec2 {
        const double r = std::hypot(x, y);
        if (r == 0.0) return {0.0, 0.0};
        const double phi = wrap(arg0(x, y) - axis);
        const double rm = scale * mu * std::pow(r, mu - 1.0);
        const double ur = rm * std::cos(mu * phi);
        const double ut = -rm * std::sin(mu * phi);
        const double c = x / r, s = y / r;
        return {ur * c - ut * s, ur * s + ut * c};
    };
    f.phase = [v = f.value](double x, double y) { return sign_phase(v(x, y)); };
    return f;
}

ExactField linear_field(double a, double b) {
    ExactField f;
    f.name = "linear";
    f.degree = 1.0;
    f.value = [=](double x, double y) { return a * x + b * y; };
    f.gradient = [=](double, double) -> Vec2 { return {a, b}; };
    f.phase = [=](double x, double y) { return sign_phase(a * x + b * y); };
    return f;
}

ExactField product_field() {
    ExactField f;
    f.name = "product";
    f.degree = 2.0;
    f.value = [](double x, double y) { return x * y; };
    f.gradient = [](double x, double y) -> Vec2 { return {y, x}; };
    f.phase = [](double x, double y) { return sign_phase(x * y); };
    return f;
}

ExactField saddle_field() {
    ExactField f;
    f.name = "saddle";
    f.degree = 2.0;
    f.value = [](double x, double y) { return x * x - y * y; };
    f.gradient = [](double x, double y) -> Vec2 { return {2.0 * x, -2.0 * y}; };
    f.phase = [](double x, double y) { return sign_phase(x * x - y * y); };
    return f;
}

ExactField zero_field(Phase label) {
    ExactField f;
    f.name = "zero";
    f.degree = 1.5;
    f.value = [](double, double) { return 0.0; };
    f.gradient = [](double, double) -> Vec2 { return {0.0, 0.0}; };
    f.phase = [label](double, double) { return label; };
    return f;
}

ExactField positive_part(const ExactField& g) {
    ExactField f = g;
    f.name = g.name + "_pos";
    f.value = [v = g.value](double x, double y) { return std::max(v(x, y), 0.0); };
    f.gradient = [v = g.value, d = g.gradient](double x, double y) -> Vec2 {
        return v(x, y) > 0.0 ? d(x, y) : Vec2{0.0, 0.0};
    };
    f.phase = [v = f.value](double x, double y) { return v(x, y) > 0.0 ? Phase::plus : Phase::minus; };
    return f;
}

ExactField negative_part(const ExactField& g) {
    ExactField f = g;
    f.name = g.name + "_neg";
    f.value = [v = g.value](double x, double y) { return std::max(-v(x, y), 0.0); };
    f.gradient = [v = g.value, d = g.gradient](double x, double y) -> Vec2 {
        if (!(v(x, y) < 0.0)) return {0.0, 0.0};
        const Vec2 gr = d(x, y);
        return {-gr.x, -gr.y};
    };
    f.phase = [v = f.value](double x, double y) { return v(x, y) > 0.0 ? Phase::plus : Phase::minus; };
    return f;
}

ExactField translated(const ExactField& g, double dx, double dy) {
    ExactField f = g;
    f.name = g.name + "_translated";
    f.degree = std::numeric_limits<double>::quiet_NaN();
    f.value = [v = g.value, dx, dy](double x, double y) { return v(x - dx, y - dy); };
    f.gradient = [d = g.gradient, dx, dy](double x, double y) { return d(x - dx, y - dy); };
    f.phase = [p = g.phase, dx, dy](double x, double y) { return p(x - dx, y - dy); };
    return f;
}

ExactField negated(const ExactField& g) {
    ExactField f = g;
    f.name = g.name + "_negated";
    f.value = [v = g.value](double x, double y) { return -v(x, y); };
    f.gradient = [d = g.gradient](double x, double y) -> Vec2 {
        const Vec2 gr = d(x, y);
        return {-gr.x, -gr.y};
    };
    f.phase = [p = g.phase](double x, double y) { return p(x, y) == Phase::plus ? Phase::minus : Phase::plus; };
    std::swap(f.rho_plus, f.rho_minus);
    return f;
}

ExactField perturbed(const ExactField& g, double eps, const ExactField& h) {
    ExactField f = g;
    f.name = g.name + "_perturbed";
    f.degree = std::numeric_limits<double>::quiet_NaN();
    f.value = [v = g.value, w = h.value, eps](double x, double y) { return v(x, y) + eps * w(x, y); };
    f.gradient = [d = g.gradient, e = h.gradient, eps](double x, double y) -> Vec2 {
        const Vec2 a = d(x, y), b = e(x, y);
        return {a.x + eps * b.x, a.y + eps * b.y};
    };
    return f;
}

} // namespace bores

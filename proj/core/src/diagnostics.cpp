#include "bores/diagnostics.hpp"

#include "bores/csv.hpp"
#include "bores/errors.hpp"
#include "bores/params.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

namespace bores {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

double angle_start(Region region) { return region == Region::disk ? 0.0 : pi; }

// composite two-point Gauss-Legendre on each label-constant arc of the circle of radius R
double arc_fixed(const PlaneFunction& g, const PlaneLabel& label, double R, Region region, int n_t,
                 const QuadOptions& o) {
    const bool periodic = region == Region::disk;
    const double t0 = angle_start(region);
    const double t1 = 2.0 * pi;
    const auto br = circle_split(label, R, region, o);
    std::vector<double> a, b;
    if (periodic) {
        if (br.empty()) {
            a.push_back(t0);
            b.push_back(t1);
        } else {
            for (std::size_t i = 0; i < br.size(); ++i) {
                a.push_back(br[i]);
                b.push_back(i + 1 < br.size() ? br[i + 1] : br[0] + 2.0 * pi);
            }
        }
    } else {
        double lo = t0;
        for (double t : br) {
            a.push_back(lo);
            b.push_back(t);
            lo = t;
        }
        a.push_back(lo);
        b.push_back(t1);
    }
    const double gl = 1.0 / std::sqrt(3.0);
    double acc = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) {
        const double h = (b[m] - a[m]) / n_t;
        for (int p = 0; p < n_t; ++p) {
            for (double xt : {-gl, gl}) {
                const double t = a[m] + h * (p + 0.5 + 0.5 * xt);
                acc += 0.5 * h * g(R * std::cos(t), R * std::sin(t));
            }
        }
    }
    return acc * R;
}

double relative_gap(double fd, double id, double value, double r, double floor) {
    const double denom = std::max({std::abs(id), std::abs(value) / r, floor, 1e-300});
    return std::abs(fd - id) / denom;
}

// value and derivative identity of a functional at one radius; scale(r) bounds the
// size of the derivative when the functional itself vanishes
struct Evaluator {
    std::function<double(double)> value;
    std::function<double(double)> identity;
    std::function<double(double)> scale;
};

FunctionalTrace make_trace(const std::string& name, const std::vector<double>& radii, const Evaluator& ev,
                           const TraceOptions& opts) {
    FunctionalTrace t;
    t.name = name;
    t.radii = radii;
    for (double r : radii) {
        const double v = ev.value(r);
        t.values.push_back(v);
        if (!opts.derivatives) {
            t.derivative_estimates.push_back(nan);
            t.identity_values.push_back(nan);
            t.identity_residual.push_back(nan);
            continue;
        }
        const double h = opts.fd_rel_step * r;
        const double fd = (ev.value(r + h) - ev.value(r - h)) / (2.0 * h);
        const double id = ev.identity ? ev.identity(r) : nan;
        t.derivative_estimates.push_back(fd);
        t.identity_values.push_back(id);
        const double floor = ev.scale ? ev.scale(r) : 0.0;
        t.identity_residual.push_back(std::isnan(id) ? nan : relative_gap(fd, id, v, r, floor));
    }
    return t;
}

std::string describe(double x, double y) {
    std::ostringstream os;
    os << "(" << x << ", " << y << ")";
    return os.str();
}

double radial_derivative(const SampledField& f, double x, double y) {
    const double r = std::hypot(x, y);
    if (r == 0.0) return 0.0;
    const Vec2 g = f.gradient(x, y);
    return (g.x * x + g.y * y) / r;
}

} // namespace

PlaneLabel SampledField::label() const {
    return [ph = phase](double x, double y) { return static_cast<int>(ph(x, y)); };
}

void SampledField::validate() const {
    if (!value || !gradient || !phase) throw parameter_error("SampledField '" + name + "': missing callable");
    if (!(rho_plus >= 0.0) || !(rho_minus >= 0.0)) throw parameter_error("SampledField: densities must be nonnegative");
    if (!(radius > 0.0)) throw parameter_error("SampledField: radius must be positive");
    if (!std::isfinite(bernoulli_q)) throw parameter_error("SampledField: Q must be finite");
}

SampledField sample_exact(const ExactField& f, Vec2 center, double radius, Region region) {
    SampledField s;
    s.name = f.name;
    const double cx = center.x, cy = center.y;
    s.value = [v = f.value, cx, cy](double x, double y) { return v(cx + x, cy + y); };
    s.gradient = [g = f.gradient, cx, cy](double x, double y) { return g(cx + x, cy + y); };
    s.phase = [p = f.phase, cx, cy](double x, double y) { return p(cx + x, cy + y); };
    s.center = center;
    s.radius = radius;
    s.region = region;
    s.rho_plus = f.rho_plus;
    s.rho_minus = f.rho_minus;
    s.validate();
    return s;
}

namespace {

struct BoreGeometry {
    std::shared_ptr<PhysicalInterpolant> in;
    double lambda = 0.0;
    double h2 = 0.0;
};

BoreGeometry bore_geometry(const BoreState& state, const FluidPair& fluids, Vec2 c, double R, Region region) {
    BoreGeometry g;
    g.in = std::make_shared<PhysicalInterpolant>(state, fluids);
    g.lambda = g.in->lambda();
    g.h2 = g.in->h2();
    const double tol = 1e-12;
    const double top = region == Region::disk ? c.y + R : c.y;
    if (!(R > 0.0) || std::abs(c.x) + R > g.in->L() + tol || c.y - R < -g.lambda - tol || top > g.h2 + tol) {
        throw domain_error("sample_bore: region of radius " + std::to_string(R) + " around " + describe(c.x, c.y) +
                           " leaves the channel");
    }
    return g;
}

// clamp to the channel to absorb roundoff at the walls
double clamp_y(const BoreGeometry& g, double y) { return std::clamp(y, -g.lambda, g.h2); }

} // namespace

SampledField sample_bore(const BoreState& state, const FluidPair& fluids, Vec2 center, double radius, Region region) {
    fluids.validate();
    const BoreGeometry g = bore_geometry(state, fluids, center, radius, region);
    const double cx = center.x, cy = center.y;
    SampledField s;
    s.name = "bore";
    s.value = [g, cx, cy](double x, double y) { return -g.in->psi(cx + x, clamp_y(g, cy + y)); };
    s.gradient = [g, cx, cy](double x, double y) {
        const Vec2 d = g.in->grad(cx + x, clamp_y(g, cy + y));
        return Vec2{-d.x, -d.y};
    };
    s.phase = [g, cx, cy](double x, double y) {
        return g.in->layer(cx + x, clamp_y(g, cy + y)) == 2 ? Phase::plus : Phase::minus;
    };
    s.center = center;
    s.radius = radius;
    s.region = region;
    if (fluids.boussinesq) {
        s.rho_plus = 0.0;
        s.rho_minus = 8.0 * fluids.rho1;
        s.bernoulli_q = cy;
    } else {
        const double F2 = front_froude(fluids);
        s.rho_plus = 2.0 * fluids.rho2 / F2;
        s.rho_minus = 2.0 * fluids.rho1 / F2;
        s.bernoulli_q = cy - 0.5 * F2;
    }
    s.validate();
    return s;
}

SampledField sample_bore_contact(const BoreState& state, const FluidPair& fluids, double x, double radius) {
    SampledField s = sample_bore(state, fluids, {x, state.grid.h2}, radius, Region::lower_half);
    const double psi_lid = -state.grid.P2;
    s.name = "bore_contact";
    s.value = [v = s.value, psi_lid](double px, double py) { return psi_lid + v(px, py); };
    return s;
}

SampledField field_positive_part(const SampledField& f) {
    SampledField s = f;
    s.name = f.name + "+";
    s.value = [v = f.value](double x, double y) { return std::max(v(x, y), 0.0); };
    s.gradient = [v = f.value, g = f.gradient](double x, double y) { return v(x, y) > 0.0 ? g(x, y) : Vec2{}; };
    s.phase = [v = f.value](double x, double y) { return v(x, y) > 0.0 ? Phase::plus : Phase::minus; };
    return s;
}

SampledField field_negative_part(const SampledField& f) {
    SampledField s = f;
    s.name = f.name + "-";
    s.value = [v = f.value](double x, double y) { return std::max(-v(x, y), 0.0); };
    s.gradient = [v = f.value, g = f.gradient](double x, double y) {
        if (!(v(x, y) < 0.0)) return Vec2{};
        const Vec2 d = g(x, y);
        return Vec2{-d.x, -d.y};
    };
    s.phase = [v = f.value](double x, double y) { return v(x, y) < 0.0 ? Phase::plus : Phase::minus; };
    return s;
}

std::vector<FieldSample> polar_samples(const SampledField& f, double R, int n_r, int n_t) {
    if (!(R > 0.0) || n_r < 1 || n_t < 1) throw parameter_error("polar_samples: bad grid");
    const double t0 = angle_start(f.region);
    const double span = 2.0 * pi - t0;
    std::vector<FieldSample> out;
    out.reserve(static_cast<std::size_t>(n_r) * n_t);
    for (int i = 0; i < n_r; ++i) {
        const double r = R * (i + 0.5) / n_r;
        for (int j = 0; j < n_t; ++j) {
            const double t = t0 + span * (j + 0.5) / n_t;
            FieldSample s;
            s.x = r * std::cos(t);
            s.y = r * std::sin(t);
            s.u = f.value(s.x, s.y);
            s.grad = f.gradient(s.x, s.y);
            s.phase = f.phase(s.x, s.y);
            out.push_back(s);
        }
    }
    return out;
}

double gradient_consistency(const SampledField& f, double R, int n_r, int n_t, double h) {
    double worst = 0.0;
    for (const auto& s : polar_samples(f, R, n_r, n_t)) {
        // skip samples whose stencil crosses a phase change
        const Phase p = s.phase;
        if (f.phase(s.x + h, s.y) != p || f.phase(s.x - h, s.y) != p || f.phase(s.x, s.y + h) != p ||
            f.phase(s.x, s.y - h) != p) {
            continue;
        }
        const double gx = (f.value(s.x + h, s.y) - f.value(s.x - h, s.y)) / (2.0 * h);
        const double gy = (f.value(s.x, s.y + h) - f.value(s.x, s.y - h)) / (2.0 * h);
        const double scale = std::max(1.0, std::sqrt(norm2(s.grad)));
        worst = std::max(worst, std::hypot(gx - s.grad.x, gy - s.grad.y) / scale);
    }
    return worst;
}

Integration reconstructed_integration() {
    Integration in;
    in.fixed = true;
    in.n_r = 64;
    in.n_t = 64;
    in.adaptive.throw_on_fail = false;
    return in;
}

QuadOptions analytic_quad_options() {
    QuadOptions o;
    o.rel_tol = 1e-9;
    o.abs_tol = 1e-13;
    return o;
}

QuadOptions field_quad_options(const SampledField& f, const QuadOptions& base) {
    QuadOptions o = base;
    o.radial_breaks.insert(o.radial_breaks.end(), f.singular_radii.begin(), f.singular_radii.end());
    if (f.circle_breaks) {
        if (o.circle_breaks) {
            o.circle_breaks = [a = o.circle_breaks, b = f.circle_breaks](double r) {
                auto v = a(r);
                const auto w = b(r);
                v.insert(v.end(), w.begin(), w.end());
                return v;
            };
        } else {
            o.circle_breaks = f.circle_breaks;
        }
    }
    return o;
}

CircleBreaks stokes_edge_breaks(Vec2 vertex, PiRational rotation) {
    const double rot = rotation.value();
    return [vertex, rot](double r) {
        std::vector<double> out;
        for (double alpha : {7.0 * pi / 6.0 - rot, 11.0 * pi / 6.0 - rot}) {
            const Vec2 d{std::cos(alpha), std::sin(alpha)};
            // |v + t d| = r with t >= 0
            const double b = dot(vertex, d);
            const double c = norm2(vertex) - r * r;
            const double disc = b * b - c;
            if (disc < 0.0) continue;
            const double sq = std::sqrt(disc);
            for (double t : {-b - sq, -b + sq}) {
                if (t < 0.0) continue;
                out.push_back(std::atan2(vertex.y + t * d.y, vertex.x + t * d.x));
            }
        }
        return out;
    };
}

SampledField translated_stokes_corner(double dx) {
    SampledField s = sample_exact(translated(stokes_corner(), dx, 0.0));
    s.name = "stokes_corner_translated";
    if (dx != 0.0) {
        // the vertex, and the radius at which circles touch the edges
        s.singular_radii = {0.5 * std::abs(dx), std::abs(dx)};
        s.circle_breaks = stokes_edge_breaks({dx, 0.0});
    }
    return s;
}

double disk_integral(const SampledField& f, const PlaneFunction& g, double r, const Integration& integ) {
    const QuadOptions o = field_quad_options(f, integ.adaptive);
    if (integ.fixed) return area_integral_fixed(g, f.label(), r, f.region, integ.n_r, integ.n_t, o);
    return area_integral(g, f.label(), r, f.region, o).value;
}

double circle_integral(const SampledField& f, const PlaneFunction& g, double r, const Integration& integ) {
    const QuadOptions o = field_quad_options(f, integ.adaptive);
    if (integ.fixed) return arc_fixed(g, f.label(), r, f.region, integ.n_t, o);
    return arc_length_integral(g, f.label(), r, f.region, o).value;
}

double FunctionalTrace::max_identity_residual() const {
    double m = 0.0;
    for (double v : identity_residual) {
        if (!std::isnan(v)) m = std::max(m, v);
    }
    return m;
}

double FunctionalTrace::max_variation() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v - values.front()));
    return m;
}

std::string FunctionalTrace::csv() const {
    CsvTable t("bores.functional_trace v1 name=" + name, {"r", "value", "derivative_estimate", "identity_residual"});
    for (std::size_t k = 0; k < radii.size(); ++k) {
        t.add_row({radii[k], values[k], k < derivative_estimates.size() ? derivative_estimates[k] : nan,
                   k < identity_residual.size() ? identity_residual[k] : nan});
    }
    return t.str();
}

std::vector<double> geometric_radii(double R, int count, int per_octave) {
    if (!(R > 0.0) || count < 1 || per_octave < 1) throw parameter_error("geometric_radii: bad arguments");
    std::vector<double> r(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) r[static_cast<std::size_t>(k)] = R * std::exp2(-static_cast<double>(k) / per_octave);
    return r;
}

void check_radii(const SampledField& f, const std::vector<double>& radii) {
    if (radii.empty()) throw parameter_error("radius sequence is empty");
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (!(radii[k] > 0.0)) throw parameter_error("radii must be positive");
        if (k > 0 && !(radii[k] < radii[k - 1])) throw parameter_error("radii must be strictly decreasing");
    }
    if (radii.front() > f.radius) {
        throw domain_error("radius " + std::to_string(radii.front()) + " exceeds the sampled radius " +
                           std::to_string(f.radius));
    }
}

namespace {

void check_trace_radii(const SampledField& f, const std::vector<double>& radii, const TraceOptions& opts) {
    check_radii(f, radii);
    if (opts.derivatives && radii.front() * (1.0 + opts.fd_rel_step) > f.radius) {
        throw domain_error("difference stencil at the largest radius leaves the sampled region");
    }
}

} // namespace

ABTraces functional_AB(const SampledField& f, const std::vector<double>& radii, const TraceOptions& opts) {
    f.validate();
    check_trace_radii(f, radii, opts);
    const auto& in = opts.integ;
    auto rho = [&f](double x, double y) { return f.density(f.phase(x, y)); };
    auto uxuy = [&f](double x, double y) {
        const Vec2 g = f.gradient(x, y);
        return g.x * g.y;
    };
    auto uyux = [&f](double x, double y) {
        const Vec2 g = f.gradient(x, y);
        return g.y * g.y - g.x * g.x;
    };
    const bool disk = f.region == Region::disk;
    auto energy_scale = [&](double r) {
        return disk_integral(f, [&f](double x, double y) { return norm2(f.gradient(x, y)); }, r, in) / (r * r * r);
    };
    Evaluator a{[&](double r) { return disk_integral(f, uxuy, r, in) / (r * r); }, {}, energy_scale};
    Evaluator b{[&](double r) { return disk_integral(f, uyux, r, in) / (r * r); }, {}, energy_scale};
    if (disk) {
        a.identity = [&](double r) {
            const double bulk = disk_integral(f, [&](double x, double y) { return rho(x, y) * x; }, r, in);
            const double edge = circle_integral(f, [&](double x, double y) { return rho(x, y) * x * y * y; }, r, in);
            return bulk / (2.0 * r * r * r) - edge / std::pow(r, 4);
        };
        b.identity = [&](double r) {
            const double bulk = disk_integral(f, [&](double x, double y) { return rho(x, y) * y; }, r, in);
            const double edge =
                circle_integral(f, [&](double x, double y) { return rho(x, y) * y * (y * y - x * x); }, r, in);
            return bulk / (r * r * r) - edge / std::pow(r, 4);
        };
    }
    return {make_trace("A", radii, a, opts), make_trace("B", radii, b, opts)};
}

void check_monotone_samples(const SampledField& f, double R, double slope_bound, double tol) {
    const auto samples = polar_samples(f, R, 32, 64);
    double scale = 1.0;
    for (const auto& s : samples) scale = std::max(scale, norm2(s.grad));
    const double ptol = tol * scale;
    int sign = 0;
    for (const auto& s : samples) {
        const double p = s.grad.x * s.grad.y;
        if (std::abs(s.grad.x) > slope_bound * std::abs(s.grad.y) + tol * std::sqrt(scale)) {
            std::ostringstream os;
            os << "sample " << describe(s.x, s.y) << " has |u_x| = " << std::abs(s.grad.x) << " > M |u_y| = "
               << slope_bound * std::abs(s.grad.y);
            throw precondition_error(os.str());
        }
        if (std::abs(p) <= ptol) continue;
        const int sg = p > 0.0 ? 1 : -1;
        if (sign == 0) {
            sign = sg;
        } else if (sg != sign) {
            std::ostringstream os;
            os << "sample " << describe(s.x, s.y) << " has u_x u_y = " << p << ", opposite to the sign elsewhere";
            throw precondition_error(os.str());
        }
    }
}

double sampled_slope_bound(const SampledField& f, double R, int n_r, int n_t, double floor) {
    double m = 0.0;
    for (const auto& s : polar_samples(f, R, n_r, n_t)) {
        if (std::abs(s.grad.y) > floor) m = std::max(m, std::abs(s.grad.x) / std::abs(s.grad.y));
    }
    return m;
}

EnergyBoundReport energy_bound_check(const SampledField& f, const std::vector<double>& radii, double slope_bound,
                                     const Integration& integ, bool check_signs) {
    f.validate();
    check_radii(f, radii);
    if (!(slope_bound >= 0.0)) throw parameter_error("energy_bound_check: slope bound must be nonnegative");
    if (f.region != Region::disk) throw parameter_error("energy_bound_check: requires a full disk");
    if (check_signs) check_monotone_samples(f, radii.front(), slope_bound);
    TraceOptions opts;
    opts.integ = integ;
    opts.derivatives = false;
    const ABTraces ab = functional_AB(f, radii, opts);
    const double factor = std::max(2.0 * slope_bound + 1.0, 2.0);
    EnergyBoundReport rep;
    rep.radii = radii;
    rep.slope_bound = slope_bound;
    rep.min_margin = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const double r = radii[k];
        const double lhs = disk_integral(f, [&f](double x, double y) { return norm2(f.gradient(x, y)); }, r, integ) / (r * r);
        const double rhs = factor * std::abs(ab.A.values[k]) + ab.B.values[k];
        rep.lhs.push_back(lhs);
        rep.rhs.push_back(rhs);
        rep.margins.push_back(rhs - lhs);
        rep.min_margin = std::min(rep.min_margin, rhs - lhs);
        // margins within quadrature noise of zero count as equality
        const double noise = (integ.fixed ? 1e-6 : 1e2 * integ.adaptive.rel_tol) * std::max(1.0, std::abs(lhs));
        if (rhs - lhs < -noise) ok = false;
    }
    rep.passed = ok;
    return rep;
}

FunctionalTrace weiss_M(const SampledField& f, const std::vector<double>& radii, const TraceOptions& opts) {
    f.validate();
    check_trace_radii(f, radii, opts);
    if (f.region != Region::disk) throw parameter_error("weiss_M: requires a full disk");
    const auto& in = opts.integ;
    auto bulk = [&f](double x, double y) { return norm2(f.gradient(x, y)) - y * f.density(f.phase(x, y)); };
    auto sq = [&f](double x, double y) {
        const double u = f.value(x, y);
        return u * u;
    };
    Evaluator ev;
    ev.value = [&](double r) {
        return disk_integral(f, bulk, r, in) / (r * r * r) - 1.5 * circle_integral(f, sq, r, in) / std::pow(r, 4);
    };
    ev.identity = [&](double r) {
        auto g = [&f, r](double x, double y) {
            const double d = radial_derivative(f, x, y) - 1.5 * f.value(x, y) / r;
            return d * d;
        };
        return 2.0 * circle_integral(f, g, r, in) / (r * r * r);
    };
    return make_trace("weiss_M", radii, ev, opts);
}

AcfReport acf_phi(const SampledField& u1, const SampledField& u2, const std::vector<double>& radii,
                  const Integration& integ, double slack) {
    u1.validate();
    u2.validate();
    check_radii(u1, radii);
    check_radii(u2, radii);
    if (u1.region != Region::disk || u2.region != Region::disk) throw parameter_error("acf_phi: requires full disks");
    const auto s1 = polar_samples(u1, radii.front(), 32, 64);
    const auto s2 = polar_samples(u2, radii.front(), 32, 64);
    for (std::size_t i = 0; i < s1.size(); ++i) {
        const double tol = 1e-12;
        if (s1[i].u < -tol || s2[i].u < -tol) {
            throw precondition_error("acf_phi: negative value at sample " + describe(s1[i].x, s1[i].y));
        }
        if (std::abs(s1[i].u * s2[i].u) > tol) {
            throw precondition_error("acf_phi: supports overlap at sample " + describe(s1[i].x, s1[i].y));
        }
    }
    // split arcs where either support starts or ends
    PlaneLabel lab = [p1 = u1.phase, p2 = u2.phase](double x, double y) {
        return 2 * static_cast<int>(p1(x, y) == Phase::plus) + static_cast<int>(p2(x, y) == Phase::plus);
    };
    const QuadOptions o = field_quad_options(u2, field_quad_options(u1, integ.adaptive));
    auto energy = [&](const SampledField& f, double r) {
        auto g = [&f](double x, double y) { return norm2(f.gradient(x, y)); };
        if (integ.fixed) return area_integral_fixed(g, lab, r, Region::disk, integ.n_r, integ.n_t, o);
        return area_integral(g, lab, r, Region::disk, o).value;
    };
    AcfReport rep;
    rep.trace.name = "acf_phi";
    rep.trace.radii = radii;
    for (double r : radii) {
        const double a = energy(u1, r) / (r * r);
        const double b = energy(u2, r) / (r * r);
        rep.factor1.push_back(a);
        rep.factor2.push_back(b);
        rep.trace.values.push_back(a * b);
        rep.trace.identity_values.push_back(nan);
        rep.trace.identity_residual.push_back(nan);
    }
    const auto& v = rep.trace.values;
    for (std::size_t k = 0; k < v.size(); ++k) {
        // one-sided differences at the ends, centred inside
        double d;
        if (v.size() < 2) d = nan;
        else if (k == 0) d = (v[0] - v[1]) / (radii[0] - radii[1]);
        else if (k + 1 == v.size()) d = (v[k - 1] - v[k]) / (radii[k - 1] - radii[k]);
        else d = (v[k - 1] - v[k + 1]) / (radii[k - 1] - radii[k + 1]);
        rep.trace.derivative_estimates.push_back(d);
        if (k + 1 < v.size() && v[k + 1] > v[k] + slack) rep.violations.push_back(static_cast<int>(k));
    }
    return rep;
}

std::string to_string(GcRegime r) { return r == GcRegime::stagnation ? "stagnation" : "non_stagnation"; }

void check_gc_samples(const SampledField& f, double R, double tol) {
    SampledField half = f;
    half.region = Region::lower_half;
    double scale = 0.0;
    const auto samples = polar_samples(half, R, 32, 64);
    for (const auto& s : samples) scale = std::max(scale, std::abs(s.u));
    const double t = tol * std::max(1.0, scale);
    for (const auto& s : samples) {
        if (s.u > t) {
            std::ostringstream os;
            os << "gc_M: u = " << s.u << " > 0 at sample " << describe(s.x, s.y);
            throw precondition_error(os.str());
        }
    }
    for (int i = 0; i <= 64; ++i) {
        const double x = R * (-1.0 + 2.0 * i / 64.0);
        const double u = f.value(x, 0.0);
        if (std::abs(u) > t) {
            std::ostringstream os;
            os << "gc_M: u = " << u << " on the top at x = " << x;
            throw precondition_error(os.str());
        }
    }
}

GcTrace gc_M(const SampledField& f0, const std::vector<double>& radii, const TraceOptions& opts) {
    f0.validate();
    check_trace_radii(f0, radii, opts);
    SampledField f = f0;
    f.region = Region::lower_half;
    check_gc_samples(f, radii.front());
    const auto& in = opts.integ;
    const double Q = f.bernoulli_q;
    auto rho = [&f](double x, double y) { return f.density(f.phase(x, y)); };
    auto sq = [&f](double x, double y) {
        const double u = f.value(x, y);
        return u * u;
    };
    GcTrace out;
    Evaluator ev;
    if (Q != 0.0) {
        out.regime = GcRegime::non_stagnation;
        ev.value = [&](double r) {
            auto bulk = [&](double x, double y) { return norm2(f.gradient(x, y)) - Q * rho(x, y); };
            return disk_integral(f, bulk, r, in) / (r * r) - circle_integral(f, sq, r, in) / (r * r * r);
        };
        ev.identity = [&](double r) {
            auto g = [&f, r](double x, double y) {
                const double d = radial_derivative(f, x, y) - f.value(x, y) / r;
                return d * d;
            };
            auto yr = [&](double x, double y) { return y * rho(x, y); };
            return 2.0 * circle_integral(f, g, r, in) / (r * r) + circle_integral(f, yr, r, in) / (r * r) -
                   3.0 * disk_integral(f, yr, r, in) / (r * r * r);
        };
    } else {
        out.regime = GcRegime::stagnation;
        ev.value = [&](double r) {
            auto bulk = [&](double x, double y) { return norm2(f.gradient(x, y)) - y * rho(x, y); };
            return disk_integral(f, bulk, r, in) / (r * r * r) - 1.5 * circle_integral(f, sq, r, in) / std::pow(r, 4);
        };
        ev.identity = [&](double r) {
            auto g = [&f, r](double x, double y) {
                const double d = radial_derivative(f, x, y) - 1.5 * f.value(x, y) / r;
                return d * d;
            };
            return 2.0 * circle_integral(f, g, r, in) / (r * r * r);
        };
    }
    out.trace = make_trace("gc_M", radii, ev, opts);
    return out;
}

double gc_density(GcAlternative alt, double rho_plus, double rho_minus) {
    switch (alt) {
    case GcAlternative::heavier_full: return 2.0 * rho_minus / 3.0;
    case GcAlternative::lighter_full: return 2.0 * rho_plus / 3.0;
    case GcAlternative::stokes_corner:
        return (2.0 / 3.0 - 1.0 / std::sqrt(3.0)) * rho_plus + rho_minus / std::sqrt(3.0);
    case GcAlternative::rotated_corner: return rho_plus / 6.0 + rho_minus / 2.0;
    }
    throw parameter_error("gc_density: unknown alternative");
}

double gc_density_nonstagnation(double Q, double rho) { return -Q * rho * pi / 2.0; }

double gc_density_quadrature(const std::function<Phase(double, double)>& phase, double rho_plus, double rho_minus,
                             double Q, const QuadOptions& opts) {
    PlaneLabel lab = [&phase](double x, double y) { return static_cast<int>(phase(x, y)); };
    auto rho = [&](double x, double y) { return phase(x, y) == Phase::plus ? rho_plus : rho_minus; };
    if (Q == 0.0) {
        return area_integral([&](double x, double y) { return -y * rho(x, y); }, lab, 1.0, Region::lower_half, opts).value;
    }
    return area_integral([&](double x, double y) { return -Q * rho(x, y); }, lab, 1.0, Region::lower_half, opts).value;
}

double blowup_exponent(BlowupRegime regime, double Q) {
    if (regime == BlowupRegime::gravity_current && Q != 0.0) return 1.0;
    return 1.5;
}

BlowupResult blowup_sample(const SampledField& f, double r_m, BlowupRegime regime, int n_r, int n_t) {
    f.validate();
    if (!(r_m > 0.0)) throw parameter_error("blowup_sample: r_m must be positive");
    if (r_m > f.radius * (1.0 + 1e-12)) throw domain_error("blowup_sample: r_m exceeds the sampled radius");
    BlowupResult out;
    out.exponent = blowup_exponent(regime, f.bernoulli_q);
    const double d = out.exponent;
    const double sv = std::pow(r_m, -d);
    const double sg = std::pow(r_m, 1.0 - d);
    SampledField s = f;
    s.name = f.name + "_blowup";
    s.value = [v = f.value, r_m, sv](double x, double y) { return sv * v(r_m * x, r_m * y); };
    s.gradient = [g = f.gradient, r_m, sg](double x, double y) {
        const Vec2 q = g(r_m * x, r_m * y);
        return Vec2{sg * q.x, sg * q.y};
    };
    s.phase = [p = f.phase, r_m](double x, double y) { return p(r_m * x, r_m * y); };
    s.radius = std::min(1.0, f.radius / r_m);
    for (double& b : s.singular_radii) b /= r_m;
    if (f.circle_breaks) s.circle_breaks = [cb = f.circle_breaks, r_m](double r) { return cb(r * r_m); };
    if (regime == BlowupRegime::gravity_current) s.region = Region::lower_half;
    double lip = 0.0;
    for (const auto& smp : polar_samples(s, s.radius, n_r, n_t)) lip = std::max(lip, std::sqrt(norm2(smp.grad)));
    out.lipschitz = lip;
    out.field = std::move(s);
    return out;
}

OddsonReport oddson_check(const SampledField& f, double mu, double R, double axis, double half_aperture, int n_r,
                          int n_t) {
    f.validate();
    if (!(mu > 1.0)) throw parameter_error("oddson_check: mu must exceed 1");
    if (!(R > 0.0) || R > f.radius) throw domain_error("oddson_check: cone radius outside the sampled region");
    OddsonReport rep;
    rep.half_aperture = half_aperture > 0.0 ? half_aperture : pi / (2.0 * mu);
    if (rep.half_aperture > pi / (2.0 * mu) + 1e-15) {
        throw parameter_error("oddson_check: half aperture exceeds pi / (2 mu)");
    }
    rep.constant = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_r; ++i) {
        const double r = R * (i + 0.5) / n_r;
        for (int j = 0; j < n_t; ++j) {
            const double s = -1.0 + (2.0 * j + 1.0) / n_t;
            const double t = axis + rep.half_aperture * s;
            const double x = r * std::cos(t), y = r * std::sin(t);
            const double u = f.value(x, y);
            if (!(u > 0.0)) {
                std::ostringstream os;
                os << "oddson_check: u = " << u << " <= 0 at interior sample " << describe(x, y);
                throw precondition_error(os.str());
            }
            const double ratio = u / (std::pow(r, mu) * std::cos(mu * (t - axis)));
            if (ratio < rep.constant) {
                rep.constant = ratio;
                rep.x_min = x;
                rep.y_min = y;
            }
        }
    }
    return rep;
}

double fit_exponent(const std::vector<double>& r, const std::vector<double>& v) {
    if (r.size() != v.size() || r.size() < 2) throw parameter_error("fit_exponent: need at least two points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(r.size());
    for (std::size_t k = 0; k < r.size(); ++k) {
        if (!(r[k] > 0.0) || !(v[k] > 0.0)) throw domain_error("fit_exponent: values must be positive");
        const double x = std::log(r[k]), y = std::log(v[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

PoincareDemo poincare_demo(const SampledField& f, double mu, double axis, double half_aperture,
                           const std::vector<double>& radii, const Integration& integ) {
    check_radii(f, radii);
    PoincareDemo d;
    d.mu = mu;
    d.oddson = oddson_check(f, mu, radii.front(), axis, half_aperture);
    d.half_aperture = half_aperture = d.oddson.half_aperture;
    d.radii = radii;
    const double C = d.oddson.constant;
    auto offset = [axis](double x, double y) {
        double t = std::atan2(y, x) - axis;
        t = std::remainder(t, 2.0 * pi);
        return t;
    };
    PlaneLabel cone = [&](double x, double y) { return std::abs(offset(x, y)) < half_aperture ? 1 : 0; };
    auto bound = [&](double x, double y) {
        const double t = offset(x, y);
        if (!(std::abs(t) < half_aperture)) return 0.0;
        const double b = C * std::pow(std::hypot(x, y), mu) * std::cos(mu * t);
        return b * b;
    };
    for (double r : radii) {
        d.energy.push_back(disk_integral(f, [&f](double x, double y) { return norm2(f.gradient(x, y)); }, r, integ) / (r * r));
        d.induced_bound.push_back(area_integral(bound, cone, r, Region::disk, integ.adaptive).value / std::pow(r, 4));
    }
    d.energy_exponent = fit_exponent(radii, d.energy);
    d.bound_exponent = fit_exponent(radii, d.induced_bound);
    return d;
}

Vec2 BumpField::value(double x, double y) const {
    const double t = ((x - center.x) * (x - center.x) + (y - center.y) * (y - center.y)) / (width * width);
    if (!(t < 1.0)) return {};
    const double w = (1.0 - t) * (1.0 - t) * (1.0 - t);
    return {amplitude.x * w, amplitude.y * w};
}

void BumpField::jacobian(double x, double y, double J[2][2]) const {
    const double dx = x - center.x, dy = y - center.y;
    const double s2 = width * width;
    const double t = (dx * dx + dy * dy) / s2;
    if (!(t < 1.0)) {
        J[0][0] = J[0][1] = J[1][0] = J[1][1] = 0.0;
        return;
    }
    const double c = -6.0 * (1.0 - t) * (1.0 - t) / s2;
    J[0][0] = amplitude.x * c * dx;
    J[0][1] = amplitude.x * c * dy;
    J[1][0] = amplitude.y * c * dx;
    J[1][1] = amplitude.y * c * dy;
}

std::vector<BumpField> random_bumps(std::uint64_t seed, int count, double R, Region region) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<BumpField> out;
    for (int i = 0; i < count; ++i) {
        BumpField b;
        const double ang = 2.0 * pi * U(gen);
        b.amplitude = {std::cos(ang), std::sin(ang)};
        if (region == Region::disk) {
            const double rc = 0.5 * R * std::sqrt(U(gen));
            const double tc = 2.0 * pi * U(gen);
            b.center = {rc * std::cos(tc), rc * std::sin(tc)};
            b.width = R * (0.25 + 0.2 * U(gen));
        } else if (i % 2 == 0) {
            // centred on the top with a tangential amplitude
            b.center = {R * (U(gen) - 0.5) * 0.6, 0.0};
            b.width = R * (0.25 + 0.2 * U(gen));
            b.amplitude = {U(gen) < 0.5 ? -1.0 : 1.0, 0.0};
        } else {
            b.width = R * (0.15 + 0.1 * U(gen));
            b.center = {R * (U(gen) - 0.5) * 0.4, -b.width - 0.2 * R * U(gen) - 1e-3 * R};
        }
        out.push_back(b);
    }
    return out;
}

namespace {

void check_bump(const SampledField& f, double R, const BumpField& b) {
    if (!(b.width > 0.0)) throw precondition_error("variational_residual: bump width must be positive");
    if (std::hypot(b.center.x, b.center.y) + b.width > R * (1.0 + 1e-12)) {
        throw precondition_error("variational_residual: test field support leaves B_R");
    }
    if (f.region == Region::lower_half && b.center.y + b.width > 0.0 && b.amplitude.y != 0.0) {
        throw precondition_error("variational_residual: test field is not tangential on the top");
    }
}

// integrand and its absolute value for one bump
struct ResidualIntegrand {
    const SampledField& f;
    const BumpField& b;

    double operator()(double x, double y) const {
        double J[2][2];
        b.jacobian(x, y, J);
        const Vec2 phi = b.value(x, y);
        if (J[0][0] == 0.0 && J[0][1] == 0.0 && J[1][0] == 0.0 && J[1][1] == 0.0 && phi.x == 0.0 && phi.y == 0.0) {
            return 0.0;
        }
        const Vec2 g = f.gradient(x, y);
        const double div = J[0][0] + J[1][1];
        const double dphi = g.x * (J[0][0] * g.x + J[0][1] * g.y) + g.y * (J[1][0] * g.x + J[1][1] * g.y);
        const double rho = f.density(f.phase(x, y));
        // div(V phi) with V = -rho (y + Q)
        const double pot = -rho * (y + f.bernoulli_q) * div - rho * phi.y;
        return norm2(g) * div - 2.0 * dphi + pot;
    }
};

// angles where the circle of radius r about the origin meets the bump boundary
std::vector<double> bump_crossings(const BumpField& b, double r) {
    const double d = std::hypot(b.center.x, b.center.y);
    if (d == 0.0 || r <= std::abs(d - b.width) || r >= d + b.width) return {};
    const double base = std::atan2(b.center.y, b.center.x);
    const double c = std::clamp((r * r + d * d - b.width * b.width) / (2.0 * r * d), -1.0, 1.0);
    const double half = std::acos(c);
    return {base - half, base + half};
}

PlaneLabel bump_label(const SampledField& f, const BumpField& b) {
    return [ph = f.phase, b](double x, double y) {
        const double t = std::hypot(x - b.center.x, y - b.center.y) / b.width;
        return 2 * static_cast<int>(ph(x, y)) + (t < 1.0 ? 1 : 0);
    };
}

} // namespace

std::vector<ResidualEntry> variational_residual(const SampledField& f, double R, const std::vector<BumpField>& tests,
                                                const Integration& integ) {
    f.validate();
    if (!(R > 0.0) || R > f.radius * (1.0 + 1e-12)) throw domain_error("variational_residual: radius outside the field");
    std::vector<ResidualEntry> out;
    for (const auto& b : tests) {
        check_bump(f, R, b);
        const ResidualIntegrand ig{f, b};
        const PlaneLabel lab = bump_label(f, b);
        auto absig = [&ig](double x, double y) { return std::abs(ig(x, y)); };
        ResidualEntry e;
        QuadOptions base = integ.adaptive;
        const double d = std::hypot(b.center.x, b.center.y);
        base.radial_breaks.push_back(std::abs(d - b.width));
        base.radial_breaks.push_back(d + b.width);
        base.circle_breaks = [b](double r) { return bump_crossings(b, r); };
        QuadOptions o = field_quad_options(f, base);
        if (integ.fixed) {
            e.residual = area_integral_fixed(ig, lab, R, f.region, integ.n_r, integ.n_t, o);
            e.scale = area_integral_fixed(absig, lab, R, f.region, integ.n_r, integ.n_t, o);
        } else {
            e.scale = area_integral(absig, lab, R, f.region, o).value;
            o.abs_tol = std::max(o.abs_tol, o.rel_tol * e.scale);
            e.residual = area_integral(ig, lab, R, f.region, o).value;
        }
        out.push_back(e);
    }
    return out;
}

RefinementStudy variational_refinement(const SampledField& f, double R, const BumpField& test, int n0, int levels) {
    if (n0 < 1 || levels < 2) throw parameter_error("variational_refinement: need n0 >= 1 and at least two levels");
    RefinementStudy st;
    Integration in;
    in.fixed = true;
    for (int k = 0; k < levels; ++k) {
        const int n = n0 << k;
        in.n_r = n;
        in.n_t = n;
        st.panels.push_back(n);
        st.residuals.push_back(variational_residual(f, R, {test}, in).front().residual);
    }
    st.min_order = std::numeric_limits<double>::infinity();
    for (int k = 0; k + 1 < levels; ++k) {
        const double o = std::log2(std::abs(st.residuals[k]) / std::abs(st.residuals[k + 1]));
        st.orders.push_back(o);
        st.min_order = std::min(st.min_order, o);
    }
    std::vector<double> n, res;
    for (int k = 0; k < levels; ++k) {
        if (st.residuals[k] != 0.0) {
            n.push_back(1.0 / st.panels[k]);
            res.push_back(std::abs(st.residuals[k]));
        }
    }
    st.fitted_order = n.size() >= 2 ? fit_exponent(n, res) : std::numeric_limits<double>::infinity();
    return st;
}

} // namespace bores

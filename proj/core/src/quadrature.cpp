#include "bores/quadrature.hpp"

#include "bores/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/trapezoidal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace bores {

namespace {

constexpr double pi = std::numbers::pi;
using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

int label_at(const PlaneLabel& label, double r, double t) { return label(r * std::cos(t), r * std::sin(t)); }

// Appends the label changes in [lo, hi]. After each bisection the bracket right of
// the located change is scanned again, so cells holding several changes (a circle
// crossing two nearby boundaries) are split at each of them.
void cell_breaks(const PlaneLabel& label, double r, double lo, double hi, std::vector<double>& out, int depth = 0) {
    const int lhi = label_at(label, r, hi);
    int llo = label_at(label, r, lo);
    while (llo != lhi && depth < 16) {
        double a = lo, b = hi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            if (label_at(label, r, mid) == llo) a = mid; else b = mid;
        }
        out.push_back(0.5 * (a + b));
        lo = b;
        llo = label_at(label, r, lo);
        ++depth;
    }
}

struct ArcSplit {
    std::vector<double> a;
    std::vector<double> b;
};

ArcSplit arcs_for(const PlaneLabel& label, double r, Region region, const QuadOptions& o) {
    const bool periodic = region == Region::disk;
    const double t0 = periodic ? 0.0 : pi;
    const double t1 = 2.0 * pi;
    ArcSplit s;
    const auto br = circle_split(label, r, region, o);
    if (periodic) {
        if (br.empty()) return s;
        for (std::size_t i = 0; i < br.size(); ++i) {
            s.a.push_back(br[i]);
            s.b.push_back(i + 1 < br.size() ? br[i + 1] : br[0] + 2.0 * pi);
        }
        return s;
    }
    double lo = t0;
    for (double b : br) {
        s.a.push_back(lo);
        s.b.push_back(b);
        lo = b;
    }
    s.a.push_back(lo);
    s.b.push_back(t1);
    return s;
}

bool acceptable(double err, double L1, const QuadOptions& o) {
    return err <= std::max(o.abs_tol, o.rel_tol * L1) * 10.0;
}

// one 31-point panel; boost reports the non-adaptive error on the reference
// interval [-1, 1], so it is rescaled by the half-length here
template <class F>
double gk_panel(const F& f, double a, double b, double* err, double* L1) {
    const double v = GK::integrate(f, a, b, 0, 0.0, err, L1);
    *err *= 0.5 * std::abs(b - a);
    return v;
}

constexpr std::size_t max_panels = 4096;

// Globally adaptive Gauss-Kronrod: the panel with the largest error estimate is
// bisected until the summed error meets max(abs_tol, rel_tol * L1). Panels at
// max_depth are kept as they are.
template <class F>
double adaptive_gk(const F& f, const std::vector<std::pair<double, double>>& intervals, const QuadOptions& o,
                   double* err_out, double* L1_out) {
    struct Panel {
        double a, b, value, err, L1;
        int depth;
        bool operator<(const Panel& q) const { return err < q.err; }
    };
    auto make = [&](double lo, double hi, int depth) {
        Panel p{lo, hi, 0.0, 0.0, 0.0, depth};
        p.value = gk_panel(f, lo, hi, &p.err, &p.L1);
        return p;
    };
    std::priority_queue<Panel> open;
    double value = 0.0, err = 0.0, L1 = 0.0;
    for (const auto& [a, b] : intervals) {
        if (!(b > a)) continue;
        const Panel p = make(a, b, 0);
        value += p.value;
        err += p.err;
        L1 += p.L1;
        open.push(p);
    }
    double frozen_value = 0.0, frozen_err = 0.0, frozen_L1 = 0.0;
    std::size_t panels = open.size();
    while (!open.empty() && err > std::max(o.abs_tol, o.rel_tol * L1) && panels < max_panels) {
        const Panel p = open.top();
        open.pop();
        const double mid = 0.5 * (p.a + p.b);
        if (p.depth >= o.max_depth || !(mid > p.a && mid < p.b)) {
            frozen_value += p.value;
            frozen_err += p.err;
            frozen_L1 += p.L1;
            continue;
        }
        const Panel l = make(p.a, mid, p.depth + 1);
        const Panel r = make(mid, p.b, p.depth + 1);
        value += l.value + r.value - p.value;
        err += l.err + r.err - p.err;
        L1 += l.L1 + r.L1 - p.L1;
        open.push(l);
        open.push(r);
        ++panels;
    }
    // re-sum to shed the rounding of the running updates
    value = frozen_value;
    err = frozen_err;
    L1 = frozen_L1;
    while (!open.empty()) {
        value += open.top().value;
        err += open.top().err;
        L1 += open.top().L1;
        open.pop();
    }
    if (err_out) *err_out = err;
    if (L1_out) *L1_out = L1;
    return value;
}

template <class F>
double adaptive_gk(const F& f, double a, double b, const QuadOptions& o, double* err_out, double* L1_out) {
    return adaptive_gk(f, std::vector<std::pair<double, double>>{{a, b}}, o, err_out, L1_out);
}

// angular integral of f(r cos t, r sin t) dt over the circle (or the lower semicircle)
QuadResult angular(const PlaneFunction& f, const PlaneLabel& label, double r, Region region, const QuadOptions& o) {
    const bool periodic = region == Region::disk;
    auto g = [&](double t) { return f(r * std::cos(t), r * std::sin(t)); };
    QuadResult out;
    const ArcSplit arcs = arcs_for(label, r, region, o);
    if (periodic && arcs.a.empty()) {
        double err = 0.0, L1 = 0.0;
        try {
            out.value = boost::math::quadrature::trapezoidal(g, 0.0, 2.0 * pi, o.rel_tol, 14, &err, &L1);
            out.error = err;
            if (acceptable(err, L1, o)) return out;
        } catch (const std::exception&) {
        }
        out.value = adaptive_gk(g, 0.0, 2.0 * pi, o, &err, &L1);
        out.error = err;
        if (!acceptable(err, L1, o) && o.throw_on_fail) {
            throw tolerance_error("angular quadrature did not converge", out.value, err);
        }
        return out;
    }
    std::vector<std::pair<double, double>> pieces;
    for (std::size_t i = 0; i < arcs.a.size(); ++i) pieces.emplace_back(arcs.a[i], arcs.b[i]);
    double err = 0.0, L1 = 0.0;
    out.value = adaptive_gk(g, pieces, o, &err, &L1);
    out.error = err;
    if (!acceptable(err, L1, o) && o.throw_on_fail) {
        throw tolerance_error("angular quadrature did not converge", out.value, err);
    }
    return out;
}

// L1 norm of f on the circle from one Kronrod panel per arc
double circle_l1(const PlaneFunction& f, const PlaneLabel& label, double r, Region region, const QuadOptions& o) {
    auto g = [&](double t) { return f(r * std::cos(t), r * std::sin(t)); };
    ArcSplit arcs = arcs_for(label, r, region, o);
    if (arcs.a.empty()) {
        arcs.a.push_back(region == Region::disk ? 0.0 : pi);
        arcs.b.push_back(2.0 * pi);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < arcs.a.size(); ++i) {
        if (!(arcs.b[i] > arcs.a[i])) continue;
        double e = 0.0, l = 0.0;
        gk_panel(g, arcs.a[i], arcs.b[i], &e, &l);
        total += l;
    }
    return total;
}

} // namespace

std::vector<double> label_breaks(const PlaneLabel& label, double r, double t0, double t1, int coarse, bool periodic) {
    std::vector<double> br;
    if (coarse < 4) coarse = 4;
    if (periodic) {
        const double h = 2.0 * pi / coarse;
        std::vector<int> lab(coarse);
        for (int i = 0; i < coarse; ++i) lab[i] = label_at(label, r, t0 + i * h);
        for (int i = 0; i < coarse; ++i) {
            const int nxt = (i + 1) % coarse;
            if (lab[i] != lab[nxt]) cell_breaks(label, r, t0 + i * h, t0 + (i + 1) * h, br);
        }
        std::sort(br.begin(), br.end());
        return br;
    }
    const double h = (t1 - t0) / coarse;
    int prev = label_at(label, r, t0);
    for (int i = 1; i <= coarse; ++i) {
        const double t = i == coarse ? t1 : t0 + i * h;
        const int cur = label_at(label, r, t);
        if (cur != prev) cell_breaks(label, r, t0 + (i - 1) * h, t, br);
        prev = cur;
    }
    return br;
}

std::vector<double> circle_split(const PlaneLabel& label, double r, Region region, const QuadOptions& opts) {
    const bool periodic = region == Region::disk;
    const double t0 = periodic ? 0.0 : pi;
    const double t1 = 2.0 * pi;
    auto br = label_breaks(label, r, t0, t1, opts.coarse_angles, periodic);
    if (opts.circle_breaks) {
        for (double t : opts.circle_breaks(r)) {
            t = std::fmod(t, 2.0 * pi);
            if (t < 0.0) t += 2.0 * pi;
            if (periodic || (t > t0 && t < t1)) br.push_back(t);
        }
        std::sort(br.begin(), br.end());
        std::vector<double> merged;
        for (double t : br) {
            if (merged.empty() || t - merged.back() > 1e-12) merged.push_back(t);
        }
        if (periodic && merged.size() > 1 && merged.front() + 2.0 * pi - merged.back() <= 1e-12) merged.pop_back();
        br = std::move(merged);
    }
    return br;
}

QuadResult area_integral(const PlaneFunction& f, const PlaneLabel& label, double R, Region region,
                         const QuadOptions& opts) {
    if (!(R > 0.0)) throw domain_error("area_integral: radius must be positive");
    std::vector<double> knots{0.0};
    for (double b : opts.radial_breaks) {
        if (b > 0.0 && b < R) knots.push_back(b);
    }
    std::sort(knots.begin(), knots.end());
    knots.push_back(R);
    QuadOptions inner = opts;
    inner.rel_tol = std::max(opts.rel_tol * 1e-2, 1e-15);
    // absolute floor for the circle integrals from a coarse pilot of the size of f
    double scale = 0.0;
    for (int k = 1; k <= 8; ++k) scale = std::max(scale, circle_l1(f, label, R * k / 8.0, region, opts));
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        scale = std::max(scale, circle_l1(f, label, 0.5 * (knots[i] + knots[i + 1]), region, opts));
    }
    inner.abs_tol = std::max(opts.abs_tol, inner.rel_tol * scale);
    double inner_err = 0.0;
    auto g = [&](double r) {
        const QuadResult a = angular(f, label, r, region, inner);
        inner_err = std::max(inner_err, a.error);
        return r * a.value;
    };
    std::vector<std::pair<double, double>> pieces;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) pieces.emplace_back(knots[i], knots[i + 1]);
    QuadResult out;
    double err = 0.0, L1 = 0.0;
    out.value = adaptive_gk(g, pieces, opts, &err, &L1);
    out.error = err + inner_err * R * R;
    if (!acceptable(err, L1, opts) && opts.throw_on_fail) {
        throw tolerance_error("radial quadrature did not converge", out.value, out.error);
    }
    return out;
}

QuadResult arc_length_integral(const PlaneFunction& f, const PlaneLabel& label, double R, Region region,
                               const QuadOptions& opts) {
    if (!(R > 0.0)) throw domain_error("arc_length_integral: radius must be positive");
    QuadResult a = angular(f, label, R, region, opts);
    a.value *= R;
    a.error *= R;
    return a;
}

double area_integral_fixed(const PlaneFunction& f, const PlaneLabel& label, double R, Region region, int n_r,
                           int n_t, const QuadOptions& opts) {
    if (!(R > 0.0) || n_r < 1 || n_t < 1) throw domain_error("area_integral_fixed: bad arguments");
    const double g = 1.0 / std::sqrt(3.0);
    const double t0 = region == Region::disk ? 0.0 : pi;
    const double t1 = 2.0 * pi;
    const double hr = R / n_r;
    double total = 0.0;
    for (int i = 0; i < n_r; ++i) {
        for (double xr : {-g, g}) {
            const double r = hr * (i + 0.5 + 0.5 * xr);
            ArcSplit arcs = arcs_for(label, r, region, opts);
            if (arcs.a.empty()) {
                arcs.a.push_back(t0);
                arcs.b.push_back(t1);
            }
            double ang = 0.0;
            for (std::size_t m = 0; m < arcs.a.size(); ++m) {
                const double ht = (arcs.b[m] - arcs.a[m]) / n_t;
                for (int p = 0; p < n_t; ++p) {
                    for (double xt : {-g, g}) {
                        const double t = arcs.a[m] + ht * (p + 0.5 + 0.5 * xt);
                        ang += 0.5 * ht * f(r * std::cos(t), r * std::sin(t));
                    }
                }
            }
            total += 0.5 * hr * r * ang;
        }
    }
    return total;
}

} // namespace bores

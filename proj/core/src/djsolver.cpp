#include "bores/djsolver.hpp"

#include "bores/errors.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bores {

namespace {

constexpr double degeneracy_floor = 1e-8;

// Unknown numbering; -1 marks a wall node (not an unknown).
struct Index {
    int np1, np2, nq, m;

    explicit Index(const Grid& g) : np1(g.np1), np2(g.np2), nq(g.nq), m((g.np1 - 1) + (g.np2 - 2)) {}

    int lower(int j, int k) const { return k <= np1 - 2 ? j * m + k : -1; }
    int upper(int j, int k) const {
        if (k == 0) return j * m;
        if (k <= np2 - 2) return j * m + (np1 - 1) + (k - 1);
        return -1;
    }
    int eps() const { return nq * m; }
    int size() const { return nq * m + 1; }
};

void check_shapes(const BoreState& s) {
    const auto& g = s.grid;
    if (s.H1.size() != static_cast<std::size_t>(g.nq) * g.np1 || s.H2.size() != static_cast<std::size_t>(g.nq) * g.np2) {
        throw parameter_error("BoreState: field sizes do not match the grid");
    }
}

void check_degeneracy(const BoreState& s) {
    const auto& g = s.grid;
    for (int j = 0; j < g.nq; ++j) {
        for (int k = 0; k + 1 < g.np1; ++k) {
            const double hp = (s.h1(j, k + 1) - s.h1(j, k)) / g.dp1;
            if (!(hp < -degeneracy_floor)) throw degeneracy_error(1, j, k, hp);
        }
        for (int k = 0; k + 1 < g.np2; ++k) {
            const double hp = (s.h2(j, k + 1) - s.h2(j, k)) / g.dp2;
            if (!(hp < -degeneracy_floor)) throw degeneracy_error(2, j, k, hp);
        }
    }
}

// second-order derivative along a uniformly spaced line at node i of n
template <class F>
double line_derivative(F&& v, int i, int n, double h) {
    if (i == 0) return (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h);
    if (i == n - 1) return (3.0 * v(n - 1) - 4.0 * v(n - 2) + v(n - 3)) / (2.0 * h);
    return (v(i + 1) - v(i - 1)) / (2.0 * h);
}

} // namespace

void FrontConfig::validate(const FluidPair& fluids) const {
    fluids.validate();
    if (!(lambda > 0.0 && lambda < 1.0)) throw parameter_error("FrontConfig: lambda must lie in (0,1)");
    if (std::abs(h2 - (1.0 - lambda)) > 1e-14) throw parameter_error("FrontConfig: h2 must equal 1 - lambda");
    if (!fluids.boussinesq && std::abs(froude_sq - front_froude(fluids)) > 1e-14) {
        throw parameter_error("FrontConfig: froude_sq differs from the front Froude number");
    }
    if (!(L > 0.0)) throw parameter_error("FrontConfig: L must be positive");
    if (nq < 3 || np1 < 3 || np2 < 3) throw parameter_error("FrontConfig: grid counts must be at least 3");
    if (nq % 2 == 0) throw parameter_error("FrontConfig: nq must be odd so that q = 0 is a grid column");
    if (!(newton_tol > 0.0)) throw parameter_error("FrontConfig: newton_tol must be positive");
    if (max_newton_iters < 1) throw parameter_error("FrontConfig: max_newton_iters must be positive");
}

FrontConfig make_front_config(const FluidPair& fluids, double lambda, double L, int nq, int np1, int np2) {
    FrontConfig cfg;
    cfg.lambda = lambda;
    cfg.h2 = 1.0 - lambda;
    cfg.froude_sq = front_froude(fluids);
    cfg.L = L;
    cfg.nq = nq;
    cfg.np1 = np1;
    cfg.np2 = np2;
    cfg.validate(fluids);
    return cfg;
}

Grid Grid::make(const FrontConfig& cfg, const FluidPair& fluids) {
    cfg.validate(fluids);
    Grid g;
    g.nq = cfg.nq;
    g.np1 = cfg.np1;
    g.np2 = cfg.np2;
    g.L = cfg.L;
    g.lambda = cfg.lambda;
    g.h2 = cfg.h2;
    g.P1 = cfg.lambda * std::sqrt(fluids.rho1);
    g.P2 = cfg.h2 * std::sqrt(fluids.rho2);
    g.dq = 2.0 * cfg.L / (cfg.nq - 1);
    g.dp1 = g.P1 / (cfg.np1 - 1);
    g.dp2 = -g.P2 / (cfg.np2 - 1);
    g.jmid = cfg.nq / 2;
    g.q.resize(cfg.nq);
    for (int j = 0; j < cfg.nq; ++j) g.q[j] = -cfg.L + j * g.dq;
    g.q[cfg.nq - 1] = cfg.L;
    g.p1.resize(cfg.np1);
    for (int k = 0; k < cfg.np1; ++k) g.p1[k] = k * g.dp1;
    g.p1[cfg.np1 - 1] = g.P1;
    g.p2.resize(cfg.np2);
    for (int k = 0; k < cfg.np2; ++k) g.p2[k] = k * g.dp2;
    g.p2[cfg.np2 - 1] = -g.P2;
    return g;
}

int Grid::unknowns() const { return Index(*this).size(); }

std::vector<double> BoreState::eta() const {
    std::vector<double> e(grid.nq);
    for (int j = 0; j < grid.nq; ++j) e[j] = h1(j, 0);
    return e;
}

BoreState layered_state(const FrontConfig& cfg, const FluidPair& fluids, const std::vector<double>& eta) {
    BoreState s;
    s.grid = Grid::make(cfg, fluids);
    const auto& g = s.grid;
    if (eta.size() != static_cast<std::size_t>(g.nq)) throw parameter_error("layered_state: eta has wrong length");
    s.H1.assign(static_cast<std::size_t>(g.nq) * g.np1, 0.0);
    s.H2.assign(static_cast<std::size_t>(g.nq) * g.np2, 0.0);
    for (int j = 0; j < g.nq; ++j) {
        for (int k = 0; k < g.np1; ++k) {
            const double t = static_cast<double>(k) / (g.np1 - 1);
            s.h1(j, k) = eta[j] * (1.0 - t) - g.lambda * t;
        }
        for (int k = 0; k < g.np2; ++k) {
            const double t = static_cast<double>(k) / (g.np2 - 1);
            s.h2(j, k) = eta[j] * (1.0 - t) + g.h2 * t;
        }
        s.h1(j, g.np1 - 1) = -g.lambda;
        s.h2(j, g.np2 - 1) = g.h2;
    }
    return s;
}

BoreState laminar_state(const FrontConfig& cfg, const FluidPair& fluids) {
    return layered_state(cfg, fluids, std::vector<double>(cfg.nq, 0.0));
}

BoreState tanh_state(const FrontConfig& cfg, const FluidPair& fluids, double width) {
    const double etad = conjugate_downstream(fluids) - cfg.lambda;
    const Grid g = Grid::make(cfg, fluids);
    std::vector<double> eta(g.nq);
    for (int j = 0; j < g.nq; ++j) eta[j] = 0.5 * etad * (1.0 + std::tanh(g.q[j] / width));
    return layered_state(cfg, fluids, eta);
}

std::vector<double> pack(const BoreState& s) {
    check_shapes(s);
    const Index ix(s.grid);
    std::vector<double> x(ix.size());
    for (int j = 0; j < s.grid.nq; ++j) {
        for (int k = 0; k <= s.grid.np1 - 2; ++k) x[ix.lower(j, k)] = s.h1(j, k);
        for (int k = 1; k <= s.grid.np2 - 2; ++k) x[ix.upper(j, k)] = s.h2(j, k);
    }
    x[ix.eps()] = s.eps;
    return x;
}

void unpack(const std::vector<double>& x, BoreState& s) {
    check_shapes(s);
    const Index ix(s.grid);
    if (x.size() != static_cast<std::size_t>(ix.size())) throw parameter_error("unpack: vector has wrong length");
    for (int j = 0; j < s.grid.nq; ++j) {
        for (int k = 0; k <= s.grid.np1 - 2; ++k) s.h1(j, k) = x[ix.lower(j, k)];
        s.h2(j, 0) = s.h1(j, 0);
        for (int k = 1; k <= s.grid.np2 - 2; ++k) s.h2(j, k) = x[ix.upper(j, k)];
        s.h1(j, s.grid.np1 - 1) = -s.grid.lambda;
        s.h2(j, s.grid.np2 - 1) = s.grid.h2;
    }
    s.eps = x[ix.eps()];
}

std::vector<double> assemble_residual(const BoreState& s, const FrontConfig& cfg, const FluidPair& fluids,
                                      Triplets* jac) {
    check_shapes(s);
    const Grid& g = s.grid;
    if (g.nq != cfg.nq || g.np1 != cfg.np1 || g.np2 != cfg.np2 || g.lambda != cfg.lambda) {
        throw parameter_error("assemble_residual: state grid does not match the config");
    }
    check_degeneracy(s);

    const Index ix(g);
    const int N = ix.size();
    std::vector<double> res(N, 0.0);
    if (jac) {
        jac->n = N;
        jac->rows.clear();
        jac->cols.clear();
        jac->vals.clear();
        jac->rows.reserve(static_cast<std::size_t>(N) * 10);
        jac->cols.reserve(static_cast<std::size_t>(N) * 10);
        jac->vals.reserve(static_cast<std::size_t>(N) * 10);
    }
    auto add = [jac](int row, int col, double v) {
        if (col < 0) return;
        jac->rows.push_back(row);
        jac->cols.push_back(col);
        jac->vals.push_back(v);
    };
    const double dq = g.dq;

    // interior rows, scaled by dp^2
    auto interior = [&](auto H, auto idx, int n, double dp) {
        const double sc = dp * dp;
        for (int j = 1; j + 1 < g.nq; ++j) {
            for (int k = 1; k + 1 < n; ++k) {
                const double Hq = (H(j + 1, k) - H(j - 1, k)) / (2.0 * dq);
                const double Hp = (H(j, k + 1) - H(j, k - 1)) / (2.0 * dp);
                const double Hqq = (H(j + 1, k) - 2.0 * H(j, k) + H(j - 1, k)) / (dq * dq);
                const double Hpp = (H(j, k + 1) - 2.0 * H(j, k) + H(j, k - 1)) / (dp * dp);
                const double Hqp = (H(j + 1, k + 1) - H(j + 1, k - 1) - H(j - 1, k + 1) + H(j - 1, k - 1)) / (4.0 * dq * dp);
                const int row = idx(j, k);
                res[row] = sc * ((1.0 + Hq * Hq) * Hpp - 2.0 * Hq * Hp * Hqp + Hp * Hp * Hqq);
                if (!jac) continue;
                const double dHq = 2.0 * Hq * Hpp - 2.0 * Hp * Hqp;
                const double dHp = -2.0 * Hq * Hqp + 2.0 * Hp * Hqq;
                const double dHpp = 1.0 + Hq * Hq;
                const double dHqp = -2.0 * Hq * Hp;
                const double dHqq = Hp * Hp;
                add(row, idx(j + 1, k), sc * (dHq / (2.0 * dq) + dHqq / (dq * dq)));
                add(row, idx(j - 1, k), sc * (-dHq / (2.0 * dq) + dHqq / (dq * dq)));
                add(row, idx(j, k + 1), sc * (dHp / (2.0 * dp) + dHpp / (dp * dp)));
                add(row, idx(j, k - 1), sc * (-dHp / (2.0 * dp) + dHpp / (dp * dp)));
                add(row, idx(j, k), sc * (-2.0 * dHqq / (dq * dq) - 2.0 * dHpp / (dp * dp)));
                const double w = sc * dHqp / (4.0 * dq * dp);
                add(row, idx(j + 1, k + 1), w);
                add(row, idx(j - 1, k - 1), w);
                add(row, idx(j + 1, k - 1), -w);
                add(row, idx(j - 1, k + 1), -w);
            }
        }
    };
    interior([&](int j, int k) { return s.h1(j, k); }, [&](int j, int k) { return ix.lower(j, k); }, g.np1, g.dp1);
    interior([&](int j, int k) { return s.h2(j, k); }, [&](int j, int k) { return ix.upper(j, k); }, g.np2, g.dp2);

    // interface rows
    const auto dc = dynamic_coefficients(fluids);
    const double c = dc.c * (1.0 + s.eps);
    for (int j = 1; j + 1 < g.nq; ++j) {
        const double eta = s.h1(j, 0);
        const double etaq = (s.h1(j + 1, 0) - s.h1(j - 1, 0)) / (2.0 * dq);
        const double H1p = (-3.0 * s.h1(j, 0) + 4.0 * s.h1(j, 1) - s.h1(j, 2)) / (2.0 * g.dp1);
        const double H2p = (-3.0 * s.h2(j, 0) + 4.0 * s.h2(j, 1) - s.h2(j, 2)) / (2.0 * g.dp2);
        const double jump = 1.0 / (H2p * H2p) - 1.0 / (H1p * H1p);
        const double a = 1.0 + etaq * etaq;
        const int row = ix.lower(j, 0);
        res[row] = a * jump + c * eta - dc.rhs;
        if (!jac) continue;
        const double dqv = 2.0 * etaq * jump / (2.0 * dq);
        const double d1 = a * 2.0 / (H1p * H1p * H1p);
        const double d2 = -a * 2.0 / (H2p * H2p * H2p);
        add(row, ix.lower(j + 1, 0), dqv);
        add(row, ix.lower(j - 1, 0), -dqv);
        add(row, ix.lower(j, 0), c + d1 * (-3.0) / (2.0 * g.dp1) + d2 * (-3.0) / (2.0 * g.dp2));
        add(row, ix.lower(j, 1), d1 * 4.0 / (2.0 * g.dp1));
        add(row, ix.lower(j, 2), d1 * (-1.0) / (2.0 * g.dp1));
        add(row, ix.upper(j, 1), d2 * 4.0 / (2.0 * g.dp2));
        add(row, ix.upper(j, 2), d2 * (-1.0) / (2.0 * g.dp2));
        add(row, ix.eps(), dc.c * eta);
    }

    // far-field clamps
    const auto hs = conjugate_height(fluids, g.lambda, s.eps);
    for (int side = 0; side < 2; ++side) {
        const int j = side == 0 ? 0 : g.nq - 1;
        const double etaval = side == 0 ? 0.0 : hs.H - g.lambda;
        const double deta = side == 0 ? 0.0 : hs.dH_deps;
        for (int k = 0; k <= g.np1 - 2; ++k) {
            const double t = static_cast<double>(k) / (g.np1 - 1);
            const int row = ix.lower(j, k);
            res[row] = s.h1(j, k) - (etaval * (1.0 - t) - g.lambda * t);
            if (!jac) continue;
            add(row, row, 1.0);
            if (side == 1) add(row, ix.eps(), -(1.0 - t) * deta);
        }
        for (int k = 1; k <= g.np2 - 2; ++k) {
            const double t = static_cast<double>(k) / (g.np2 - 1);
            const int row = ix.upper(j, k);
            res[row] = s.h2(j, k) - (etaval * (1.0 - t) + g.h2 * t);
            if (!jac) continue;
            add(row, row, 1.0);
            if (side == 1) add(row, ix.eps(), -(1.0 - t) * deta);
        }
    }

    // phase pin
    const double etad = conjugate_downstream(fluids) - g.lambda;
    res[ix.eps()] = s.h1(g.jmid, 0) - 0.5 * etad;
    if (jac) add(ix.eps(), ix.lower(g.jmid, 0), 1.0);
    return res;
}

double residual_norm(const std::vector<double>& r) {
    double m = 0.0;
    for (double v : r) {
        if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(v));
    }
    return m;
}

BoreState newton_solve(const BoreState& initial, const FrontConfig& cfg, const FluidPair& fluids,
                       NewtonReport* report) {
    using SpMat = Eigen::SparseMatrix<double>;
    BoreState s = initial;
    std::vector<double> x = pack(s);
    Triplets tri;
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    bool analyzed = false;
    NewtonReport rep;

    auto fail = [&](const std::string& why, double nr, int it) {
        if (report) *report = rep;
        std::ostringstream os;
        os << "newton_solve: " << why << " (iteration " << it << ", residual " << nr << ")";
        throw convergence_error(os.str(), nr, it, x);
    };

    for (int it = 0;; ++it) {
        const auto r = assemble_residual(s, cfg, fluids, &tri);
        const double nr = residual_norm(r);
        rep.history.push_back(nr);
        rep.iterations = it;
        rep.residual = nr;
        if (!std::isfinite(nr)) fail("non-finite residual", nr, it);
        if (nr <= cfg.newton_tol) break;
        if (it >= cfg.max_newton_iters) fail("maximum iterations exceeded", nr, it);

        SpMat A(tri.n, tri.n);
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(tri.vals.size());
        for (std::size_t i = 0; i < tri.vals.size(); ++i) trip.emplace_back(tri.rows[i], tri.cols[i], tri.vals[i]);
        A.setFromTriplets(trip.begin(), trip.end());
        A.makeCompressed();
        if (!analyzed) {
            lu.analyzePattern(A);
            analyzed = true;
        }
        lu.factorize(A);
        if (lu.info() != Eigen::Success) fail("singular Jacobian", nr, it);
        Eigen::VectorXd rhs(tri.n);
        for (int i = 0; i < tri.n; ++i) rhs[i] = -r[i];
        const Eigen::VectorXd dx = lu.solve(rhs);
        if (lu.info() != Eigen::Success || !dx.allFinite()) fail("linear solve failed", nr, it);

        bool accepted = false;
        BoreState trial = s;
        std::vector<double> xn(x.size());
        for (double t = 1.0; t >= 1.0 / 64.0; t *= 0.5) {
            for (std::size_t i = 0; i < x.size(); ++i) xn[i] = x[i] + t * dx[static_cast<Eigen::Index>(i)];
            unpack(xn, trial);
            try {
                const double nn = residual_norm(assemble_residual(trial, cfg, fluids));
                if (nn < (1.0 - 1e-4 * t) * nr) {
                    accepted = true;
                    break;
                }
            } catch (const degeneracy_error&) {
            } catch (const convergence_error&) {
            }
        }
        if (!accepted) fail("line search found no decrease", nr, it);
        x = xn;
        s = trial;
    }
    if (report) *report = rep;
    return s;
}

Slice column_slice(const BoreState& s, const FluidPair& fluids, int j) {
    (void)fluids;
    const Grid& g = s.grid;
    if (j < 0 || j >= g.nq) throw domain_error("column_slice: column out of range");
    Slice sl;
    sl.lambda = g.lambda;
    auto fill = [&](LayerSlice& out, auto H, int n, double dp, bool reverse) {
        out.y.resize(n);
        out.psi_x.resize(n);
        out.psi_y.resize(n);
        for (int m = 0; m < n; ++m) {
            const int k = reverse ? n - 1 - m : m;
            const double Hp = line_derivative([&](int kk) { return H(j, kk); }, k, n, dp);
            const double Hq = line_derivative([&](int jj) { return H(jj, k); }, j, g.nq, g.dq);
            out.y[m] = H(j, k);
            out.psi_y[m] = 1.0 / Hp;
            out.psi_x[m] = -Hq / Hp;
        }
    };
    fill(sl.lower, [&](int jj, int kk) { return s.h1(jj, kk); }, g.np1, g.dp1, true);
    fill(sl.upper, [&](int jj, int kk) { return s.h2(jj, kk); }, g.np2, g.dp2, false);
    return sl;
}

std::vector<double> column_flow_force(const BoreState& s, const FluidPair& fluids, double froude_sq) {
    std::vector<double> S(s.grid.nq);
    for (int j = 0; j < s.grid.nq; ++j) S[j] = flow_force(column_slice(s, fluids, j), fluids, froude_sq);
    return S;
}

double flow_force_spread(const BoreState& s, const FluidPair& fluids, double froude_sq) {
    const auto S = column_flow_force(s, fluids, froude_sq);
    const auto [lo, hi] = std::minmax_element(S.begin(), S.end());
    double mean = 0.0;
    for (double v : S) mean += v;
    mean /= static_cast<double>(S.size());
    return (*hi - *lo) / std::abs(mean);
}

struct PhysicalInterpolant::Rows {
    using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
    std::vector<Spline> lower;   ///< H1(., p1_k), k = 0 .. np1-1
    std::vector<Spline> upper;   ///< H2(., p2_k), k = 0 .. np2-1
};

PhysicalInterpolant::PhysicalInterpolant(const BoreState& s, const FluidPair& fluids) : grid_(s.grid) {
    check_shapes(s);
    fluids.validate();
    const Grid& g = grid_;
    auto rows = std::make_shared<Rows>();
    std::vector<double> buf(static_cast<std::size_t>(g.nq));
    for (int k = 0; k < g.np1; ++k) {
        for (int j = 0; j < g.nq; ++j) buf[j] = s.h1(j, k);
        rows->lower.emplace_back(buf.data(), buf.size(), -g.L, g.dq);
    }
    for (int k = 0; k < g.np2; ++k) {
        for (int j = 0; j < g.nq; ++j) buf[j] = s.h2(j, k);
        rows->upper.emplace_back(buf.data(), buf.size(), -g.L, g.dq);
    }
    rows_ = std::move(rows);
}

bool PhysicalInterpolant::contains(double x, double y) const {
    return x >= -grid_.L && x <= grid_.L && y >= -grid_.lambda && y <= grid_.h2;
}

double PhysicalInterpolant::eta(double x) const { return rows_->lower.front()(std::clamp(x, -grid_.L, grid_.L)); }

int PhysicalInterpolant::layer(double x, double y) const {
    if (!contains(x, y)) throw domain_error("PhysicalInterpolant: point outside the channel");
    return y <= eta(x) ? 1 : 2;
}

PhysicalInterpolant::Sample PhysicalInterpolant::sample(double x, double y) const {
    if (!contains(x, y)) throw domain_error("PhysicalInterpolant: point outside the channel");
    const Grid& g = grid_;
    const bool lower = y <= eta(x);
    const auto& rows = lower ? rows_->lower : rows_->upper;
    const double dp = lower ? g.dp1 : g.dp2;
    const std::size_t n = rows.size();
    std::vector<double> h(n), hq(n);
    for (std::size_t k = 0; k < n; ++k) {
        h[k] = rows[k](x);
        hq[k] = rows[k].prime(x);
    }
    // the spline in p runs over t = k * dp; dp < 0 in the upper layer, so work in
    // the index variable and convert the derivative
    const Rows::Spline Hk(h.data(), n, 0.0, 1.0);
    const Rows::Spline Hqk(hq.data(), n, 0.0, 1.0);
    const double sgn = h.back() > h.front() ? 1.0 : -1.0;   // H increasing or decreasing in k
    auto before = [&](double v) { return sgn * (v - y) <= 0.0; };
    std::size_t lo = 0, hi = n - 1;
    if (!before(h[lo])) hi = lo;
    if (before(h[hi])) lo = hi;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (before(h[mid])) lo = mid; else hi = mid;
    }
    double t = static_cast<double>(lo);
    if (hi != lo) {
        double a = static_cast<double>(lo), b = static_cast<double>(hi);
        t = a + (y - h[lo]) / (h[hi] - h[lo]);
        for (int it = 0; it < 60; ++it) {
            const double f = Hk(t) - y;
            if (sgn * f <= 0.0) a = t; else b = t;
            const double d = Hk.prime(t);
            double tn = d != 0.0 ? t - f / d : 0.5 * (a + b);
            if (!(tn > a && tn < b)) tn = 0.5 * (a + b);
            if (std::abs(tn - t) <= 1e-15 * std::max(1.0, std::abs(t))) {
                t = tn;
                break;
            }
            t = tn;
        }
    }
    const double Hp = Hk.prime(t) / dp;
    const double Hq = Hqk(t);
    return {t * dp, {-Hq / Hp, 1.0 / Hp}};
}

double PhysicalInterpolant::psi(double x, double y) const { return sample(x, y).psi; }

Vec2 PhysicalInterpolant::grad(double x, double y) const { return sample(x, y).grad; }

PhysicalField reconstruct_physical(const BoreState& s, const FrontConfig& cfg, const FluidPair& fluids,
                                   const std::vector<double>& xs, const std::vector<double>& ys) {
    (void)cfg;
    const PhysicalInterpolant in(s, fluids);
    PhysicalField f;
    f.nx = static_cast<int>(xs.size());
    f.ny = static_cast<int>(ys.size());
    f.x = xs;
    f.y = ys;
    const std::size_t n = xs.size() * ys.size();
    f.psi.resize(n);
    f.psi_x.resize(n);
    f.psi_y.resize(n);
    f.layer.resize(n);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t m = 0; m < ys.size(); ++m) {
            const std::size_t id = i * ys.size() + m;
            if (!in.contains(xs[i], ys[m])) {
                std::ostringstream os;
                os << "reconstruct_physical: point (" << xs[i] << ", " << ys[m] << ") outside the channel";
                throw domain_error(os.str());
            }
            f.psi[id] = in.psi(xs[i], ys[m]);
            const Vec2 gr = in.grad(xs[i], ys[m]);
            f.psi_x[id] = gr.x;
            f.psi_y[id] = gr.y;
            f.layer[id] = in.layer(xs[i], ys[m]);
        }
    }
    return f;
}

} // namespace bores

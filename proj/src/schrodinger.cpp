#include "miura/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "miura/parallel.hpp"

namespace miura {

namespace {

// Piecewise-smooth reconstruction of Q = f + int g + atom steps. Inside cell
// k (between nodes k and k+1) the value at fraction s is smooth; atoms enter
// as exact steps at nodes, included for every cell at or right of theirs.
struct QRecon {
    const Potential& q;
    GridFn G;
    std::vector<double> atom_cum; // per cell
    double h;

    explicit QRecon(const Potential& q_) : q(q_), G(cumulative_quadrature(q_.g)), h(q_.grid.h()) {
        atom_cum.assign(static_cast<size_t>(q.grid.n), 0.0);
        double cum = 0.0;
        size_t next = 0;
        for (int k = 0; k < q.grid.n; ++k) {
            while (next < q.atoms.size() && q.atom_nodes[next] <= k) cum += q.atoms[next++].w;
            atom_cum[static_cast<size_t>(k)] = cum;
        }
    }

    double eval(int k, double s) const {
        const double f0 = q.f[k], f1 = q.f[k + 1];
        const double g0 = q.g[k], g1 = q.g[k + 1];
        return f0 + s * (f1 - f0) + G[k] + h * (s * g0 + 0.5 * s * s * (g1 - g0)) +
               atom_cum[static_cast<size_t>(k)];
    }
};

inline void system_rhs(double Q, double lambda, double y, double u, double& dy, double& du) {
    dy = Q * y + u;
    du = -(Q * Q + lambda) * y - Q * u;
}

// One RK4 substep of width dx starting at cell fraction s0 (ds = dx/h signed),
// in the cell-local gauge Qt = Q - gauge.
inline void rk4_substep(const QRecon& R, int cell, double gauge, double lambda, double s0,
                        double ds, double dx, double& y, double& u) {
    double k1y, k1u, k2y, k2u, k3y, k3u, k4y, k4u;
    const double Q0 = R.eval(cell, s0) - gauge;
    const double Qm = R.eval(cell, s0 + 0.5 * ds) - gauge;
    const double Q1 = R.eval(cell, s0 + ds) - gauge;
    system_rhs(Q0, lambda, y, u, k1y, k1u);
    system_rhs(Qm, lambda, y + 0.5 * dx * k1y, u + 0.5 * dx * k1u, k2y, k2u);
    system_rhs(Qm, lambda, y + 0.5 * dx * k2y, u + 0.5 * dx * k2u, k3y, k3u);
    system_rhs(Q1, lambda, y + dx * k3y, u + dx * k3u, k4y, k4u);
    y += dx / 6.0 * (k1y + 2.0 * (k2y + k3y) + k4y);
    u += dx / 6.0 * (k1u + 2.0 * (k2u + k3u) + k4u);
}

// March from node k0 to node k1, writing node samples (and the substep trail)
// into the solution. Assumes sol.y[k0], sol.u[k0], sol.log_scale[k0] are set.
//
// Each cell is integrated in the gauge Qt = Q - Q(entry side): shifting the
// antiderivative is exact (u transforms as u + C y) and removes the spurious
// stiffness |Q| that a far-from-zero antiderivative would inject into the
// system. Substeps adapt to sqrt(|lambda|) and the in-cell swing of Q.
void march(const Potential& q, const QRecon& R, double lambda, int k0, int k1,
           const IntegrateOptions& opts, QuasiSolution& sol) {
    if (k0 == k1) return;
    const int dir = k1 > k0 ? 1 : -1;
    const double h = q.grid.h();
    const double freq = std::sqrt(std::abs(lambda));
    double y = sol.y[static_cast<size_t>(k0)];
    double u = sol.u[static_cast<size_t>(k0)];
    double ls = sol.log_scale[static_cast<size_t>(k0)];
    for (int k = k0; k != k1; k += dir) {
        const int cell = dir > 0 ? k : k - 1;
        const double s_entry = dir > 0 ? 0.0 : 1.0;
        const double gauge = R.eval(cell, s_entry);
        const double swing = std::abs(R.eval(cell, 1.0 - s_entry) - gauge) +
                             std::abs(R.eval(cell, 0.5) - gauge);
        const int substeps =
            std::max(opts.substeps, static_cast<int>(std::ceil(h * (freq + swing) / 0.05)));
        const double dx = dir * h / substeps;
        const double ds = static_cast<double>(dir) / substeps;
        double ul = u + gauge * y; // enter the local gauge
        for (int j = 0; j < substeps; ++j) {
            rk4_substep(R, cell, gauge, lambda, s_entry + j * ds, ds, dx, y, ul);
            if (opts.record_trail) {
                sol.trail_x.push_back(q.grid.node(k) + (j + 1) * dx);
                sol.trail_y.push_back(y);
                sol.trail_u.push_back(ul - gauge * y);
            }
        }
        u = ul - gauge * y; // back to the global gauge
        if (!std::isfinite(y) || !std::isfinite(u))
            throw NumericalError("integrate: non-finite state while marching");
        const double m = std::max(std::abs(y), std::abs(u));
        if (m > opts.rescale_threshold) {
            y /= m;
            u /= m;
            ls += std::log(m);
            sol.rescaled = true;
        }
        const size_t idx = static_cast<size_t>(k + dir);
        sol.y[idx] = y;
        sol.u[idx] = u;
        sol.log_scale[idx] = ls;
    }
}

QuasiSolution make_empty(const Grid& grid, double lambda) {
    QuasiSolution sol;
    sol.grid = grid;
    sol.lambda = lambda;
    const size_t m = static_cast<size_t>(grid.n + 1);
    sol.y.assign(m, 0.0);
    sol.u.assign(m, 0.0);
    sol.log_scale.assign(m, 0.0);
    return sol;
}

} // namespace

double QuasiSolution::y_true(int k) const { return y[static_cast<size_t>(k)] * std::exp(log_scale[static_cast<size_t>(k)]); }
double QuasiSolution::u_true(int k) const { return u[static_cast<size_t>(k)] * std::exp(log_scale[static_cast<size_t>(k)]); }

double QuasiSolution::slope(int k, const Antiderivative& A) const {
    return u[static_cast<size_t>(k)] + A.right_value(k) * y[static_cast<size_t>(k)];
}

QuasiSolution integrate(const Potential& q, double lambda, double x0, double y0, double u0,
                        double x1, const IntegrateOptions& opts) {
    const double tol = q.grid.h() / 10.0;
    const int k0 = q.grid.node_index(x0, tol);
    const int k1 = q.grid.node_index(x1, tol);
    if (k0 < 0 || k1 < 0) throw ValidationError("integrate: x0 and x1 must be grid nodes");
    if (y0 == 0.0 && u0 == 0.0) throw ValidationError("integrate: (y0, u0) must not both vanish");
    if (opts.substeps < 1) throw ValidationError("integrate: substeps must be >= 1");

    QuasiSolution sol = make_empty(q.grid, lambda);
    sol.first_node = std::min(k0, k1);
    sol.last_node = std::max(k0, k1);
    sol.y[static_cast<size_t>(k0)] = y0;
    sol.u[static_cast<size_t>(k0)] = u0;
    if (opts.record_trail) {
        sol.trail_x.push_back(q.grid.node(k0));
        sol.trail_y.push_back(y0);
        sol.trail_u.push_back(u0);
    }
    QRecon R(q);
    march(q, R, lambda, k0, k1, opts, sol);
    return sol;
}

QuasiSolution shoot_full(const Potential& q, double lambda, int node, double y0, double u0,
                         const IntegrateOptions& opts) {
    if (node < 0 || node > q.grid.n) throw ValidationError("shoot_full: node out of range");
    if (y0 == 0.0 && u0 == 0.0) throw ValidationError("shoot_full: (y0, u0) must not both vanish");
    QuasiSolution sol = make_empty(q.grid, lambda);
    sol.first_node = 0;
    sol.last_node = q.grid.n;
    sol.y[static_cast<size_t>(node)] = y0;
    sol.u[static_cast<size_t>(node)] = u0;
    QRecon R(q);
    // left part first so the trail ends up ordered by x
    march(q, R, lambda, node, 0, opts, sol);
    if (opts.record_trail) {
        std::reverse(sol.trail_x.begin(), sol.trail_x.end());
        std::reverse(sol.trail_y.begin(), sol.trail_y.end());
        std::reverse(sol.trail_u.begin(), sol.trail_u.end());
        sol.trail_x.push_back(q.grid.node(node));
        sol.trail_y.push_back(y0);
        sol.trail_u.push_back(u0);
    }
    march(q, R, lambda, node, q.grid.n, opts, sol);
    return sol;
}

int count_zeros(const QuasiSolution& sol, double x_lo, double x_hi) {
    if (sol.trail_x.empty())
        throw ValidationError("count_zeros: solution has no substep trail");
    if (!(x_lo < x_hi)) throw ValidationError("count_zeros: empty interval");
    const double eps = 1e-9 * sol.grid.h();
    std::vector<size_t> idx;
    for (size_t i = 0; i < sol.trail_x.size(); ++i)
        if (sol.trail_x[i] > x_lo + eps && sol.trail_x[i] < x_hi - eps) idx.push_back(i);
    if (idx.size() < 2) return 0;

    const double rtol = 1e-9;
    int crossings = 0;
    int prev_sign = 0;
    for (size_t pos = 0; pos < idx.size(); ++pos) {
        const size_t i = idx[pos];
        // local scale over a short window (scales drift along rescaled shots)
        double ylocal = 0.0, ulocal = 0.0;
        for (size_t w = (pos >= 2 ? pos - 2 : 0); w < std::min(pos + 3, idx.size()); ++w) {
            ylocal = std::max(ylocal, std::abs(sol.trail_y[idx[w]]));
            ulocal = std::max(ulocal, std::abs(sol.trail_u[idx[w]]));
        }
        const double yv = sol.trail_y[i];
        int s;
        if (std::abs(yv) <= rtol * ylocal) {
            if (std::abs(sol.trail_u[i]) <= rtol * std::max(ulocal, 1e-300))
                throw NumericalError("count_zeros: ambiguous zero (|y| and |u| both below tolerance)");
            s = 0;
        } else {
            s = yv > 0 ? 1 : -1;
        }
        if (s != 0) {
            if (prev_sign != 0 && s != prev_sign) ++crossings;
            prev_sign = s;
        }
    }
    return crossings;
}

Trichotomy trichotomy_probe(const QuasiSolution& sol, double x0) {
    const int k = sol.grid.node_index(x0, sol.grid.h() / 10.0);
    if (k < sol.first_node || k > sol.last_node)
        throw ValidationError("trichotomy_probe: x0 is not a populated grid node");
    double ymax = 0.0, umax = 0.0;
    for (int j = sol.first_node; j <= sol.last_node; ++j) {
        ymax = std::max(ymax, std::abs(sol.y[static_cast<size_t>(j)]));
        umax = std::max(umax, std::abs(sol.u[static_cast<size_t>(j)]));
    }
    const double scale = std::max(ymax, umax);
    const double atol = 1e-9 * std::max(scale, 1e-300);
    if (std::abs(sol.y[static_cast<size_t>(k)]) > atol)
        throw ValidationError("trichotomy_probe: y(x0) does not vanish");
    const double uv = sol.u[static_cast<size_t>(k)];
    if (std::abs(uv) <= atol) {
        if (scale <= 10.0 * atol) return Trichotomy::identically_zero;
        throw NumericalError("trichotomy_probe: undetermined (|u(x0)| below tolerance)");
    }
    return uv > 0 ? Trichotomy::sign_change_up : Trichotomy::sign_change_down;
}

namespace {

// True when the shot y(xa)=0, u(xa)=1 at the given lambda has a zero in
// (xa, xb]. The shot leaves xa positive, so the first zero shows as a
// nonpositive trail sample.
bool shot_has_zero(const Potential& q, double lambda, double xa, double xb,
                   const IntegrateOptions& opts) {
    IntegrateOptions o = opts;
    o.record_trail = true;
    QuasiSolution sol = integrate(q, lambda, xa, 0.0, 1.0, xb, o);
    for (size_t i = 1; i < sol.trail_y.size(); ++i)
        if (sol.trail_y[i] <= 0.0) return true;
    return false;
}

double hat_rayleigh_quotient(const Potential& q, double xa, double xb) {
    const Grid& grid = q.grid;
    const double mid = 0.5 * (xa + xb);
    const double half = 0.5 * (xb - xa);
    GridFn phi = GridFn::zero(grid), dphi = GridFn::zero(grid);
    GridFn phi2 = GridFn::zero(grid);
    for (int k = 0; k <= grid.n; ++k) {
        const double x = grid.node(k);
        if (x <= xa || x >= xb) continue;
        phi[k] = 1.0 - std::abs(x - mid) / half;
        dphi[k] = (x < mid ? 1.0 : -1.0) / half;
        phi2[k] = phi[k] * phi[k];
    }
    return quadratic_form(q, phi, dphi) / quadrature(phi2);
}

} // namespace

double dirichlet_lambda0(const Potential& q, double xa, double xb, const IntegrateOptions& opts) {
    const double tol = q.grid.h() / 10.0;
    if (q.grid.node_index(xa, tol) < 0 || q.grid.node_index(xb, tol) < 0 || !(xa < xb))
        throw ValidationError("dirichlet_lambda0: interval ends must be grid nodes with xa < xb");

    double gmin = 0.0, fmax = 0.0, wmax = 0.0;
    for (int k = 0; k <= q.grid.n; ++k) {
        gmin = std::min(gmin, q.g[k]);
        fmax = std::max(fmax, std::abs(q.f[k]));
    }
    for (const Atom& at : q.atoms) wmax = std::max(wmax, std::abs(at.w));

    double lo = std::min(0.0, gmin) - wmax / q.grid.h() - fmax * fmax - 1.0;
    double hi = hat_rayleigh_quotient(q, xa, xb) + 1e-6;

    std::ostringstream scan;
    scan << "dirichlet_lambda0 scan on (" << xa << ", " << xb << "): ";
    int guard = 0;
    while (!shot_has_zero(q, hi, xa, xb, opts)) {
        hi = hi * 2.0 + 1.0;
        if (++guard > 60) {
            scan << "no zero up to lambda=" << hi;
            throw NumericalError(scan.str());
        }
    }
    guard = 0;
    while (shot_has_zero(q, lo, xa, xb, opts)) {
        lo = 2.0 * lo - hi;
        if (++guard > 60) {
            scan << "zero persists down to lambda=" << lo;
            throw NumericalError(scan.str());
        }
    }
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // double resolution exhausted
        if (shot_has_zero(q, mid, xa, xb, opts))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::certified_nonneg_up_to_truncation: return "certified_nonneg_up_to_truncation";
    case Verdict::negative_witness: return "negative_witness";
    default: return "undetermined";
    }
}

SpectralReport lambda0_line(const Potential& q, const std::vector<double>& L_values,
                            const IntegrateOptions& opts) {
    if (L_values.empty()) throw ValidationError("lambda0_line: empty L schedule");
    for (size_t i = 1; i < L_values.size(); ++i)
        if (!(L_values[i] > L_values[i - 1]))
            throw ValidationError("lambda0_line: L_values must increase");

    SpectralReport rep;
    rep.L_values = L_values;
    rep.lambda0_of_L.assign(L_values.size(), 0.0);
    std::vector<std::pair<double, double>> intervals(L_values.size());
    for (size_t i = 0; i < L_values.size(); ++i) {
        const double L = L_values[i];
        if (-L < q.grid.a - 1e-9 || L > q.grid.b + 1e-9)
            throw ValidationError("lambda0_line: L outside the grid");
        intervals[i] = {q.grid.node(q.grid.nearest_node(-L)), q.grid.node(q.grid.nearest_node(L))};
    }
    parallel_for(0, static_cast<int>(L_values.size()), [&](int i) {
        rep.lambda0_of_L[static_cast<size_t>(i)] =
            dirichlet_lambda0(q, intervals[static_cast<size_t>(i)].first,
                              intervals[static_cast<size_t>(i)].second, opts);
    });

    for (size_t i = 1; i < rep.lambda0_of_L.size(); ++i)
        if (rep.lambda0_of_L[i] > rep.lambda0_of_L[i - 1] + 1e-7)
            throw NumericalError("lambda0_line: interval bottoms failed to be nonincreasing");

    rep.lambda0_estimate = rep.lambda0_of_L.back();
    if (rep.lambda0_of_L.size() >= 2) {
        const double L1 = L_values[L_values.size() - 2], L2 = L_values.back();
        const double v1 = rep.lambda0_of_L[rep.lambda0_of_L.size() - 2], v2 = rep.lambda0_of_L.back();
        // fit v(L) = v_inf + A / L^2 through the last two points
        rep.tail_extrapolation = (v2 * L2 * L2 - v1 * L1 * L1) / (L2 * L2 - L1 * L1);
    } else {
        rep.tail_extrapolation = rep.lambda0_estimate;
    }
    rep.nonneg = Verdict::certified_nonneg_up_to_truncation;
    for (size_t i = 0; i < rep.lambda0_of_L.size(); ++i) {
        if (rep.lambda0_of_L[i] < -1e-8) {
            rep.nonneg = Verdict::negative_witness;
            rep.witness_interval = intervals[i];
            rep.witness_lambda0 = rep.lambda0_of_L[i];
            break;
        }
    }
    return rep;
}

PositivityResult is_nonnegative(const Potential& q, const IntegrateOptions& opts) {
    PositivityResult res;
    res.tested_halfwidth = 0.5 * (q.grid.b - q.grid.a);
    try {
        if (shot_has_zero(q, 0.0, q.grid.a, q.grid.b, opts)) {
            res.verdict = Verdict::negative_witness;
            res.witness_interval = {q.grid.a, q.grid.b};
        } else {
            res.verdict = Verdict::certified_nonneg_up_to_truncation;
        }
    } catch (const NumericalError&) {
        res.verdict = Verdict::undetermined;
    }
    return res;
}

namespace {

struct Shot {
    std::vector<double> y, u; // normalized, y(node0) = 1
};

Shot normalized_shot(const Potential& q, int c_node, int node0, Side side,
                     const IntegrateOptions& opts) {
    IntegrateOptions o = opts;
    o.record_trail = false;
    const double u0 = side == Side::plus ? -1.0 : 1.0;
    QuasiSolution sol = shoot_full(q, 0.0, c_node, 0.0, u0, o);
    if (sol.rescaled)
        throw NumericalError("positive_solution: shot overflowed; interval too long for this potential");
    const double y0 = sol.y[static_cast<size_t>(node0)];
    if (y0 == 0.0) throw NumericalError("positive_solution: shot vanishes at the normalization point");
    Shot s;
    s.y.resize(sol.y.size());
    s.u.resize(sol.u.size());
    for (size_t k = 0; k < sol.y.size(); ++k) {
        s.y[k] = sol.y[k] / y0;
        s.u[k] = sol.u[k] / y0;
    }
    return s;
}

} // namespace

PrincipalSolution positive_solution(const Potential& q, Side side, const PrincipalOptions& opts) {
    const Grid& grid = q.grid;
    const double h = grid.h();
    const int node0 = grid.node_index(0.0, h / 2.0);
    if (node0 <= 0 || node0 >= grid.n)
        throw ValidationError("positive_solution: grid must contain x = 0 as an interior node");

    const double extent = side == Side::plus ? grid.b : -grid.a;
    std::vector<double> schedule = opts.c_schedule;
    if (schedule.empty())
        schedule = {0.25 * extent, 0.5 * extent, 0.75 * extent, extent};
    std::vector<int> c_nodes;
    for (double c : schedule) {
        const double x = side == Side::plus ? c : -c;
        if (x < grid.a - 1e-9 || x > grid.b + 1e-9)
            throw ValidationError("positive_solution: schedule point outside the grid");
        const int k = grid.nearest_node(x);
        if (c_nodes.empty() || k != c_nodes.back()) c_nodes.push_back(k);
    }
    if (c_nodes.size() < 2)
        throw ValidationError("positive_solution: schedule needs at least two distinct nodes");

    const Antiderivative A = antiderivative(q);
    const int anchor = side == Side::plus ? grid.n : 0;
    // Recessive log-derivative of the local potential at the far edge: the
    // limit solution must leave the grid along the minimal-growth direction.
    // q_edge = 0 reduces this to killing the slope (exact for compactly
    // supported q); a positive edge value gives the exponential root.
    double q_edge = 0.0;
    {
        const int margin = std::max(2, grid.n / 50);
        double acc = 0.0;
        for (int j = 0; j <= margin; ++j)
            acc += q.g[anchor + (side == Side::plus ? -j : j)];
        q_edge = std::max(0.0, acc / (margin + 1));
    }
    const double r_edge = (side == Side::plus ? -1.0 : 1.0) * std::sqrt(q_edge);
    const double W = opts.window_fraction * std::min(-grid.a, grid.b);
    const int kw_lo = std::max(0, node0 - static_cast<int>(W / h));
    const int kw_hi = std::min(grid.n, node0 + static_cast<int>(W / h));

    auto window_sup = [&](const std::vector<double>& v) {
        double m = 0.0;
        for (int k = kw_lo; k <= kw_hi; ++k) m = std::max(m, std::abs(v[static_cast<size_t>(k)]));
        return m;
    };

    // rank-one extrapolation of a consecutive pair of shots: the multiple of
    // the difference is fixed by killing the slope at the far grid edge
    auto extrapolate = [&](const Shot& s1, const Shot& s2) {
        Shot e;
        const size_t m = s2.y.size();
        std::vector<double> dy(m), du(m);
        for (size_t k = 0; k < m; ++k) {
            dy[k] = s2.y[k] - s1.y[k];
            du[k] = s2.u[k] - s1.u[k];
        }
        double dsup = 0.0;
        for (int k = kw_lo; k <= kw_hi; ++k) dsup = std::max(dsup, std::abs(dy[static_cast<size_t>(k)]));
        const double Qa = A.right_value(anchor);
        // y' - r_edge y at the anchor, for the difference and the last shot
        const double bc_d = du[static_cast<size_t>(anchor)] +
                            (Qa - r_edge) * dy[static_cast<size_t>(anchor)];
        const double bc_2 = s2.u[static_cast<size_t>(anchor)] +
                            (Qa - r_edge) * s2.y[static_cast<size_t>(anchor)];
        double kappa = 0.0;
        if (dsup > 0.01 * opts.rtol && bc_d != 0.0) kappa = -bc_2 / bc_d;
        e.y.resize(m);
        e.u.resize(m);
        for (size_t k = 0; k < m; ++k) {
            e.y[k] = s2.y[k] + kappa * dy[k];
            e.u[k] = s2.u[k] + kappa * du[k];
        }
        return e;
    };

    std::vector<double> used;
    for (int k : c_nodes) used.push_back(grid.node(k));

    Shot prev_shot = normalized_shot(q, c_nodes[0], node0, side, opts.ode);
    std::optional<Shot> prev_extrap;
    double last_diff = std::numeric_limits<double>::infinity();
    for (size_t j = 1; j < c_nodes.size(); ++j) {
        Shot cur_shot = normalized_shot(q, c_nodes[j], node0, side, opts.ode);
        Shot extrap = extrapolate(prev_shot, cur_shot);
        if (prev_extrap) {
            double diff = 0.0;
            for (int k = kw_lo; k <= kw_hi; ++k)
                diff = std::max(diff, std::abs(extrap.y[static_cast<size_t>(k)] -
                                               prev_extrap->y[static_cast<size_t>(k)]));
            last_diff = diff;
            const double scale = std::max(window_sup(extrap.y), 1e-300);
            if (diff <= opts.rtol * scale) {
                PrincipalSolution out;
                out.sol = make_empty(grid, 0.0);
                out.sol.first_node = 0;
                out.sol.last_node = grid.n;
                out.sol.y = extrap.y;
                out.sol.u = extrap.u;
                for (int k = 0; k <= grid.n; ++k)
                    if (!(out.sol.y[static_cast<size_t>(k)] > 0.0))
                        throw NumericalError(
                            "positive_solution: nonpositive value in the limit; truncation too short");
                out.side = side;
                out.achieved_diff = diff;
                out.rtol = opts.rtol;
                out.schedule = used;
                return out;
            }
        }
        prev_extrap = std::move(extrap);
        prev_shot = std::move(cur_shot);
    }
    std::ostringstream os;
    os << "positive_solution: schedule did not converge (last window diff " << last_diff
       << ", rtol " << opts.rtol << ", schedule size " << c_nodes.size() << ")";
    throw NumericalError(os.str());
}

GreenKernel greens_function(const Potential& q, const PrincipalOptions& opts) {
    const Grid& grid = q.grid;
    if (!(grid.a < 0.0 && grid.b > 0.0))
        throw ValidationError("greens_function: grid must straddle 0");

    const double extent = 0.95 * std::min(-grid.a, grid.b);
    std::vector<double> Ls = {0.4 * extent, 0.6 * extent, 0.8 * extent, extent};
    SpectralReport rep = lambda0_line(q, Ls, opts.ode);
    if (!(rep.lambda0_estimate > 1e-6))
        throw NumericalError("greens_function: line bottom not strictly positive");

    PrincipalSolution plus = positive_solution(q, Side::plus, opts);
    PrincipalSolution minus = positive_solution(q, Side::minus, opts);
    const QuasiSolution& yp = plus.sol;
    const QuasiSolution& ym = minus.sol;

    const int m = grid.n + 1;
    // W = y+ u- - y- u+ is constant; evaluate where both are normalized
    const int node0 = grid.node_index(0.0, grid.h() / 2.0);
    const double W = yp.y[static_cast<size_t>(node0)] * ym.u[static_cast<size_t>(node0)] -
                     ym.y[static_cast<size_t>(node0)] * yp.u[static_cast<size_t>(node0)];
    const double wscale = std::max({std::abs(yp.u[static_cast<size_t>(node0)]),
                                    std::abs(ym.u[static_cast<size_t>(node0)]), 1.0});
    if (std::abs(W) < 1e-10 * wscale)
        throw NumericalError("greens_function: solutions nearly dependent (Wronskian ~ 0)");

    GreenKernel K;
    K.grid = grid;
    K.y_plus = yp;
    K.y_minus = ym;
    K.wronskian = W;
    K.G.assign(static_cast<size_t>(m) * m, 0.0);
    parallel_for(0, m, [&](int i) {
        const double ypi = yp.y[static_cast<size_t>(i)];
        const double ymi = ym.y[static_cast<size_t>(i)];
        for (int j = 0; j < m; ++j) {
            const double v = j <= i ? ym.y[static_cast<size_t>(j)] * ypi : ymi * yp.y[static_cast<size_t>(j)];
            K.G[static_cast<size_t>(i) * m + j] = v / W;
        }
    });
    return K;
}

std::vector<double> apply_kernel(const GreenKernel& K, const GridFn& f) {
    if (!(f.grid == K.grid)) throw ValidationError("apply_kernel: grid mismatch");
    const int m = K.grid.n + 1;
    const double h = K.grid.h();
    std::vector<double> out(static_cast<size_t>(m), 0.0);
    parallel_for(0, m, [&](int i) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) {
            const double w = (j == 0 || j == m - 1) ? 0.5 : 1.0;
            s += w * K(i, j) * f[j];
        }
        out[static_cast<size_t>(i)] = s * h;
    });
    return out;
}

double wronskian_deviation(const QuasiSolution& s1, const QuasiSolution& s2) {
    if (!(s1.grid == s2.grid)) throw ValidationError("wronskian_deviation: grid mismatch");
    const int lo = std::max(s1.first_node, s2.first_node);
    const int hi = std::min(s1.last_node, s2.last_node);
    if (hi <= lo) throw ValidationError("wronskian_deviation: no common node range");

    // Anchor where the products are smallest (least cancellation); compare
    // against the local product magnitude |y1 u2| + |y2 u1| (W is a
    // difference of those, so constancy is meaningful relative to them).
    auto S = [&](int k) {
        return s1.log_scale[static_cast<size_t>(k)] + s2.log_scale[static_cast<size_t>(k)];
    };
    auto product_log = [&](int k) {
        const double p = std::abs(s1.y[static_cast<size_t>(k)] * s2.u[static_cast<size_t>(k)]) +
                         std::abs(s2.y[static_cast<size_t>(k)] * s1.u[static_cast<size_t>(k)]);
        return std::log(std::max(p, 1e-300)) + S(k);
    };
    int kref = lo;
    for (int k = lo; k <= hi; ++k)
        if (product_log(k) < product_log(kref)) kref = k;
    auto W = [&](int k) {
        return s1.y[static_cast<size_t>(k)] * s2.u[static_cast<size_t>(k)] -
               s2.y[static_cast<size_t>(k)] * s1.u[static_cast<size_t>(k)];
    };
    const double wref = W(kref);
    if (wref == 0.0) return std::numeric_limits<double>::infinity();
    double dev = 0.0;
    for (int k = lo; k <= hi; ++k) {
        const double damp = std::exp(std::min(S(kref) - S(k), 0.0));
        const double anchored = wref * damp;
        const double scale =
            std::abs(s1.y[static_cast<size_t>(k)] * s2.u[static_cast<size_t>(k)]) +
            std::abs(s2.y[static_cast<size_t>(k)] * s1.u[static_cast<size_t>(k)]) + std::abs(anchored);
        dev = std::max(dev, std::abs(W(k) - anchored) / scale);
    }
    return dev;
}

} // namespace miura

#include "miura/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace miura {

namespace {

using cvec = std::vector<std::complex<double>>;

struct Spectral {
    int n;
    double period;
    std::vector<double> k; // signed wavenumbers, Nyquist slot kept at 0 for odd derivatives
    std::vector<bool> dealias_keep;

    Spectral(int n_, double period_) : n(n_), period(period_) {
        if (!is_power_of_two(n)) throw ValidationError("evolution: mode count must be a power of two");
        k.resize(static_cast<size_t>(n));
        dealias_keep.resize(static_cast<size_t>(n));
        const int kept = n / 3; // 2/3 rule on the cubic term
        for (int j = 0; j < n; ++j) {
            const int s = signed_mode(j, n);
            k[static_cast<size_t>(j)] = (j == n / 2) ? 0.0 : 2.0 * M_PI * s / period;
            dealias_keep[static_cast<size_t>(j)] = std::abs(s) <= kept && j != n / 2;
        }
    }

    double k_max() const { return M_PI * n / period; }

    cvec fft(const std::vector<double>& v) const {
        cvec out(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) out[static_cast<size_t>(j)] = v[static_cast<size_t>(j)];
        detail::fft_pow2(out, -1);
        out[static_cast<size_t>(n / 2)] = 0.0; // keep the field real under odd-order phases
        return out;
    }

    std::vector<double> ifft(cvec vhat) const {
        detail::fft_pow2(vhat, +1);
        std::vector<double> out(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) out[static_cast<size_t>(j)] = vhat[static_cast<size_t>(j)].real() / n;
        return out;
    }

    cvec derivative_hat(const cvec& vhat, int order) const {
        cvec out(vhat.size());
        for (int j = 0; j < n; ++j) {
            std::complex<double> ik(0.0, k[static_cast<size_t>(j)]);
            std::complex<double> m = 1.0;
            for (int p = 0; p < order; ++p) m *= ik;
            out[static_cast<size_t>(j)] = m * vhat[static_cast<size_t>(j)];
        }
        return out;
    }

    // N(vhat) = 2 i k (v^3)^hat, dealiased
    cvec nonlinear(const cvec& vhat) const {
        std::vector<double> v = ifft(vhat);
        for (double& x : v) x = x * x * x;
        cvec w(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) w[static_cast<size_t>(j)] = v[static_cast<size_t>(j)];
        detail::fft_pow2(w, -1);
        for (int j = 0; j < n; ++j) {
            if (!dealias_keep[static_cast<size_t>(j)]) {
                w[static_cast<size_t>(j)] = 0.0;
            } else {
                w[static_cast<size_t>(j)] *= std::complex<double>(0.0, 2.0 * k[static_cast<size_t>(j)]);
            }
        }
        return w;
    }

    // one integrating-factor RK4 step on vhat
    void step(cvec& vhat, double dt) const {
        cvec E(static_cast<size_t>(n)), E2(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) {
            const double kj = k[static_cast<size_t>(j)];
            const std::complex<double> phase(0.0, kj * kj * kj * dt / 2.0);
            E[static_cast<size_t>(j)] = std::exp(phase);
            E2[static_cast<size_t>(j)] = std::exp(2.0 * phase);
        }
        const size_t m = vhat.size();
        cvec a(m), b(m), tmp(m);
        const cvec N1 = nonlinear(vhat);
        for (size_t j = 0; j < m; ++j) tmp[j] = E[j] * (vhat[j] + 0.5 * dt * N1[j]);
        const cvec N2 = nonlinear(tmp);
        for (size_t j = 0; j < m; ++j) tmp[j] = E[j] * vhat[j] + 0.5 * dt * N2[j];
        const cvec N3 = nonlinear(tmp);
        for (size_t j = 0; j < m; ++j) tmp[j] = E2[j] * vhat[j] + dt * E[j] * N3[j];
        const cvec N4 = nonlinear(tmp);
        for (size_t j = 0; j < m; ++j)
            vhat[j] = E2[j] * vhat[j] +
                      dt / 6.0 * (E2[j] * N1[j] + 2.0 * E[j] * (N2[j] + N3[j]) + N4[j]);
    }
};

std::vector<double> drop_duplicate(const GridFn& fn) {
    std::vector<double> v(fn.values.begin(), fn.values.end() - 1);
    return v;
}

GridFn with_duplicate(const Grid& g, const std::vector<double>& v) {
    std::vector<double> w = v;
    w.push_back(v[0]);
    return GridFn(g, std::move(w));
}

double bump(double s) { return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

double bump_d1(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    const double c = 1.0 - s * s;
    return bump(s) * (-2.0 * s / (c * c));
}

double bump_d3(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    const double c = 1.0 - s * s;
    const double gp = -2.0 * s / (c * c);
    const double gpp = -2.0 / (c * c) - 8.0 * s * s / (c * c * c);
    const double gppp = -24.0 * s / (c * c * c) - 48.0 * s * s * s / (c * c * c * c);
    return bump(s) * (gppp + 3.0 * gpp * gp + gp * gp * gp);
}

} // namespace

GridFn EvolutionTrace::v_gridfn(int frame) const { return with_duplicate(grid, v_frames[static_cast<size_t>(frame)]); }
GridFn EvolutionTrace::u_gridfn(int frame) const { return with_duplicate(grid, u_frames[static_cast<size_t>(frame)]); }

Potential EvolutionTrace::frame_potential(int frame) const {
    GridFn f = v_gridfn(frame);
    GridFn g = GridFn::zero(grid);
    for (int k = 0; k <= grid.n; ++k) g[k] = f[k] * f[k];
    return Potential(grid, std::move(f), std::move(g), {}, Label{Label::Kind::image_of, 0.0, 0.0});
}

GridFn mkdv_step(const GridFn& v, double dt, const EvolutionOptions& opts) {
    const Spectral sp(v.grid.n, v.grid.b - v.grid.a);
    if (!(dt > 0.0)) throw ValidationError("mkdv_step: dt must be positive");
    if (v.max_abs() > opts.blowup_guard)
        throw NumericalError("mkdv_step: field exceeds the blow-up guard");
    cvec vhat = sp.fft(drop_duplicate(v));
    sp.step(vhat, dt);
    return with_duplicate(v.grid, sp.ifft(vhat));
}

EvolutionTrace evolve(const GridFn& v0, double T, const EvolutionOptions& opts) {
    const Grid& grid = v0.grid;
    const Spectral sp(grid.n, grid.b - grid.a);
    if (!(T > 0.0)) throw ValidationError("evolve: T must be positive");
    if (opts.frame_stride < 1) throw ValidationError("evolve: frame_stride must be >= 1");

    double dt = opts.dt > 0.0 ? opts.dt : 0.4 / sp.k_max();
    const int steps = std::max(1, static_cast<int>(std::ceil(T / dt - 1e-12)));
    dt = T / steps;

    EvolutionTrace trace;
    trace.grid = grid;
    trace.dt_used = dt;
    trace.steps = steps;

    const double h = grid.h();
    auto record = [&](double t, const std::vector<double>& v) {
        cvec vhat = sp.fft(v);
        cvec vx_hat = sp.derivative_hat(vhat, 1);
        std::vector<double> vx = sp.ifft(vx_hat);
        std::vector<double> u(v.size());
        double l2 = 0.0, su = 0.0, mass = 0.0;
        for (size_t j = 0; j < v.size(); ++j) {
            u[j] = vx[j] + v[j] * v[j];
            l2 += v[j] * v[j];
            su += u[j];
            mass += v[j];
        }
        trace.times.push_back(t);
        trace.v_frames.push_back(v);
        trace.u_frames.push_back(std::move(u));
        trace.invariants.push_back({t, l2 * h, su * h, mass * h});
    };

    std::vector<double> v = drop_duplicate(v0);
    record(0.0, v);
    trace.edge_max_abs = std::abs(v[0]);

    cvec vhat = sp.fft(v);
    for (int s = 1; s <= steps; ++s) {
        sp.step(vhat, dt);
        v = sp.ifft(vhat);
        const double t = s * dt;
        double sup = 0.0;
        for (double x : v) sup = std::max(sup, std::abs(x));
        if (sup > opts.blowup_guard) {
            std::ostringstream os;
            os << "evolve: blow-up guard tripped at t=" << t << " (sup |v| = " << sup << ")";
            throw NumericalError(os.str());
        }
        trace.edge_max_abs = std::max(trace.edge_max_abs, std::abs(v[0]));
        if (s % opts.frame_stride == 0 || s == steps) record(t, v);
    }
    trace.edge_ok = trace.edge_max_abs <= opts.edge_tolerance;
    return trace;
}

double SpaceTimeTestFn::phi(double t, double x) const { return bump((t - t0) / st) * bump((x - x0) / sx); }
double SpaceTimeTestFn::phi_t(double t, double x) const {
    return bump_d1((t - t0) / st) / st * bump((x - x0) / sx);
}
double SpaceTimeTestFn::phi_x(double t, double x) const {
    return bump((t - t0) / st) * bump_d1((x - x0) / sx) / sx;
}
double SpaceTimeTestFn::phi_xxx(double t, double x) const {
    return bump((t - t0) / st) * bump_d3((x - x0) / sx) / (sx * sx * sx);
}

std::vector<WeakResidual> weak_kdv_residual(const EvolutionTrace& trace,
                                            const std::vector<SpaceTimeTestFn>& basket) {
    if (trace.times.size() < 2) throw ValidationError("weak_kdv_residual: trace needs >= 2 frames");
    const Grid& grid = trace.grid;
    const double h = grid.h();
    for (const auto& tf : basket) {
        if (tf.t0 - tf.st < trace.times.front() || tf.t0 + tf.st > trace.times.back() ||
            tf.x0 - tf.sx < grid.a || tf.x0 + tf.sx > grid.b)
            throw ValidationError("weak_kdv_residual: test-function support overflows the window");
    }
    std::vector<WeakResidual> out(basket.size());
    for (size_t b = 0; b < basket.size(); ++b) {
        const auto& tf = basket[b];
        double raw = 0.0, norm = 0.0;
        for (size_t i = 0; i < trace.times.size(); ++i) {
            const double t = trace.times[i];
            double wt;
            if (i == 0)
                wt = 0.5 * (trace.times[1] - trace.times[0]);
            else if (i + 1 == trace.times.size())
                wt = 0.5 * (trace.times[i] - trace.times[i - 1]);
            else
                wt = 0.5 * (trace.times[i + 1] - trace.times[i - 1]);
            const auto& u = trace.u_frames[i];
            for (int j = 0; j < grid.n; ++j) {
                const double x = grid.node(j);
                const double uv = u[static_cast<size_t>(j)];
                const double pt = tf.phi_t(t, x), pxxx = tf.phi_xxx(t, x), px = tf.phi_x(t, x);
                raw += wt * h * (-uv * pt - uv * pxxx + 3.0 * uv * uv * px);
                norm += wt * h * (std::abs(uv * pt) + std::abs(uv * pxxx) + 3.0 * uv * uv * std::abs(px));
            }
        }
        out[b].raw = raw;
        out[b].normalizer = norm;
        out[b].relative = norm > 0.0 ? std::abs(raw) / norm : 0.0;
    }
    return out;
}

namespace {

// sup |KdV(B(v)) - (mKdV(v))_x - 2 v mKdV(v)| / scale for one time sample
void identity_residual_sample(const Spectral& sp, const std::vector<double>& v,
                              const std::vector<double>& vt, double& sup_res, double& sup_scale) {
    const cvec vhat = sp.fft(v);
    const std::vector<double> vx = sp.ifft(sp.derivative_hat(vhat, 1));
    const std::vector<double> vxxx = sp.ifft(sp.derivative_hat(vhat, 3));
    cvec vthat = sp.fft(vt);
    const std::vector<double> vtx = sp.ifft(sp.derivative_hat(vthat, 1));

    const size_t n = v.size();
    std::vector<double> u(n), m(n);
    for (size_t j = 0; j < n; ++j) {
        u[j] = vx[j] + v[j] * v[j];
        m[j] = vt[j] - 6.0 * v[j] * v[j] * vx[j] + vxxx[j];
    }
    const cvec uhat = sp.fft(u);
    const std::vector<double> ux = sp.ifft(sp.derivative_hat(uhat, 1));
    const std::vector<double> uxxx = sp.ifft(sp.derivative_hat(uhat, 3));
    const std::vector<double> mx = sp.ifft(sp.derivative_hat(sp.fft(m), 1));

    for (size_t j = 0; j < n; ++j) {
        const double ut = vtx[j] + 2.0 * v[j] * vt[j];
        const double kdv_side = ut - 6.0 * u[j] * ux[j] + uxxx[j];
        const double mkdv_side = mx[j] + 2.0 * v[j] * m[j];
        sup_res = std::max(sup_res, std::abs(kdv_side - mkdv_side));
        sup_scale = std::max({sup_scale, std::abs(kdv_side), std::abs(mkdv_side)});
    }
}

} // namespace

double miura_identity_residual(const Grid& grid, const std::vector<double>& times,
                               const std::function<double(double, double)>& v,
                               const std::function<double(double, double)>& v_t) {
    const Spectral sp(grid.n, grid.b - grid.a);
    double sup_res = 0.0, sup_scale = 0.0;
    std::vector<double> vs(static_cast<size_t>(grid.n)), vts(static_cast<size_t>(grid.n));
    for (double t : times) {
        for (int j = 0; j < grid.n; ++j) {
            vs[static_cast<size_t>(j)] = v(t, grid.node(j));
            vts[static_cast<size_t>(j)] = v_t(t, grid.node(j));
        }
        identity_residual_sample(sp, vs, vts, sup_res, sup_scale);
    }
    return sup_res / std::max(sup_scale, 1e-300);
}

double miura_identity_residual(const EvolutionTrace& trace) {
    if (trace.times.size() < 5)
        throw ValidationError("miura_identity_residual: need >= 5 frames for time differences");
    const Spectral sp(trace.grid.n, trace.grid.b - trace.grid.a);
    const double dt = trace.times[1] - trace.times[0];
    double sup_res = 0.0, sup_scale = 0.0;
    std::vector<double> vt(static_cast<size_t>(trace.grid.n));
    for (size_t i = 2; i + 2 < trace.times.size(); ++i) {
        const auto& m2 = trace.v_frames[i - 2];
        const auto& m1 = trace.v_frames[i - 1];
        const auto& p1 = trace.v_frames[i + 1];
        const auto& p2 = trace.v_frames[i + 2];
        for (size_t j = 0; j < vt.size(); ++j)
            vt[j] = (m2[j] - 8.0 * m1[j] + 8.0 * p1[j] - p2[j]) / (12.0 * dt);
        identity_residual_sample(sp, trace.v_frames[i], vt, sup_res, sup_scale);
    }
    return sup_res / std::max(sup_scale, 1e-300);
}

ConvergenceProbe convergence_probe(const GridFn& v0, double T, const std::vector<double>& dts) {
    if (dts.size() < 3) throw ValidationError("convergence_probe: need at least three resolutions");
    ConvergenceProbe out;
    out.dts = dts;
    std::vector<std::vector<double>> finals;
    EvolutionOptions opts;
    opts.frame_stride = 1 << 28; // final frame only
    for (double dt : dts) {
        opts.dt = dt;
        finals.push_back(evolve(v0, T, opts).v_frames.back());
    }
    const double h = v0.grid.h();
    double scale = 0.0;
    for (double x : finals.back()) scale = std::max(scale, std::abs(x));
    for (size_t i = 0; i + 1 < finals.size(); ++i) {
        double e2 = 0.0;
        for (size_t j = 0; j < finals[i].size(); ++j) {
            const double d = finals[i][j] - finals[i + 1][j];
            e2 += d * d;
        }
        out.errors.push_back(std::sqrt(e2 * h));
    }
    if (scale < 1e-300) {
        out.degenerate = true;
        return out;
    }
    for (size_t i = 0; i + 1 < out.errors.size(); ++i) {
        if (!(out.errors[i + 1] < out.errors[i])) out.monotone = false;
        if (out.errors[i + 1] > 0.0 && out.errors[i] > 0.0)
            out.orders.push_back(std::log(out.errors[i] / out.errors[i + 1]) /
                                 std::log(dts[i] / dts[i + 1]));
    }
    return out;
}

ConvergenceProbe convergence_probe_spatial(const std::function<double(double)>& v0, double period,
                                           double T, const std::vector<int>& modes_list) {
    if (modes_list.size() < 2)
        throw ValidationError("convergence_probe_spatial: need at least two resolutions");
    ConvergenceProbe out;
    std::vector<std::vector<double>> finals;
    std::vector<int> ns;
    for (int n : modes_list) {
        Grid g(-period / 2.0, period / 2.0, n);
        GridFn f = GridFn::sample(g, v0);
        EvolutionOptions opts;
        opts.frame_stride = 1 << 28;
        opts.dt = 0.4 / (M_PI * modes_list.back() / period); // same dt at every resolution
        finals.push_back(evolve(f, T, opts).v_frames.back());
        ns.push_back(n);
    }
    for (size_t i = 0; i + 1 < finals.size(); ++i) {
        const int stride = ns[i + 1] / ns[i];
        double sup = 0.0;
        for (size_t j = 0; j < finals[i].size(); ++j)
            sup = std::max(sup, std::abs(finals[i][j] - finals[i + 1][j * static_cast<size_t>(stride)]));
        out.spatial_errors.push_back(sup);
    }
    return out;
}

} // namespace miura

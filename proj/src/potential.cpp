#include "miura/potential.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace miura {

namespace {

double smoothstep(double t) { return t <= 0 ? 0.0 : t >= 1 ? 1.0 : t * t * (3.0 - 2.0 * t); }
double smoothstep_prime(double t) { return t <= 0 || t >= 1 ? 0.0 : 6.0 * t * (1.0 - t); }

} // namespace

Potential::Potential(const Grid& grid_, GridFn f_, GridFn g_, std::vector<Atom> atoms_, Label label_)
    : grid(grid_), f(std::move(f_)), g(std::move(g_)), atoms(std::move(atoms_)), label(label_) {
    if (!(f.grid == grid) || !(g.grid == grid))
        throw ValidationError("Potential: f and g must share the grid");
    const double tol = grid.h() / 10.0;
    double prev = -std::numeric_limits<double>::infinity();
    atom_nodes.reserve(atoms.size());
    for (size_t i = 0; i < atoms.size(); ++i) {
        Atom& at = atoms[i];
        if (!std::isfinite(at.w) || at.w == 0.0) {
            std::ostringstream os;
            os << "Potential: atom " << i << " has invalid weight";
            throw ValidationError(os.str());
        }
        const int k = grid.node_index(at.x, tol);
        if (k <= 0 || k >= grid.n) {
            std::ostringstream os;
            os << "Potential: atom " << i << " at x=" << at.x << " is not an interior grid node";
            throw ValidationError(os.str());
        }
        at.x = grid.node(k); // snap exactly
        if (!(at.x > prev)) {
            std::ostringstream os;
            os << "Potential: atom " << i << " locations must be strictly increasing";
            throw ValidationError(os.str());
        }
        prev = at.x;
        atom_nodes.push_back(k);
    }
}

double Antiderivative::right_value(int k) const {
    double v = Q[k];
    for (size_t i = 0; i < jump_nodes.size(); ++i)
        if (jump_nodes[i] == k) v += jumps[i].w;
    return v;
}

Potential make_zero(const Grid& grid) {
    return Potential(grid, GridFn::zero(grid), GridFn::zero(grid), {}, Label{Label::Kind::constant, 0.0, 0.0});
}

Potential make_constant(double c, const Grid& grid) {
    GridFn g = GridFn::sample(grid, [c](double) { return c; });
    return Potential(grid, GridFn::zero(grid), std::move(g), {}, Label{Label::Kind::constant, c, 0.0});
}

Potential make_square_well(double a_half, double b_param, const Grid& grid) {
    if (!(a_half > 0)) throw ValidationError("make_square_well: a_half must be positive");
    if (b_param < 0) throw ValidationError("make_square_well: b_param must be nonnegative");
    const double h = grid.h();
    const int k_lo = grid.node_index(-a_half, h / 2 + 1e-12);
    const int k_hi = grid.node_index(a_half, h / 2 + 1e-12);
    if (k_lo <= 0 || k_hi >= grid.n || k_lo >= k_hi)
        throw ValidationError("make_square_well: well wider than grid");
    const double b2 = b_param * b_param;
    GridFn g = GridFn::zero(grid);
    for (int k = k_lo; k <= k_hi; ++k) g[k] = b2;
    g[k_lo] = 0.5 * b2; // half-height at the jump nodes
    g[k_hi] = 0.5 * b2;
    return Potential(grid, GridFn::zero(grid), std::move(g), {},
                     Label{Label::Kind::square_well, a_half, b_param});
}

Potential make_delta(double lambda, double location, const Grid& grid) {
    if (!(lambda > 0)) throw ValidationError("make_delta: lambda must be positive");
    const int k = grid.node_index(location, grid.h() / 10.0);
    if (k <= 0 || k >= grid.n)
        throw ValidationError("make_delta: location must be an interior grid node");
    return Potential(grid, GridFn::zero(grid), GridFn::zero(grid), {Atom{grid.node(k), lambda}},
                     Label{Label::Kind::delta, lambda, 0.0});
}

double w_profile_y(double x) {
    if (x <= -1) return 1.0;
    if (x >= 1) return x;
    // quintic Hermite blend: y(-1)=1, y'(-1)=y''(-1)=0; y(1)=1, y'(1)=1, y''(1)=0
    const double s = x;
    return 11.0 / 16 + s * (-7.0 / 16 + s * (3.0 / 8 + s * (5.0 / 8 + s * (-1.0 / 16 + s * (-3.0 / 16)))));
}

double w_profile_ypp(double x) {
    if (x <= -1 || x >= 1) return 0.0;
    const double s = x;
    return 0.75 * (1.0 - s * s) * (1.0 + 5.0 * s);
}

Potential make_w_eps(double eps, const Grid& grid) {
    if (!(eps > 0) || !(eps < 1)) throw ValidationError("make_w_eps: eps must be in (0,1)");
    if (!(grid.a < -1.0 / eps) || !(grid.b > 1.0 / eps))
        throw ValidationError("make_w_eps: support [-1/eps, 1/eps] overflows the grid");
    GridFn g = GridFn::sample(grid, [eps](double x) {
        const double s = eps * x;
        return eps * eps * w_profile_ypp(s) / w_profile_y(s);
    });
    return Potential(grid, GridFn::zero(grid), std::move(g), {}, Label{});
}

Potential make_well_perturbation(const Potential& q, double eps) {
    if (!(eps > 0) || !(eps < 1)) throw ValidationError("make_well_perturbation: eps must be in (0,1)");
    double a_sup = 0.0;
    for (int k = 0; k <= q.grid.n; ++k)
        if (q.f[k] != 0.0 || q.g[k] != 0.0) a_sup = std::max(a_sup, std::abs(q.grid.node(k)));
    for (const Atom& at : q.atoms) a_sup = std::max(a_sup, std::abs(at.x));
    const double center = 2.0 * a_sup + 2.0 / eps;
    const double half = 0.5 / eps;
    const double h = q.grid.h();
    const int k_lo = q.grid.node_index(center - half, h / 2 + 1e-12);
    const int k_hi = q.grid.node_index(center + half, h / 2 + 1e-12);
    if (k_lo <= 0 || k_hi < 0 || k_hi >= q.grid.n)
        throw ValidationError("make_well_perturbation: grid too short to place the well");
    GridFn g = q.g;
    for (int k = k_lo; k <= k_hi; ++k) g[k] -= eps;
    g[k_lo] += 0.5 * eps;
    g[k_hi] += 0.5 * eps;
    return Potential(q.grid, q.f, std::move(g), q.atoms, Label{});
}

Potential add(const Potential& p, const Potential& q) {
    if (!(p.grid == q.grid)) throw ValidationError("add: potentials must share the grid");
    GridFn f = p.f, g = p.g;
    for (int k = 0; k <= p.grid.n; ++k) {
        f[k] += q.f[k];
        g[k] += q.g[k];
    }
    std::map<int, double> merged;
    for (size_t i = 0; i < p.atoms.size(); ++i) merged[p.atom_nodes[i]] += p.atoms[i].w;
    for (size_t i = 0; i < q.atoms.size(); ++i) merged[q.atom_nodes[i]] += q.atoms[i].w;
    std::vector<Atom> atoms;
    for (auto [k, w] : merged)
        if (w != 0.0) atoms.push_back(Atom{p.grid.node(k), w});
    return Potential(p.grid, std::move(f), std::move(g), std::move(atoms), Label{});
}

Potential scale(const Potential& q, double c) {
    GridFn f = q.f, g = q.g;
    for (int k = 0; k <= q.grid.n; ++k) {
        f[k] *= c;
        g[k] *= c;
    }
    std::vector<Atom> atoms;
    if (c != 0.0)
        for (const Atom& at : q.atoms) atoms.push_back(Atom{at.x, c * at.w});
    return Potential(q.grid, std::move(f), std::move(g), std::move(atoms), Label{});
}

Antiderivative antiderivative(const Potential& q) {
    GridFn G = cumulative_quadrature(q.g);
    std::vector<double> Qv(static_cast<size_t>(q.grid.n + 1));
    size_t next_atom = 0;
    double atom_sum = 0.0;
    for (int k = 0; k <= q.grid.n; ++k) {
        // left-continuous: the atom at node k is not yet included at node k
        Qv[static_cast<size_t>(k)] = q.f[k] + G[k] + atom_sum;
        if (next_atom < q.atoms.size() && q.atom_nodes[next_atom] == k) {
            atom_sum += q.atoms[next_atom].w;
            ++next_atom;
        }
    }
    return Antiderivative{q.grid, GridFn(q.grid, std::move(Qv)), q.atoms, q.atom_nodes};
}

std::pair<double, double> plateau_cutoff(double x, double s) {
    const double ax = std::abs(x);
    if (ax <= s) return {1.0, 0.0};
    if (ax >= s + 1.0) return {0.0, 0.0};
    const double t = ax - s;
    const double sign = x >= 0 ? 1.0 : -1.0;
    return {1.0 - smoothstep(t), -sign * smoothstep_prime(t)};
}

namespace {

double cutoff_pairing(const Potential& q, double s) {
    // (q, chi_s) = -(f, chi_s') + (g, chi_s) + sum_i w_i chi_s(x_i)
    GridFn integrand = GridFn::zero(q.grid);
    for (int k = 0; k <= q.grid.n; ++k) {
        auto [chi, dchi] = plateau_cutoff(q.grid.node(k), s);
        integrand[k] = -q.f[k] * dchi + q.g[k] * chi;
    }
    double v = quadrature(integrand);
    for (const Atom& at : q.atoms) v += at.w * plateau_cutoff(at.x, s).first;
    return v;
}

} // namespace

SpecialIntegral special_integral(const Potential& q) {
    if (!(q.grid.a < 0.0 && q.grid.b > 0.0))
        throw ValidationError("special_integral: grid must straddle 0 (cutoffs are centered there)");
    const double s_max = std::min(-q.grid.a, q.grid.b) - 1.0;
    if (!(s_max > 0)) throw ValidationError("special_integral: grid too short for any cutoff");
    const int m = 8;
    SpecialIntegral out;
    for (int j = 1; j <= m; ++j) {
        const double s = s_max * j / m;
        out.trace.emplace_back(s, cutoff_pairing(q, s));
    }
    out.value = out.trace.back().second;
    const double prev = out.trace[out.trace.size() - 2].second;
    out.exists = std::abs(out.value - prev) <= 1e-6 * std::max(1.0, std::abs(out.value));
    return out;
}

double cesaro_diagnostic(const Antiderivative& A, const std::vector<double>& T_values) {
    const Grid& grid = A.grid;
    const int k0 = grid.node_index(0.0, grid.h() / 2 + 1e-12);
    if (k0 < 0) throw ValidationError("cesaro_diagnostic: grid has no node at 0");
    // cell integrals with the correct one-sided value right of each jump
    std::vector<double> right(A.Q.values);
    for (size_t i = 0; i < A.jump_nodes.size(); ++i)
        right[static_cast<size_t>(A.jump_nodes[i])] += A.jumps[i].w;
    const double h = grid.h();
    double sup = 0.0;
    for (double T : T_values) {
        const int kT = grid.node_index(T, h / 2 + 1e-12);
        if (kT < 0) throw ValidationError("cesaro_diagnostic: T outside grid or off-node");
        if (kT == k0) continue;
        double integral = 0.0;
        if (kT > k0)
            for (int k = k0; k < kT; ++k) integral += 0.5 * h * (right[static_cast<size_t>(k)] + A.Q[k + 1]);
        else
            for (int k = kT; k < k0; ++k) integral -= 0.5 * h * (right[static_cast<size_t>(k)] + A.Q[k + 1]);
        sup = std::max(sup, std::abs(integral / grid.node(kT)));
    }
    return sup;
}

std::pair<GridFn, GridFn> fourier_split(const GridFn& q_samples, int cutoff_width) {
    if (cutoff_width < 1) throw ValidationError("fourier_split: cutoff_width must be positive");
    const Grid& grid = q_samples.grid;
    const int n = grid.n;
    auto qhat = spectral_transform(q_samples);
    const double period = grid.b - grid.a;
    std::vector<std::complex<double>> fhat(qhat.size()), ghat(qhat.size());
    for (int j = 0; j < n; ++j) {
        const int s = signed_mode(j, n);
        const std::complex<double> ik(0.0, 2.0 * M_PI * s / period);
        // mean and Nyquist always go to g; the identity g = q - (ik) f is exact
        if (std::abs(s) <= cutoff_width || s == 0 || s == n / 2 || s == -n / 2) {
            fhat[static_cast<size_t>(j)] = 0.0;
        } else {
            fhat[static_cast<size_t>(j)] = qhat[static_cast<size_t>(j)] / ik;
        }
        ghat[static_cast<size_t>(j)] = qhat[static_cast<size_t>(j)] - ik * fhat[static_cast<size_t>(j)];
    }
    return {inverse_spectral_transform(grid, fhat), inverse_spectral_transform(grid, ghat)};
}

double quadratic_form(const Potential& q, const GridFn& phi, const GridFn& phi_prime) {
    if (!(phi.grid == q.grid) || !(phi_prime.grid == q.grid))
        throw ValidationError("quadratic_form: phi must live on the potential's grid");
    GridFn integrand = GridFn::zero(q.grid);
    for (int k = 0; k <= q.grid.n; ++k) {
        const double p = phi[k], dp = phi_prime[k];
        // int (phi'^2 + g phi^2 - 2 f phi phi')   [(f', phi^2) = -(f, 2 phi phi')]
        integrand[k] = dp * dp + q.g[k] * p * p - 2.0 * q.f[k] * p * dp;
    }
    double v = quadrature(integrand);
    for (size_t i = 0; i < q.atoms.size(); ++i) {
        const double p = phi[q.atom_nodes[i]];
        v += q.atoms[i].w * p * p;
    }
    return v;
}

} // namespace miura

#pragma once

#include <optional>
#include <vector>

#include "miura/potential.hpp"

namespace miura {

struct IntegrateOptions {
    int substeps = 4;                 // RK4 substeps per grid cell
    double rescale_threshold = 1e120; // log-rescale when |y| or |u| passes this
    bool record_trail = true;         // keep substep samples for zero counting
};

/// Solution samples of the first-order system
///     y' = Q y + u,   u' = -(Q^2 + lambda) y - Q u
/// which is -y'' + q y = lambda y with the quasi-derivative u = y' - Q y.
/// Node values carry a per-node log scale: the true solution at node k is
/// y[k] * exp(log_scale[k]); rescaling keeps exponentially growing shots
/// representable.
struct QuasiSolution {
    Grid grid;
    double lambda = 0.0;
    std::vector<double> y, u, log_scale;
    bool rescaled = false;
    int first_node = 0, last_node = 0; // populated node range (inclusive)

    // substep trail in traversal order, for oscillation counting
    std::vector<double> trail_x, trail_y, trail_u;

    double y_true(int k) const;
    double u_true(int k) const;
    /// y'(x_k) = u + Q y with the right-continuous Q value at node k.
    double slope(int k, const Antiderivative& A) const;
};

/// Fixed-substep RK4 shot from x0 to x1 (either direction); x0, x1 must be
/// grid nodes and (y0, u0) != (0, 0). Q is reconstructed piecewise-linearly
/// in f, cumulative-trapezoid in g, with exact one-sided atom jumps, so the
/// right-hand side is smooth inside every cell.
QuasiSolution integrate(const Potential& q, double lambda, double x0, double y0, double u0,
                        double x1, const IntegrateOptions& opts = {});

/// Shot from an interior node integrated to both grid ends.
QuasiSolution shoot_full(const Potential& q, double lambda, int node, double y0, double u0,
                         const IntegrateOptions& opts = {});

/// Sign changes of y in the open interval (x_lo, x_hi), refined on the
/// substep trail. Throws NumericalError when a zero is ambiguous (|y| and
/// |u| both below tolerance).
int count_zeros(const QuasiSolution& sol, double x_lo, double x_hi);

enum class Trichotomy { identically_zero, sign_change_up, sign_change_down };

/// Behavior of y near a zero at node x0, classified by the sign of u there.
Trichotomy trichotomy_probe(const QuasiSolution& sol, double x0);

/// Lowest Dirichlet eigenvalue of -d^2/dx^2 + q on (xa, xb), by bisection on
/// the first-zero transition of the shot y(xa)=0, u(xa)=1. Absolute
/// tolerance 1e-10 in lambda.
double dirichlet_lambda0(const Potential& q, double xa, double xb, const IntegrateOptions& opts = {});

enum class Verdict { certified_nonneg_up_to_truncation, negative_witness, undetermined };

const char* to_string(Verdict v);

struct SpectralReport {
    std::vector<double> L_values;
    std::vector<double> lambda0_of_L;
    double lambda0_estimate = 0.0;
    /// 1/L^2 Richardson fit through the last two interval values.
    double tail_extrapolation = 0.0;
    Verdict nonneg = Verdict::undetermined;
    std::optional<std::pair<double, double>> witness_interval;
    std::optional<double> witness_lambda0;
};

/// Dirichlet bottoms over the exhausting intervals (-L, L), L in L_values
/// (increasing). The estimate is the last value; the verdict flags any
/// interval bottom below -1e-8.
SpectralReport lambda0_line(const Potential& q, const std::vector<double>& L_values,
                            const IntegrateOptions& opts = {});

struct PositivityResult {
    Verdict verdict = Verdict::undetermined;
    double tested_halfwidth = 0.0;
    std::optional<std::pair<double, double>> witness_interval;
};

/// Disconjugacy probe at lambda = 0 on the whole grid: the shot from the
/// left edge must stay zero-free. The certificate is explicitly relative to
/// the tested truncation.
PositivityResult is_nonnegative(const Potential& q, const IntegrateOptions& opts = {});

enum class Side { plus, minus };

struct PrincipalOptions {
    std::vector<double> c_schedule; // empty: {1/4, 1/2, 3/4, 1} of the side extent
    double rtol = 1e-6;
    double window_fraction = 0.25; // observation window half-width as a fraction of extent
    IntegrateOptions ode;
};

struct PrincipalSolution {
    QuasiSolution sol; // normalized y(0) = 1, strictly positive on the grid
    Side side = Side::plus;
    double achieved_diff = 0.0;
    double rtol = 0.0;
    std::vector<double> schedule;
};

/// Principal (minimal-growth) solution at +infinity (side=plus) or
/// -infinity, as the limit of Dirichlet shots y(0)=1, y(c)=0 over the
/// c-schedule. Consecutive shots differ by a multiple of one fixed solution,
/// so the limit is taken by rank-one extrapolation anchored at the far grid
/// edge; convergence of successive extrapolants is checked on the
/// observation window at rtol.
PrincipalSolution positive_solution(const Potential& q, Side side, const PrincipalOptions& opts = {});

struct GreenKernel {
    Grid grid;
    std::vector<double> G; // (n+1)^2 row-major; G[i*(n+1)+j] = G(x_i, x_j)
    QuasiSolution y_plus, y_minus;
    double wronskian = 0.0;

    double operator()(int i, int j) const { return G[static_cast<size_t>(i) * (grid.n + 1) + j]; }
};

/// G(x,y) = y_minus(min) y_plus(max) / W from the two principal solutions;
/// requires a strictly positive line bottom (checked internally).
GreenKernel greens_function(const Potential& q, const PrincipalOptions& opts = {});

/// Apply the kernel with trapezoid weights: (G f)(x_i).
std::vector<double> apply_kernel(const GreenKernel& K, const GridFn& f);

/// Max relative deviation of y1 u2 - y2 u1 along the common node range
/// (log-scale aware).
double wronskian_deviation(const QuasiSolution& s1, const QuasiSolution& s2);

} // namespace miura

#pragma once

#include <functional>
#include <vector>

#include "miura/grid.hpp"
#include "miura/potential.hpp"

namespace miura {

/// mKdV convention: mKdV(v) = v_t - 6 v^2 v_x + v_xxx, i.e. the flow is
/// v_t = -v_xxx + 6 v^2 v_x. KdV(u) = u_t - 6 u u_x + u_xxx.
struct EvolutionOptions {
    double dt = 0.0; // <= 0 picks the default 0.4 / k_max
    int frame_stride = 1;
    double blowup_guard = 1e6;
    double edge_tolerance = 1e-12; // the field must stay below this at the box edge
};

struct EvolutionTrace {
    Grid grid; // periodic box; frames hold the n distinct samples
    std::vector<double> times;
    std::vector<std::vector<double>> v_frames;
    std::vector<std::vector<double>> u_frames; // u = v_x + v^2, v_x spectral

    struct InvariantRow {
        double time;
        double l2sq_v;    // ||v||^2
        double special_u; // box integral of u; equals ||v||^2 up to boundary terms
        double mass_v;    // box integral of v
    };
    std::vector<InvariantRow> invariants;

    double dt_used = 0.0;
    int steps = 0;
    double edge_max_abs = 0.0;
    bool edge_ok = true;

    GridFn v_gridfn(int frame) const;
    GridFn u_gridfn(int frame) const;
    /// The frame's push-forward as a Potential: f = v, g = v^2, no atoms.
    Potential frame_potential(int frame) const;
};

/// One integrating-factor RK4 step: the linear phase exp(i k^3 dt) is exact
/// in transform space, the nonlinearity 2 (v^3)_x is evaluated
/// pseudo-spectrally with 2/3-rule dealiasing.
GridFn mkdv_step(const GridFn& v, double dt, const EvolutionOptions& opts = {});

EvolutionTrace evolve(const GridFn& v0, double T, const EvolutionOptions& opts = {});

/// Product bump test function exp(-1/(1-s^2)) in t and x with hand-coded
/// first and third derivatives; support (t0 +- st) x (x0 +- sx).
struct SpaceTimeTestFn {
    double t0, st, x0, sx;
    double phi(double t, double x) const;
    double phi_t(double t, double x) const;
    double phi_x(double t, double x) const;
    double phi_xxx(double t, double x) const;
};

struct WeakResidual {
    double raw = 0.0;        // integral of -u phi_t - u phi_xxx + 3 u^2 phi_x
    double normalizer = 0.0; // integral of |u phi_t| + |u phi_xxx| + 3 u^2 |phi_x|
    double relative = 0.0;
};

/// Space-time trapezoid quadrature of the weak KdV form per test function.
/// Test-function supports must lie inside the trace's space-time window.
std::vector<WeakResidual> weak_kdv_residual(const EvolutionTrace& trace,
                                            const std::vector<SpaceTimeTestFn>& basket);

/// Sup-norm residual of KdV(B(v)) - (mKdV(v))_x - 2 v mKdV(v), relative to
/// the scale of the two sides; x-derivatives spectral, v and v_t sampled
/// from the supplied callables.
double miura_identity_residual(const Grid& grid, const std::vector<double>& times,
                               const std::function<double(double, double)>& v,
                               const std::function<double(double, double)>& v_t);

/// Same residual on an evolved trace; v_t is taken from fourth-order central
/// differences of the stored frames (interior frames only), so the value
/// tracks the scheme and frame-spacing error and shrinks under refinement.
double miura_identity_residual(const EvolutionTrace& trace);

struct ConvergenceProbe {
    std::vector<double> dts;
    std::vector<double> errors; // ||v_{dt_i}(T) - v_{dt_{i+1}}(T)||_L2
    std::vector<double> orders;
    std::vector<double> spatial_errors; // successive mode-doubling differences
    bool degenerate = false;            // identically zero data: exact at all resolutions
    bool monotone = true;
};

/// Richardson order estimate in dt at fixed spatial resolution.
ConvergenceProbe convergence_probe(const GridFn& v0, double T, const std::vector<double>& dts);

/// Spatial refinement probe: evolves the sampled initial data at each mode
/// count and compares successive restrictions.
ConvergenceProbe convergence_probe_spatial(const std::function<double(double)>& v0, double period,
                                           double T, const std::vector<int>& modes_list);

} // namespace miura
